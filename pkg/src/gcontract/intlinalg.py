"""Sparse exact integer matrices, Smith normal form, and chain-complex homology.

Everything here runs over Python integers (arbitrary precision); there is no
floating point and no modular shortcut.  The Smith normal form uses the pivot
rule: smallest absolute value first, Markowitz fill-in as tie-break, with a
fast path for unit pivots (the overwhelmingly common case for boundary
matrices of the complexes built elsewhere in this package).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional


class LinalgError(ValueError):
    pass


class SparseIntMatrix:
    """Row-major sparse integer matrix.  No zero entries are stored."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Optional[dict[int, dict[int, int]]] = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, int]] = {}
        if rows:
            for r, row in rows.items():
                clean = {c: v for c, v in row.items() if v}
                if clean:
                    if not 0 <= r < nrows:
                        raise LinalgError(f"row index {r} out of range")
                    for c in clean:
                        if not 0 <= c < ncols:
                            raise LinalgError(f"column index {c} out of range")
                    self.rows[r] = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable[tuple[int, int, int]]) -> "SparseIntMatrix":
        rows: dict[int, dict[int, int]] = {}
        for r, c, v in entries:
            if v:
                row = rows.setdefault(r, {})
                row[c] = row.get(c, 0) + v
        return cls(nrows, ncols, rows)

    @classmethod
    def from_dense(cls, data: list[list[int]]) -> "SparseIntMatrix":
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        return cls.from_entries(nrows, ncols, ((r, c, v) for r, row in enumerate(data) for c, v in enumerate(row)))

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseIntMatrix":
        return cls(nrows, ncols)

    @classmethod
    def from_columns(cls, nrows: int, columns: list[dict[int, int]]) -> "SparseIntMatrix":
        rows: dict[int, dict[int, int]] = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                if v:
                    rows.setdefault(r, {})[c] = v
        return cls(nrows, len(columns), rows)

    # -- accessors -----------------------------------------------------------

    def get(self, r: int, c: int) -> int:
        return self.rows.get(r, {}).get(c, 0)

    def entries(self):
        for r, row in self.rows.items():
            for c, v in row.items():
                yield r, c, v

    def entry_count(self) -> int:
        return sum(len(row) for row in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def copy(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.nrows, self.ncols, {r: dict(row) for r, row in self.rows.items()})

    def column(self, c: int) -> dict[int, int]:
        return {r: row[c] for r, row in self.rows.items() if c in row}

    def columns(self) -> list[dict[int, int]]:
        cols: list[dict[int, int]] = [{} for _ in range(self.ncols)]
        for r, row in self.rows.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    def transpose(self) -> "SparseIntMatrix":
        rows: dict[int, dict[int, int]] = {}
        for r, row in self.rows.items():
            for c, v in row.items():
                rows.setdefault(c, {})[r] = v
        return SparseIntMatrix(self.ncols, self.nrows, rows)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.entries():
            out[r][c] = v
        return out

    def to_coordinate_text(self) -> str:
        """Coordinate-format dump (row col value per line), for debugging."""
        lines = [f"{self.nrows} {self.ncols}"]
        for r in sorted(self.rows):
            row = self.rows[r]
            for c in sorted(row):
                lines.append(f"{r} {c} {row[c]}")
        return "\n".join(lines) + "\n"

    # -- algebra ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __hash__(self):
        raise TypeError("SparseIntMatrix is mutable in spirit; not hashable")

    def __neg__(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.nrows, self.ncols, {r: {c: -v for c, v in row.items()} for r, row in self.rows.items()})

    def __add__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise LinalgError("shape mismatch in addition")
        rows = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            dst = rows.setdefault(r, {})
            for c, v in row.items():
                nv = dst.get(c, 0) + v
                if nv:
                    dst[c] = nv
                else:
                    dst.pop(c, None)
        return SparseIntMatrix(self.nrows, self.ncols, rows)

    def __sub__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        return self + (-other)

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.ncols != other.nrows:
            raise LinalgError(f"shape mismatch in product: {self.ncols} vs {other.nrows}")
        orows = other.rows
        rows: dict[int, dict[int, int]] = {}
        for r, row in self.rows.items():
            acc: dict[int, int] = {}
            for k, v in row.items():
                brow = orows.get(k)
                if not brow:
                    continue
                for c, w in brow.items():
                    acc[c] = acc.get(c, 0) + v * w
            clean = {c: v for c, v in acc.items() if v}
            if clean:
                rows[r] = clean
        return SparseIntMatrix(self.nrows, other.ncols, rows)

    def apply(self, vec: dict[int, int]) -> dict[int, int]:
        """Matrix times sparse column vector."""
        acc: dict[int, int] = {}
        for r, row in self.rows.items():
            s = 0
            for c, v in row.items():
                w = vec.get(c)
                if w:
                    s += v * w
            if s:
                acc[r] = s
        return acc

    def __repr__(self):
        return f"<SparseIntMatrix {self.nrows}x{self.ncols} nnz={self.entry_count()}>"


@dataclass
class SNFResult:
    """U @ A @ V == diag(factors), with U, V unimodular and
    factors a divisibility chain of positive integers."""

    factors: tuple[int, ...]
    shape: tuple[int, int]
    U: Optional[SparseIntMatrix] = None
    V: Optional[SparseIntMatrix] = None
    U_inv: Optional[SparseIntMatrix] = None
    V_inv: Optional[SparseIntMatrix] = None

    def diagonal_matrix(self) -> SparseIntMatrix:
        m, n = self.shape
        return SparseIntMatrix(m, n, {i: {i: d} for i, d in enumerate(self.factors)})

    @property
    def rank(self) -> int:
        return len(self.factors)


# ---------------------------------------------------------------------------
# elimination engine
# ---------------------------------------------------------------------------

_SCAN_LIMIT = 64  # unit-pivot candidates examined per pivot selection


class _Eliminator:
    """Shared machinery for rank / invariant factor / full SNF computation.

    The matrix lives in ``rows`` (dict of dict); ``colrows`` maps a column to
    the set of rows touching it; ``units`` tracks entries of absolute value 1
    in insertion order so pivot selection is deterministic.
    """

    def __init__(self, a: SparseIntMatrix, transforms: bool, only_v: bool = False):
        self.m, self.n = a.nrows, a.ncols
        self.rows: dict[int, dict[int, int]] = {r: dict(row) for r, row in a.rows.items()}
        self.colrows: dict[int, set[int]] = {}
        self.units: dict[tuple[int, int], None] = {}
        for r, row in self.rows.items():
            for c, v in row.items():
                self.colrows.setdefault(c, set()).add(r)
                if v == 1 or v == -1:
                    self.units[(r, c)] = None
        self.transforms = transforms
        self.only_v = only_v and transforms  # kernel computations need V alone
        if transforms:
            # U row-major, U^-1 column-major, V column-major, V^-1 row-major:
            # each elementary operation then touches a single dict.
            if not self.only_v:
                self.U: dict[int, dict[int, int]] = {i: {i: 1} for i in range(self.m)}
                self.Uinv_cols: dict[int, dict[int, int]] = {i: {i: 1} for i in range(self.m)}
            self.V_cols: dict[int, dict[int, int]] = {j: {j: 1} for j in range(self.n)}
            if not self.only_v:
                self.Vinv: dict[int, dict[int, int]] = {j: {j: 1} for j in range(self.n)}
        self.pivots: list[list] = []  # [row, col, value]

    # -- entry bookkeeping --------------------------------------------------

    def _set(self, r: int, c: int, v: int) -> None:
        row = self.rows.get(r)
        if v:
            if row is None:
                row = self.rows[r] = {}
            row[c] = v
            s = self.colrows.get(c)
            if s is None:
                s = self.colrows[c] = set()
            s.add(r)
            if v == 1 or v == -1:
                self.units[(r, c)] = None
            else:
                self.units.pop((r, c), None)
        else:
            if row is not None and c in row:
                del row[c]
                if not row:
                    del self.rows[r]
                s = self.colrows[c]
                s.discard(r)
                if not s:
                    del self.colrows[c]
            self.units.pop((r, c), None)

    # -- elementary operations (matrix + transforms) --------------------------

    @staticmethod
    def _axpy(dst: dict[int, int], src: dict[int, int], q: int) -> None:
        for k, v in src.items():
            nv = dst.get(k, 0) + q * v
            if nv:
                dst[k] = nv
            else:
                dst.pop(k, None)

    def row_axpy(self, dst: int, src: int, q: int) -> None:
        """row[dst] += q * row[src]"""
        srow = self.rows.get(src, {})
        for c, v in list(srow.items()):
            self._set(dst, c, self.rows.get(dst, {}).get(c, 0) + q * v)
        if self.transforms and not self.only_v:
            self._axpy(self.U.setdefault(dst, {}), self.U.get(src, {}), q)
            if not self.U[dst]:
                del self.U[dst]
            # U^-1 <- U^-1 * (I - q e_{dst,src}): col src -= q * col dst
            self._axpy(self.Uinv_cols.setdefault(src, {}), self.Uinv_cols.get(dst, {}), -q)
            if not self.Uinv_cols[src]:
                del self.Uinv_cols[src]

    def row_2x2(self, r1: int, r2: int, a: int, b: int, c: int, d: int) -> None:
        """(row r1, row r2) <- (a r1 + b r2, c r1 + d r2); requires ad - bc = 1."""
        row1 = dict(self.rows.get(r1, {}))
        row2 = dict(self.rows.get(r2, {}))
        cols = set(row1) | set(row2)
        for col in cols:
            x, y = row1.get(col, 0), row2.get(col, 0)
            self._set(r1, col, a * x + b * y)
            self._set(r2, col, c * x + d * y)
        if self.transforms and not self.only_v:
            u1 = self.U.pop(r1, {})
            u2 = self.U.pop(r2, {})
            n1, n2 = {}, {}
            for col in set(u1) | set(u2):
                x, y = u1.get(col, 0), u2.get(col, 0)
                v1, v2 = a * x + b * y, c * x + d * y
                if v1:
                    n1[col] = v1
                if v2:
                    n2[col] = v2
            if n1:
                self.U[r1] = n1
            if n2:
                self.U[r2] = n2
            # U^-1 * E^-1 with E^-1 = [[d, -b], [-c, a]] acting on columns r1, r2
            k1 = self.Uinv_cols.pop(r1, {})
            k2 = self.Uinv_cols.pop(r2, {})
            m1, m2 = {}, {}
            for rr in set(k1) | set(k2):
                x, y = k1.get(rr, 0), k2.get(rr, 0)
                v1, v2 = d * x - c * y, -b * x + a * y
                if v1:
                    m1[rr] = v1
                if v2:
                    m2[rr] = v2
            if m1:
                self.Uinv_cols[r1] = m1
            if m2:
                self.Uinv_cols[r2] = m2

    def col_axpy(self, dst: int, src: int, q: int) -> None:
        """col[dst] += q * col[src]"""
        for r in list(self.colrows.get(src, ())):
            v = self.rows[r][src]
            self._set(r, dst, self.rows.get(r, {}).get(dst, 0) + q * v)
        if self.transforms:
            self._axpy(self.V_cols.setdefault(dst, {}), self.V_cols.get(src, {}), q)
            if not self.V_cols[dst]:
                del self.V_cols[dst]
            if not self.only_v:
                # V^-1 <- (I - q e_{src,dst}) V^-1: row src -= q * row dst
                self._axpy(self.Vinv.setdefault(src, {}), self.Vinv.get(dst, {}), -q)
                if not self.Vinv[src]:
                    del self.Vinv[src]

    def col_2x2(self, c1: int, c2: int, a: int, b: int, c: int, d: int) -> None:
        """(col c1, col c2) <- (a c1 + b c2, c c1 + d c2); requires ad - bc = 1."""
        rows_seen = set(self.colrows.get(c1, ())) | set(self.colrows.get(c2, ()))
        for r in rows_seen:
            row = self.rows.get(r, {})
            x, y = row.get(c1, 0), row.get(c2, 0)
            self._set(r, c1, a * x + b * y)
            self._set(r, c2, c * x + d * y)
        if self.transforms:
            v1 = self.V_cols.pop(c1, {})
            v2 = self.V_cols.pop(c2, {})
            n1, n2 = {}, {}
            for rr in set(v1) | set(v2):
                x, y = v1.get(rr, 0), v2.get(rr, 0)
                w1, w2 = a * x + b * y, c * x + d * y
                if w1:
                    n1[rr] = w1
                if w2:
                    n2[rr] = w2
            if n1:
                self.V_cols[c1] = n1
            if n2:
                self.V_cols[c2] = n2
            if not self.only_v:
                k1 = self.Vinv.pop(c1, {})
                k2 = self.Vinv.pop(c2, {})
                m1, m2 = {}, {}
                for cc in set(k1) | set(k2):
                    x, y = k1.get(cc, 0), k2.get(cc, 0)
                    w1, w2 = d * x - c * y, -b * x + a * y
                    if w1:
                        m1[cc] = w1
                    if w2:
                        m2[cc] = w2
                if m1:
                    self.Vinv[c1] = m1
                if m2:
                    self.Vinv[c2] = m2

    # -- pivoting --------------------------------------------------------------

    def _pick_pivot(self) -> tuple[int, int]:
        # spec'd rule: minimum absolute value, then minimum Markowitz fill
        if self.units:
            best = None
            for idx, (r, c) in enumerate(self.units):
                if idx >= _SCAN_LIMIT and best is not None and best[0] == 0:
                    break
                row = self.rows.get(r)
                if row is None or c not in row:
                    continue
                fill = (len(row) - 1) * (len(self.colrows[c]) - 1)
                cand = (fill, r, c)
                if best is None or cand < best:
                    best = cand
                    if fill == 0 and idx >= _SCAN_LIMIT:
                        break
            if best is not None:
                return best[1], best[2]
        best_full = None
        for r, row in self.rows.items():
            for c, v in row.items():
                fill = (len(row) - 1) * (len(self.colrows[c]) - 1)
                cand = (abs(v), fill, r, c)
                if best_full is None or cand < best_full:
                    best_full = cand
        if best_full is None:
            raise LinalgError("no pivot available")
        return best_full[2], best_full[3]

    def _clear_pivot(self, pr: int, pc: int) -> None:
        while True:
            # clear the pivot column with row operations
            for r in [x for x in self.colrows.get(pc, ()) if x != pr]:
                b = self.rows.get(r, {}).get(pc)
                if not b:
                    continue
                a = self.rows[pr][pc]
                if b % a == 0:
                    self.row_axpy(r, pr, -(b // a))
                else:
                    g, x, y = _egcd(a, b)
                    self.row_2x2(pr, r, x, y, -(b // g), a // g)
            # clear the pivot row with column operations
            refill = False
            for c in [x for x in list(self.rows.get(pr, {})) if x != pc]:
                b = self.rows.get(pr, {}).get(c)
                if not b:
                    continue
                a = self.rows[pr][pc]
                if b % a == 0:
                    self.col_axpy(c, pc, -(b // a))
                else:
                    g, x, y = _egcd(a, b)
                    self.col_2x2(pc, c, x, y, -(b // g), a // g)
                    refill = True
            if not refill and len(self.colrows.get(pc, ())) == 1:
                return

    def run(self) -> None:
        while self.rows:
            pr, pc = self._pick_pivot()
            self._clear_pivot(pr, pc)
            v = self.rows[pr].pop(pc)
            if not self.rows[pr]:
                del self.rows[pr]
            s = self.colrows[pc]
            s.discard(pr)
            if not s:
                del self.colrows[pc]
            self.units.pop((pr, pc), None)
            if v < 0:
                v = -v
                if self.transforms and not self.only_v:
                    u = self.U.get(pr)
                    if u:
                        self.U[pr] = {k: -x for k, x in u.items()}
                    k = self.Uinv_cols.get(pr)
                    if k:
                        self.Uinv_cols[pr] = {kk: -x for kk, x in k.items()}
            self.pivots.append([pr, pc, v])

    # -- divisibility chain ------------------------------------------------------

    def fix_chain_numeric(self) -> list[int]:
        vals = [p[2] for p in self.pivots]
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                if vals[j] % vals[i]:
                    g = gcd(vals[i], vals[j])
                    vals[j] = vals[i] * vals[j] // g
                    vals[i] = g
        return vals

    def fix_chain_with_ops(self) -> None:
        ps = self.pivots
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                if ps[j][2] % ps[i][2] == 0:
                    continue
                r1, c1, v1 = ps[i]
                r2, c2, v2 = ps[j]
                # reactivate the two pivots, merge, and re-clear
                self._set(r1, c1, v1)
                self._set(r2, c2, v2)
                self.col_axpy(c1, c2, 1)
                self._clear_pivot(r1, c1)
                nv1 = self.rows[r1].pop(c1)
                if not self.rows[r1]:
                    del self.rows[r1]
                s = self.colrows[c1]
                s.discard(r1)
                if not s:
                    del self.colrows[c1]
                self.units.pop((r1, c1), None)
                nv2 = self.rows[r2].pop(c2)
                if not self.rows[r2]:
                    del self.rows[r2]
                s = self.colrows[c2]
                s.discard(r2)
                if not s:
                    del self.colrows[c2]
                self.units.pop((r2, c2), None)
                for rr, vv in ((r1, nv1), (r2, nv2)):
                    if vv < 0:
                        vv = -vv
                        if self.transforms and not self.only_v:
                            u = self.U.get(rr)
                            if u:
                                self.U[rr] = {k: -x for k, x in u.items()}
                            k = self.Uinv_cols.get(rr)
                            if k:
                                self.Uinv_cols[rr] = {kk: -x for kk, x in k.items()}
                    if rr == r1:
                        ps[i][2] = vv
                    else:
                        ps[j][2] = vv
                assert self.rows.get(r2, {}).get(c2) is None

    # -- final assembly ------------------------------------------------------------

    def result(self, a: SparseIntMatrix) -> SNFResult:
        if self.transforms:
            self.fix_chain_with_ops()
        factors = self.fix_chain_numeric() if not self.transforms else [p[2] for p in self.pivots]
        if not self.transforms:
            return SNFResult(tuple(factors), (self.m, self.n))
        # permute pivots to the leading diagonal, ordered by the chain
        order = sorted(range(len(self.pivots)), key=lambda i: (factors[i], i))
        row_of = {self.pivots[i][0]: k for k, i in enumerate(order)}
        col_of = {self.pivots[i][1]: k for k, i in enumerate(order)}
        next_r = len(order)
        for r in range(self.m):
            if r not in row_of:
                row_of[r] = next_r
                next_r += 1
        next_c = len(order)
        for c in range(self.n):
            if c not in col_of:
                col_of[c] = next_c
                next_c += 1
        U = SparseIntMatrix(self.m, self.m, {row_of[r]: dict(row) for r, row in self.U.items()})
        Uinv = SparseIntMatrix(
            self.m,
            self.m,
            _cols_to_rows({row_of[c]: col for c, col in self.Uinv_cols.items()}),
        )
        V = SparseIntMatrix(self.n, self.n, _cols_to_rows({col_of[c]: col for c, col in self.V_cols.items()}))
        Vinv = SparseIntMatrix(self.n, self.n, {col_of[r]: dict(row) for r, row in self.Vinv.items()})
        return SNFResult(tuple(factors[i] for i in order), (self.m, self.n), U, V, Uinv, Vinv)


def _cols_to_rows(cols: dict[int, dict[int, int]]) -> dict[int, dict[int, int]]:
    rows: dict[int, dict[int, int]] = {}
    for c, col in cols.items():
        for r, v in col.items():
            rows.setdefault(r, {})[c] = v
    return rows


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with x*a + y*b = g = gcd(a, b), g > 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    r0, r1 = a, b
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if r0 < 0:
        r0, x0, y0 = -r0, -x0, -y0
    return r0, x0, y0


def smith_normal_form(a: SparseIntMatrix) -> SNFResult:
    """Full SNF with unimodular transforms and their inverses."""
    e = _Eliminator(a, transforms=True)
    e.run()
    return e.result(a)


def invariant_factors(a: SparseIntMatrix) -> tuple[int, ...]:
    """Invariant factors only (divisibility chain), no transforms."""
    e = _Eliminator(a, transforms=False)
    e.run()
    return tuple(e.fix_chain_numeric())


def rank(a: SparseIntMatrix) -> int:
    e = _Eliminator(a, transforms=False)
    e.run()
    return len(e.pivots)


def rank_fraction_free(a: SparseIntMatrix) -> int:
    """Independent rational rank via Bareiss fraction-free elimination on a
    dense copy.  Intended as a cross-check oracle for small matrices."""
    m = [row[:] for row in a.to_dense()]
    nr, nc = a.nrows, a.ncols
    r = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nr:
            break
    return r


def kernel_basis(a: SparseIntMatrix) -> list[dict[int, int]]:
    """Basis of the integer kernel of ``a`` (columns of the right transform
    matching zero columns of the Smith form); spans a direct summand."""
    e = _Eliminator(a, transforms=True, only_v=True)
    e.run()
    pivot_cols = {p[1] for p in e.pivots}
    basis = []
    for c in range(a.ncols):
        if c not in pivot_cols:
            basis.append(dict(e.V_cols.get(c, {})))
    return basis


# ---------------------------------------------------------------------------
# homology of a two-step complex
# ---------------------------------------------------------------------------


@dataclass
class HomologyContext:
    """Coordinate machinery for one homology group H = ker(d_out)/im(d_in).

    ``kernel_coords`` maps a chain to its coordinates in the kernel basis
    (valid only on cycles); ``U2`` diagonalizes the boundary lattice inside
    those coordinates.  ``free_coords`` composes the two and then projects to
    the free part, killing boundaries and torsion classes.
    """

    d_out: SparseIntMatrix
    d_in: SparseIntMatrix
    rank_out: int
    kernel_dim: int
    kernel: SparseIntMatrix          # mid x k
    kernel_coords: SparseIntMatrix   # k x mid (bottom rows of V^-1)
    U2: SparseIntMatrix              # k x k
    U2_inv: SparseIntMatrix
    in_factors: tuple[int, ...]

    @property
    def betti(self) -> int:
        return self.kernel_dim - len(self.in_factors)

    def is_cycle(self, z: dict[int, int]) -> bool:
        return not self.d_out.apply(z)

    def free_coords_matrix(self) -> SparseIntMatrix:
        s = len(self.in_factors)
        rows = {
            i: dict(self.U2.rows.get(s + i, {}))
            for i in range(self.betti)
            if self.U2.rows.get(s + i)
        }
        sel = SparseIntMatrix(self.betti, self.kernel_dim, rows)
        return sel @ self.kernel_coords

    def class_coords(self, z: dict[int, int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(free coordinates, torsion coordinates mod their orders) of the
        homology class of the cycle ``z``."""
        if not self.is_cycle(z):
            raise LinalgError("class_coords requires a cycle")
        t = self.kernel_coords.apply(z)
        u = self.U2.apply(t)
        s = len(self.in_factors)
        free = tuple(u.get(i, 0) for i in range(s, self.kernel_dim))
        tors = tuple(
            u.get(j, 0) % f for j, f in enumerate(self.in_factors) if f > 1
        )
        return free, tors


@dataclass
class HomologySummary:
    """H = Z^betti + sum of Z/d for d in torsion.  ``generators`` (optional)
    lists cycle representatives as (vector, order) with order 0 = infinite."""

    betti: int
    torsion: tuple[int, ...]
    generators: Optional[list[tuple[dict[int, int], int]]] = None
    context: Optional[HomologyContext] = None

    def group_signature(self) -> tuple[int, tuple[int, ...]]:
        return (self.betti, self.torsion)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomologySummary):
            return NotImplemented
        return self.group_signature() == other.group_signature()

    def __repr__(self):
        tors = " + ".join(f"Z/{d}" for d in self.torsion)
        desc = f"Z^{self.betti}" + (f" + {tors}" if tors else "")
        return f"<HomologySummary {desc}>"


def homology(d_out: SparseIntMatrix, d_in: SparseIntMatrix, want_generators: bool = False) -> HomologySummary:
    """Homology of C_in --d_in--> C_mid --d_out--> C_out over the integers."""
    if d_out.ncols != d_in.nrows:
        raise LinalgError(
            f"complex dimensions do not compose: d_out has {d_out.ncols} columns, d_in has {d_in.nrows} rows"
        )
    if not (d_out @ d_in).is_zero():
        raise LinalgError("d_out @ d_in is not zero; not a chain complex")
    mid = d_out.ncols
    if not want_generators:
        r_out = rank(d_out)
        invs = invariant_factors(d_in)
        betti = mid - r_out - len(invs)
        return HomologySummary(betti, tuple(d for d in invs if d > 1))

    s1 = smith_normal_form(d_out)
    r = s1.rank
    k = mid - r
    # kernel basis: columns of V matching zero columns of the Smith form
    kernel = SparseIntMatrix(
        mid, k, {rr: {c - r: v for c, v in row.items() if c >= r} for rr, row in s1.V.rows.items()}
    )
    vinv_bottom = SparseIntMatrix(
        k, mid, {rr - r: dict(row) for rr, row in s1.V_inv.rows.items() if rr >= r}
    )
    y = s1.V_inv @ d_in
    for rr in y.rows:
        if rr < r:
            raise LinalgError("image of d_in is not contained in ker(d_out)")
    x = SparseIntMatrix(k, d_in.ncols, {rr - r: dict(row) for rr, row in y.rows.items()})
    s2 = smith_normal_form(x)
    s = s2.rank
    factors = s2.factors
    betti = k - s
    torsion = tuple(f for f in factors if f > 1)
    adapted = kernel @ s2.U_inv
    cols = adapted.columns()
    generators: list[tuple[dict[int, int], int]] = []
    for j in range(s, k):
        generators.append((cols[j], 0))
    for j, f in enumerate(factors):
        if f > 1:
            generators.append((cols[j], f))
    ctx = HomologyContext(
        d_out=d_out,
        d_in=d_in,
        rank_out=r,
        kernel_dim=k,
        kernel=kernel,
        kernel_coords=vinv_bottom,
        U2=s2.U,
        U2_inv=s2.U_inv,
        in_factors=factors,
    )
    return HomologySummary(betti, torsion, generators, ctx)


def induced_map_on_homology(
    f: SparseIntMatrix,
    source: HomologySummary,
    target: HomologySummary,
    f_out: Optional[SparseIntMatrix] = None,
    f_in: Optional[SparseIntMatrix] = None,
) -> SparseIntMatrix:
    """Matrix of the map induced on homology by a chain map ``f`` from the
    source middle chain group to the target middle chain group.

    Rows and columns are indexed by the generator lists (free generators
    first, then torsion generators); torsion rows are reduced modulo their
    orders.  The chain map property is verified: exactly when companion
    matrices are supplied, approximately (cycles to cycles, boundaries to
    boundaries) otherwise.
    """
    sc, tc = source.context, target.context
    if sc is None or tc is None:
        raise LinalgError("both homology summaries must carry contexts (want_generators=True)")
    if f_out is not None:
        if tc.d_out @ f != f_out @ sc.d_out:
            raise LinalgError("f does not commute with the outgoing differentials")
    if f_in is not None:
        if f @ sc.d_in != tc.d_in @ f_in:
            raise LinalgError("f does not commute with the incoming differentials")
    if f_out is None:
        # cycles must map to cycles
        img = tc.d_out @ (f @ sc.kernel)
        if not img.is_zero():
            raise LinalgError("f does not map cycles to cycles")
    if f_in is None:
        # boundaries must map to boundary classes
        pushed = f @ sc.d_in
        for col in pushed.columns():
            free, tors = tc.class_coords(col)
            if any(free) or any(tors):
                raise LinalgError("f does not map boundaries to boundaries")
    torsion_positions = [j for j, d in enumerate(tc.in_factors) if d > 1]
    entries = []
    gens = source.generators or []
    for col_idx, (z, _order) in enumerate(gens):
        w = f.apply(z)
        free, tors = tc.class_coords(w)
        for i, v in enumerate(free):
            if v:
                entries.append((i, col_idx, v))
        for i, v in enumerate(tors):
            if v:
                entries.append((target.betti + i, col_idx, v))
    nrows = target.betti + len(torsion_positions)
    return SparseIntMatrix.from_entries(nrows, len(gens), entries)
