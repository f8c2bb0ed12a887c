"""Discrete cube-complex model of unordered graph configuration spaces.

Cells are sets of n cells of a subdivided graph (vertices and closed edges)
with pairwise disjoint closures; a cell's dimension is the number of edges it
contains.  For the model to be homotopy equivalent to the configuration
space, the graph must be subdivided enough; subdividing every edge into n+1
pieces is safely above every published sufficiency threshold, so that is what
we do unconditionally.  This module exists as an independent check on the
algebraic computation in :mod:`gcontract.swiatkowski` and is allowed to be
slow.
"""

from __future__ import annotations

import threading

from .graphs import GraphError, MultiGraph
from .intlinalg import HomologySummary, SparseIntMatrix, invariant_factors, rank
from .families import SubdivisionFamily

Cell = tuple[tuple[str, ...], tuple[str, ...]]  # (sorted edge ids, sorted vertex ids)

_CACHE: dict[tuple, dict[int, HomologySummary]] = {}
_LOCK = threading.Lock()


def _subdivided(g: MultiGraph, n: int) -> MultiGraph:
    fam = SubdivisionFamily(g, [e for e, _ in g.edges])
    member, _, _, _ = fam.member(tuple(n + 1 for _ in g.edges))
    return member


def _units_and_conflicts(g: MultiGraph):
    """Units are the vertices and closed edges of g; two units conflict when
    their closures intersect.  Conflicts are bitmask-encoded."""
    units: list[tuple[str, str]] = [("v", v) for v in g.vertices]
    units += [("e", e) for e, _ in g.edges]
    pos = {u: k for k, u in enumerate(units)}
    closures: list[set[str]] = []
    for kind, name in units:
        if kind == "v":
            closures.append({name})
        else:
            u, v = g.ends(name)
            closures.append({u, v})
    masks = [0] * len(units)
    by_vertex: dict[str, list[int]] = {}
    for k, cl in enumerate(closures):
        for v in cl:
            by_vertex.setdefault(v, []).append(k)
    for k, cl in enumerate(closures):
        m = 0
        for v in cl:
            for j in by_vertex[v]:
                m |= 1 << j
        masks[k] = m & ~(1 << k)
    return units, pos, masks


def _enumerate_cells(g: MultiGraph, n: int) -> dict[int, list[Cell]]:
    units, _pos, masks = _units_and_conflicts(g)
    out: dict[int, list[Cell]] = {d: [] for d in range(n + 1)}
    total = len(units)

    def rec(start: int, blocked: int, chosen: list[int]) -> None:
        if len(chosen) == n:
            edges = tuple(units[k][1] for k in chosen if units[k][0] == "e")
            verts = tuple(units[k][1] for k in chosen if units[k][0] == "v")
            out[len(edges)].append((edges, verts))
            return
        need = n - len(chosen)
        for k in range(start, total - need + 1):
            if blocked >> k & 1:
                continue
            chosen.append(k)
            rec(k + 1, blocked | masks[k] | (1 << k), chosen)
            chosen.pop()

    rec(0, 0, [])
    epos = g.edge_pos
    vpos = g.vertex_pos
    for d in out:
        out[d] = [
            (tuple(sorted(es, key=epos.__getitem__)), tuple(sorted(vs, key=vpos.__getitem__)))
            for es, vs in out[d]
        ]
        out[d].sort(key=lambda c: ([epos[e] for e in c[0]], [vpos[v] for v in c[1]]))
    return out


def _boundary(g: MultiGraph, cells: dict[int, list[Cell]], d: int) -> SparseIntMatrix:
    """Boundary from d-cells to (d-1)-cells with the standard cube signs:
    the j-th edge direction contributes (-1)^j (head face minus tail face)."""
    lo = {c: k for k, c in enumerate(cells.get(d - 1, []))}
    hi = cells.get(d, [])
    vpos = g.vertex_pos
    entries = []
    for col, (edges, verts) in enumerate(hi):
        for j, e in enumerate(edges):
            sign = -1 if j % 2 else 1
            rest = edges[:j] + edges[j + 1 :]
            tail, head = g.ends(e)
            for val, v in ((sign, head), (-sign, tail)):
                nv = tuple(sorted(verts + (v,), key=vpos.__getitem__))
                entries.append((lo[(rest, nv)], col, val))
    return SparseIntMatrix.from_entries(len(lo), len(hi), entries)


def abrams_homology(g: MultiGraph, i: int, n: int) -> HomologySummary:
    """H_i of the discrete model of the n-point unordered configuration
    space of g, computed over the integers from cube boundary matrices."""
    if g.n_vertices == 0 or not g.is_connected():
        raise GraphError("configuration spaces are taken over connected non-empty graphs")
    if n == 0 or g.n_edges == 0:
        # a single configuration (n = 0), or n points on a point graph
        betti = 1 if (i == 0 and (n == 0 or (n == 1 and g.n_edges == 0))) else 0
        return HomologySummary(betti, ())
    key = (g.canonical_key, n)
    with _LOCK:
        cached = _CACHE.get(key)
    if cached is None:
        sub = _subdivided(g, n)
        cells = _enumerate_cells(sub, n)
        boundaries = {d: _boundary(sub, cells, d) for d in range(1, n + 1)}
        ranks = {d: rank(b) for d, b in boundaries.items()}
        ranks[0] = 0
        ranks[n + 1] = 0
        cached = {}
        for deg in range(0, n + 1):
            dim = len(cells.get(deg, []))
            betti = dim - ranks[deg] - ranks.get(deg + 1, 0)
            torsion: tuple[int, ...] = ()
            if deg + 1 <= n:
                torsion = tuple(f for f in invariant_factors(boundaries[deg + 1]) if f > 1)
            cached[deg] = HomologySummary(betti, torsion)
        with _LOCK:
            _CACHE[key] = cached
    return cached.get(i, HomologySummary(0, ()))
