"""The reduced Swiatkowski complex of a graph and its contraction functoriality.

For a connected graph G with at least one edge, the complex is a bigraded
free module over the polynomial ring on the edges of G.  Each vertex of
valence >= 2 contributes, besides the unit, one generator per half-edge at
the vertex other than a fixed base half-edge; such a generator stands for the
difference (half-edge minus base) and has bidegree (1, 1).  Edge variables
have bidegree (0, 1).  The bidegree-(i, n) slice computes the degree-i
integral homology of the configuration space of n unordered points on G.

The differential sends a difference generator to (edge of the half-edge minus
edge of the base) times the unit and extends as a derivation with Koszul
signs over the canonical vertex order.  Every contraction of graphs induces a
chain map from the complex of its target to the complex of its source; a
contraction is applied by peeling off its contracted edges one at a time in
canonical edge order and finishing with the residual isomorphism.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Optional, Sequence

from .graphs import (
    Contraction,
    GraphError,
    HalfEdge,
    MultiGraph,
    contract_edges,
    genus,
)
from .intlinalg import (
    HomologySummary,
    SparseIntMatrix,
    homology,
    invariant_factors,
    kernel_basis,
)

BasisElement = tuple[tuple[tuple[int, HalfEdge], ...], tuple[int, ...]]
# ((vertex position, chosen half-edge), ...) sorted by vertex position,
# together with the monomial exponent vector over the edges.


@dataclass
class SwSlice:
    """Ordered basis of one bidegree slice of the complex."""

    graph: MultiGraph
    i: int
    n: int
    elements: list[BasisElement]
    index: dict[BasisElement, int]

    @property
    def dim(self) -> int:
        return len(self.elements)


def _check_graph(g: MultiGraph) -> None:
    if g.n_vertices == 0 or not g.is_connected():
        raise GraphError("the complex is defined for connected non-empty graphs")
    if g.n_edges == 0:
        raise GraphError(
            "the one-point graph is not supported: the complex misses the "
            "class of the one-point configuration space in degree zero"
        )


def _dist_choices(g: MultiGraph, v: str) -> tuple[HalfEdge, ...]:
    """Non-base half-edges at v; empty unless valence >= 2."""
    hs = g.half_edges_at(v)
    return hs[1:]


def _monomials(n_edges: int, degree: int) -> list[tuple[int, ...]]:
    if degree == 0:
        return [tuple([0] * n_edges)]
    out = []
    for combo in combinations_with_replacement(range(n_edges), degree):
        exp = [0] * n_edges
        for c in combo:
            exp[c] += 1
        out.append(tuple(exp))
    return out


def sw_basis(g: MultiGraph, i: int, n: int) -> SwSlice:
    """All basis elements of bidegree (i, n), enumerated deterministically."""
    _check_graph(g)
    if i < 0 or n < 0:
        raise GraphError("bidegrees are natural numbers")
    elements: list[BasisElement] = []
    if n >= i:
        eligible = [
            (g.vertex_pos[v], _dist_choices(g, v))
            for v in g.vertices
            if g.valence(v) >= 2
        ]
        monos = _monomials(g.n_edges, n - i)
        for subset in combinations(range(len(eligible)), i):
            positions = [eligible[j][0] for j in subset]
            choice_lists = [eligible[j][1] for j in subset]
            for picks in _product_lists(choice_lists):
                dist = tuple(zip(positions, picks))
                for mono in monos:
                    elements.append((dist, mono))
    index = {elt: k for k, elt in enumerate(elements)}
    return SwSlice(g, i, n, elements, index)


def _product_lists(lists: Sequence[Sequence]) -> Iterable[tuple]:
    if not lists:
        yield ()
        return
    head, *rest = lists
    for x in head:
        for tail in _product_lists(rest):
            yield (x,) + tail


def sw_differential(g: MultiGraph, i: int, n: int) -> SparseIntMatrix:
    """Matrix of the differential from the (i, n) slice to the (i-1, n) slice."""
    col_slice = sw_basis(g, i, n)
    if i == 0:
        return SparseIntMatrix.zeros(0, col_slice.dim)
    row_slice = sw_basis(g, i - 1, n)
    epos = g.edge_pos
    entries = []
    for col, (dist, mono) in enumerate(col_slice.elements):
        for p in range(len(dist)):
            vpos, h = dist[p]
            sign = -1 if p % 2 else 1
            rest = dist[:p] + dist[p + 1 :]
            base = g.base_half_edge(g.vertices[vpos])
            e_h, e_b = epos[h[0]], epos[base[0]]
            if e_h == e_b:
                continue  # loop difference: boundary terms cancel
            m_plus = list(mono)
            m_plus[e_h] += 1
            entries.append((row_slice.index[(rest, tuple(m_plus))], col, sign))
            m_minus = list(mono)
            m_minus[e_b] += 1
            entries.append((row_slice.index[(rest, tuple(m_minus))], col, -sign))
    return SparseIntMatrix.from_entries(row_slice.dim, col_slice.dim, entries)


# ---------------------------------------------------------------------------
# chain maps induced by contractions
# ---------------------------------------------------------------------------


def _expand_difference(
    g: MultiGraph, v: str, h_plus: HalfEdge, h_minus: HalfEdge
) -> list[tuple[int, HalfEdge]]:
    """(h_plus - h_minus) at vertex v rewritten against the base half-edge:
    list of (coefficient, chosen non-base half-edge)."""
    if h_plus == h_minus:
        return []
    base = g.base_half_edge(v)
    out = []
    if h_plus != base:
        out.append((1, h_plus))
    if h_minus != base:
        out.append((-1, h_minus))
    return out


def _sort_sign(positions: Sequence[int]) -> int:
    """Parity of the permutation sorting ``positions`` (all distinct)."""
    sign = 1
    arr = list(positions)
    for a in range(len(arr)):
        for b in range(a + 1, len(arr)):
            if arr[a] > arr[b]:
                sign = -sign
    return sign


def _push_terms(
    target: MultiGraph,
    lifted_mono: tuple[int, ...],
    factor_terms: list[list[tuple[int, str, HalfEdge]]],
    out_slice: SwSlice,
    col: int,
    entries: list,
) -> None:
    """Expand the product of per-vertex factor terms into basis coordinates."""
    vp = target.vertex_pos

    def rec(k: int, coeff: int, picks: list[tuple[int, HalfEdge]]):
        if k == len(factor_terms):
            positions = [p for p, _ in picks]
            sign = _sort_sign(positions)
            dist = tuple(sorted(picks))
            entries.append((out_slice.index[(dist, lifted_mono)], col, coeff * sign))
            return
        for c, v, h in factor_terms[k]:
            rec(k + 1, coeff * c, picks + [(vp[v], h)])

    rec(0, 1, [])


def _simple_quotient_chain_map(step: Contraction, i: int, n: int) -> SparseIntMatrix:
    """Chain map of a canonical one-edge quotient q: G -> G/e, from the
    (i, n) slice of G/e to the (i, n) slice of G.  Edge and half-edge ids are
    preserved by the quotient, so lifting is the identity on labels."""
    g, gq = step.source, step.target
    (e0,) = tuple(step.contracted)
    a, b = g.ends(e0)
    h0, h1 = (e0, 0), (e0, 1)
    merged = step.vertex_map[a]
    src_slice = sw_basis(gq, i, n)
    tgt_slice = sw_basis(g, i, n)
    epos_g = g.edge_pos
    gq_edge_ids = [e for e, _ in gq.edges]
    entries: list = []
    for col, (dist, mono) in enumerate(src_slice.elements):
        lifted = [0] * g.n_edges
        for j, exp in enumerate(mono):
            if exp:
                lifted[epos_g[gq_edge_ids[j]]] = exp
        lifted_mono = tuple(lifted)
        factor_terms: list[list[tuple[int, str, HalfEdge]]] = []
        degenerate = False
        for vpos, h in dist:
            w = gq.vertices[vpos]
            base_q = gq.base_half_edge(w)
            if w != merged:
                terms = [(c, w, hh) for c, hh in _expand_difference(g, w, h, base_q)]
            else:
                terms = []
                for sgn, hh in ((1, h), (-1, base_q)):
                    va = g.vertex_of(hh)
                    anchor = h0 if va == a else h1
                    for c, picked in _expand_difference(g, va, hh, anchor):
                        terms.append((sgn * c, va, picked))
            if not terms:
                degenerate = True
                break
            factor_terms.append(terms)
        if degenerate:
            continue
        _push_terms(g, lifted_mono, factor_terms, tgt_slice, col, entries)
    return SparseIntMatrix.from_entries(tgt_slice.dim, src_slice.dim, entries)


def _iso_chain_map(iso: Contraction, i: int, n: int) -> SparseIntMatrix:
    """Chain map of an isomorphism: pull half-edges and edge variables back
    along the inverse labels and rewrite against the source's bases."""
    if iso.contracted:
        raise GraphError("not an isomorphism")
    ga, gb = iso.source, iso.target
    src_slice = sw_basis(gb, i, n)
    tgt_slice = sw_basis(ga, i, n)
    inv_h = {t: h for h, t in iso.half_edge_map.items()}
    inv_v = {w: v for v, w in iso.vertex_map.items()}
    epos_a = ga.edge_pos
    gb_edge_ids = [e for e, _ in gb.edges]
    edge_back = {e: inv_h[(e, 0)][0] for e in gb_edge_ids}
    entries: list = []
    for col, (dist, mono) in enumerate(src_slice.elements):
        lifted = [0] * ga.n_edges
        for j, exp in enumerate(mono):
            if exp:
                lifted[epos_a[edge_back[gb_edge_ids[j]]]] = exp
        lifted_mono = tuple(lifted)
        factor_terms = []
        degenerate = False
        for vpos, h in dist:
            w = gb.vertices[vpos]
            v = inv_v[w]
            terms = [
                (c, v, hh)
                for c, hh in _expand_difference(ga, v, inv_h[h], inv_h[gb.base_half_edge(w)])
            ]
            if not terms:
                degenerate = True
                break
            factor_terms.append(terms)
        if degenerate:
            continue
        _push_terms(ga, lifted_mono, factor_terms, tgt_slice, col, entries)
    return SparseIntMatrix.from_entries(tgt_slice.dim, src_slice.dim, entries)


def sw_chain_map(
    phi: Contraction, i: int, n: int, peel_order: Optional[Sequence[str]] = None
) -> SparseIntMatrix:
    """Matrix of the chain map induced by a contraction, from the (i, n)
    slice of the target graph to the (i, n) slice of the source graph.

    The contracted set is peeled one edge at a time (canonical edge order
    unless ``peel_order`` overrides it, which exists so tests can confirm the
    result does not depend on the factorization) and the residual isomorphism
    is applied last."""
    order = list(peel_order) if peel_order is not None else sorted(
        phi.contracted, key=phi.source.edge_pos.__getitem__
    )
    if set(order) != set(phi.contracted):
        raise GraphError("peel order must enumerate the contracted edges")
    g0 = phi.source
    mats: list[SparseIntMatrix] = []
    for e in order:
        q, step = contract_edges(g0, [e])
        mats.append(_simple_quotient_chain_map(step, i, n))
        g0 = q
    tail = Contraction(
        g0,
        phi.target,
        {v: phi.vertex_map[v] for v in g0.vertices},
        {h: phi.half_edge_map[h] for h in g0.half_edges},
    )
    if tail.is_identity():
        acc = None
    else:
        acc = _iso_chain_map(tail, i, n)
    for mat in reversed(mats):
        acc = mat if acc is None else mat @ acc
    if acc is None:
        dim = sw_basis(phi.source, i, n).dim
        acc = SparseIntMatrix.identity(dim)
    return acc


# ---------------------------------------------------------------------------
# homology of configuration spaces
# ---------------------------------------------------------------------------

_UCONF_CACHE: dict[tuple, HomologySummary] = {}
_CACHE_LOCK = threading.Lock()


def uconf_homology(g: MultiGraph, i: int, n: int, want_generators: bool = False) -> HomologySummary:
    """Integral homology H_i of the space of n unordered points on g.

    Summaries without generators are cached across isomorphic graphs; the
    generator-carrying variant is tied to the concrete labeling and is
    recomputed on each call."""
    _check_graph(g)
    if not want_generators:
        key = (g.canonical_key, i, n)
        with _CACHE_LOCK:
            cached = _UCONF_CACHE.get(key)
        if cached is not None:
            return cached
    d_out = sw_differential(g, i, n)
    d_in = sw_differential(g, i + 1, n)
    result = homology(d_out, d_in, want_generators=want_generators)
    if not want_generators:
        with _CACHE_LOCK:
            _UCONF_CACHE[key] = result
    return result


def pullback_spans(g: MultiGraph, i: int, n: int, return_details: bool = False):
    """Do the one-edge contractions of g jointly hit all of H_i of the
    n-point configuration space, rationally and integrally modulo torsion?

    The images of the induced maps on homology span the same subgroup as the
    pushforwards of full kernel bases of the quotients, so the check pushes
    kernel bases through the chain maps and reads everything in coordinates
    on the free part of the homology of g."""
    _check_graph(g)
    if g.n_edges < 2:
        raise GraphError("at least two edges are required")
    summary = uconf_homology(g, i, n, want_generators=True)
    if summary.betti == 0:
        result = (True, summary.betti, ())
        return result if return_details else True
    free_map = summary.context.free_coords_matrix()
    cols: list[dict[int, int]] = []
    for e, _ends in g.edges:
        if g.is_loop(e):
            continue
        gq, phi = contract_edges(g, [e])
        chain = sw_chain_map(phi, i, n)
        pushed = free_map @ chain
        for vec in kernel_basis(sw_differential(gq, i, n)):
            col = pushed.apply(vec)
            if col:
                cols.append(col)
    span = SparseIntMatrix.from_columns(summary.betti, cols)
    invs = invariant_factors(span)
    ok = len(invs) == summary.betti and all(f == 1 for f in invs)
    if return_details:
        return ok, summary.betti, invs
    return ok


def torsion_scan(corpus: Iterable[tuple[str, MultiGraph]], i: int, n: int) -> dict:
    """Torsion table for H_i(UConf_n) over a corpus of named graphs.

    Returns rows (name, genus, betti, torsion factors) plus the maximal
    torsion exponent seen per genus; graphs the complex rejects (the point
    graph) are recorded as skipped."""
    rows = []
    max_exponent: dict[int, int] = {}
    skipped = []
    for name, g in corpus:
        try:
            summary = uconf_homology(g, i, n)
        except GraphError as exc:
            skipped.append({"graph": name, "reason": str(exc)})
            continue
        gg = genus(g)
        exponent = 1
        for d in summary.torsion:
            exponent = exponent * d // _gcd(exponent, d)
        rows.append(
            {
                "graph": name,
                "genus": gg,
                "betti": summary.betti,
                "torsion": list(summary.torsion),
            }
        )
        if summary.torsion:
            max_exponent[gg] = max(max_exponent.get(gg, 1), exponent)
    return {
        "i": i,
        "n": n,
        "rows": rows,
        "max_torsion_exponent_by_genus": {str(k): v for k, v in sorted(max_exponent.items())},
        "skipped": skipped,
    }


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
