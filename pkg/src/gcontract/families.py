"""Subdivision and sprouting families, indexed by tuples of ordered injections.

``SubdivisionFamily(G, sites)`` replaces each site edge (given with a
direction) by a path; ``SproutingFamily(G, sites)`` attaches new leaf edges at
the site vertices.  Both act contravariantly on tuples of strictly increasing
maps: an injection tuple f from m to n yields a contraction from the n-member
down to the m-member.

Subdividing a loop is allowed as long as its multiplicity stays positive;
subdividing into zero pieces means contracting the edge and is rejected for
loops (the fiber would contain a cycle).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .graphs import (
    Contraction,
    GraphError,
    HalfEdge,
    MultiGraph,
    contract_edges,
)


@dataclass(frozen=True)
class OrderedInjection:
    """Strictly increasing map from {1..m} to {1..n}, stored by its images."""

    images: tuple[int, ...]
    target_size: int

    def __post_init__(self):
        m = len(self.images)
        if any(self.images[i] >= self.images[i + 1] for i in range(m - 1)):
            raise GraphError("ordered injection images must be strictly increasing")
        if m and (self.images[0] < 1 or self.images[-1] > self.target_size):
            raise GraphError("ordered injection images out of range")

    @property
    def source_size(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        return self.images[j - 1]

    def is_identity(self) -> bool:
        return self.source_size == self.target_size

    @staticmethod
    def identity(n: int) -> "OrderedInjection":
        return OrderedInjection(tuple(range(1, n + 1)), n)

    def compose(self, inner: "OrderedInjection") -> "OrderedInjection":
        """self o inner."""
        if inner.target_size != self.source_size:
            raise GraphError("ordered injections are not composable")
        return OrderedInjection(tuple(self.images[i - 1] for i in inner.images), self.target_size)

    @staticmethod
    def all_from(m: int, n: int) -> list["OrderedInjection"]:
        return [OrderedInjection(c, n) for c in combinations(range(1, n + 1), m)]


@dataclass(frozen=True)
class OrderedInjectionTuple:
    maps: tuple[OrderedInjection, ...]

    @property
    def source(self) -> tuple[int, ...]:
        return tuple(f.source_size for f in self.maps)

    @property
    def target(self) -> tuple[int, ...]:
        return tuple(f.target_size for f in self.maps)

    def is_identity(self) -> bool:
        return all(f.is_identity() for f in self.maps)

    @staticmethod
    def identity(sizes: Sequence[int]) -> "OrderedInjectionTuple":
        return OrderedInjectionTuple(tuple(OrderedInjection.identity(n) for n in sizes))

    def compose(self, inner: "OrderedInjectionTuple") -> "OrderedInjectionTuple":
        if len(inner.maps) != len(self.maps):
            raise GraphError("tuple lengths differ")
        return OrderedInjectionTuple(tuple(f.compose(g) for f, g in zip(self.maps, inner.maps)))


def _step_index(f: OrderedInjection, t: int) -> int:
    """max({0} union {j : f(j) <= t}), the landing position of path vertex t."""
    s = 0
    for j, img in enumerate(f.images, start=1):
        if img <= t:
            s = j
        else:
            break
    return s


class SubdivisionFamily:
    """All subdivisions of ``graph`` along an ordered tuple of directed site
    edges.  A site is ``(edge_id, reverse)``: the path runs from
    ``ends[0]`` to ``ends[1]`` unless reversed."""

    def __init__(self, graph: MultiGraph, sites: Sequence[tuple[str, bool] | str]):
        self.graph = graph
        norm: list[tuple[str, bool]] = []
        for s in sites:
            eid, rev = (s, False) if isinstance(s, str) else (s[0], bool(s[1]))
            if eid not in graph.edge_pos:
                raise GraphError(f"unknown edge id {eid!r}")
            norm.append((eid, rev))
        if len({e for e, _ in norm}) != len(norm):
            raise GraphError("site edges must be distinct")
        self.sites: tuple[tuple[str, bool], ...] = tuple(norm)

    @property
    def r(self) -> int:
        return len(self.sites)

    def site_direction(self, i: int) -> tuple[str, str]:
        eid, rev = self.sites[i]
        u, v = self.graph.ends(eid)
        return (v, u) if rev else (u, v)

    def member(self, m: Sequence[int]):
        """Return (graph, vertex_labels, edge_labels, orig_vertex_map).

        vertex_labels[(i, t)] is the id of path vertex t on site i (t from 0
        to m_i); edge_labels[(i, t)] is (edge id, tail side) for path edge t
        (t from 1 to m_i), where tail side is the half-edge side at the path
        vertex t-1."""
        g = self.graph
        m = tuple(int(x) for x in m)
        if len(m) != self.r:
            raise GraphError("parameter tuple length mismatch")
        if any(x < 0 for x in m):
            raise GraphError("subdivision parameters must be natural numbers")
        site_edge = {eid: i for i, (eid, _) in enumerate(self.sites)}
        for i, (eid, _) in enumerate(self.sites):
            if m[i] == 0 and g.is_loop(eid):
                raise GraphError(f"cannot contract loop {eid!r} (m_i = 0)")

        vertices = list(g.vertices)
        edges: list[tuple[str, tuple[str, str]]] = []
        vlab: dict[tuple[int, int], str] = {}
        elab: dict[tuple[int, int], tuple[str, int]] = {}
        to_contract: list[str] = []
        new_vertices: list[str] = []
        for eid, ends in g.edges:
            if eid not in site_edge:
                edges.append((eid, ends))
                continue
            i = site_edge[eid]
            rev = self.sites[i][1]
            tail, head = self.site_direction(i)
            mi = m[i]
            if mi == 0:
                edges.append((eid, ends))
                to_contract.append(eid)
                vlab[(i, 0)] = tail  # remapped to the merged representative below
                continue
            if mi == 1:
                edges.append((eid, ends))
                vlab[(i, 0)] = tail
                vlab[(i, 1)] = head
                elab[(i, 1)] = (eid, 1 if rev else 0)
                continue
            prev = tail
            vlab[(i, 0)] = tail
            for t in range(1, mi):
                vid = f"{eid}.{t}"
                new_vertices.append(vid)
                vlab[(i, t)] = vid
                ekey = f"{eid}.{t}"
                edges.append((ekey, (prev, vid)))
                elab[(i, t)] = (ekey, 0)
                prev = vid
            ekey = f"{eid}.{mi}"
            edges.append((ekey, (prev, head)))
            elab[(i, mi)] = (ekey, 0)
            vlab[(i, mi)] = head

        expanded = MultiGraph.build(vertices + new_vertices, edges)
        if to_contract:
            member, contr = contract_edges(expanded, to_contract)
            vmap = contr.vertex_map
        else:
            member, vmap = expanded, {v: v for v in expanded.vertices}
        origmap = {v: vmap[v] for v in g.vertices}
        vlab = {k: vmap[v] for k, v in vlab.items()}
        return member, vlab, elab, origmap

    def morphism(self, f: OrderedInjectionTuple, m: Sequence[int], n: Sequence[int]) -> Contraction:
        """The contraction member(n) -> member(m) attached to f: m -> n.
        Path vertex t of site i maps to path vertex max({0} u {j : f_i(j) <= t})."""
        m, n = tuple(m), tuple(n)
        if f.source != m or f.target != n:
            raise GraphError("injection tuple does not match the given sizes")
        gn, vlabn, elabn, orign = self.member(n)
        gm, vlabm, elabm, origm = self.member(m)
        vmap: dict[str, str] = {}
        for v in self.graph.vertices:
            vmap[orign[v]] = origm[v]
        hmap: dict[HalfEdge, HalfEdge] = {}
        site_ids = set()
        for i in range(self.r):
            fi = f.maps[i]
            for t in range(0, n[i] + 1):
                vmap[vlabn[(i, t)]] = vlabm[(i, _step_index(fi, t))]
            for t in range(1, n[i] + 1):
                eid, sn = elabn[(i, t)]
                site_ids.add(eid)
                s_lo = _step_index(fi, t - 1)
                s_hi = _step_index(fi, t)
                if s_lo == s_hi:
                    continue  # contracted path edge
                tid, sm = elabm[(i, s_hi)]
                hmap[(eid, sn)] = (tid, sm)
                hmap[(eid, 1 - sn)] = (tid, 1 - sm)
        for eid, _ in gn.edges:
            if eid not in site_ids:
                hmap[(eid, 0)] = (eid, 0)
                hmap[(eid, 1)] = (eid, 1)
        return Contraction(gn, gm, vmap, hmap)


class SproutingFamily:
    """All sproutings of ``graph`` at an ordered tuple of distinct vertices:
    the (i, t) sprout is a new leaf edge at site vertex i."""

    def __init__(self, graph: MultiGraph, sites: Sequence[str]):
        self.graph = graph
        for v in sites:
            if v not in graph.vertex_pos:
                raise GraphError(f"unknown vertex id {v!r}")
        if len(set(sites)) != len(sites):
            raise GraphError("site vertices must be distinct")
        self.sites: tuple[str, ...] = tuple(sites)

    @property
    def r(self) -> int:
        return len(self.sites)

    def member(self, m: Sequence[int]):
        m = tuple(int(x) for x in m)
        if len(m) != self.r:
            raise GraphError("parameter tuple length mismatch")
        if any(x < 0 for x in m):
            raise GraphError("sprouting parameters must be natural numbers")
        vertices = list(self.graph.vertices)
        edges = list(self.graph.edges)
        vlab: dict[tuple[int, int], str] = {}
        elab: dict[tuple[int, int], str] = {}
        for i, v in enumerate(self.sites):
            for t in range(1, m[i] + 1):
                leaf = f"{v}.s{t}"
                vertices.append(leaf)
                eid = f"{v}.e{t}"
                edges.append((eid, (v, leaf)))
                vlab[(i, t)] = leaf
                elab[(i, t)] = eid
        return MultiGraph.build(vertices, edges), vlab, elab

    def morphism(self, f: OrderedInjectionTuple, m: Sequence[int], n: Sequence[int]) -> Contraction:
        """member(n) -> member(m): sprout t maps to sprout s when f_i(s) = t,
        and collapses onto the site vertex when t misses the image."""
        m, n = tuple(m), tuple(n)
        if f.source != m or f.target != n:
            raise GraphError("injection tuple does not match the given sizes")
        gn, vlabn, elabn = self.member(n)
        gm, vlabm, elabm = self.member(m)
        vmap = {v: v for v in self.graph.vertices}
        hmap: dict[HalfEdge, HalfEdge] = {}
        for eid, _ in self.graph.edges:
            hmap[(eid, 0)] = (eid, 0)
            hmap[(eid, 1)] = (eid, 1)
        for i in range(self.r):
            fi = f.maps[i]
            image = {fi(s): s for s in range(1, m[i] + 1)}
            for t in range(1, n[i] + 1):
                s = image.get(t)
                if s is None:
                    vmap[vlabn[(i, t)]] = self.sites[i]
                else:
                    vmap[vlabn[(i, t)]] = vlabm[(i, s)]
                    hmap[(elabn[(i, t)], 0)] = (elabm[(i, s)], 0)
                    hmap[(elabn[(i, t)], 1)] = (elabm[(i, s)], 1)
        return Contraction(gn, gm, vmap, hmap)


def subdivide(
    graph: MultiGraph, directed_edges: Sequence[tuple[str, bool] | str], m: Sequence[int]
) -> tuple[MultiGraph, Contraction]:
    """Subdivide each site edge into m_i pieces (0 means contract it).

    When every m_i >= 1 the returned contraction collapses each path back
    onto its original edge (member -> base); when every m_i <= 1 it is the
    contraction base -> member.  Mixed parameter tuples relate the member to
    the base only through a zigzag, so they must go through
    SubdivisionFamily.morphism directly."""
    fam = SubdivisionFamily(graph, directed_edges)
    m = tuple(int(x) for x in m)
    member, vlab, elab, origmap = fam.member(m)
    if all(x >= 1 for x in m):
        ones = tuple(1 for _ in m)
        f = OrderedInjectionTuple(tuple(OrderedInjection((mi,), mi) for mi in m))
        return member, fam.morphism(f, ones, m)
    if all(x <= 1 for x in m):
        zero_sites = [eid for (eid, _), mi in zip(fam.sites, m) if mi == 0]
        _, contr = contract_edges(graph, zero_sites)
        return member, contr
    raise GraphError(
        "mixed zero and >1 subdivision parameters: no single canonical contraction; use SubdivisionFamily"
    )


def sprout(graph: MultiGraph, site_vertices: Sequence[str], m: Sequence[int]) -> tuple[MultiGraph, Contraction]:
    """Attach m_i new leaf edges at each site vertex.  Returns the sprouted
    graph and the contraction back to the base graph (all sprouts collapse)."""
    fam = SproutingFamily(graph, site_vertices)
    member, vlab, elab = fam.member(m)
    zeros = tuple(0 for _ in m)
    f = OrderedInjectionTuple(tuple(OrderedInjection((), ni) for ni in m))
    back = fam.morphism(f, zeros, m)
    return member, back
