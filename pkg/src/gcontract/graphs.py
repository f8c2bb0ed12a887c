"""Finite multigraphs with half-edge structure, and forest-contracting morphisms.

A multigraph is an ordered vertex tuple plus an ordered edge tuple; loops and
parallel edges are allowed.  The edge order fixed at construction is the
canonical edge order used by every module downstream (half-edge orders, chain
complex bases, contraction factorizations), so graphs are never silently
reordered.

Morphisms are recorded as a vertex map together with an explicit half-edge map
on the non-contracted edges.  The half-edge map carries orientation data for
loops; this is what makes the automorphism group of the two-loop rose come out
as the dihedral group of order 8 rather than just the loop permutations.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations, product
from math import comb
from typing import Iterable, Iterator, Mapping, Optional, Sequence

HalfEdge = tuple[str, int]  # (edge id, side in {0, 1})


class GraphError(ValueError):
    """Raised for malformed graphs or illegal graph operations."""


@dataclass(frozen=True)
class MultiGraph:
    """A finite multigraph.  ``edges`` entries are ``(edge_id, (u, v))``;
    a loop repeats its endpoint.  The stored order of ``ends`` doubles as the
    edge's reference orientation (side 0 at ``ends[0]``)."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, tuple[str, str]], ...]

    @staticmethod
    def build(vertices: Iterable[str], edges: Iterable[tuple[str, Sequence[str]]]) -> "MultiGraph":
        vs = tuple(str(v) for v in vertices)
        if len(set(vs)) != len(vs):
            raise GraphError("duplicate vertex ids")
        es = []
        seen = set()
        vset = set(vs)
        for eid, ends in edges:
            eid = str(eid)
            if eid in seen:
                raise GraphError(f"duplicate edge id {eid!r}")
            seen.add(eid)
            ends = tuple(str(x) for x in ends)
            if len(ends) != 2:
                raise GraphError(f"edge {eid!r}: expected two endpoints, got {ends!r}")
            for x in ends:
                if x not in vset:
                    raise GraphError(f"edge {eid!r}: endpoint {x!r} is not a declared vertex")
            es.append((eid, ends))
        return MultiGraph(vs, tuple(es))

    # -- basic accessors ----------------------------------------------------

    @cached_property
    def vertex_pos(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_pos(self) -> dict[str, int]:
        return {e: i for i, (e, _) in enumerate(self.edges)}

    @cached_property
    def edge_ends(self) -> dict[str, tuple[str, str]]:
        return {e: ends for e, ends in self.edges}

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def ends(self, eid: str) -> tuple[str, str]:
        return self.edge_ends[eid]

    def is_loop(self, eid: str) -> bool:
        u, v = self.edge_ends[eid]
        return u == v

    def vertex_of(self, h: HalfEdge) -> str:
        return self.edge_ends[h[0]][h[1]]

    @cached_property
    def half_edges(self) -> tuple[HalfEdge, ...]:
        out = []
        for eid, _ in self.edges:
            out.append((eid, 0))
            out.append((eid, 1))
        return tuple(out)

    @cached_property
    def _half_edges_at(self) -> dict[str, tuple[HalfEdge, ...]]:
        at: dict[str, list[HalfEdge]] = {v: [] for v in self.vertices}
        for eid, (u, v) in self.edges:
            at[u].append((eid, 0))
            at[v].append((eid, 1))
        return {v: tuple(hs) for v, hs in at.items()}

    def half_edges_at(self, v: str) -> tuple[HalfEdge, ...]:
        """Half-edges incident to ``v``, in canonical (edge order, side) order."""
        return self._half_edges_at[v]

    def valence(self, v: str) -> int:
        return len(self._half_edges_at[v])

    def loops_at(self, v: str) -> int:
        return sum(1 for eid, (a, b) in self.edges if a == b == v)

    def base_half_edge(self, v: str) -> HalfEdge:
        """Least half-edge at ``v``; only defined for valence >= 1."""
        return self._half_edges_at[v][0]

    @cached_property
    def adjacency(self) -> dict[str, dict[str, int]]:
        """Neighbor multiplicities, loops counted once per loop edge."""
        adj: dict[str, dict[str, int]] = {v: {} for v in self.vertices}
        for eid, (u, v) in self.edges:
            adj[u][v] = adj[u].get(v, 0) + 1
            if u != v:
                adj[v][u] = adj[v].get(u, 0) + 1
        return adj

    # -- structural predicates ----------------------------------------------

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            x = stack.pop()
            for y in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    def component_count(self, skip_edge: Optional[str] = None) -> int:
        parent = {v: v for v in self.vertices}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        n = len(self.vertices)
        for eid, (u, v) in self.edges:
            if eid == skip_edge:
                continue
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                n -= 1
        return n

    def is_bridge(self, eid: str) -> bool:
        if self.is_loop(eid):
            return False
        return self.component_count(skip_edge=eid) > self.component_count()

    def simplified(self) -> "MultiGraph":
        """Underlying simple graph: loops dropped, parallel classes collapsed."""
        kept = []
        seen_pairs = set()
        for eid, (u, v) in self.edges:
            if u == v:
                continue
            key = (u, v) if self.vertex_pos[u] <= self.vertex_pos[v] else (v, u)
            if key in seen_pairs:
                continue
            seen_pairs.add(key)
            kept.append((eid, (u, v)))
        return MultiGraph(self.vertices, tuple(kept))

    def relabeled(self, vmap: Mapping[str, str], emap: Mapping[str, str]) -> "MultiGraph":
        return MultiGraph(
            tuple(vmap[v] for v in self.vertices),
            tuple((emap[e], (vmap[u], vmap[v])) for e, (u, v) in self.edges),
        )

    # -- canonical form -----------------------------------------------------

    @cached_property
    def canonical_key(self) -> tuple:
        """Isomorphism-invariant canonical code (minimum adjacency code over
        all vertex orderings, with twin pruning).  Two multigraphs are
        isomorphic iff their canonical keys are equal."""
        return _canonical_code(self)

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e, "ends": [u, v]} for e, (u, v) in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json_obj(obj: dict) -> "MultiGraph":
        if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
            raise GraphError("graph JSON must be an object with 'vertices' and 'edges'")
        edges = []
        for k, rec in enumerate(obj["edges"]):
            if not isinstance(rec, dict) or "id" not in rec or "ends" not in rec:
                raise GraphError(f"edge record {k}: expected an object with 'id' and 'ends'")
            edges.append((rec["id"], rec["ends"]))
        try:
            return MultiGraph.build(obj["vertices"], edges)
        except GraphError as exc:
            raise GraphError(f"invalid graph JSON: {exc}") from exc

    @staticmethod
    def from_json(text: str) -> "MultiGraph":
        return MultiGraph.from_json_obj(json.loads(text))


def genus(g: MultiGraph) -> int:
    """First Betti number of a connected non-empty graph: |E| - |V| + 1."""
    if g.n_vertices == 0:
        raise GraphError("genus undefined for the empty graph")
    if not g.is_connected():
        raise GraphError("genus undefined for disconnected graphs")
    return g.n_edges - g.n_vertices + 1


def is_reduced(g: MultiGraph) -> bool:
    """True iff the graph has no bridges and no valence-2 vertices.  The
    one-vertex one-loop graph counts as reduced by convention."""
    if not g.is_connected() or g.n_vertices == 0:
        raise GraphError("reducedness is only defined for connected non-empty graphs")
    if g.n_vertices == 1 and g.n_edges == 1:
        return True
    if any(g.valence(v) == 2 for v in g.vertices):
        return False
    return not any(g.is_bridge(e) for e, _ in g.edges)


# ---------------------------------------------------------------------------
# canonical code
# ---------------------------------------------------------------------------


def _canonical_code(g: MultiGraph) -> tuple:
    n = g.n_vertices
    if n == 0:
        return (0, ())
    verts = list(g.vertices)
    pos = g.vertex_pos
    mult = [[0] * n for _ in range(n)]
    loops = [0] * n
    for eid, (u, v) in g.edges:
        iu, iv = pos[u], pos[v]
        if iu == iv:
            loops[iu] += 1
        else:
            mult[iu][iv] += 1
            mult[iv][iu] += 1

    # twin classes: vertices interchangeable by a transposition automorphism
    twin = list(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if twin[j] != j:
                continue
            if loops[i] != loops[j]:
                continue
            if all(mult[i][k] == mult[j][k] for k in range(n) if k not in (i, j)):
                twin[j] = twin[i]

    best: list[tuple] = []
    best_complete = [False]

    def extend(placed: list[int], code: list[tuple]) -> None:
        k = len(placed)
        if k == n:
            if not best_complete[0] or code < best:
                best[:] = code
                best_complete[0] = True
            return
        # candidate blocks; only minimal blocks can extend a minimal prefix
        cands: list[tuple[tuple, int]] = []
        seen_twins = set()
        placed_set = set(placed)
        for v in range(n):
            if v in placed_set:
                continue
            tw = twin[v]
            if tw in seen_twins:
                continue
            seen_twins.add(tw)
            row = mult[v]
            block = tuple(row[p] for p in placed) + (loops[v],)
            cands.append((block, v))
        mblock = min(b for b, _ in cands)
        if best_complete[0]:
            prefix_block = best[k]
            if mblock > prefix_block:
                return
            if mblock < prefix_block:
                best_complete[0] = False
                del best[k:]
        for block, v in cands:
            if block == mblock:
                extend(placed + [v], code + [block])

    extend([], [])
    return (n, tuple(best))


def is_isomorphic(a: MultiGraph, b: MultiGraph) -> bool:
    return a.canonical_key == b.canonical_key


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Smooshing:
    """Surjective graph morphism with connected fibers.

    ``half_edge_map`` is defined exactly on the half-edges of non-contracted
    edges and is a bijection onto the target's half-edges.
    """

    source: MultiGraph
    target: MultiGraph
    vertex_map: dict[str, str]
    half_edge_map: dict[HalfEdge, HalfEdge]

    def __post_init__(self):
        self._validate()

    # fibers must be connected
    _FIBER_REQUIREMENT = "connected"

    def _validate(self) -> None:
        src, tgt = self.source, self.target
        if set(self.vertex_map) != set(src.vertices):
            raise GraphError("vertex map must be defined on every source vertex")
        if set(self.vertex_map.values()) != set(tgt.vertices):
            raise GraphError("vertex map must be surjective onto target vertices")
        # group half-edge images by edge
        image_edges: dict[str, str] = {}
        for eid, _ in src.edges:
            h0, h1 = (eid, 0), (eid, 1)
            in0, in1 = h0 in self.half_edge_map, h1 in self.half_edge_map
            if in0 != in1:
                raise GraphError(f"edge {eid!r}: both or neither half-edge must map")
            if not in0:
                continue
            t0, t1 = self.half_edge_map[h0], self.half_edge_map[h1]
            if t0[0] != t1[0] or {t0[1], t1[1]} != {0, 1}:
                raise GraphError(f"edge {eid!r}: half-edges must cover one target edge")
            image_edges[eid] = t0[0]
            for h, t in ((h0, t0), (h1, t1)):
                if tgt.vertex_of(t) != self.vertex_map[src.vertex_of(h)]:
                    raise GraphError(f"half-edge {h}: image endpoint mismatch")
        if sorted(image_edges.values()) != sorted(e for e, _ in tgt.edges):
            raise GraphError("non-contracted edges must biject onto target edges")
        # fiber check
        contracted = [e for e, _ in src.edges if e not in image_edges]
        fiber_vertices: dict[str, list[str]] = defaultdict(list)
        for v in src.vertices:
            fiber_vertices[self.vertex_map[v]].append(v)
        fiber_edges: dict[str, list[str]] = defaultdict(list)
        for e in contracted:
            u, v = src.ends(e)
            w = self.vertex_map[u]
            if self.vertex_map[v] != w:
                raise GraphError(f"contracted edge {e!r} joins different fibers")
            fiber_edges[w].append(e)
        for w in self.target.vertices:
            vs, es = fiber_vertices[w], fiber_edges.get(w, [])
            if not _fiber_ok(src, vs, es, self._FIBER_REQUIREMENT):
                raise GraphError(f"fiber over {w!r} is not {self._FIBER_REQUIREMENT}")

    # -- derived data --------------------------------------------------------

    @cached_property
    def edge_map(self) -> dict[str, Optional[str]]:
        out: dict[str, Optional[str]] = {}
        for eid, _ in self.source.edges:
            h = (eid, 0)
            out[eid] = self.half_edge_map[h][0] if h in self.half_edge_map else None
        return out

    @cached_property
    def contracted(self) -> frozenset[str]:
        return frozenset(e for e, img in self.edge_map.items() if img is None)

    def map_vertex(self, v: str) -> str:
        return self.vertex_map[v]

    def map_half_edge(self, h: HalfEdge) -> Optional[HalfEdge]:
        return self.half_edge_map.get(h)

    def is_identity(self) -> bool:
        return (
            self.source == self.target
            and all(k == v for k, v in self.vertex_map.items())
            and all(k == v for k, v in self.half_edge_map.items())
        )

    def is_isomorphism(self) -> bool:
        return not self.contracted

    @cached_property
    def key(self) -> tuple:
        return (
            tuple(sorted(self.vertex_map.items())),
            tuple(sorted(self.half_edge_map.items())),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Smooshing):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
            and self.half_edge_map == other.half_edge_map
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        kind = type(self).__name__
        return f"<{kind} {self.source.n_edges}e->{self.target.n_edges}e contracted={sorted(self.contracted)}>"


class Contraction(Smooshing):
    """Smooshing whose fibers are trees; preserves genus."""

    _FIBER_REQUIREMENT = "tree"

    def inverse(self) -> "Contraction":
        if self.contracted:
            raise GraphError("only isomorphisms are invertible")
        return Contraction(
            self.target,
            self.source,
            {w: v for v, w in self.vertex_map.items()},
            {t: h for h, t in self.half_edge_map.items()},
        )


def _fiber_ok(g: MultiGraph, vs: list[str], es: list[str], requirement: str) -> bool:
    # connectivity of the subgraph (vs, es); tree requires |es| = |vs| - 1 too
    if not vs:
        return False
    if requirement == "tree" and len(es) != len(vs) - 1:
        return False
    parent = {v: v for v in vs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = len(vs)
    for e in es:
        u, v = g.ends(e)
        if u not in parent or v not in parent:
            return False
        ru, rv = find(u), find(v)
        if ru == rv:
            if requirement == "tree":
                return False
        else:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def identity_contraction(g: MultiGraph) -> Contraction:
    return Contraction(
        g, g, {v: v for v in g.vertices}, {h: h for h in g.half_edges}
    )


def compose(second: Smooshing, first: Smooshing) -> Smooshing:
    """Composite ``second after first``.  Contractions compose to a
    Contraction, anything else to a Smooshing."""
    if first.target != second.source:
        raise GraphError("morphisms are not composable: target/source mismatch")
    vmap = {v: second.vertex_map[w] for v, w in first.vertex_map.items()}
    hmap = {}
    for h, t in first.half_edge_map.items():
        t2 = second.half_edge_map.get(t)
        if t2 is not None:
            hmap[h] = t2
    cls = Contraction if isinstance(first, Contraction) and isinstance(second, Contraction) else Smooshing
    return cls(first.source, second.target, vmap, hmap)


def _quotient(g: MultiGraph, edge_ids: Iterable[str], *, require_forest: bool) -> tuple[MultiGraph, dict[str, str]]:
    eset = set(edge_ids)
    for e in eset:
        if e not in g.edge_pos:
            raise GraphError(f"unknown edge id {e!r}")
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in sorted(eset, key=g.edge_pos.__getitem__):
        u, v = g.ends(e)
        ru, rv = find(u), find(v)
        if ru == rv:
            if require_forest:
                raise GraphError(f"contracted set contains a cycle through edge {e!r}")
        else:
            parent[ru] = rv
    # representative: first vertex of each class in graph order
    rep: dict[str, str] = {}
    for v in g.vertices:
        r = find(v)
        if r not in rep:
            rep[r] = v
    vmap = {v: rep[find(v)] for v in g.vertices}
    new_vertices = tuple(v for v in g.vertices if vmap[v] == v)
    new_edges = tuple(
        (e, (vmap[u], vmap[v])) for e, (u, v) in g.edges if e not in eset
    )
    return MultiGraph(new_vertices, new_edges), vmap


def contract_edges(g: MultiGraph, edge_ids: Iterable[str]) -> tuple[MultiGraph, Contraction]:
    """Contract a forest of edges; rejects any cycle (loops included)."""
    q, vmap = _quotient(g, edge_ids, require_forest=True)
    eset = set(edge_ids)
    hmap = {h: h for h in g.half_edges if h[0] not in eset}
    return q, Contraction(g, q, vmap, hmap)


def smoosh_edges(g: MultiGraph, edge_ids: Iterable[str]) -> tuple[MultiGraph, Smooshing]:
    """Collapse each connected component spanned by ``edge_ids`` to a vertex."""
    q, vmap = _quotient(g, edge_ids, require_forest=False)
    eset = set(edge_ids)
    hmap = {h: h for h in g.half_edges if h[0] not in eset}
    return q, Smooshing(g, q, vmap, hmap)


def factor_through(phi: Smooshing, psi: Smooshing) -> Smooshing:
    """Given phi: G -> G2 and psi: G -> Q with contracted(psi) a subset of
    contracted(phi), return the unique rho: Q -> G2 with rho o psi = phi."""
    if phi.source != psi.source:
        raise GraphError("factor_through requires a common source")
    if not psi.contracted <= phi.contracted:
        raise GraphError("psi contracts an edge that phi keeps")
    vmap = {}
    for v, q in psi.vertex_map.items():
        w = phi.vertex_map[v]
        if q in vmap and vmap[q] != w:
            raise GraphError("phi is not constant on a fiber of psi")
        vmap[q] = w
    hmap = {}
    for h, t in psi.half_edge_map.items():
        img = phi.half_edge_map.get(h)
        if img is not None:
            hmap[t] = img
    cls = Contraction if isinstance(phi, Contraction) and isinstance(psi, Contraction) else Smooshing
    return cls(psi.target, phi.target, vmap, hmap)


# ---------------------------------------------------------------------------
# isomorphism and contraction enumeration
# ---------------------------------------------------------------------------


def _vertex_bijections(a: MultiGraph, b: MultiGraph) -> Iterator[dict[str, str]]:
    n = a.n_vertices
    if n != b.n_vertices or a.n_edges != b.n_edges:
        return
    sig_a = {v: (a.valence(v), a.loops_at(v)) for v in a.vertices}
    sig_b = {v: (b.valence(v), b.loops_at(v)) for v in b.vertices}
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return
    # order source vertices by rarity of signature for early pruning
    order = sorted(a.vertices, key=lambda v: (sorted(sig_a.values()).count(sig_a[v]), a.vertex_pos[v]))
    cands = {v: [w for w in b.vertices if sig_b[w] == sig_a[v]] for v in order}

    assignment: dict[str, str] = {}
    used: set[str] = set()

    def rec(k: int) -> Iterator[dict[str, str]]:
        if k == n:
            yield dict(assignment)
            return
        v = order[k]
        for w in cands[v]:
            if w in used:
                continue
            ok = True
            for v2, w2 in assignment.items():
                if a.adjacency[v].get(v2, 0) != b.adjacency[w].get(w2, 0):
                    ok = False
                    break
            if not ok:
                continue
            assignment[v] = w
            used.add(w)
            yield from rec(k + 1)
            del assignment[v]
            used.discard(w)

    yield from rec(0)


def _edge_classes(g: MultiGraph) -> dict[tuple[str, str], list[str]]:
    """Edges grouped by unordered endpoint pair (loops under (v, v))."""
    classes: dict[tuple[str, str], list[str]] = defaultdict(list)
    for e, (u, v) in g.edges:
        key = (u, v) if g.vertex_pos[u] <= g.vertex_pos[v] else (v, u)
        classes[key].append(e)
    return classes


def isomorphisms(a: MultiGraph, b: MultiGraph) -> list[Contraction]:
    """All isomorphisms a -> b, as contractions with empty contracted set.
    Loop images carry an orientation choice, so each loop contributes a
    factor of 2."""
    out: list[Contraction] = []
    classes_b = _edge_classes(b)
    for vmap in _vertex_bijections(a, b):
        classes_a = _edge_classes(a)
        groups = []
        ok = True
        for (u, v), edges_a in sorted(classes_a.items(), key=lambda kv: (a.vertex_pos[kv[0][0]], a.vertex_pos[kv[0][1]])):
            wu, wv = vmap[u], vmap[v]
            key = (wu, wv) if b.vertex_pos[wu] <= b.vertex_pos[wv] else (wv, wu)
            edges_b = classes_b.get(key, [])
            if len(edges_b) != len(edges_a):
                ok = False
                break
            is_loop = u == v
            choices = []
            for tgt_perm in permutations(edges_b):
                if is_loop:
                    for flips in product((0, 1), repeat=len(edges_a)):
                        choices.append((tgt_perm, flips))
                else:
                    choices.append((tgt_perm, None))
            groups.append((edges_a, is_loop, choices))
        if not ok:
            continue
        for pick in product(*(g[2] for g in groups)):
            hmap: dict[HalfEdge, HalfEdge] = {}
            for (edges_a, is_loop, _), (tgt_perm, flips) in zip(groups, pick):
                for idx, e in enumerate(edges_a):
                    f = tgt_perm[idx]
                    if is_loop:
                        flip = flips[idx]
                        hmap[(e, 0)] = (f, flip)
                        hmap[(e, 1)] = (f, 1 - flip)
                    else:
                        u0 = a.ends(e)[0]
                        tgt_ends = b.ends(f)
                        s = 0 if tgt_ends[0] == vmap[u0] else 1
                        hmap[(e, 0)] = (f, s)
                        hmap[(e, 1)] = (f, 1 - s)
            out.append(Contraction(a, b, dict(vmap), hmap))
    out.sort(key=lambda c: c.key)
    return out


def automorphisms(g: MultiGraph) -> list[Contraction]:
    return isomorphisms(g, g)


def count_automorphisms(g: MultiGraph) -> int:
    total = 0
    classes = _edge_classes(g)
    for vmap in _vertex_bijections(g, g):
        prod = 1
        ok = True
        for (u, v), edges in classes.items():
            wu, wv = vmap[u], vmap[v]
            key = (wu, wv) if g.vertex_pos[wu] <= g.vertex_pos[wv] else (wv, wu)
            other = classes.get(key, [])
            if len(other) != len(edges):
                ok = False
                break
            k = len(edges)
            f = 1
            for j in range(2, k + 1):
                f *= j
            prod *= f
            if u == v:
                prod *= 2 ** k
        if ok:
            total += prod
    return total


def _forests(g: MultiGraph, size: int) -> Iterator[tuple[str, ...]]:
    """All acyclic edge subsets of the given size, in canonical order."""
    non_loops = [e for e, _ in g.edges if not g.is_loop(e)]
    for combo in combinations(non_loops, size):
        parent = {v: v for v in g.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for e in combo:
            u, v = g.ends(e)
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            yield combo


def enumerate_contractions(g: MultiGraph, g2: MultiGraph) -> list[Contraction]:
    """The complete morphism set Mor(g, g2), ordered deterministically.

    Every contraction factors uniquely as (canonical quotient by its
    contracted forest) followed by an isomorphism, so we enumerate forests of
    the right size and multiply by the isomorphisms of the quotient."""
    if genus(g) != genus(g2):
        raise GraphError("contractions only exist between graphs of equal genus")
    delta = g.n_edges - g2.n_edges
    if delta < 0:
        return []
    out: list[Contraction] = []
    for forest in _forests(g, delta):
        q, psi = contract_edges(g, forest)
        if q.canonical_key != g2.canonical_key:
            continue
        for iso in isomorphisms(q, g2):
            out.append(compose(iso, psi))
    out.sort(key=lambda c: c.key)
    return out


def count_contractions(g: MultiGraph, g2: MultiGraph) -> int:
    """|Mor(g, g2)| without materializing the morphisms."""
    if genus(g) != genus(g2):
        raise GraphError("contractions only exist between graphs of equal genus")
    delta = g.n_edges - g2.n_edges
    if delta < 0:
        return 0
    aut = None
    total = 0
    for forest in _forests(g, delta):
        q, _ = _quotient(g, forest, require_forest=True)
        if q.canonical_key == g2.canonical_key:
            if aut is None:
                aut = count_automorphisms(g2)
            total += aut
    return total


def hom_bound(g: MultiGraph, g2: MultiGraph) -> int:
    """Upper bound |Aut(g2)| * C(|g|, |g2|) on the morphism count."""
    return count_automorphisms(g2) * comb(g.n_edges, g2.n_edges)


# ---------------------------------------------------------------------------
# reduced graph enumeration
# ---------------------------------------------------------------------------


def enumerate_reduced_graphs(g: int) -> list[MultiGraph]:
    """One representative per isomorphism class of reduced genus-g graphs.

    For g >= 2 every vertex has valence >= 3, which bounds the search by
    |V| <= 2(g-1) and |E| <= 3(g-1).  Practical for g <= 3; the search space
    grows quickly beyond that."""
    if g < 0:
        raise GraphError("genus must be non-negative")
    if g == 0:
        return [MultiGraph.build(["v0"], [])]
    if g == 1:
        return [MultiGraph.build(["v0"], [("e0", ("v0", "v0"))])]
    found: dict[tuple, MultiGraph] = {}
    for nv in range(1, 2 * (g - 1) + 1):
        ne = nv + g - 1
        verts = [f"v{i}" for i in range(nv)]
        pairs = [(i, j) for i in range(nv) for j in range(i, nv)]
        for combo in _bounded_multisets(pairs, ne, nv):
            edges = [(f"e{k}", (verts[i], verts[j])) for k, (i, j) in enumerate(combo)]
            cand = MultiGraph.build(verts, edges)
            if not cand.is_connected():
                continue
            if any(cand.valence(v) < 3 for v in verts):
                continue
            if any(cand.is_bridge(e) for e, _ in cand.edges):
                continue
            key = cand.canonical_key
            if key not in found:
                found[key] = cand
        # (the one-loop exception only matters at genus 1, handled above)
    return [found[k] for k in sorted(found)]


def _bounded_multisets(pairs: list[tuple[int, int]], size: int, nv: int) -> Iterator[tuple]:
    """Multisets of vertex pairs of the given size whose valence sum can
    still reach 3 per vertex; mild pruning for enumerate_reduced_graphs."""
    deg = [0] * nv

    def rec(start: int, left: int, acc: list) -> Iterator[tuple]:
        if left == 0:
            if all(d >= 3 for d in deg):
                yield tuple(acc)
            return
        # prune: remaining degree capacity must cover the deficit
        deficit = sum(max(0, 3 - d) for d in deg)
        if deficit > 2 * left:
            return
        for idx in range(start, len(pairs)):
            i, j = pairs[idx]
            deg[i] += 2 if i == j else 1
            if i != j:
                deg[j] += 1
            acc.append((i, j))
            yield from rec(idx, left - 1, acc)
            acc.pop()
            deg[i] -= 2 if i == j else 1
            if i != j:
                deg[j] -= 1

    yield from rec(0, size, [])
