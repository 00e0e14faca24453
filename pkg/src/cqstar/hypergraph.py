"""Hypergraphs, S-hypergraphs, and their component structure.

Vertices keep their first-appearance order and every operation here is a
pure function over immutable values, so component lists and all witnesses
derived from them are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import UnknownVertex, VariableWithoutAtom

EdgeId = Union[int, str]
VertexId = str


def edge_sort_key(eid: EdgeId):
    """Total order over mixed int/str edge ids (ints first)."""
    if isinstance(eid, int):
        return (0, eid, "")
    return (1, 0, str(eid))


@dataclass(frozen=True)
class Atom:
    predicate: str
    variables: tuple[str, ...]


@dataclass(frozen=True)
class Query:
    """A conjunctive query: head variables are free, other body variables bound.

    Atoms are identified by their 0-based ordinal in the body; repeated
    predicate names are legal as long as arities agree at bind time.
    """

    head: str
    free_vars: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if len(set(self.free_vars)) != len(self.free_vars):
            raise ValueError("duplicate free variable in query head")

    def variables(self) -> tuple[str, ...]:
        """All variables in first-appearance (body) order."""
        seen: dict[str, None] = {}
        for atom in self.atoms:
            for v in atom.variables:
                seen.setdefault(v)
        return tuple(seen)

    def bound_vars(self) -> tuple[str, ...]:
        free = set(self.free_vars)
        return tuple(v for v in self.variables() if v not in free)


class Hypergraph:
    """Finite hypergraph with ordered vertices and identified edges.

    Edges may repeat as sets under distinct ids; ``dedup_edges`` is the
    deduplicated set family used by independence and cover computations.
    Instances are immutable by convention: no method mutates state.
    """

    __slots__ = ("vertices", "edges", "_vindex", "_edge_map", "_dedup", "_incidence")

    def __init__(
        self,
        vertices: Iterable[VertexId],
        edges: Iterable[tuple[EdgeId, Iterable[VertexId]]] = (),
    ):
        vs = tuple(dict.fromkeys(vertices))
        vset = set(vs)
        out: list[tuple[EdgeId, frozenset[VertexId]]] = []
        seen_ids: set[EdgeId] = set()
        for eid, members in edges:
            fs = frozenset(members)
            if eid in seen_ids:
                raise ValueError(f"duplicate edge id {eid!r}")
            seen_ids.add(eid)
            for v in fs:
                if v not in vset:
                    raise UnknownVertex(v)
            out.append((eid, fs))
        self.vertices = vs
        self.edges = tuple(out)
        self._vindex = {v: i for i, v in enumerate(vs)}
        self._edge_map = {eid: fs for eid, fs in out}
        dedup: dict[frozenset[VertexId], EdgeId] = {}
        for eid, fs in out:
            dedup.setdefault(fs, eid)
        self._dedup = dedup
        incidence: dict[VertexId, tuple[EdgeId, ...]] = {v: () for v in vs}
        acc: dict[VertexId, list[EdgeId]] = {v: [] for v in vs}
        for eid, fs in out:
            for v in fs:
                acc[v].append(eid)
        for v in vs:
            incidence[v] = tuple(acc[v])
        self._incidence = incidence

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Hypergraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    # -- basic accessors -------------------------------------------------

    def vertex_index(self, v: VertexId) -> int:
        try:
            return self._vindex[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def has_vertex(self, v: VertexId) -> bool:
        return v in self._vindex

    def edge_ids(self) -> tuple[EdgeId, ...]:
        return tuple(eid for eid, _ in self.edges)

    def edge_set(self, eid: EdgeId) -> frozenset[VertexId]:
        return self._edge_map[eid]

    def has_edge_id(self, eid: EdgeId) -> bool:
        return eid in self._edge_map

    def dedup_edges(self) -> tuple[tuple[EdgeId, frozenset[VertexId]], ...]:
        """The deduplicated set family, one (first id, set) per distinct set."""
        return tuple((eid, fs) for fs, eid in self._dedup.items())

    def incident_edges(self, v: VertexId) -> tuple[EdgeId, ...]:
        try:
            return self._incidence[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def sort_vertices(self, vs: Iterable[VertexId]) -> tuple[VertexId, ...]:
        return tuple(sorted(vs, key=self.vertex_index))

    def conflict_adjacency(self) -> dict[VertexId, frozenset[VertexId]]:
        """v -> vertices sharing at least one edge with v (v excluded)."""
        adj: dict[VertexId, set[VertexId]] = {v: set() for v in self.vertices}
        for _, fs in self.dedup_edges():
            for v in fs:
                adj[v].update(fs)
        return {v: frozenset(s - {v}) for v, s in adj.items()}

    # -- operations ------------------------------------------------------

    def induced(self, vs: Iterable[VertexId]) -> "Hypergraph":
        """Induced subhypergraph on ``vs``: nonempty intersections keep their ids.

        Retained ids double as provenance back to the originating edges.
        """
        keep = set(vs)
        for v in keep:
            if v not in self._vindex:
                raise UnknownVertex(v)
        new_vertices = tuple(v for v in self.vertices if v in keep)
        new_edges = []
        for eid, fs in self.edges:
            cut = fs & keep
            if cut:
                new_edges.append((eid, cut))
        return Hypergraph(new_vertices, new_edges)

    def connected_components(self) -> list[frozenset[VertexId]]:
        """Maximal path-connected vertex classes, ordered by earliest vertex."""
        seen: set[VertexId] = set()
        out: list[frozenset[VertexId]] = []
        for start in self.vertices:
            if start in seen:
                continue
            comp = {start}
            frontier = [start]
            while frontier:
                v = frontier.pop()
                for eid in self._incidence[v]:
                    for u in self._edge_map[eid]:
                        if u not in comp:
                            comp.add(u)
                            frontier.append(u)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def primal_graph(self) -> "Hypergraph":
        """Clique expansion: one 2-vertex edge per co-occurring pair."""
        pairs: dict[frozenset[VertexId], None] = {}
        for _, fs in self.dedup_edges():
            members = self.sort_vertices(fs)
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    pairs.setdefault(frozenset((members[i], members[j])))
        edges = []
        for pair in pairs:
            u, v = self.sort_vertices(pair)
            edges.append((f"{u}~{v}", pair))
        return Hypergraph(self.vertices, edges)


@dataclass(frozen=True)
class SHypergraph:
    """A hypergraph with a distinguished vertex set S (the free variables)."""

    hypergraph: Hypergraph
    s: frozenset[VertexId]

    def __post_init__(self):
        for v in self.s:
            if not self.hypergraph.has_vertex(v):
                raise UnknownVertex(v)


@dataclass(frozen=True)
class SComponent:
    """One S-component: a connected chunk of quantified vertices plus its closure."""

    core: frozenset[VertexId]
    closure: frozenset[VertexId]
    induced: Hypergraph
    s_vertices: frozenset[VertexId]
    provenance: Mapping[EdgeId, EdgeId]


def from_query(query: Query) -> SHypergraph:
    """Canonical S-hypergraph of a query: a vertex per variable, an edge per atom.

    Raises VariableWithoutAtom for a free variable occurring in no atom;
    silent answer multiplication by the domain size is a foot-gun we reject.
    """
    vertices = query.variables()
    present = set(vertices)
    for v in query.free_vars:
        if v not in present:
            raise VariableWithoutAtom(v)
    edges = [(i, frozenset(atom.variables)) for i, atom in enumerate(query.atoms)]
    return SHypergraph(Hypergraph(vertices, edges), frozenset(query.free_vars))


def s_components(sh: SHypergraph) -> list[SComponent]:
    """S-components of (H, S), ordered by the earliest core vertex.

    Each component is the subhypergraph induced on the union of all edges
    meeting one connected component of H with S removed. Empty when S = V.
    """
    h = sh.hypergraph
    quantified = [v for v in h.vertices if v not in sh.s]
    restricted = h.induced(quantified)
    out = []
    for core in restricted.connected_components():
        closure: set[VertexId] = set()
        for eid, fs in h.edges:
            if fs & core:
                closure |= fs
        induced = h.induced(closure)
        provenance = {eid: eid for eid, _ in induced.edges}
        out.append(
            SComponent(
                core=core,
                closure=frozenset(closure),
                induced=induced,
                s_vertices=frozenset(closure) & sh.s,
                provenance=provenance,
            )
        )
    return out
