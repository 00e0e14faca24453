"""Instance and hypergraph generators used by tests and benchmarks.

The reduction-style generators reproduce combinatorial identities (clique
counting through star queries, independent-set transfer) that the test
suite checks against brute force. Random generators are driven by a
SplitMix64 stream so identical seeds give identical artifacts on any
platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .engine import QueryInstance, Relation, Structure
from .decomposition import Decomposition, DecompKind, DecompNode
from .hypergraph import Atom, Hypergraph, Query, SHypergraph

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 stream; tiny, well known, and portable across languages."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("below() requires n >= 1")
        limit = MASK64 - (MASK64 % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def chance(self, num: int, den: int) -> bool:
        return self.below(den) < num


@dataclass(frozen=True)
class SimpleGraph:
    """Loopless undirected graph on vertices 0..n-1."""

    n: int
    edges: frozenset

    def __post_init__(self):
        for e in self.edges:
            u, v = tuple(e)
            if u == v:
                raise ValueError("loops are not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {set(e)} out of range for n={self.n}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "SimpleGraph":
        return cls(n, frozenset(frozenset(p) for p in pairs))

    def adjacent(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges


def gen_clique_star_instance(g: SimpleGraph, k: int) -> QueryInstance:
    """Star query whose answer count encodes the k-clique count of g.

    The quantified center guesses a missing adjacency among the k picked
    positions, so the answers are exactly the non-clique tuples and
    #k-cliques = (n^k - count) / k!. Pairs with equal endpoints are
    included: a loopless graph never has them as edges, which is what makes
    repeated-vertex tuples count as non-cliques.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n
    vertices = [str(v) for v in range(n)]
    composites = [
        f"({u},{w},{i},{j})"
        for u in range(n)
        for w in range(n)
        for i in range(1, k + 1)
        for j in range(1, k + 1)
    ]
    domain = tuple(vertices + composites)
    vid = {value: i for i, value in enumerate(domain)}

    relations = {}
    for i in range(1, k + 1):
        rows = set()
        for u in range(n):
            for w in range(n):
                if u != w and g.adjacent(u, w):
                    continue
                for j in range(1, k + 1):
                    if j == i:
                        continue
                    rows.add((vid[f"({u},{w},{i},{j})"], vid[str(u)]))
                    rows.add((vid[f"({w},{u},{j},{i})"], vid[str(u)]))
        for u in range(n):
            for w in range(n):
                for i2 in range(1, k + 1):
                    if i2 == i:
                        continue
                    for j2 in range(1, k + 1):
                        if j2 == i:
                            continue
                        for v in range(n):
                            rows.add((vid[f"({u},{w},{i2},{j2})"], vid[str(v)]))
        relations[f"P{i}"] = Relation(f"P{i}", ("z", f"v{i}"), frozenset(rows))

    atoms = tuple(Atom(f"P{i}", ("z", f"v{i}")) for i in range(1, k + 1))
    query = Query("ans", tuple(f"v{i}" for i in range(1, k + 1)), atoms)
    return QueryInstance(query, Structure(domain, relations))


def gen_is_hardness_hypergraph(g: SimpleGraph, k: int) -> tuple[Hypergraph, Decomposition]:
    """k-layer blowup of a graph: independent sets of size k transfer both
    ways between g and the hypergraph. Comes with its single-node width-k
    witness decomposition (guards are the k layer edges)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    names = {(v, i): f"v{v}_{i}" for v in range(g.n) for i in range(1, k + 1)}
    vertices = [names[(v, i)] for v in range(g.n) for i in range(1, k + 1)]
    edges = []
    for i in range(1, k + 1):
        edges.append((f"V{i}", frozenset(names[(v, i)] for v in range(g.n))))
    for v in range(g.n):
        edges.append((f"H{v}", frozenset(names[(v, i)] for i in range(1, k + 1))))
    for e in sorted(g.edges, key=lambda e: tuple(sorted(e))):
        u, w = sorted(e)
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                edges.append((f"E{u}_{w}_{i}_{j}", frozenset({names[(u, i)], names[(w, j)]})))
    h = Hypergraph(vertices, edges)
    node = DecompNode(
        0,
        None,
        frozenset(f"V{i}" for i in range(1, k + 1)),
        frozenset(vertices),
    )
    return h, Decomposition(DecompKind.GHD, (node,))


def gen_g_star(n: int) -> SHypergraph:
    """Star with n leaves; the leaves are the distinguished set."""
    if n < 1:
        raise ValueError("n must be >= 1")
    vertices = ["z"] + [f"y{i}" for i in range(1, n + 1)]
    edges = [(f"e{i}", frozenset({"z", f"y{i}"})) for i in range(1, n + 1)]
    return SHypergraph(Hypergraph(vertices, edges), frozenset(f"y{i}" for i in range(1, n + 1)))


def gen_obs_equivalent(h: Hypergraph) -> SHypergraph:
    """Add a fresh vertex to every edge and distinguish all original vertices:
    the star size of the result equals the maximum independent set of h.

    Rejects inputs with edgeless vertices; those cannot sit in any star.
    """
    for v in h.vertices:
        if not h.incident_edges(v):
            raise ValueError(f"vertex {v!r} lies in no edge")
    fresh = "x"
    while h.has_vertex(fresh):
        fresh += "_"
    vertices = list(h.vertices) + [fresh]
    edges = [(eid, fs | {fresh}) for eid, fs in h.edges]
    return SHypergraph(Hypergraph(vertices, edges), frozenset(h.vertices))


def gen_random_instance(
    *,
    variables: int,
    atoms: int,
    max_arity: int,
    domain: int,
    seed: int,
    max_tuples: int = 12,
) -> QueryInstance:
    """Seed-reproducible random instance within brute-force budgets."""
    if min(variables, atoms, max_arity, domain) < 1:
        raise ValueError("all size parameters must be >= 1")
    rng = SplitMix64(seed)
    var_names = [f"x{i}" for i in range(variables)]

    atom_vars = []
    for _ in range(atoms):
        arity = 1 + rng.below(max_arity)
        atom_vars.append(tuple(var_names[rng.below(variables)] for _ in range(arity)))
    covered = {v for vs in atom_vars for v in vs}
    for v in var_names:
        if v not in covered:
            atom_vars.append((v,))

    predicates = []
    by_arity: dict[int, list[str]] = {}
    for i, vs in enumerate(atom_vars):
        arity = len(vs)
        pool = by_arity.get(arity, ())
        if pool and rng.chance(1, 4):
            predicates.append(rng.choice(pool))
        else:
            name = f"R{i}"
            predicates.append(name)
            by_arity.setdefault(arity, []).append(name)

    relations: dict[str, Relation] = {}
    for pred, vs in zip(predicates, atom_vars):
        if pred in relations:
            continue
        arity = len(vs)
        n_rows = 1 + rng.below(min(max_tuples, domain ** arity))
        rows = {tuple(rng.below(domain) for _ in range(arity)) for _ in range(n_rows)}
        relations[pred] = Relation(pred, tuple(f"c{i}" for i in range(arity)), frozenset(rows))

    free = tuple(v for v in var_names if rng.chance(1, 2))
    query = Query("ans", free, tuple(Atom(p, vs) for p, vs in zip(predicates, atom_vars)))
    structure = Structure(tuple(f"d{i}" for i in range(domain)), relations)
    return QueryInstance(query, structure)


def gen_random_acyclic(*, edges: int, max_arity: int, seed: int) -> Hypergraph:
    """Random acyclic hypergraph grown by ear addition: every new edge is a
    subset of an existing edge plus fresh vertices, so GYO always succeeds."""
    if edges < 1 or max_arity < 1:
        raise ValueError("edges and max_arity must be >= 1")
    rng = SplitMix64(seed)
    counter = 0

    def fresh() -> str:
        nonlocal counter
        name = f"v{counter}"
        counter += 1
        return name

    first_arity = 1 + rng.below(max_arity)
    vertices = [fresh() for _ in range(first_arity)]
    edge_list: list[tuple[str, frozenset]] = [("e0", frozenset(vertices))]
    for i in range(1, edges):
        base = sorted(edge_list[rng.below(len(edge_list))][1])
        keep = rng.below(len(base) + 1)
        picked = []
        pool = list(base)
        for _ in range(keep):
            picked.append(pool.pop(rng.below(len(pool))))
        n_fresh = rng.below(max_arity + 1 - min(len(picked), max_arity))
        if not picked and n_fresh == 0:
            n_fresh = 1
        new_vertices = [fresh() for _ in range(n_fresh)]
        vertices.extend(new_vertices)
        edge_list.append((f"e{i}", frozenset(picked + new_vertices)))
    return Hypergraph(vertices, edge_list)
