"""Relational kernel and query counting.

Relations are sets of rows over interned value ids, so set semantics is
enforced at construction and every count is of distinct answers. The
counting pipelines reduce a quantified instance to a quantifier-free
acyclic one: materialize one relation per decomposition node, replace each
quantified component by a single relation over its free boundary computed
through an edge cover of the boundary, then count along the join tree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .decomposition import (
    Decomposition,
    DecompKind,
    DecompNode,
    ensure_valid,
    induced_decomposition,
    verify,
)
from .errors import (
    BindError,
    InvariantViolation,
    NotQuantifierFree,
    TooLarge,
    UnknownVariable,
    WidthNotOne,
)
from .hypergraph import Atom, Hypergraph, Query, from_query, s_components
from .starsize import acyclic_is_and_cover

BRUTE_MAX_ASSIGNMENTS = 2_000_000


@dataclass(frozen=True)
class Relation:
    """Named finite relation; rows are tuples of value ids, deduplicated."""

    name: str
    schema: tuple[str, ...]
    rows: frozenset

    def __post_init__(self):
        width = len(self.schema)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(f"row {row!r} does not match schema {self.schema!r}")

    @classmethod
    def from_rows(cls, name: str, schema: Iterable[str], rows: Iterable) -> "Relation":
        return cls(name, tuple(schema), frozenset(tuple(r) for r in rows))

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class Structure:
    """Interned value domain plus named relations over it."""

    domain: tuple[str, ...]
    relations: Mapping[str, Relation]

    def __post_init__(self):
        n = len(self.domain)
        for rel in self.relations.values():
            for row in rel.rows:
                for vid in row:
                    if not (0 <= vid < n):
                        raise ValueError(f"value id {vid} outside domain of size {n}")

    def value_id(self, value: str) -> int:
        try:
            return self.domain.index(value)
        except ValueError:
            raise KeyError(value) from None

    def value(self, vid: int) -> str:
        return self.domain[vid]


@dataclass(frozen=True)
class QueryInstance:
    query: Query
    structure: Structure

    def __post_init__(self):
        arities: dict[str, int] = {}
        for atom in self.query.atoms:
            arities.setdefault(atom.predicate, len(atom.variables))
            rel = self.structure.relations.get(atom.predicate)
            if rel is None:
                raise BindError(f"predicate {atom.predicate!r} not defined in the structure")
            if len(rel.schema) != len(atom.variables):
                raise BindError(
                    f"atom {atom.predicate!r} has arity {len(atom.variables)}, "
                    f"relation has arity {len(rel.schema)}"
                )


@dataclass(frozen=True)
class CountResult:
    count: int
    method: str
    stats: Mapping


# -- relational operators ---------------------------------------------------


def natural_join(r1: Relation, r2: Relation, name: Optional[str] = None) -> Relation:
    """Rows of r1 x r2 agreeing on shared variables; r1's schema order first."""
    shared = [v for v in r1.schema if v in r2.schema]
    extra = [v for v in r2.schema if v not in r1.schema]
    schema = r1.schema + tuple(extra)
    p1 = [r1.schema.index(v) for v in shared]
    p2 = [r2.schema.index(v) for v in shared]
    pextra = [r2.schema.index(v) for v in extra]
    index: dict = {}
    for row in r2.rows:
        index.setdefault(tuple(row[i] for i in p2), []).append(row)
    out = set()
    for row in r1.rows:
        key = tuple(row[i] for i in p1)
        for other in index.get(key, ()):
            out.add(row + tuple(other[i] for i in pextra))
    return Relation(name or f"({r1.name}*{r2.name})", schema, frozenset(out))


def project(r: Relation, variables: Sequence[str], name: Optional[str] = None) -> Relation:
    positions = []
    for v in variables:
        if v not in r.schema:
            raise UnknownVariable(f"variable {v!r} not in schema {r.schema!r}")
        positions.append(r.schema.index(v))
    rows = frozenset(tuple(row[i] for i in positions) for row in r.rows)
    return Relation(name or r.name, tuple(variables), rows)


def select(r: Relation, binding: Mapping[str, int], name: Optional[str] = None) -> Relation:
    positions = []
    for v, value in binding.items():
        if v not in r.schema:
            raise UnknownVariable(f"variable {v!r} not in schema {r.schema!r}")
        positions.append((r.schema.index(v), value))
    rows = frozenset(row for row in r.rows if all(row[i] == val for i, val in positions))
    return Relation(name or r.name, r.schema, rows)


def semijoin(r: Relation, s: Relation, name: Optional[str] = None) -> Relation:
    shared = [v for v in r.schema if v in s.schema]
    if not shared:
        rows = r.rows if s.rows else frozenset()
        return Relation(name or r.name, r.schema, rows)
    pr = [r.schema.index(v) for v in shared]
    ps = [s.schema.index(v) for v in shared]
    keys = {tuple(row[i] for i in ps) for row in s.rows}
    rows = frozenset(row for row in r.rows if tuple(row[i] for i in pr) in keys)
    return Relation(name or r.name, r.schema, rows)


def atom_relation(structure: Structure, atom: Atom, name: Optional[str] = None) -> Relation:
    """The atom's relation with repeated variables collapsed: schema is the
    atom's distinct variables in order, rows filtered to equal repeats."""
    rel = structure.relations[atom.predicate]
    schema = tuple(dict.fromkeys(atom.variables))
    first_pos = [atom.variables.index(v) for v in schema]
    groups = [
        [i for i, w in enumerate(atom.variables) if w == v]
        for v in schema
    ]
    rows = set()
    for row in rel.rows:
        if all(len({row[i] for i in grp}) == 1 for grp in groups):
            rows.add(tuple(row[i] for i in first_pos))
    return Relation(name or atom.predicate, schema, frozenset(rows))


# -- acyclic evaluation -------------------------------------------------------


def _require_width_one(h: Hypergraph, jt: Decomposition) -> None:
    if jt.kind not in (DecompKind.JOINTREE, DecompKind.GHD):
        raise WidthNotOne(f"expected a join tree, got kind {jt.kind.value}")
    report = verify(h, jt)
    if not report.ok:
        raise WidthNotOne(f"join tree fails verification: {report.violations}")
    if report.width > 1:
        raise WidthNotOne(f"decomposition has width {report.width}, need 1")


def _jointree_relations(inst: QueryInstance, jt: Decomposition, h: Hypergraph) -> dict[int, Relation]:
    """One relation per join-tree node: the node's guard atom joined with
    every atom assigned here (first node whose bag contains its variables),
    projected onto the bag."""
    atom_rels = [atom_relation(inst.structure, a, f"a{i}") for i, a in enumerate(inst.query.atoms)]
    order = jt.topo_order()
    assigned: dict[int, list[int]] = {n.node_id: [] for n in order}
    for i, rel in enumerate(atom_rels):
        vs = set(rel.schema)
        for n in order:
            if vs <= n.bag:
                assigned[n.node_id].append(i)
                break
        else:
            raise WidthNotOne(f"atom {i} is not covered by any bag")
    out: dict[int, Relation] = {}
    for n in order:
        parts = list(assigned[n.node_id])
        for eid in n.guard:
            if isinstance(eid, int) and eid not in parts and 0 <= eid < len(atom_rels):
                parts.append(eid)
        if parts:
            rel = atom_rels[parts[0]]
            for i in parts[1:]:
                rel = natural_join(rel, atom_rels[i])
            bag_vars = [v for v in h.vertices if v in n.bag]
            out[n.node_id] = project(rel, bag_vars, f"n{n.node_id}")
        else:
            out[n.node_id] = Relation(f"n{n.node_id}", (), frozenset({()}))
    return out


def _bottom_up(jt: Decomposition, rels: dict[int, Relation]) -> dict[int, Relation]:
    reduced = dict(rels)
    by_id = {n.node_id: n for n in jt.nodes}
    for node in jt.post_order():
        if node.parent is not None:
            reduced[node.parent] = semijoin(reduced[node.parent], reduced[node.node_id])
    return reduced


def _top_down(jt: Decomposition, rels: dict[int, Relation]) -> dict[int, Relation]:
    reduced = dict(rels)
    for node in jt.topo_order():
        if node.parent is not None:
            reduced[node.node_id] = semijoin(reduced[node.node_id], reduced[node.parent])
    return reduced


def boolean_acq(inst: QueryInstance, jt: Decomposition) -> bool:
    """Satisfiability of the instance by bottom-up semijoin reduction only;
    no tuples beyond the per-node relations are ever materialized."""
    h = from_query(inst.query).hypergraph
    _require_width_one(h, jt)
    rels = _jointree_relations(inst, jt, h)
    if any(not r.rows for r in rels.values()):
        return False
    reduced = _bottom_up(jt, rels)
    return bool(reduced[jt.root().node_id].rows)


def count_acyclic_qf(inst: QueryInstance, jt: Decomposition) -> CountResult:
    """Exact count for a quantifier-free acyclic instance.

    Semijoin reduction followed by one bottom-up pass that stores, per
    surviving tuple, its number of distinct extensions into the subtree.
    """
    q = inst.query
    if set(q.free_vars) != set(q.variables()):
        raise NotQuantifierFree("count_acyclic_qf requires all variables free")
    h = from_query(q).hypergraph
    _require_width_one(h, jt)
    rels = _jointree_relations(inst, jt, h)
    max_intermediate = max((len(r) for r in rels.values()), default=0)
    reduced = _top_down(jt, _bottom_up(jt, rels))
    children = jt.children_map()
    counts: dict[int, dict[tuple, int]] = {}
    for node in jt.post_order():
        rel = reduced[node.node_id]
        table: dict[tuple, int] = {row: 1 for row in rel.rows}
        for child in children[node.node_id]:
            crel = reduced[child.node_id]
            shared = [v for v in rel.schema if v in crel.schema]
            pc = [crel.schema.index(v) for v in shared]
            pp = [rel.schema.index(v) for v in shared]
            sums: dict[tuple, int] = {}
            for crow, c in counts[child.node_id].items():
                key = tuple(crow[i] for i in pc)
                sums[key] = sums.get(key, 0) + c
            for row in list(table):
                key = tuple(row[i] for i in pp)
                table[row] *= sums.get(key, 0)
        counts[node.node_id] = table
    total = sum(counts[jt.root().node_id].values())
    stats = {
        "bag_sizes": [len(rels[n.node_id]) for n in jt.topo_order()],
        "max_intermediate": max_intermediate,
    }
    return CountResult(total, "acyclic-qf", stats)


# -- the quantified counting pipeline ----------------------------------------


def count_cq_via_ghd(inst: QueryInstance, d: Decomposition) -> CountResult:
    return _count_pipeline(inst, d, fractional=False)


def count_cq_via_fractional(inst: QueryInstance, d: Decomposition) -> CountResult:
    return _count_pipeline(inst, d, fractional=True)


def _count_pipeline(inst: QueryInstance, d: Decomposition, fractional: bool) -> CountResult:
    sh = from_query(inst.query)
    h = sh.hypergraph
    if fractional:
        ensure_valid(h, d, (DecompKind.FRACTIONAL,))
    else:
        ensure_valid(h, d, (DecompKind.JOINTREE, DecompKind.GHD, DecompKind.HINGE))
    comps = s_components(sh)
    atom_rels = [atom_relation(inst.structure, a, f"a{i}") for i, a in enumerate(inst.query.atoms)]
    stats: dict = {"components": len(comps), "cover_sizes": [], "bag_sizes": [], "max_intermediate": 0}

    comp_relations: list[Relation] = []
    for idx, comp in enumerate(comps):
        comp_relations.append(
            _component_relation(inst, h, d, comp, atom_rels, fractional, stats, idx)
        )

    quantified = set(h.vertices) - sh.s
    kept = [i for i, a in enumerate(inst.query.atoms) if not (set(a.variables) & quantified)]

    final_atoms: list[Atom] = []
    final_rels: dict[str, Relation] = {}
    for j, i in enumerate(kept):
        pred = f"__k{j}"
        final_atoms.append(Atom(pred, atom_rels[i].schema))
        final_rels[pred] = atom_rels[i]
    for i, rel in enumerate(comp_relations):
        pred = f"__c{i}"
        final_atoms.append(Atom(pred, rel.schema))
        final_rels[pred] = rel

    final_query = Query("ans", inst.query.free_vars, tuple(final_atoms))
    final_inst = QueryInstance(final_query, Structure(inst.structure.domain, final_rels))
    final_h = from_query(final_query).hypergraph
    d2 = _rebuild_decomposition(h, d, comps, kept, fractional, final_h)
    ensure_valid(final_h, d2, (d2.kind,))

    bag_inst, bag_jt, sizes = _bag_materialize(final_inst, d2, fractional, all_free=True)
    stats["bag_sizes"].append(sizes)
    stats["max_intermediate"] = max(stats["max_intermediate"], max(sizes, default=0))
    result = count_acyclic_qf(bag_inst, bag_jt)
    stats["max_intermediate"] = max(stats["max_intermediate"], result.stats["max_intermediate"])
    return CountResult(result.count, "fractional" if fractional else "ghd", stats)


def _component_relation(inst, h, d, comp, atom_rels, fractional, stats, idx) -> Relation:
    """Steps (2)-(4) for one S-component: bag-materialize the restricted
    instance, cover its free boundary, and collect the satisfiable boundary
    assignments into a fresh relation."""
    scope = comp.closure
    di = induced_decomposition(h, d, scope)

    proj: list[tuple[int, Relation]] = []
    for o, rel in enumerate(atom_rels):
        keep = tuple(v for v in rel.schema if v in scope)
        if keep:
            proj.append((o, project(rel, keep, f"p{o}")))
    ordinal = {o: j for j, (o, _) in enumerate(proj)}

    sub_atoms = tuple(Atom(f"__p{o}", rel.schema) for o, rel in proj)
    sub_rels = {f"__p{o}": rel for o, rel in proj}
    sub_query = Query("sub", (), sub_atoms)
    sub_inst = QueryInstance(sub_query, Structure(inst.structure.domain, sub_rels))

    remapped_nodes = []
    for n in di.topo_order():
        guard = frozenset(ordinal[e] for e in n.guard)
        weights = None
        if n.weights is not None:
            weights = {ordinal[e]: w for e, w in n.weights.items()}
        remapped_nodes.append(DecompNode(n.node_id, n.parent, guard, n.bag, weights))
    di2 = Decomposition(di.kind, tuple(remapped_nodes))

    bag_inst, bag_jt, sizes = _bag_materialize(sub_inst, di2, fractional, all_free=False)
    stats["bag_sizes"].append(sizes)
    stats["max_intermediate"] = max(stats["max_intermediate"], max(sizes, default=0))

    hp = from_query(bag_inst.query).hypergraph
    s_schema = tuple(v for v in h.vertices if v in comp.s_vertices)
    _, cover = acyclic_is_and_cover(hp, bag_jt, comp.s_vertices)
    stats["cover_sizes"].append(len(cover))

    rows = _boundary_assignments(bag_inst, bag_jt, s_schema, sorted(cover))
    return Relation(f"c{idx}", s_schema, frozenset(rows))


def _bag_materialize(
    inst, d, fractional, all_free: bool
) -> tuple[QueryInstance, Decomposition, list[int]]:
    """One relation per decomposition node; returns the solution-equivalent
    acyclic instance, its join tree, and the per-node relation sizes.

    Zero-arity atoms carry pure satisfiability and are enforced once, at
    the root node.
    """
    origin = from_query(inst.query).hypergraph
    rels = [atom_relation(inst.structure, a, f"a{i}") for i, a in enumerate(inst.query.atoms)]
    zero_ary = [rel for rel in rels if not rel.schema]
    order = d.topo_order()
    position = {n.node_id: j for j, n in enumerate(order)}

    bag_rels: list[Relation] = []
    for n in order:
        bag_vars = [v for v in origin.vertices if v in n.bag]
        if fractional:
            parts = []
            for rel in rels:
                cut = [v for v in rel.schema if v in n.bag]
                if cut:
                    parts.append(project(rel, cut))
        else:
            union = frozenset().union(*(origin.edge_set(e) for e in n.guard)) if n.guard else frozenset()
            parts = [rel for rel in rels if rel.schema and set(rel.schema) <= union]
        if n.parent is None:
            parts = parts + zero_ary
        if parts:
            acc = parts[0]
            for rel in parts[1:]:
                acc = natural_join(acc, rel)
            if not set(bag_vars) <= set(acc.schema):
                raise InvariantViolation(f"bag {bag_vars} not covered by joined atoms")
            bag_rels.append(project(acc, bag_vars, f"b{position[n.node_id]}"))
        else:
            if bag_vars:
                raise InvariantViolation(f"nonempty bag {bag_vars} with no covering atom")
            bag_rels.append(Relation(f"b{position[n.node_id]}", (), frozenset({()})))

    atoms = tuple(Atom(f"__b{j}", rel.schema) for j, rel in enumerate(bag_rels))
    structure = Structure(inst.structure.domain, {f"__b{j}": rel for j, rel in enumerate(bag_rels)})
    if all_free:
        free = tuple(dict.fromkeys(v for rel in bag_rels for v in rel.schema))
        if set(free) != set(inst.query.free_vars):
            raise InvariantViolation("materialized bags do not cover exactly the free variables")
    else:
        free = ()
    bag_query = Query("bags", free, atoms)
    bag_inst = QueryInstance(bag_query, structure)

    jt_nodes = []
    for j, n in enumerate(order):
        parent = position[n.parent] if n.parent is not None else None
        guard = frozenset({j}) if bag_rels[j].schema else frozenset()
        jt_nodes.append(DecompNode(j, parent, guard, frozenset(bag_rels[j].schema)))
    bag_jt = Decomposition(DecompKind.JOINTREE, tuple(jt_nodes))
    return bag_inst, bag_jt, [len(r) for r in bag_rels]


def _boundary_assignments(bag_inst, bag_jt, s_schema, cover_ordinals) -> set[tuple]:
    """Boundary tuples of the component: for every consistent combination of
    cover-atom tuples, keep the boundary assignment iff fixing it leaves the
    component satisfiable. Verdicts are memoized per boundary assignment."""
    rels = {i: atom_relation(bag_inst.structure, a) for i, a in enumerate(bag_inst.query.atoms)}
    order = bag_jt.topo_order()
    children = bag_jt.children_map()
    s_set = set(s_schema)

    node_s_cols = {}
    node_index = {}
    for j, rel in rels.items():
        cols = [v for v in rel.schema if v in s_set]
        node_s_cols[j] = cols
        positions = [rel.schema.index(v) for v in cols]
        idx: dict[tuple, list] = {}
        for row in rel.rows:
            idx.setdefault(tuple(row[i] for i in positions), []).append(row)
        node_index[j] = idx

    children = {n.node_id: [] for n in order}
    for n in order:
        if n.parent is not None:
            children[n.parent].append(n.node_id)
    # positions of the parent-shared variables, on both sides
    up_positions = {}
    for n in order:
        if n.parent is None:
            continue
        shared = [v for v in rels[n.parent].schema if v in rels[n.node_id].schema]
        up_positions[n.node_id] = (
            [rels[n.node_id].schema.index(v) for v in shared],
            [rels[n.parent].schema.index(v) for v in shared],
        )

    def selected_rows(j: int, skey: tuple):
        if node_s_cols[j]:
            return node_index[j].get(skey, ())
        return rels[j].rows

    # projections of a node's selected rows onto fixed positions only depend
    # on the boundary key, so the key sets are shared across probes
    proj_cache: dict = {}

    def projected_keys(j: int, skey: tuple, positions: tuple) -> frozenset:
        got = proj_cache.get((j, skey, positions))
        if got is None:
            got = frozenset(
                tuple(row[i] for i in positions) for row in selected_rows(j, skey)
            )
            proj_cache[(j, skey, positions)] = got
        return got

    def satisfiable(binding: dict) -> bool:
        skeys = {j: tuple(binding[v] for v in node_s_cols[j]) for j in rels}
        keysets: dict[int, frozenset] = {}
        for node in bag_jt.post_order():
            j = node.node_id
            kids = children[j]
            if not kids:
                if node.parent is None:
                    return bool(selected_rows(j, skeys[j]))
                ks = projected_keys(j, skeys[j], tuple(up_positions[j][0]))
                if not ks:
                    return False
                keysets[j] = ks
                continue
            # children constrain the node per parent-side position signature
            groups: dict[tuple, frozenset] = {}
            for c in kids:
                sig = tuple(up_positions[c][1])
                ks = keysets[c]
                cur = groups.get(sig)
                groups[sig] = ks if cur is None else (cur & ks)
            if any(not ks for ks in groups.values()):
                return False
            if node.parent is None and len(groups) == 1:
                (sig, ks), = groups.items()
                return not projected_keys(j, skeys[j], sig).isdisjoint(ks)
            if node.parent is not None and len(groups) == 1:
                (sig, ks), = groups.items()
                if sig == tuple(up_positions[j][0]):
                    # child- and parent-shared columns coincide: propagate by
                    # plain set intersection of cached key sets
                    combined = projected_keys(j, skeys[j], sig) & ks
                    if not combined:
                        return False
                    keysets[j] = combined
                    continue
            rows = selected_rows(j, skeys[j])
            for sig, ks in groups.items():
                rows = [row for row in rows if tuple(row[i] for i in sig) in ks]
                if not rows:
                    return False
            if node.parent is None:
                return True
            keysets[j] = frozenset(
                tuple(row[i] for i in up_positions[j][0]) for row in rows
            )
        return True

    cover_rels = [(j, rels[j]) for j in cover_ordinals]
    prefix_vars: list[list[str]] = []
    seen_vars: set[str] = set()
    level_index = []
    for j, rel in cover_rels:
        shared = [v for v in rel.schema if v in seen_vars]
        prefix_vars.append(shared)
        positions = [rel.schema.index(v) for v in shared]
        idx: dict[tuple, list] = {}
        for row in sorted(rel.rows):
            idx.setdefault(tuple(row[i] for i in positions), []).append(row)
        level_index.append(idx)
        seen_vars |= set(rel.schema)

    decided: dict[tuple, bool] = {}
    out: set[tuple] = set()

    def walk(depth: int, binding: dict) -> None:
        if depth == len(cover_rels):
            key = tuple(binding[v] for v in s_schema)
            verdict = decided.get(key)
            if verdict is None:
                verdict = satisfiable({v: binding[v] for v in s_schema})
                decided[key] = verdict
            if verdict:
                out.add(key)
            return
        j, rel = cover_rels[depth]
        lookup = tuple(binding[v] for v in prefix_vars[depth])
        fresh = [v for v in rel.schema if v not in binding]
        positions = [rel.schema.index(v) for v in fresh]
        rows = level_index[depth].get(lookup, ())
        if not rows:
            return
        for row in rows:
            for v, i in zip(fresh, positions):
                binding[v] = row[i]
            walk(depth + 1, binding)
        for v in fresh:
            del binding[v]

    if not cover_rels:
        if satisfiable({}):
            out.add(())
        return out
    walk(0, {})
    return out


def _rebuild_decomposition(h, d, comps, kept, fractional, final_h) -> Decomposition:
    """Quantifier-elimination rewrite of the decomposition: bags lose core
    vertices and gain the boundary sets of the components they touched;
    guards swap core-meeting edges for the new component edges."""
    cores = [comp.core for comp in comps]
    boundaries = [comp.s_vertices for comp in comps]
    all_core = frozenset().union(*cores) if cores else frozenset()
    new_edge_id = {("atom", orig): j for j, orig in enumerate(kept)}
    for i in range(len(comps)):
        new_edge_id[("comp", i)] = len(kept) + i

    nodes = []
    for n in d.topo_order():
        touched = {i for i, core in enumerate(cores) if n.bag & core}
        bag = n.bag - all_core
        for i in touched:
            bag = bag | boundaries[i]
        triggers = set(touched)
        guard = set()
        for e in n.guard:
            es = h.edge_set(e)
            hit = {i for i, core in enumerate(cores) if es & core}
            if hit:
                triggers |= hit
            else:
                guard.add(new_edge_id[("atom", e)])
        guard |= {new_edge_id[("comp", i)] for i in triggers}

        weights = None
        if fractional:
            weights = {}
            for e, w in (n.weights or {}).items():
                es = h.edge_set(e)
                hit = {i for i, core in enumerate(cores) if es & core}
                if hit:
                    triggers |= hit
                else:
                    weights[new_edge_id[("atom", e)]] = w
            for i in sorted(triggers):
                weights[new_edge_id[("comp", i)]] = Fraction(1)
            for v in bag:
                total = sum(
                    (w for eid, w in weights.items() if v in final_h.edge_set(eid)),
                    Fraction(0),
                )
                if total < 1:
                    repaired = False
                    for i, boundary in enumerate(boundaries):
                        eid = new_edge_id[("comp", i)]
                        if v in boundary and eid not in weights:
                            weights[eid] = Fraction(1)
                            repaired = True
                            break
                    if not repaired:
                        raise InvariantViolation(f"cannot cover vertex {v!r} in rebuilt bag")
            guard |= set(weights)
        nodes.append(DecompNode(n.node_id, n.parent, frozenset(guard), bag, weights))
    kind = DecompKind.FRACTIONAL if fractional else DecompKind.GHD
    return Decomposition(kind, tuple(nodes))


# -- brute-force oracle and enumeration ---------------------------------------


def count_brute(inst: QueryInstance, *, max_assignments: int = BRUTE_MAX_ASSIGNMENTS) -> CountResult:
    """Enumerate free-variable assignments in lexicographic domain order and
    decide the existential remainder by backtracking over atoms."""
    free = inst.query.free_vars
    n = len(inst.structure.domain)
    total = n ** len(free)
    if total > max_assignments:
        raise TooLarge(f"{total} assignments exceed budget {max_assignments}")
    rels = [atom_relation(inst.structure, a) for a in inst.query.atoms]

    # rows grouped by the values at a fixed set of bound positions; the set of
    # position patterns is tiny because the query shape is fixed
    index_cache: dict = {}

    def rows_matching(i: int, bound: tuple) -> list:
        positions = tuple(pos for pos, _ in bound)
        key = (i, positions)
        idx = index_cache.get(key)
        if idx is None:
            idx = {}
            for row in rels[i].rows:
                idx.setdefault(tuple(row[p] for p in positions), []).append(row)
            index_cache[key] = idx
        return idx.get(tuple(val for _, val in bound), [])

    def exists(remaining: list[int], binding: dict) -> bool:
        if not remaining:
            return True
        best, best_unbound = None, None
        for i in remaining:
            unbound = sum(1 for v in rels[i].schema if v not in binding)
            if best_unbound is None or unbound < best_unbound:
                best, best_unbound = i, unbound
        rel = rels[best]
        rest = [i for i in remaining if i != best]
        bound = tuple((pos, binding[v]) for pos, v in enumerate(rel.schema) if v in binding)
        for row in rows_matching(best, bound):
            added = []
            for pos, v in enumerate(rel.schema):
                if v not in binding:
                    binding[v] = row[pos]
                    added.append(v)
            if exists(rest, binding):
                for v in added:
                    del binding[v]
                return True
            for v in added:
                del binding[v]
        return False

    count = 0
    indices = list(range(len(rels)))
    for combo in itertools.product(range(n), repeat=len(free)):
        if exists(indices, dict(zip(free, combo))):
            count += 1
    return CountResult(count, "brute", {"assignments": total})


def enumerate_is(h: Hypergraph):
    """Every independent set exactly once, in lexicographic vertex order."""
    adj = h.conflict_adjacency()
    order = h.vertices

    def extend(prefix: list, blocked: frozenset, start: int):
        for i in range(start, len(order)):
            v = order[i]
            if v in blocked:
                continue
            prefix.append(v)
            yield frozenset(prefix)
            yield from extend(prefix, blocked | adj[v], i + 1)
            prefix.pop()

    yield frozenset()
    yield from extend([], frozenset(), 0)
