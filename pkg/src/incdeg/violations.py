"""Denial-constraint evaluation and the conflict hypergraph."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterator

from .model import (
    Atom,
    ConflictHypergraph,
    ConstraintSet,
    Const,
    DatabaseInstance,
    DenialConstraint,
    Fact,
    FunctionalDependency,
    Schema,
    Term,
    Var,
    ViolationWitness,
)


def compile_fd_to_dc(fd: FunctionalDependency, schema: Schema) -> DenialConstraint:
    """Rewrite ``R[lhs -> rhs]`` as ``<- R(..z1..), R(..z2..), z1 != z2``.

    Key positions share variables ``v`` (or ``v1, v2, ...`` for composite
    keys); every other position gets a fresh variable per atom.
    """
    fd.check_schema(schema)
    arity = schema.arity(fd.predicate)
    keys = {p: (f"v{i}" if len(fd.lhs) > 1 else "v") for i, p in enumerate(fd.lhs, 1)}
    atoms = []
    for side in (1, 2):
        terms: list[Term] = []
        other = 0
        for pos in range(1, arity + 1):
            if pos in keys:
                terms.append(Var(keys[pos]))
            elif pos == fd.rhs:
                terms.append(Var(f"z{side}"))
            else:
                other += 1
                terms.append(Var(f"y{side}_{other}"))
        atoms.append(Atom(fd.predicate, tuple(terms)))
    return DenialConstraint(fd.name, tuple(atoms), ((Var("z1"), Var("z2")),))


Binding = dict[str, str]


def _unify(atom: Atom, fact: Fact, binding: Binding) -> Binding | None:
    out = binding
    for term, value in zip(atom.terms, fact.args):
        if isinstance(term, Const):
            if term.value != value:
                return None
        else:
            bound = out.get(term.name)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[term.name] = value
            elif bound != value:
                return None
    return out


def _value(term: Term, binding: Binding) -> str | None:
    return term.value if isinstance(term, Const) else binding.get(term.name)


def _diseqs_hold(dc: DenialConstraint, binding: Binding, final: bool) -> bool:
    for left, right in dc.disequalities:
        a, b = _value(left, binding), _value(right, binding)
        if a is None or b is None:
            if final:  # pragma: no cover - excluded by the safety check
                raise AssertionError("unbound variable in disequality")
            continue
        if a == b:
            return False
    return True


def _nested_loop(
    dc: DenialConstraint, instance: DatabaseInstance
) -> Iterator[tuple[Binding, tuple[int, ...]]]:
    """Plain nested loops in body order; the reference evaluator."""
    relations = [instance.relation(a.predicate) for a in dc.atoms]

    def extend(i: int, binding: Binding, tids: tuple[int, ...]):
        if i == len(dc.atoms):
            if _diseqs_hold(dc, binding, final=True):
                yield binding, tids
            return
        for fact in relations[i]:
            nxt = _unify(dc.atoms[i], fact, binding)
            if nxt is not None:
                yield from extend(i + 1, nxt, tids + (fact.tid,))

    yield from extend(0, {}, ())


def _indexed_join(
    dc: DenialConstraint, instance: DatabaseInstance
) -> Iterator[tuple[Binding, tuple[int, ...]]]:
    """Hash join with atoms ordered by ascending relation size."""
    sizes = {a.predicate: len(instance.relation(a.predicate)) for a in dc.atoms}
    order = sorted(range(len(dc.atoms)), key=lambda i: (sizes[dc.atoms[i].predicate], i))

    # for each step: atom, the argument positions whose value is known
    # before the lookup, and an index over those positions
    plan = []
    bound: set[str] = set()
    for i in order:
        atom = dc.atoms[i]
        key_pos = [
            p
            for p, t in enumerate(atom.terms)
            if isinstance(t, Const) or t.name in bound
        ]
        index: dict[tuple[str, ...], list[Fact]] = defaultdict(list)
        for fact in instance.relation(atom.predicate):
            index[tuple(fact.args[p] for p in key_pos)].append(fact)
        plan.append((atom, key_pos, index))
        bound.update(atom.variables())

    def extend(step: int, binding: Binding, tids: tuple[int, ...]):
        if step == len(plan):
            if _diseqs_hold(dc, binding, final=True):
                yield binding, tids
            return
        atom, key_pos, index = plan[step]
        probe = tuple(_value(atom.terms[p], binding) for p in key_pos)
        for fact in index.get(probe, ()):
            nxt = _unify(atom, fact, binding)
            if nxt is not None and _diseqs_hold(dc, nxt, final=False):
                yield from extend(step + 1, nxt, tids + (fact.tid,))

    yield from extend(0, {}, ())


def violations(
    dc: DenialConstraint, instance: DatabaseInstance, oracle: bool = False
) -> list[ViolationWitness]:
    """Distinct violating tid-sets of one constraint, sorted by tid list.

    The witness assignment of a tid-set is the first one the evaluator
    produced for it.
    """
    evaluate = _nested_loop if oracle else _indexed_join
    found: dict[frozenset[int], ViolationWitness] = {}
    for binding, tids in evaluate(dc, instance):
        key = frozenset(tids)
        if key not in found:
            assignment = {v: binding[v] for v in dc.variables()}
            found[key] = ViolationWitness(dc.name, assignment, key)
    return [found[k] for k in sorted(found, key=sorted)]


def find_conflicts(
    instance: DatabaseInstance, constraints: ConstraintSet, oracle: bool = False
) -> ConflictHypergraph:
    """Conflict hypergraph of ``instance`` under ``constraints``.

    Edges are ordered by constraint order, then by sorted tid list. Edges
    that are supersets of other edges are kept. ``oracle=True`` switches to
    unindexed nested loops, for differential testing.
    """
    for dc in constraints:
        for atom in dc.atoms:
            if atom.predicate in instance.schema:
                instance.schema.check(atom.predicate, len(atom.terms))
    edges: list[ViolationWitness] = []
    for dc in constraints:
        edges.extend(violations(dc, instance, oracle=oracle))
    return ConflictHypergraph(instance.tids, tuple(edges))


def is_consistent(instance: DatabaseInstance, constraints: ConstraintSet) -> bool:
    for dc in constraints:
        for binding, _ in _indexed_join(dc, instance):
            return False
    return True


def holds(witness: ViolationWitness, dc: DenialConstraint, instance: DatabaseInstance) -> bool:
    """Re-check a witness: every grounded body atom is a fact with a witnessed
    tid, and every disequality holds."""
    keys = {f.key: f.tid for f in instance}
    binding = dict(witness.assignment)
    matched = set()
    for atom in dc.atoms:
        args = tuple(_value(t, binding) for t in atom.terms)
        tid = keys.get((atom.predicate, args))
        if tid is None:
            return False
        matched.add(tid)
    return matched == set(witness.tids) and _diseqs_hold(dc, binding, final=True)


def format_hypergraph(graph: ConflictHypergraph) -> str:
    """One ``constraint: {tid,...}`` line per edge."""
    return "".join(
        f"{e.constraint}: {{{','.join(map(str, sorted(e.tids)))}}}\n" for e in graph.edges
    )
