"""Domain types: schema, facts, instances, constraints, hypergraphs and repairs.

Everything here is immutable once built. Tuple identifiers (tids) are
1-based and dense, assigned in input order.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union


class SchemaError(ValueError):
    """A fact or constraint does not fit the schema."""


class DuplicateFactWarning(UserWarning):
    pass


class Semantics(str, enum.Enum):
    S = "s"
    C = "c"
    C_ENDOGENOUS = "c-endo"


class Normalizer(str, enum.Enum):
    FULL = "full"
    ENDOGENOUS = "endo"


class Schema:
    """Predicate name -> arity, in declaration order."""

    def __init__(self, predicates: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = predicates.items() if isinstance(predicates, Mapping) else predicates
        table: dict[str, int] = {}
        for name, arity in items:
            if not isinstance(name, str) or not name:
                raise SchemaError(f"invalid predicate name {name!r}")
            if not isinstance(arity, int) or arity < 1:
                raise SchemaError(f"predicate {name} needs arity >= 1, got {arity!r}")
            if name in table and table[name] != arity:
                raise SchemaError(
                    f"predicate {name} declared with arity {table[name]} and {arity}"
                )
            table[name] = arity
        self._table = table

    @property
    def predicates(self) -> Mapping[str, int]:
        return MappingProxyType(self._table)

    def arity(self, name: str) -> int:
        try:
            return self._table[name]
        except KeyError:
            raise SchemaError(f"undeclared predicate {name}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._table

    def __iter__(self) -> Iterator[str]:
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Schema):
            return NotImplemented
        return list(self._table.items()) == list(other._table.items())

    def __hash__(self) -> int:
        return hash(tuple(self._table.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}/{a}" for p, a in self._table.items())
        return f"Schema({inner})"

    def merge(self, other: Schema) -> Schema:
        """Union of both schemas; raises on arity conflicts."""
        return Schema(list(self._table.items()) + list(other._table.items()))

    def check(self, predicate: str, n_args: int) -> None:
        arity = self.arity(predicate)
        if arity != n_args:
            raise SchemaError(
                f"{predicate} has arity {arity} but {n_args} argument(s) were given"
            )


@dataclass(frozen=True, order=True)
class Fact:
    """A ground tuple ``predicate(args...)`` carrying its tuple id."""

    tid: int
    predicate: str
    args: tuple[str, ...]

    @property
    def key(self) -> tuple[str, tuple[str, ...]]:
        return (self.predicate, self.args)

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(self.args)})"


@dataclass(frozen=True)
class DatabaseInstance:
    """A set of facts plus the exogenous (protected) part ``D^x``.

    Use :func:`assign_tids` to build one from raw rows.
    """

    schema: Schema
    facts: tuple[Fact, ...] = ()
    exogenous: frozenset[int] = frozenset()
    _by_tid: Mapping[int, Fact] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_tid: dict[int, Fact] = {}
        seen: set[tuple[str, tuple[str, ...]]] = set()
        for fact in self.facts:
            if fact.tid in by_tid:
                raise SchemaError(f"tid {fact.tid} is used twice")
            if fact.key in seen:
                raise SchemaError(f"duplicate fact {fact}")
            self.schema.check(fact.predicate, len(fact.args))
            by_tid[fact.tid] = fact
            seen.add(fact.key)
        stray = set(self.exogenous) - by_tid.keys()
        if stray:
            raise SchemaError(f"exogenous tids {sorted(stray)} are not in the instance")
        object.__setattr__(self, "exogenous", frozenset(self.exogenous))
        object.__setattr__(self, "_by_tid", MappingProxyType(by_tid))

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.facts)

    def __getitem__(self, tid: int) -> Fact:
        return self._by_tid[tid]

    @property
    def tids(self) -> frozenset[int]:
        return frozenset(self._by_tid)

    @property
    def endogenous(self) -> frozenset[int]:
        return self.tids - self.exogenous

    def is_exogenous(self, tid: int) -> bool:
        return tid in self.exogenous

    def relation(self, predicate: str) -> list[Fact]:
        return [f for f in self.facts if f.predicate == predicate]

    def restrict(self, kept: Iterable[int]) -> DatabaseInstance:
        """Sub-instance on ``kept``; tids are preserved, not renumbered."""
        keep = set(kept)
        missing = keep - self._by_tid.keys()
        if missing:
            raise KeyError(f"unknown tids {sorted(missing)}")
        facts = tuple(f for f in self.facts if f.tid in keep)
        return DatabaseInstance(self.schema, facts, self.exogenous & keep)

    def with_schema(self, schema: Schema) -> DatabaseInstance:
        return DatabaseInstance(self.schema.merge(schema), self.facts, self.exogenous)

    def with_exogenous(self, exogenous: Iterable[int]) -> DatabaseInstance:
        return DatabaseInstance(self.schema, self.facts, frozenset(exogenous))


Row = Union[
    tuple[str, Sequence[str]],
    tuple[str, Sequence[str], bool],
]


def assign_tids(
    rows: Iterable[Row],
    schema: Schema | Mapping[str, int] | None = None,
) -> DatabaseInstance:
    """Build an instance from ``(predicate, args[, exogenous])`` rows.

    Tids are 1-based and follow input order. A repeated ``(predicate, args)``
    keeps its first occurrence and emits :class:`DuplicateFactWarning`. If
    no schema is given, arities are inferred from the first occurrence of
    each predicate.
    """
    if schema is not None and not isinstance(schema, Schema):
        schema = Schema(schema)
    inferred: dict[str, int] = dict(schema.predicates) if schema is not None else {}
    facts: list[Fact] = []
    exogenous: set[int] = set()
    positions: dict[tuple[str, tuple[str, ...]], int] = {}
    for row in rows:
        predicate, args = row[0], tuple(row[1])
        protected = bool(row[2]) if len(row) > 2 else False
        if not all(isinstance(a, str) for a in args):
            raise SchemaError(f"constants must be strings: {predicate}{args!r}")
        if schema is not None:
            schema.check(predicate, len(args))
        elif predicate in inferred:
            if inferred[predicate] != len(args):
                raise SchemaError(
                    f"{predicate} has arity {inferred[predicate]} but "
                    f"{len(args)} argument(s) were given"
                )
        else:
            Schema({predicate: len(args)})  # validates name and arity
            inferred[predicate] = len(args)
        key = (predicate, args)
        if key in positions:
            warnings.warn(
                f"duplicate fact {predicate}({','.join(args)}) collapsed into "
                f"tid {positions[key]}",
                DuplicateFactWarning,
                stacklevel=2,
            )
            continue
        tid = len(facts) + 1
        positions[key] = tid
        facts.append(Fact(tid, predicate, args))
        if protected:
            exogenous.add(tid)
    final = schema if schema is not None else Schema(inferred)
    return DatabaseInstance(final, tuple(facts), frozenset(exogenous))


# --------------------------------------------------------------------------
# constraints


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: str

    def __str__(self) -> str:
        return repr(self.value)


Term = Union[Var, Const]


@dataclass(frozen=True)
class Atom:
    predicate: str
    terms: tuple[Term, ...]

    def variables(self) -> list[str]:
        return [t.name for t in self.terms if isinstance(t, Var)]

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(map(str, self.terms))})"


@dataclass(frozen=True)
class DenialConstraint:
    """``<- A1, ..., Am, s1 != t1, ...``: the body must never be satisfied."""

    name: str
    atoms: tuple[Atom, ...]
    disequalities: tuple[tuple[Term, Term], ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("constraint name must be nonempty")
        if not self.atoms:
            raise ValueError(f"constraint {self.name} has an empty body")
        bound = {v for atom in self.atoms for v in atom.variables()}
        unsafe = sorted(
            {
                t.name
                for pair in self.disequalities
                for t in pair
                if isinstance(t, Var) and t.name not in bound
            }
        )
        if unsafe:
            raise ValueError(
                f"constraint {self.name}: unsafe variable(s) {', '.join(unsafe)} "
                "occur only in a disequality"
            )

    def variables(self) -> list[str]:
        """Body variables in first-occurrence order."""
        seen: dict[str, None] = {}
        for atom in self.atoms:
            for v in atom.variables():
                seen.setdefault(v)
        return list(seen)

    def check_schema(self, schema: Schema) -> None:
        for atom in self.atoms:
            schema.check(atom.predicate, len(atom.terms))


@dataclass(frozen=True)
class FunctionalDependency:
    """``predicate[lhs -> rhs]`` with 1-based attribute positions."""

    name: str
    predicate: str
    lhs: tuple[int, ...]
    rhs: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "lhs", tuple(sorted(set(self.lhs))))
        if self.rhs in self.lhs:
            raise ValueError(f"fd {self.name}: position {self.rhs} is on both sides")

    def check_schema(self, schema: Schema) -> None:
        arity = schema.arity(self.predicate)
        bad = [p for p in (*self.lhs, self.rhs) if not 1 <= p <= arity]
        if bad:
            raise SchemaError(
                f"fd {self.name}: position(s) {bad} out of range for "
                f"{self.predicate}/{arity}"
            )


@dataclass(frozen=True)
class ConstraintSet:
    """Denial constraints, with FDs already compiled into ``dcs``.

    ``original_fds`` keeps the FDs as written, for reporting only.
    """

    dcs: tuple[DenialConstraint, ...] = ()
    original_fds: tuple[FunctionalDependency, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "dcs", tuple(self.dcs))
        object.__setattr__(self, "original_fds", tuple(self.original_fds))
        names = [dc.name for dc in self.dcs]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ValueError(f"duplicate constraint name(s): {', '.join(dupes)}")

    def __iter__(self) -> Iterator[DenialConstraint]:
        return iter(self.dcs)

    def __len__(self) -> int:
        return len(self.dcs)

    def schema(self) -> Schema:
        """Arities implied by the constraint atoms."""
        return Schema(
            (atom.predicate, len(atom.terms)) for dc in self.dcs for atom in dc.atoms
        )

    def check_schema(self, schema: Schema) -> None:
        for dc in self.dcs:
            dc.check_schema(schema)


# --------------------------------------------------------------------------
# conflicts, repairs, reports


@dataclass(frozen=True)
class ViolationWitness:
    constraint: str
    assignment: Mapping[str, str]
    tids: frozenset[int]


@dataclass(frozen=True)
class ConflictHypergraph:
    """Vertices are tids; each edge is a set of tids violating one DC."""

    vertices: frozenset[int]
    edges: tuple[ViolationWitness, ...]

    def __post_init__(self) -> None:
        for edge in self.edges:
            if not edge.tids or not edge.tids <= self.vertices:
                raise ValueError(f"bad edge {sorted(edge.tids)} for {edge.constraint}")

    def __len__(self) -> int:
        return len(self.edges)

    def tid_sets(self) -> list[frozenset[int]]:
        return [e.tids for e in self.edges]


@dataclass(frozen=True)
class Repair:
    kept: frozenset[int]
    deleted: frozenset[int]
    semantics: Semantics

    @property
    def sort_key(self) -> tuple[int, list[int]]:
        return (len(self.deleted), sorted(self.deleted))

    def as_instance(self, instance: DatabaseInstance) -> DatabaseInstance:
        return instance.restrict(self.kept)


@dataclass(frozen=True)
class InconsistencyReport:
    """g3 degree ``min_deletions / normalizer`` plus supporting evidence.

    ``numerator`` and ``denominator`` are kept unreduced (2/4 stays 2/4);
    use :attr:`value` for the exact rational.
    """

    numerator: int
    denominator: int
    semantics: Semantics
    normalizer: Normalizer
    irreparable: bool
    min_deletions: int | None
    repair_count_found: int
    truncated: bool
    witnesses: tuple[Repair, ...] = ()

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def decimal(self) -> str:
        from decimal import Context, Decimal

        ctx = Context(prec=10)
        d = ctx.divide(Decimal(self.numerator), Decimal(self.denominator))
        return format(d.normalize(ctx), "f")

    def __float__(self) -> float:
        return float(self.value)
