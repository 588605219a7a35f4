"""S-, C- and endogenous C-repairs via hitting sets of the conflict hypergraph.

A sub-instance is consistent iff its complement hits every conflict edge,
so C-repairs are complements of minimum hitting sets and S-repairs are
complements of minimal ones. Ties are always broken by the sorted
deleted-tid list, compared lexicographically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Iterator

from .model import (
    ConflictHypergraph,
    ConstraintSet,
    DatabaseInstance,
    Repair,
    Semantics,
)
from .violations import find_conflicts, is_consistent

DEFAULT_CAP = 64
MEMO_MAX_EDGES = 30


class _Problem:
    """Edges restricted to deletable vertices, minimized, as bitmasks.

    ``vertices`` is sorted ascending; vertex ``i`` in bitmask terms is
    ``vertices[i]``. ``hits[i]`` is the mask of edges containing vertex i.
    """

    def __init__(self, edges: Iterable[Collection[int]], deletable: Collection[int]):
        allowed = set(deletable)
        restricted = {frozenset(e) & allowed for e in edges}
        self.feasible = frozenset() not in restricted
        # drop edges that contain another edge; hitting sets are unchanged
        minimal = [
            e for e in restricted if not any(o < e for o in restricted)
        ] if self.feasible else []
        minimal.sort(key=lambda e: (len(e), sorted(e)))
        self.edges = minimal
        self.vertices = sorted({v for e in minimal for v in e})
        pos = {v: i for i, v in enumerate(self.vertices)}
        self.edge_vertices = [sorted(pos[v] for v in e) for e in minimal]
        self.hits = [0] * len(self.vertices)
        for j, members in enumerate(self.edge_vertices):
            for i in members:
                self.hits[i] |= 1 << j
        self.all_edges = (1 << len(minimal)) - 1

    def packing_bound(self, uncovered: int, above: int = -1) -> int:
        """Size of a greedy set of pairwise disjoint uncovered edges, using
        only vertices with index > ``above``. A lower bound on any cover."""
        used = 0
        count = 0
        j = 0
        rest = uncovered
        while rest:
            if rest & 1:
                mask = 0
                for i in self.edge_vertices[j]:
                    if i > above:
                        mask |= 1 << i
                if not mask & used:
                    used |= mask
                    count += 1
            rest >>= 1
            j += 1
        return count

    def greedy_size(self) -> int:
        uncovered = self.all_edges
        size = 0
        while uncovered:
            best = max(
                range(len(self.vertices)),
                key=lambda i: (bin(self.hits[i] & uncovered).count("1"), -i),
            )
            uncovered &= ~self.hits[best]
            size += 1
        return size

    def minimum_size(self) -> int:
        """Exact minimum hitting set size by branch and bound."""
        best = self.greedy_size()
        memo: dict[int, int] | None = {} if len(self.edges) <= MEMO_MAX_EDGES else None

        def search(uncovered: int, depth: int) -> None:
            nonlocal best
            if not uncovered:
                best = min(best, depth)
                return
            if depth + self.packing_bound(uncovered) >= best:
                return
            if memo is not None:
                if memo.get(uncovered, best + 1) <= depth:
                    return
                memo[uncovered] = depth
            # branch on the uncovered edge with the fewest vertices
            branch_edge = min(
                (k for k in range(len(self.edges)) if uncovered >> k & 1),
                key=lambda k: len(self.edge_vertices[k]),
            )
            choices = sorted(
                self.edge_vertices[branch_edge],
                key=lambda i: -bin(self.hits[i] & uncovered).count("1"),
            )
            for i in choices:
                search(uncovered & ~self.hits[i], depth + 1)

        search(self.all_edges, 0)
        return best

    def covers_in_order(self, size: int, minimal_only: bool) -> Iterator[list[int]]:
        """Hitting sets of exactly ``size`` vertices in lexicographic order of
        their sorted tid lists.

        With ``minimal_only`` every yielded set is inclusion-minimal. When
        ``size`` is the minimum, every yielded set is minimum.
        """
        n_edges = len(self.edges)

        def last_chance(uncovered: int, above: int) -> int:
            # the largest vertex index that may still be picked next: some
            # uncovered edge must be hit, and its top vertex bounds the choice
            limit = len(self.vertices) - 1
            rest = uncovered
            j = 0
            while rest:
                if rest & 1:
                    top = self.edge_vertices[j][-1]
                    if top <= above:
                        return -1
                    limit = min(limit, top)
                rest >>= 1
                j += 1
            return limit

        def extend(chosen: list[int], uncovered: int) -> Iterator[list[int]]:
            budget = size - len(chosen)
            if not uncovered:
                if budget == 0 and (not minimal_only or self._is_minimal(chosen)):
                    yield [self.vertices[i] for i in chosen]
                return
            if budget == 0:
                return
            above = chosen[-1] if chosen else -1
            limit = last_chance(uncovered, above)
            if limit < 0 or self.packing_bound(uncovered, above) > budget:
                return
            for i in range(above + 1, limit + 1):
                if not self.hits[i] & uncovered:
                    continue
                chosen.append(i)
                yield from extend(chosen, uncovered & ~self.hits[i])
                chosen.pop()

        if n_edges == 0:
            if size == 0:
                yield []
            return
        yield from extend([], self.all_edges)

    def _is_minimal(self, chosen: list[int]) -> bool:
        for i in chosen:
            others = 0
            for k in chosen:
                if k != i:
                    others |= self.hits[k]
            if others == self.all_edges:
                return False
        return True


def _edge_sets(graph: ConflictHypergraph | Iterable[Collection[int]]) -> list[frozenset[int]]:
    if isinstance(graph, ConflictHypergraph):
        return graph.tid_sets()
    return [frozenset(e) for e in graph]


def min_hitting_set(
    graph: ConflictHypergraph | Iterable[Collection[int]],
    deletable: Collection[int] | None = None,
) -> frozenset[int] | None:
    """Minimum-cardinality set of deletable tids meeting every edge.

    Returns ``None`` when some edge has no deletable tid (infeasible). Among
    minimum sets the lexicographically smallest sorted tid list wins.
    ``deletable=None`` means every tid may be deleted.
    """
    edges = _edge_sets(graph)
    if deletable is None:
        deletable = {v for e in edges for v in e}
    problem = _Problem(edges, deletable)
    if not problem.feasible:
        return None
    size = problem.minimum_size()
    return frozenset(next(problem.covers_in_order(size, minimal_only=False)))


def minimum_hitting_sets(
    graph: ConflictHypergraph | Iterable[Collection[int]],
    deletable: Collection[int] | None = None,
) -> Iterator[frozenset[int]]:
    """All minimum hitting sets, lexicographic order; nothing if infeasible."""
    edges = _edge_sets(graph)
    if deletable is None:
        deletable = {v for e in edges for v in e}
    problem = _Problem(edges, deletable)
    if not problem.feasible:
        return
    size = problem.minimum_size()
    for cover in problem.covers_in_order(size, minimal_only=False):
        yield frozenset(cover)


def minimal_hitting_sets(
    graph: ConflictHypergraph | Iterable[Collection[int]],
) -> Iterator[frozenset[int]]:
    """All inclusion-minimal hitting sets, by size then lexicographically."""
    problem = _Problem(_edge_sets(graph), {v for e in _edge_sets(graph) for v in e})
    if not problem.edges:
        yield frozenset()
        return
    start = problem.minimum_size()
    # a minimal transversal has a private edge per element
    for size in range(start, min(len(problem.edges), len(problem.vertices)) + 1):
        for cover in problem.covers_in_order(size, minimal_only=True):
            yield frozenset(cover)


@dataclass(frozen=True)
class RepairSet:
    """Repairs in canonical order plus whether the listing was cut at the cap."""

    repairs: tuple[Repair, ...]
    truncated: bool

    def __iter__(self) -> Iterator[Repair]:
        return iter(self.repairs)

    def __len__(self) -> int:
        return len(self.repairs)

    def __getitem__(self, i: int) -> Repair:
        return self.repairs[i]


def _take(
    covers: Iterator[frozenset[int]], tids: frozenset[int], semantics: Semantics, cap: int
) -> RepairSet:
    if cap < 1:
        raise ValueError("cap must be >= 1")
    out: list[Repair] = []
    for deleted in covers:
        if len(out) == cap:
            return RepairSet(tuple(out), truncated=True)
        out.append(Repair(tids - deleted, deleted, semantics))
    return RepairSet(tuple(out), truncated=False)


def c_repairs(
    instance: DatabaseInstance,
    constraints: ConstraintSet,
    deletable: Collection[int] | None = None,
    cap: int = DEFAULT_CAP,
    graph: ConflictHypergraph | None = None,
) -> RepairSet:
    """Minimum-deletion repairs, deleting only tids in ``deletable``.

    ``deletable=None`` gives plain C-repairs; anything narrower is tagged
    :attr:`Semantics.C_ENDOGENOUS`. An empty result means no repair exists.
    """
    if graph is None:
        graph = find_conflicts(instance, constraints)
    semantics = Semantics.C if deletable is None else Semantics.C_ENDOGENOUS
    allowed = instance.tids if deletable is None else frozenset(deletable)
    return _take(minimum_hitting_sets(graph, allowed), instance.tids, semantics, cap)


def endogenous_c_repairs(
    instance: DatabaseInstance,
    constraints: ConstraintSet,
    cap: int = DEFAULT_CAP,
    graph: ConflictHypergraph | None = None,
) -> RepairSet:
    return c_repairs(instance, constraints, instance.endogenous, cap, graph)


def enumerate_s_repairs(
    instance: DatabaseInstance,
    constraints: ConstraintSet,
    cap: int = DEFAULT_CAP,
    graph: ConflictHypergraph | None = None,
) -> RepairSet:
    """Subset-maximal consistent sub-instances, fewest deletions first."""
    if graph is None:
        graph = find_conflicts(instance, constraints)
    return _take(minimal_hitting_sets(graph), instance.tids, Semantics.S, cap)


@dataclass(frozen=True)
class RepairCheck:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_repair(
    instance: DatabaseInstance,
    kept: Collection[int],
    constraints: ConstraintSet,
    semantics: Semantics | str,
) -> RepairCheck:
    """Check ``kept`` against the definition of an S-, C- or endogenous
    C-repair. The ``reason`` names the clause that failed."""
    semantics = Semantics(semantics)
    keep = frozenset(kept)
    unknown = keep - instance.tids
    if unknown:
        return RepairCheck(False, f"unknown tids {sorted(unknown)}")
    if not is_consistent(instance.restrict(keep), constraints):
        return RepairCheck(False, "kept sub-instance violates the constraints")
    deleted = instance.tids - keep
    if semantics is Semantics.S:
        for tid in sorted(deleted):
            if is_consistent(instance.restrict(keep | {tid}), constraints):
                return RepairCheck(
                    False, f"not maximal: tuple {tid} can be re-added consistently"
                )
        return RepairCheck(True)
    graph = find_conflicts(instance, constraints)
    if semantics is Semantics.C:
        best = min_hitting_set(graph, instance.tids)
        assert best is not None
        if len(deleted) != len(best):
            return RepairCheck(
                False, f"not maximum: deletes {len(deleted)} tuples, minimum is {len(best)}"
            )
        return RepairCheck(True)
    protected = deleted & instance.exogenous
    if protected:
        return RepairCheck(False, f"deletes exogenous tuples {sorted(protected)}")
    best = min_hitting_set(graph, instance.endogenous)
    if best is None:  # pragma: no cover - consistency above implies feasibility
        return RepairCheck(False, "no endogenous repair exists")
    if len(deleted) != len(best):
        return RepairCheck(
            False,
            f"not minimum: deletes {len(deleted)} endogenous tuples, minimum is {len(best)}",
        )
    return RepairCheck(True)
