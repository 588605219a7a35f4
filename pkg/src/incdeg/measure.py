"""The g3 inconsistency degree: minimum deletions over a normalizer."""
from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ConflictHypergraph,
    ConstraintSet,
    DatabaseInstance,
    InconsistencyReport,
    Normalizer,
    Semantics,
)
from .repairs import DEFAULT_CAP, c_repairs, enumerate_s_repairs
from .violations import find_conflicts


@dataclass(frozen=True)
class MeasureRequest:
    semantics: Semantics = Semantics.C
    normalizer: Normalizer = Normalizer.FULL

    def __post_init__(self) -> None:
        object.__setattr__(self, "semantics", Semantics(self.semantics))
        object.__setattr__(self, "normalizer", Normalizer(self.normalizer))
        if (
            self.normalizer is Normalizer.ENDOGENOUS
            and self.semantics is not Semantics.C_ENDOGENOUS
        ):
            raise ValueError("the endogenous normalizer requires c-endo semantics")


def inc_deg_g3(
    instance: DatabaseInstance,
    constraints: ConstraintSet,
    request: MeasureRequest | None = None,
    *,
    witnesses: int = 1,
    cap: int = DEFAULT_CAP,
    graph: ConflictHypergraph | None = None,
) -> InconsistencyReport:
    """Degree of inconsistency of ``instance`` under a repair semantics.

    The value is ``min |D \\ D'|`` over the repairs ``D'``, divided by ``|D|``
    (or ``|D^n|`` with the endogenous normalizer). With no repair at all the
    instance is irreparable and the value is 1. An empty normalizer set
    yields denominator 1, so an empty database scores 0/1.

    Parameters
    ----------
    witnesses : int
        How many repairs to attach, in canonical order.
    cap : int
        Upper bound on the number of repairs enumerated for the count.
    """
    request = request or MeasureRequest()
    if witnesses < 0:
        raise ValueError("witnesses must be >= 0")
    if graph is None:
        graph = find_conflicts(instance, constraints)
    cap = max(cap, witnesses, 1)

    if request.semantics is Semantics.S:
        found = enumerate_s_repairs(instance, constraints, cap=cap, graph=graph)
    elif request.semantics is Semantics.C:
        found = c_repairs(instance, constraints, cap=cap, graph=graph)
    else:
        found = c_repairs(
            instance, constraints, deletable=instance.endogenous, cap=cap, graph=graph
        )

    if request.normalizer is Normalizer.FULL:
        size = len(instance)
    else:
        size = len(instance.endogenous)
    denominator = size or 1

    if not found.repairs:
        return InconsistencyReport(
            numerator=denominator,
            denominator=denominator,
            semantics=request.semantics,
            normalizer=request.normalizer,
            irreparable=True,
            min_deletions=None,
            repair_count_found=0,
            truncated=False,
        )
    # S-repairs come fewest-deletions first, so the head is always minimum
    min_deletions = len(found[0].deleted)
    return InconsistencyReport(
        numerator=min_deletions,
        denominator=denominator,
        semantics=request.semantics,
        normalizer=request.normalizer,
        irreparable=False,
        min_deletions=min_deletions,
        repair_count_found=len(found),
        truncated=found.truncated,
        witnesses=found.repairs[:witnesses],
    )


def measures_agree(instance: DatabaseInstance, constraints: ConstraintSet) -> bool:
    """Self-check: the S- and C-based degrees coincide."""
    graph = find_conflicts(instance, constraints)
    s = inc_deg_g3(instance, constraints, MeasureRequest(Semantics.S), cap=1, graph=graph)
    c = inc_deg_g3(instance, constraints, MeasureRequest(Semantics.C), cap=1, graph=graph)
    return s.value == c.value
