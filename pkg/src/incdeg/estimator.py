"""scikit-learn style front end.

``X`` is a database instance (or anything :func:`check_instance` accepts);
the constraints are a constructor parameter, so estimators clone and
grid-search like any other.
"""
from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .measure import MeasureRequest, inc_deg_g3
from .model import DatabaseInstance, InconsistencyReport, Semantics
from .repairs import DEFAULT_CAP, c_repairs
from .validation import align, check_constraints, check_instance
from .violations import find_conflicts


class IrreparableError(ValueError):
    pass


class InconsistencyMeasure(BaseEstimator):
    """Fit computes the g3 inconsistency degree of an instance.

    Parameters
    ----------
    constraints : ConstraintSet, str or list
        Denial constraints and/or functional dependencies.
    semantics : {"c", "s", "c-endo"}
        Repair semantics.
    normalizer : {"full", "endo"}
        Divide by ``|D|`` or by the number of endogenous tuples.
    n_witnesses : int
        Repairs kept in ``report_.witnesses``.
    cap : int
        Enumeration cap for the repair count.

    Attributes
    ----------
    report_ : InconsistencyReport
    degree_ : Fraction
    hypergraph_ : ConflictHypergraph
    """

    def __init__(
        self,
        constraints=None,
        semantics: str = "c",
        normalizer: str = "full",
        n_witnesses: int = 1,
        cap: int = DEFAULT_CAP,
    ):
        self.constraints = constraints
        self.semantics = semantics
        self.normalizer = normalizer
        self.n_witnesses = n_witnesses
        self.cap = cap

    def _prepare(self, X):
        instance = check_instance(X)
        constraints = check_constraints(self.constraints, instance.schema)
        return align(instance, constraints), constraints

    def fit(self, X, y=None):
        instance, constraints = self._prepare(X)
        request = MeasureRequest(self.semantics, self.normalizer)
        self.hypergraph_ = find_conflicts(instance, constraints)
        self.report_ = inc_deg_g3(
            instance,
            constraints,
            request,
            witnesses=self.n_witnesses,
            cap=self.cap,
            graph=self.hypergraph_,
        )
        self.degree_ = self.report_.value
        self.n_tuples_in_ = len(instance)
        return self

    def measure(self, X) -> InconsistencyReport:
        """Report for another instance, with the fitted settings."""
        check_is_fitted(self, "report_")
        instance, constraints = self._prepare(X)
        return inc_deg_g3(
            instance,
            constraints,
            MeasureRequest(self.semantics, self.normalizer),
            witnesses=self.n_witnesses,
            cap=self.cap,
        )

    def score(self, X, y=None) -> float:
        """``1 - degree``, so that higher means cleaner."""
        return float(1 - self.measure(X).value)


class RepairTransformer(TransformerMixin, BaseEstimator):
    """Delete the tuples of one C-repair (the first in canonical order).

    With ``semantics="c-endo"`` only endogenous tuples may go; an instance
    without such a repair raises :class:`IrreparableError`.
    """

    def __init__(self, constraints=None, semantics: str = "c", cap: int = DEFAULT_CAP):
        self.constraints = constraints
        self.semantics = semantics
        self.cap = cap

    def _repairs(self, X):
        semantics = Semantics(self.semantics)
        if semantics is Semantics.S:
            raise ValueError("RepairTransformer picks a C-repair; use 'c' or 'c-endo'")
        instance = check_instance(X)
        constraints = check_constraints(self.constraints, instance.schema)
        instance = align(instance, constraints)
        deletable = instance.endogenous if semantics is Semantics.C_ENDOGENOUS else None
        return instance, c_repairs(instance, constraints, deletable, cap=self.cap)

    def fit(self, X, y=None):
        instance, repairs = self._repairs(X)
        self.repairs_ = repairs
        self.n_repairs_ = len(repairs)
        self.deleted_ = repairs[0].deleted if repairs.repairs else None
        self._fitted_key = (instance.facts, instance.exogenous)
        return self

    def transform(self, X) -> DatabaseInstance:
        check_is_fitted(self, "repairs_")
        instance = check_instance(X)
        if (instance.facts, instance.exogenous) == self._fitted_key:
            repairs = self.repairs_
            instance = align(instance, check_constraints(self.constraints, instance.schema))
        else:
            instance, repairs = self._repairs(instance)
        if not repairs.repairs:
            raise IrreparableError("no repair exists under the chosen semantics")
        return instance.restrict(repairs[0].kept)


def degree(X, constraints, semantics: str = "c", normalizer: str = "full") -> Fraction:
    """Shortcut: exact inconsistency degree of ``X``."""
    est = InconsistencyMeasure(constraints, semantics, normalizer, n_witnesses=0, cap=1)
    return est.fit(X).degree_
