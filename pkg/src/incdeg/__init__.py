"""Inconsistency degrees of relational databases from their repairs."""
from .asp import AspProgram, emit_repair_program, run_external_solver, solve_external
from .estimator import InconsistencyMeasure, IrreparableError, RepairTransformer, degree
from .measure import MeasureRequest, inc_deg_g3, measures_agree
from .model import (
    Atom,
    ConflictHypergraph,
    ConstraintSet,
    Const,
    DatabaseInstance,
    DenialConstraint,
    Fact,
    FunctionalDependency,
    InconsistencyReport,
    Normalizer,
    Repair,
    Schema,
    SchemaError,
    Semantics,
    Var,
    ViolationWitness,
    assign_tids,
)
from .repairs import (
    RepairSet,
    c_repairs,
    endogenous_c_repairs,
    enumerate_s_repairs,
    is_repair,
    min_hitting_set,
)
from .textio import (
    ParseError,
    SourceSpan,
    parse_constraints,
    parse_instance,
    serialize_constraints,
    serialize_instance,
    serialize_report,
)
from .violations import compile_fd_to_dc, find_conflicts, is_consistent

__version__ = "0.1.0"

__all__ = [
    "AspProgram",
    "Atom",
    "ConflictHypergraph",
    "Const",
    "ConstraintSet",
    "DatabaseInstance",
    "DenialConstraint",
    "Fact",
    "FunctionalDependency",
    "InconsistencyMeasure",
    "InconsistencyReport",
    "IrreparableError",
    "MeasureRequest",
    "Normalizer",
    "ParseError",
    "Repair",
    "RepairSet",
    "RepairTransformer",
    "Schema",
    "SchemaError",
    "Semantics",
    "SourceSpan",
    "Var",
    "ViolationWitness",
    "assign_tids",
    "c_repairs",
    "compile_fd_to_dc",
    "degree",
    "emit_repair_program",
    "endogenous_c_repairs",
    "enumerate_s_repairs",
    "find_conflicts",
    "inc_deg_g3",
    "is_consistent",
    "is_repair",
    "measures_agree",
    "min_hitting_set",
    "parse_constraints",
    "parse_instance",
    "run_external_solver",
    "serialize_constraints",
    "serialize_instance",
    "serialize_report",
    "solve_external",
]
