"""Coerce user input into instances and constraint sets."""
from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Iterable

from .model import (
    ConstraintSet,
    DatabaseInstance,
    DenialConstraint,
    FunctionalDependency,
    Schema,
    assign_tids,
)
from .textio import parse_constraints, parse_instance
from .violations import compile_fd_to_dc


def check_instance(X: Any) -> DatabaseInstance:
    """Accept an instance, facts text, a path to a facts file, or rows of
    ``(predicate, args[, exogenous])``."""
    if isinstance(X, DatabaseInstance):
        return X
    if isinstance(X, os.PathLike):
        path = Path(X)
        return parse_instance(path.read_text(encoding="utf-8"), filename=str(path))
    if isinstance(X, str):
        return parse_instance(X)
    if isinstance(X, Iterable):
        return assign_tids(X)
    raise TypeError(
        f"expected a DatabaseInstance, facts text or rows, got {type(X).__name__}"
    )


def check_constraints(constraints: Any, schema: Schema | None = None) -> ConstraintSet:
    """Accept a constraint set, constraint text or path, or a list mixing
    :class:`DenialConstraint` and :class:`FunctionalDependency`.

    Arities are checked against ``schema`` for every predicate it declares.
    """
    if constraints is None:
        raise ValueError("no constraints given")
    if isinstance(constraints, os.PathLike):
        path = Path(constraints)
        cs = parse_constraints(path.read_text(encoding="utf-8"), schema, str(path))
    elif isinstance(constraints, str):
        cs = parse_constraints(constraints, schema)
    elif isinstance(constraints, ConstraintSet):
        cs = constraints
    elif isinstance(constraints, Iterable):
        dcs, fds = [], []
        for c in constraints:
            if isinstance(c, DenialConstraint):
                dcs.append(c)
            elif isinstance(c, FunctionalDependency):
                if schema is None:
                    raise ValueError(f"fd {c.name} needs a schema to be compiled")
                dcs.append(compile_fd_to_dc(c, schema))
                fds.append(c)
            else:
                raise TypeError(f"not a constraint: {c!r}")
        cs = ConstraintSet(tuple(dcs), tuple(fds))
    else:
        raise TypeError(f"cannot read constraints from {type(constraints).__name__}")
    if schema is not None:
        cs.check_schema(schema.merge(cs.schema()))
    return cs


def align(instance: DatabaseInstance, constraints: ConstraintSet) -> DatabaseInstance:
    """Extend the instance schema with predicates only the constraints
    mention (as empty relations); raises on arity conflicts."""
    return instance.with_schema(constraints.schema())
