"""Repair programs in answer-set syntax, and an optional external solver run.

The emitted program has one stable model per S-repair; weak constraints
keep only the minimum-deletion (C-repair) models, and ``numdel(N)`` in an
optimal model is the minimum number of deletions.

Two dialects are rendered. ``dlv`` uses ``v`` for disjunction and ends with
the brave query ``numdel(X)?``. ``clingo`` uses ``|`` and replaces the
query by ``#show`` directives, since clingo has no query syntax.
"""
from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .model import ConstraintSet, Const, DatabaseInstance, DenialConstraint, Term

DIALECTS = ("dlv", "clingo")
RESERVED = frozenset({"del", "numdel", "not"})
SOLVER_ENV = "INCDEG_SOLVER_CMD"
DIALECT_ENV = "INCDEG_ASP_DIALECT"
# clasp/clingo report SAT=10, UNSAT=20, optimum=30 through the exit status
_OK_EXIT = {0, 10, 20, 30}

_ASP_CONST = re.compile(r"[a-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class AspProgram:
    facts: tuple[str, ...]
    rules: tuple[str, ...]
    weak_constraints: tuple[str, ...]
    query: str
    dialect: str = "dlv"
    predicate_names: dict[str, str] = field(default_factory=dict, compare=False)

    @property
    def text(self) -> str:
        out = ["% facts", *self.facts, "% repair rules", *self.rules]
        out += ["% weak constraints", *self.weak_constraints]
        if self.dialect == "dlv":
            out += ["% brave query", self.query]
        else:
            out += [f"% brave query: {self.query}", "#show del/1.", "#show numdel/1."]
        return "".join(line + "\n" for line in out)

    def write(self, path: str | os.PathLike) -> Path:
        path = Path(path)
        path.write_bytes(self.text.encode("utf-8"))
        return path


def _mangle_predicates(names: list[str]) -> dict[str, str]:
    """Map source predicates to distinct lowercase solver names whose primed
    forms (suffix ``_x``) collide with nothing else."""
    taken = set(RESERVED)
    mapping: dict[str, str] = {}
    for name in names:
        base = name.lower()
        if not re.match(r"[a-z]", base):
            base = "p" + base
        candidate, k = base, 1
        while candidate in taken or f"{candidate}_x" in taken:
            k += 1
            candidate = f"{base}_{k}"
        taken.update((candidate, f"{candidate}_x"))
        mapping[name] = candidate
    return mapping


def _constant(value: str) -> str:
    if _ASP_CONST.fullmatch(value) and value not in ("not",):
        return value
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


class _Renamer:
    """Lowercase constraint variables -> solver variables, avoiding the
    tid variables of the rule."""

    def __init__(self, dc: DenialConstraint):
        self.tid_vars = [f"T{i}" for i in range(1, len(dc.atoms) + 1)]
        blocked = set(self.tid_vars)
        self.names = {}
        for v in dc.variables():
            name = v[0].upper() + v[1:]
            if name in blocked:
                name = "V_" + v
            self.names[v] = name

    def term(self, t: Term) -> str:
        return _constant(t.value) if isinstance(t, Const) else self.names[t.name]


def emit_repair_program(
    instance: DatabaseInstance, constraints: ConstraintSet, dialect: str = "dlv"
) -> AspProgram:
    """Repair program for ``instance`` under ``constraints``.

    Facts carry the tid as first argument and follow tid order; repair
    rules follow constraint order. Exogenous tuples get a hard constraint
    forbidding their deletion.
    """
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}; choose from {DIALECTS}")
    arity = dict(instance.schema.predicates)
    for dc in constraints:
        for atom in dc.atoms:
            arity.setdefault(atom.predicate, len(atom.terms))
    names = _mangle_predicates(list(arity))
    orv = " v " if dialect == "dlv" else " | "

    facts = tuple(
        f"{names[f.predicate]}({','.join([str(f.tid), *map(_constant, f.args)])})."
        for f in instance
    )

    rules: list[str] = []
    for dc in constraints:
        ren = _Renamer(dc)
        head, body = [], []
        for tvar, atom in zip(ren.tid_vars, dc.atoms):
            args = ",".join([tvar, *map(ren.term, atom.terms)])
            head.append(f"{names[atom.predicate]}_x({args},d)")
            body.append(f"{names[atom.predicate]}({args})")
        body += [f"{ren.term(l)} != {ren.term(r)}" for l, r in dc.disequalities]
        rules.append(f"{orv.join(head)} :- {', '.join(body)}.")

    def columns(pred: str) -> str:
        return ",".join(["T", *(f"X{i}" for i in range(1, arity[pred] + 1))])

    for pred in arity:
        p, cols = names[pred], columns(pred)
        rules.append(f"{p}_x({cols},s) :- {p}({cols}), not {p}_x({cols},d).")
    for pred in arity:
        rules.append(f"del(T) :- {names[pred]}_x({columns(pred)},d).")
    rules.append("numdel(N) :- N = #count{T : del(T)}.")
    for f in instance:
        if instance.is_exogenous(f.tid):
            args = ",".join([str(f.tid), *map(_constant, f.args)])
            rules.append(f":- {names[f.predicate]}_x({args},d).")

    weak = tuple(
        f":~ {names[p]}({columns(p)}), {names[p]}_x({columns(p)},d). [1@1, T]"
        for p in arity
    )
    return AspProgram(facts, tuple(rules), weak, "numdel(X)?", dialect, names)


# --------------------------------------------------------------------------
# external solver


class SolverUnavailable(RuntimeError):
    """No solver command configured, or the executable was not found."""


class SolverError(RuntimeError):
    def __init__(self, message: str, output: str = ""):
        super().__init__(message if not output else f"{message}\n{output}")
        self.output = output


@dataclass(frozen=True)
class SolverModel:
    deleted: frozenset[int]
    numdel: int | None
    cost: tuple[int, ...] = ()


@dataclass(frozen=True)
class SolverResult:
    models: tuple[SolverModel, ...]
    output: str

    @property
    def optimal(self) -> list[SolverModel]:
        if not self.models:
            return []
        if all(m.cost for m in self.models):
            best = min(m.cost for m in self.models)
            return [m for m in self.models if m.cost == best]
        return list(self.models)

    @property
    def optimum(self) -> int | None:
        """``numdel`` of the last optimal model; ``None`` if unsatisfiable."""
        opt = self.optimal
        if not opt:
            return None
        last = opt[-1]
        return last.numdel if last.numdel is not None else len(last.deleted)

    @property
    def optimal_deletions(self) -> set[frozenset[int]]:
        return {m.deleted for m in self.optimal}


_ATOM = re.compile(r"(?<![A-Za-z0-9_])(del|numdel)\((\d+)\)")
_COST_CLINGO = re.compile(r"^Optimization\s*:\s*([-\d ]+)$")
_COST_DLV2 = re.compile(r"^COST\s+(.*)$")
_COST_DLV = re.compile(r"^Cost \(\[Weight:Level\]\):\s*<(.*)>")


def _model(atoms_line: str) -> SolverModel:
    deleted, numdel = set(), None
    for name, value in _ATOM.findall(atoms_line):
        if name == "del":
            deleted.add(int(value))
        else:
            numdel = int(value)
    return SolverModel(frozenset(deleted), numdel)


def parse_solver_output(text: str) -> list[SolverModel]:
    """Models found in clingo, DLV or DLV2 style output, in print order."""
    models: list[SolverModel] = []
    lines = [ln.strip() for ln in text.splitlines()]
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith("Answer:") or line == "ANSWER":
            atoms = lines[i + 1] if i + 1 < len(lines) else ""
            models.append(_model(atoms))
            i += 2
            continue
        if line.startswith("{") or line.startswith("Best model:"):
            models.append(_model(line))
        elif models:
            cost = None
            if m := _COST_CLINGO.match(line):
                cost = tuple(int(x) for x in m.group(1).split())
            elif m := _COST_DLV2.match(line):
                cost = tuple(int(x) for x in re.findall(r"(-?\d+)@", m.group(1)))
            elif m := _COST_DLV.match(line):
                cost = tuple(int(x) for x in re.findall(r"\[(-?\d+):", m.group(1)))
            if cost is not None:
                last = models[-1]
                models[-1] = SolverModel(last.deleted, last.numdel, cost)
        i += 1
    return models


def solver_command_from_env() -> str | None:
    return os.environ.get(SOLVER_ENV) or None


def solve_external(
    program: AspProgram, solver_command: str | None = None, timeout: float | None = 300
) -> SolverResult:
    """Run ``solver_command`` on ``program``.

    ``{file}`` in the command template is replaced by the program path (the
    path is appended when the placeholder is missing). Without a command the
    :data:`SOLVER_ENV` environment variable is used.
    """
    template = solver_command or solver_command_from_env()
    if not template:
        raise SolverUnavailable(f"no solver command given and ${SOLVER_ENV} is unset")
    with tempfile.TemporaryDirectory(prefix="incdeg-") as tmp:
        path = program.write(Path(tmp) / "repair.lp")
        argv = shlex.split(template)
        if any("{file}" in a for a in argv):
            argv = [a.replace("{file}", str(path)) for a in argv]
        else:
            argv.append(str(path))
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=timeout, check=False
            )
        except FileNotFoundError as exc:
            raise SolverUnavailable(f"solver executable not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise SolverError(f"solver timed out after {timeout}s") from exc
    output = proc.stdout + proc.stderr
    if proc.returncode not in _OK_EXIT:
        raise SolverError(f"solver exited with status {proc.returncode}", output)
    models = parse_solver_output(proc.stdout)
    unsat = "UNSATISFIABLE" in proc.stdout or "INCOHERENT" in proc.stdout
    if not models and not unsat:
        raise SolverError("could not find any model or UNSATISFIABLE in solver output", output)
    return SolverResult(tuple(models), output)


def run_external_solver(
    program: AspProgram, solver_command: str | None = None
) -> int | None:
    """Optimum ``numdel`` reported by the solver, or ``None`` when the
    program has no stable model (no repair satisfies the hard constraints)."""
    return solve_external(program, solver_command).optimum
