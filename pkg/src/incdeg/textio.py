"""Reading and writing ``.facts`` / ``.dc`` files and JSON reports.

Facts::

    % comment
    @schema P/1, Q/2.
    P(a).
    *P(e).            % '*' marks an exogenous (protected) tuple
    Q(a, "two words").

Constraints::

    dc k1: <- P(x), Q(x,y).
    dc k2: <- R(v,y1,z1), R(v,y2,z2), z1 != z2.
    fd f1: R[1 -> 3].

In constraint bodies a bare token starting with a lowercase letter is a
variable; any other bare token, or a quoted string, is a constant.
"""
from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from typing import Any

from .model import (
    Atom,
    ConflictHypergraph,
    ConstraintSet,
    Const,
    DatabaseInstance,
    DenialConstraint,
    DuplicateFactWarning,
    Fact,
    FunctionalDependency,
    InconsistencyReport,
    Repair,
    Schema,
    SchemaError,
    Term,
    Var,
)
from .violations import compile_fd_to_dc


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col_start: int
    col_end: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col_start}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<directive>@[A-Za-z_]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<neq>!=)
  | (?P<if><-|:-)
  | (?P<bare>[A-Za-z0-9_]+)
  | (?P<punct>[().,:*\[\]/])
    """,
    re.VERBOSE,
)
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}
_BARE = re.compile(r"[A-Za-z0-9_]+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_VARIABLE = re.compile(r"[a-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    span: SourceSpan


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), text[1:-1])


def _quote(value: str) -> str:
    body = value.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + body.replace("\n", "\\n").replace("\t", "\\t") + '"'


def _tokenize(text: str, filename: str) -> list[_Tok]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                SourceSpan(filename, line, col, col + 1),
            )
        kind = m.lastgroup
        assert kind is not None
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            value = m.group()
            if kind == "punct":
                kind = value
            span = SourceSpan(filename, line, col, col + len(value))
            tokens.append(_Tok(kind, value, span))
        pos = m.end()
    end_col = pos - line_start + 1
    tokens.append(_Tok("eof", "", SourceSpan(filename, line, end_col, end_col)))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Tok]):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> _Tok:
        tok = self.peek()
        self.i += 1
        return tok

    def accept(self, kind: str) -> _Tok | None:
        if self.peek().kind == kind:
            return self.next()
        return None

    def expect(self, kind: str, what: str | None = None) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            found = repr(tok.text) if tok.text else "end of input"
            raise ParseError(f"expected {what or repr(kind)}, found {found}", tok.span)
        return self.next()

    def name(self, what: str) -> _Tok:
        tok = self.expect("bare", what)
        if not _IDENT.fullmatch(tok.text):
            raise ParseError(f"invalid {what} {tok.text!r}", tok.span)
        return tok

    def integer(self, what: str) -> tuple[int, _Tok]:
        tok = self.expect("bare", what)
        if not tok.text.isdigit():
            raise ParseError(f"expected {what}, found {tok.text!r}", tok.span)
        return int(tok.text), tok


def _schema_directive(cur: _Cursor, declared: dict[str, int], spans: dict[str, SourceSpan]):
    tok = cur.next()
    if tok.text != "@schema":
        raise ParseError(f"unknown directive {tok.text}", tok.span)
    while True:
        name = cur.name("predicate name")
        cur.expect("/", "'/'")
        arity, arity_tok = cur.integer("arity")
        if arity < 1:
            raise ParseError("arity must be at least 1", arity_tok.span)
        if name.text in declared and declared[name.text] != arity:
            raise ParseError(
                f"{name.text} already declared with arity {declared[name.text]}",
                name.span,
            )
        declared[name.text] = arity
        spans.setdefault(name.text, name.span)
        if not cur.accept(","):
            break
    cur.accept(".")


# --------------------------------------------------------------------------
# instances


def parse_instance(text: str, filename: str = "<string>") -> DatabaseInstance:
    """Parse a facts file. Tids follow the order of the facts."""
    cur = _Cursor(_tokenize(text, filename))
    declared: dict[str, int] = {}
    inferred: dict[str, int] = {}
    rows: list[tuple[str, tuple[str, ...], bool]] = []
    seen: dict[tuple[str, tuple[str, ...]], int] = {}
    while cur.peek().kind != "eof":
        if cur.peek().kind == "directive":
            _schema_directive(cur, declared, {})
            continue
        star = cur.accept("*")
        pred = cur.name("predicate name")
        cur.expect("(", "'('")
        args = []
        while True:
            tok = cur.next()
            if tok.kind == "string":
                args.append(_unquote(tok.text))
            elif tok.kind == "bare":
                args.append(tok.text)
            else:
                found = repr(tok.text) if tok.text else "end of input"
                raise ParseError(f"expected a constant, found {found}", tok.span)
            if not cur.accept(","):
                break
        cur.expect(")", "')' or ','")
        cur.expect(".", "'.' after fact")
        if declared:
            if pred.text not in declared:
                raise ParseError(f"predicate {pred.text} is not declared by @schema", pred.span)
            arity = declared[pred.text]
        else:
            arity = inferred.setdefault(pred.text, len(args))
        if arity != len(args):
            raise ParseError(
                f"{pred.text} has arity {arity} but {len(args)} argument(s) were given",
                pred.span,
            )
        key = (pred.text, tuple(args))
        if key in seen:
            warnings.warn(
                f"{pred.span}: duplicate fact {pred.text}({','.join(args)}) "
                f"collapsed into tid {seen[key]}",
                DuplicateFactWarning,
                stacklevel=2,
            )
            continue
        seen[key] = len(rows) + 1
        rows.append((pred.text, tuple(args), star is not None))
    schema = Schema(declared) if declared else Schema(inferred)
    facts = tuple(Fact(i, p, a) for i, (p, a, _) in enumerate(rows, 1))
    exogenous = frozenset(i for i, (_, _, x) in enumerate(rows, 1) if x)
    return DatabaseInstance(schema, facts, exogenous)


def _fact_constant(value: str) -> str:
    return value if _BARE.fullmatch(value) else _quote(value)


def format_fact(fact: Fact, exogenous: bool = False) -> str:
    args = ",".join(_fact_constant(a) for a in fact.args)
    return f"{'*' if exogenous else ''}{fact.predicate}({args})."


def serialize_instance(instance: DatabaseInstance) -> str:
    lines = []
    if len(instance.schema):
        decls = ", ".join(f"{p}/{a}" for p, a in instance.schema.predicates.items())
        lines.append(f"@schema {decls}.")
    lines.extend(format_fact(f, instance.is_exogenous(f.tid)) for f in instance)
    return "".join(line + "\n" for line in lines)


# --------------------------------------------------------------------------
# constraints


def _term(cur: _Cursor) -> Term:
    tok = cur.next()
    if tok.kind == "string":
        return Const(_unquote(tok.text))
    if tok.kind == "bare":
        return Var(tok.text) if _VARIABLE.fullmatch(tok.text) else Const(tok.text)
    found = repr(tok.text) if tok.text else "end of input"
    raise ParseError(f"expected a variable or constant, found {found}", tok.span)


def _dc_body(cur: _Cursor, name: str, start: _Tok):
    atoms: list[tuple[Atom, _Tok]] = []
    diseqs: list[tuple[Term, Term]] = []
    if cur.peek().kind == ".":
        raise ParseError(f"constraint {name} has an empty body", cur.peek().span)
    while True:
        if cur.peek().kind == "bare" and cur.peek(1).kind == "(":
            pred = cur.name("predicate name")
            cur.expect("(")
            terms = [_term(cur)]
            while cur.accept(","):
                terms.append(_term(cur))
            cur.expect(")", "')' or ','")
            atoms.append((Atom(pred.text, tuple(terms)), pred))
        else:
            left = _term(cur)
            cur.expect("neq", "'!='")
            diseqs.append((left, _term(cur)))
        if not cur.accept(","):
            break
    cur.expect(".", "'.' at end of constraint")
    if not atoms:
        raise ParseError(f"constraint {name} has no relational atom", start.span)
    bound = {v for atom, _ in atoms for v in atom.variables()}
    unsafe = sorted(
        {t.name for pair in diseqs for t in pair if isinstance(t, Var) and t.name not in bound}
    )
    if unsafe:
        raise ParseError(
            f"constraint {name}: unsafe variable(s) {', '.join(unsafe)} "
            "occur only in a disequality",
            start.span,
        )
    return atoms, diseqs


def parse_constraints(
    text: str, schema: Schema | None = None, filename: str = "<string>"
) -> ConstraintSet:
    """Parse a constraints file; FDs are compiled to DCs right away.

    FD arities come from ``schema``, from ``@schema`` lines, or from DC
    atoms over the same predicate in this file.
    """
    cur = _Cursor(_tokenize(text, filename))
    declared: dict[str, int] = dict(schema.predicates) if schema is not None else {}
    spans: dict[str, SourceSpan] = {}
    # statement: ("dc", name_tok, DenialConstraint) or ("fd", name_tok, fd, pred_tok)
    statements: list[tuple] = []
    names: dict[str, SourceSpan] = {}
    while cur.peek().kind != "eof":
        if cur.peek().kind == "directive":
            _schema_directive(cur, declared, spans)
            continue
        kw = cur.expect("bare", "'dc' or 'fd'")
        if kw.text not in ("dc", "fd"):
            raise ParseError(f"expected 'dc' or 'fd', found {kw.text!r}", kw.span)
        name = cur.name("constraint name")
        if name.text in names:
            raise ParseError(
                f"duplicate constraint name {name.text} (first defined at {names[name.text]})",
                name.span,
            )
        names[name.text] = name.span
        cur.expect(":", "':'")
        if kw.text == "dc":
            cur.expect("if", "'<-'")
            atoms, diseqs = _dc_body(cur, name.text, name)
            for atom, tok in atoms:
                arity = declared.setdefault(atom.predicate, len(atom.terms))
                if arity != len(atom.terms):
                    raise ParseError(
                        f"{atom.predicate} has arity {arity} but "
                        f"{len(atom.terms)} argument(s) were given",
                        tok.span,
                    )
            dc = DenialConstraint(name.text, tuple(a for a, _ in atoms), tuple(diseqs))
            statements.append(("dc", name, dc))
        else:
            pred = cur.name("predicate name")
            cur.expect("[", "'['")
            lhs = [cur.integer("attribute position")[0]]
            while cur.accept(","):
                lhs.append(cur.integer("attribute position")[0])
            cur.expect("arrow", "'->'")
            rhs, rhs_tok = cur.integer("attribute position")
            if cur.peek().kind == ",":
                raise ParseError(
                    "an fd has a single right-hand side position", cur.peek().span
                )
            cur.expect("]", "']'")
            cur.expect(".", "'.' at end of constraint")
            try:
                fd = FunctionalDependency(name.text, pred.text, tuple(lhs), rhs)
            except ValueError as exc:
                raise ParseError(str(exc), rhs_tok.span) from None
            statements.append(("fd", name, fd, pred))

    full = Schema(declared)
    dcs: list[DenialConstraint] = []
    fds: list[FunctionalDependency] = []
    for stmt in statements:
        if stmt[0] == "dc":
            dcs.append(stmt[2])
            continue
        _, name, fd, pred = stmt
        if fd.predicate not in full:
            raise ParseError(
                f"arity of {fd.predicate} is unknown; declare it with @schema",
                pred.span,
            )
        try:
            dcs.append(compile_fd_to_dc(fd, full))
        except SchemaError as exc:
            raise ParseError(str(exc), name.span) from None
        fds.append(fd)
    return ConstraintSet(tuple(dcs), tuple(fds))


def _render_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    value = term.value
    if _BARE.fullmatch(value) and not _VARIABLE.fullmatch(value):
        return value
    return _quote(value)


def format_dc(dc: DenialConstraint) -> str:
    parts = [
        f"{a.predicate}({','.join(_render_term(t) for t in a.terms)})" for a in dc.atoms
    ]
    parts += [f"{_render_term(l)} != {_render_term(r)}" for l, r in dc.disequalities]
    return f"dc {dc.name}: <- {', '.join(parts)}."


def format_fd(fd: FunctionalDependency) -> str:
    return f"fd {fd.name}: {fd.predicate}[{','.join(map(str, fd.lhs))} -> {fd.rhs}]."


def serialize_constraints(constraints: ConstraintSet, schema: Schema | None = None) -> str:
    """Inverse of :func:`parse_constraints`.

    A DC that came from an FD is written back as the FD, preceded by an
    ``@schema`` line so the FD can be recompiled without the instance.
    """
    fds = {fd.name: fd for fd in constraints.original_fds}
    lines = []
    if fds:
        arities = constraints.schema()
        if schema is not None:
            arities = arities.merge(schema)
        preds = list(dict.fromkeys(fd.predicate for fd in fds.values()))
        lines.append("@schema " + ", ".join(f"{p}/{arities.arity(p)}" for p in preds) + ".")
    for dc in constraints:
        lines.append(format_fd(fds[dc.name]) if dc.name in fds else format_dc(dc))
    return "".join(line + "\n" for line in lines)


# --------------------------------------------------------------------------
# JSON


def report_to_dict(report: InconsistencyReport) -> dict[str, Any]:
    witnesses = sorted(sorted(r.deleted) for r in report.witnesses)
    return {
        "semantics": report.semantics.value,
        "measure": {"num": report.numerator, "den": report.denominator},
        "decimal": report.decimal,
        "irreparable": report.irreparable,
        "normalizer": report.normalizer.value,
        "min_deletions": report.min_deletions,
        "witnesses": witnesses,
    }


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def serialize_report(report: InconsistencyReport) -> str:
    """Deterministic JSON; witnesses are deleted-tid lists in lexicographic order."""
    return dumps(report_to_dict(report))


def hypergraph_to_dict(graph: ConflictHypergraph) -> list[dict[str, Any]]:
    return [
        {
            "constraint": e.constraint,
            "tids": sorted(e.tids),
            "assignment": dict(e.assignment),
        }
        for e in graph.edges
    ]


def repair_to_dict(repair: Repair, instance: DatabaseInstance) -> dict[str, Any]:
    return {
        "kept": sorted(repair.kept),
        "deleted": sorted(repair.deleted),
        "tuples": [format_fact(instance[t])[:-1] for t in sorted(repair.kept)],
    }

