import json
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incdeg import (
    ParseError,
    Schema,
    parse_constraints,
    parse_instance,
    serialize_constraints,
    serialize_instance,
    serialize_report,
)
from incdeg.model import (
    Atom,
    ConstraintSet,
    Const,
    DenialConstraint,
    DuplicateFactWarning,
    InconsistencyReport,
    Normalizer,
    Repair,
    Semantics,
    Var,
    assign_tids,
)
from incdeg.violations import compile_fd_to_dc
from incdeg.model import FunctionalDependency


def test_parse_example1_instance():
    inst = parse_instance("P(a). P(e). Q(a,b). R(a,c).")
    assert [str(f) for f in inst] == ["P(a)", "P(e)", "Q(a,b)", "R(a,c)"]
    assert inst.exogenous == frozenset()
    assert inst.schema.predicates == {"P": 1, "Q": 2, "R": 2}


def test_parse_exogenous_marker():
    inst = parse_instance("*P(a). *P(e). Q(a,b). R(a,c).")
    assert {str(inst[t]) for t in inst.exogenous} == {"P(a)", "P(e)"}
    assert {str(inst[t]) for t in inst.endogenous} == {"Q(a,b)", "R(a,c)"}


def test_parse_empty_and_comments():
    assert len(parse_instance("")) == 0
    inst = parse_instance("% header\nP(a).  % trailing\n\n% P(b).\n")
    assert [str(f) for f in inst] == ["P(a)"]


def test_quoted_constants_are_opaque():
    # "1" and 1 are the same string constant
    with pytest.warns(DuplicateFactWarning):
        inst = parse_instance('P("1"). P(1). P("two words"). P("a\\"b").')
    assert [f.args[0] for f in inst] == ["1", "two words", 'a"b']


def test_schema_directive_locks_arity():
    inst = parse_instance("@schema P/1, Q/2.\nP(a).")
    assert inst.schema.predicates == {"P": 1, "Q": 2}
    with pytest.raises(ParseError, match="not declared"):
        parse_instance("@schema P/1.\nQ(a,b).")
    with pytest.raises(ParseError, match="arity 1"):
        parse_instance("@schema P/1.\nP(a,b).")


def test_duplicate_fact_warns():
    with pytest.warns(DuplicateFactWarning):
        inst = parse_instance("P(a).\nP(a).\n")
    assert len(inst) == 1


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("P(a).\nP(a,b).", 2, 1),  # arity conflict
        ("P(a)", 1, 5),  # missing dot at end of input
        ("P(a).\n  Q(a b).", 2, 7),
        ("P(a). $", 1, 7),
        ("P().", 1, 3),
    ],
)
def test_instance_errors_carry_span(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_instance(text, filename="x.facts")
    span = info.value.span
    assert (span.file, span.line, span.col_start) == ("x.facts", line, col)
    lines = text.split("\n")
    assert 1 <= span.line <= len(lines)
    assert 1 <= span.col_start <= len(lines[span.line - 1]) + 1


def test_parse_kappa1():
    cs = parse_constraints("dc k1: <- P(x), Q(x,y).")
    (dc,) = cs.dcs
    assert dc.name == "k1"
    assert dc.atoms == (
        Atom("P", (Var("x"),)),
        Atom("Q", (Var("x"), Var("y"))),
    )
    assert dc.disequalities == ()


def test_parse_fd_shorthand_compiles():
    cs = parse_constraints("fd f1: R[1 -> 2].", Schema({"R": 2}))
    (dc,) = cs.dcs
    assert dc.atoms == (
        Atom("R", (Var("v"), Var("z1"))),
        Atom("R", (Var("v"), Var("z2"))),
    )
    assert dc.disequalities == ((Var("z1"), Var("z2")),)
    assert cs.original_fds == (FunctionalDependency("f1", "R", (1,), 2),)


def test_fd_arity_from_directive_or_dc():
    assert parse_constraints("@schema R/3.\nfd f: R[1 -> 3].").dcs[0].atoms[0].terms[1] == Var("y1_1")
    cs = parse_constraints("fd f: R[1 -> 2].\ndc k: <- R(x,y), P(y).")
    assert len(cs) == 2
    with pytest.raises(ParseError, match="unknown"):
        parse_constraints("fd f: R[1 -> 2].")


def test_constants_and_disequalities_in_constraints():
    cs = parse_constraints('dc k: <- P(x), Q(x, "b"), Q(x, A), x != "a", x != 7.')
    (dc,) = cs.dcs
    assert dc.atoms[1].terms[1] == Const("b")
    assert dc.atoms[2].terms[1] == Const("A")
    assert dc.disequalities == ((Var("x"), Const("a")), (Var("x"), Const("7")))


def test_unsafe_variables_rejected():
    with pytest.raises(ParseError, match="unsafe variable.*y, z"):
        parse_constraints("dc bad: <- P(x), y != z.")


@pytest.mark.parametrize(
    "text, message",
    [
        ("dc k: <- .", "empty body"),
        ("dc k: <- x != y.", "no relational atom"),
        ("dc k: <- P(x).\ndc k: <- Q(x,y).", "duplicate constraint name"),
        ("dc k: <- P(x), P(x,y).", "arity"),
        ("fd f: R[1 -> 1].", "both sides"),
        ("@schema R/2.\nfd f: R[1 -> 3].", "out of range"),
        ("fd f: R[1 -> 2,3].", "single right-hand side"),
        ("ic k: <- P(x).", "'dc' or 'fd'"),
        ("dc k <- P(x).", "':'"),
    ],
)
def test_constraint_errors(text, message):
    with pytest.raises(ParseError, match=message) as info:
        parse_constraints(text)
    assert info.value.span.line >= 1


def test_constraint_schema_mismatch_with_instance():
    with pytest.raises(ParseError, match="arity 1"):
        parse_constraints("dc k: <- P(x,y).", Schema({"P": 1}))


# --------------------------------------------------------------------------
# JSON report


def _report(num, den, irreparable=False, witnesses=()):
    return InconsistencyReport(
        numerator=num,
        denominator=den,
        semantics=Semantics.C,
        normalizer=Normalizer.FULL,
        irreparable=irreparable,
        min_deletions=None if irreparable else num,
        repair_count_found=len(witnesses),
        truncated=False,
        witnesses=tuple(witnesses),
    )


def test_report_quarter():
    w = Repair(frozenset({1, 2, 3}), frozenset({4}), Semantics.C)
    out = json.loads(serialize_report(_report(1, 4, witnesses=[w])))
    assert out["measure"] == {"num": 1, "den": 4}
    assert out["decimal"] == "0.25"
    assert out["witnesses"] == [[4]]
    assert list(out) == [
        "semantics",
        "measure",
        "decimal",
        "irreparable",
        "normalizer",
        "min_deletions",
        "witnesses",
    ]


def test_report_consistent_and_irreparable():
    out = json.loads(serialize_report(_report(0, 4)))
    assert out["measure"] == {"num": 0, "den": 4} and out["irreparable"] is False
    out = json.loads(serialize_report(_report(4, 4, irreparable=True)))
    assert out["measure"] == {"num": 4, "den": 4}
    assert out["decimal"] == "1"
    assert out["irreparable"] is True
    assert out["min_deletions"] is None


def test_report_witnesses_sorted():
    ws = [
        Repair(frozenset(), frozenset({3, 4}), Semantics.S),
        Repair(frozenset(), frozenset({1}), Semantics.S),
        Repair(frozenset(), frozenset({2, 10}), Semantics.S),
    ]
    out = json.loads(serialize_report(_report(1, 4, witnesses=ws)))
    assert out["witnesses"] == [[1], [2, 10], [3, 4]]


# --------------------------------------------------------------------------
# round trips

constants = st.one_of(
    st.sampled_from(["a", "b", "e", "A1", "42", "_z"]),
    st.text(min_size=0, max_size=4),
)
facts = st.lists(
    st.tuples(
        st.sampled_from([("P", 1), ("Q", 2), ("Rel_3", 3)]),
        st.lists(constants, min_size=3, max_size=3),
        st.booleans(),
    ),
    max_size=12,
)


@settings(max_examples=150)
@given(facts)
def test_instance_round_trip(raw):
    rows = [(p, args[:k], x) for (p, k), args, x in raw]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DuplicateFactWarning)
        inst = assign_tids(rows)
    again = parse_instance(serialize_instance(inst))
    assert again == inst


variables = st.sampled_from(["x", "y", "z1", "zz"])
terms = st.one_of(variables.map(Var), constants.map(Const))


@st.composite
def constraint_sets(draw):
    dcs = []
    for i in range(draw(st.integers(0, 3))):
        atoms = []
        for _ in range(draw(st.integers(1, 3))):
            pred, k = draw(st.sampled_from([("P", 1), ("Q", 2)]))
            atoms.append(Atom(pred, tuple(draw(terms) for _ in range(k))))
        bound = sorted({v for a in atoms for v in a.variables()})
        diseqs = []
        if bound and draw(st.booleans()):
            diseqs.append((Var(draw(st.sampled_from(bound))), draw(terms.filter(
                lambda t: isinstance(t, Const) or t.name in bound))))
        dcs.append(DenialConstraint(f"k{i}", tuple(atoms), tuple(diseqs)))
    fds = []
    if draw(st.booleans()):
        fd = FunctionalDependency("f", "S", (1, 3), 2)
        fds.append(fd)
        dcs.append(compile_fd_to_dc(fd, Schema({"S": 3})))
    return ConstraintSet(tuple(dcs), tuple(fds))


@settings(max_examples=150)
@given(constraint_sets())
def test_constraint_round_trip(cs):
    text = serialize_constraints(cs)
    assert parse_constraints(text) == cs
