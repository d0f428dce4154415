import pytest
from hypothesis import given, settings

from prenexify.formula import PositionError, free_vars
from prenexify.parser import parse
from prenexify.rewrite import (
    RULES,
    RewriteStep,
    RuleMismatchError,
    SideConditionError,
    StrategyViolationError,
    Trace,
    TraceStepError,
    applicable_steps,
    apply_step,
    lifts_to_degree,
    measure,
    parse_position,
    trace_from_json,
    trace_from_text,
    trace_to_json,
    trace_to_text,
    verify_trace,
)
from test_formula import formulas


def test_rule_table_has_fourteen_rules():
    assert len(RULES) == 14
    assert [name for name in RULES][:2] == ["ExistsImp", "ForallImpN"]


def test_applicable_steps_examples():
    steps = applicable_steps(parse("(exists x. P(x)) & Q(y)"), 0)
    assert [(s.rule, s.position) for s in steps] == [("ExistsAnd", ())]

    steps = applicable_steps(parse("Q(y) -> exists x. P(x)"), 0)
    assert [(s.rule, s.position) for s in steps] == [("ImpExistsN", ())]

    assert applicable_steps(parse("(forall x. P(x)) -> false"), 0) == []
    steps = applicable_steps(parse("(forall x. P(x)) -> false"), 1)
    assert [(s.rule, s.position) for s in steps] == [("ForallImpN", ())]


def test_apply_examples():
    phi = parse("(exists x. P(x)) -> Q(y)")
    out = apply_step(phi, RewriteStep("ExistsImp", ()), 0)
    assert out is parse("forall x. P(x) -> Q(y)")

    phi = parse("(exists x. P(x)) & P(x)")
    (step,) = applicable_steps(phi, 0)
    assert step.fresh == "v0"
    out = apply_step(phi, step, 0)
    assert out is parse("exists v0. P(v0) & P(x)")
    assert free_vars(out) == free_vars(phi)

    phi = parse("Q(y) | forall x. P(x)")
    out = apply_step(phi, RewriteStep("OrForallN", ()), 0)
    assert out is parse("forall x. Q(y) | P(x)")


def test_step_order_rule_then_position():
    # both rules match at the root; rule declaration order breaks the tie
    phi = parse("(exists x. P(x)) & (exists y. Q(y))")
    steps = applicable_steps(phi, 0)
    assert [(s.rule, s.position) for s in steps] == [
        ("ExistsAnd", ()),
        ("AndExists", ()),
    ]
    # one rule at two positions: leftmost redex first
    phi = parse("((exists x. P(x)) & Q(y)) & ((exists z. P(z)) & Q(x))")
    steps = applicable_steps(phi, 0)
    assert [(s.rule, s.position) for s in steps] == [
        ("ExistsAnd", ("l",)),
        ("ExistsAnd", ("r",)),
    ]


def test_strategy_restriction_blocks_nonprenex_children():
    # the left operand (exists x. P(x)) & Q(y) is not prenex, so the root
    # conjunction is not yet a legal redex; only the inner one is
    phi = parse("((exists x. P(x)) & Q(y)) & (exists z. P(z))")
    steps = applicable_steps(phi, 0)
    assert [(s.rule, s.position) for s in steps] == [("ExistsAnd", ("l",))]
    with pytest.raises(StrategyViolationError):
        apply_step(phi, RewriteStep("AndExists", ()), 0)


def test_error_kinds_are_distinguished():
    phi = parse("(exists x. P(x)) & Q(y)")
    with pytest.raises(RuleMismatchError):
        apply_step(phi, RewriteStep("ExistsOr", ()), 0)
    with pytest.raises(RuleMismatchError):
        apply_step(phi, RewriteStep("Unheard", ()), 0)
    with pytest.raises(PositionError):
        apply_step(phi, RewriteStep("ExistsAnd", ("b",)), 0)
    with pytest.raises(SideConditionError):
        # degree condition: ForallImpN is never applicable at degree 0
        apply_step(parse("(forall x. P(x)) -> false"), RewriteStep("ForallImpN", ()), 0)
    with pytest.raises(SideConditionError):
        # x free in the other operand, no fresh rename supplied
        apply_step(parse("(exists x. P(x)) & P(x)"), RewriteStep("ExistsAnd", ()), 0)


def test_degree_side_conditions():
    # (forall x. P(x)) | exists y. Q(y): hoisting the universal needs the
    # existential side in C_n+, which holds at degree 1 but not 0
    phi = parse("(forall x. P(x)) | (exists y. Q(y))")
    rules_at = lambda n: {s.rule for s in applicable_steps(phi, n)}
    assert rules_at(0) == {"OrExists"}
    assert rules_at(1) == {"ForallOrN", "OrExists"}


def test_var_rules_only_explicit():
    phi = parse("exists x. P(x)")
    assert applicable_steps(phi, 0) == []
    out = apply_step(phi, RewriteStep("ExistsVar", (), fresh="y"), 0)
    assert out is parse("exists y. P(y)")
    with pytest.raises(SideConditionError):
        apply_step(phi, RewriteStep("ExistsVar", ()), 0)  # fresh required
    with pytest.raises(SideConditionError):
        apply_step(phi, RewriteStep("ExistsVar", (), fresh="x"), 0)
    with pytest.raises(RuleMismatchError):
        apply_step(phi, RewriteStep("ForallVar", (), fresh="y"), 0)


def test_verify_trace_examples():
    phi = parse("P(x)")
    assert verify_trace(Trace(phi, (), 0)) is phi

    start = parse("(exists x. P(x)) | (forall y. Q(y))")
    trace = Trace(
        start, (RewriteStep("ExistsOr", ()), RewriteStep("OrForallN", ("b",))), 0
    )
    assert verify_trace(trace) is parse("exists x. forall y. P(x) | Q(y)")

    bad = Trace(parse("(forall x. P(x)) -> false"), (RewriteStep("ForallImpN", ()),), 0)
    with pytest.raises(TraceStepError) as info:
        verify_trace(bad)
    assert info.value.index == 0
    assert isinstance(info.value.reason, SideConditionError)


def test_lifts_to_degree():
    start = parse("(exists x. P(x)) | (forall y. Q(y))")
    trace = Trace(
        start, (RewriteStep("ExistsOr", ()), RewriteStep("OrForallN", ("b",))), 0
    )
    assert lifts_to_degree(trace, 2)
    assert lifts_to_degree(trace, 0)
    one = Trace(parse("(forall x. P(x)) -> false"), (RewriteStep("ForallImpN", ()),), 1)
    assert not lifts_to_degree(one, 0)
    assert lifts_to_degree(one, 3)


def test_measure_decreases_by_one_per_step():
    phi = parse("(exists x. P(x)) & (forall y. Q(y))")
    assert measure(phi) == 2
    (first, second) = applicable_steps(phi, 0)[:2]
    out = apply_step(phi, first, 0)
    assert measure(out) == 1


def test_trace_text_roundtrip():
    start = parse("(exists x. P(x)) & P(x)")
    (step,) = applicable_steps(start, 0)
    trace = Trace(start, (step,), 0)
    text = trace_to_text(trace)
    assert "ExistsAnd@/ fresh=v0" in text
    again = trace_from_text(text)
    assert again == trace and trace_to_text(again) == text
    assert verify_trace(again) is apply_step(start, step, 0)


def test_trace_json_roundtrip():
    start = parse("(exists x. P(x)) | (forall y. Q(y))")
    trace = Trace(
        start, (RewriteStep("ExistsOr", ()), RewriteStep("OrForallN", ("b",))), 0
    )
    data = trace_to_json(trace)
    assert data["steps"][1]["path"] == "/b"
    assert trace_from_json(data) == trace


def test_parse_position():
    assert parse_position("/") == ()
    assert parse_position("/l/b/r") == ("l", "b", "r")
    with pytest.raises(ValueError):
        parse_position("l/b")
    with pytest.raises(ValueError):
        parse_position("/l/x")


@settings(max_examples=250, deadline=None)
@given(formulas(max_leaves=6))
def test_every_applicable_step_preserves_free_vars_and_measure(phi):
    for n in range(3):
        steps = applicable_steps(phi, n)
        for step in steps:
            out = apply_step(phi, step, n)
            assert free_vars(out) == free_vars(phi)
            assert measure(out) == measure(phi) - 1


@settings(max_examples=250, deadline=None)
@given(formulas(max_leaves=6))
def test_degree_monotone_applicability(phi):
    for n in range(3):
        assert set(applicable_steps(phi, n)) <= set(applicable_steps(phi, n + 1))


def test_context_closure_of_traces():
    # a trace on a subformula shifts to any position of a host formula
    sub = parse("(exists x. P(x)) | (forall y. Q(y))")
    inner = Trace(
        sub, (RewriteStep("ExistsOr", ()), RewriteStep("OrForallN", ("b",))), 0
    )
    host = parse("Q(x) & ((exists x. P(x)) | (forall y. Q(y)))")
    shifted = Trace(
        host,
        tuple(RewriteStep(s.rule, ("r",) + s.position, s.fresh) for s in inner.steps),
        0,
    )
    result = verify_trace(shifted)
    assert result is parse("Q(x) & (exists x. forall y. P(x) | Q(y))")


@settings(max_examples=120, deadline=None)
@given(formulas(max_leaves=4))
def test_context_closure_random(phi):
    from prenexify.formula import And as AndNode
    from prenexify.formula import Prime

    steps = applicable_steps(phi, 1)
    if not steps:
        return
    host = AndNode(Prime("Q", ("x",)), phi)
    shifted = [RewriteStep(s.rule, ("r",) + s.position, s.fresh) for s in steps]
    for original, moved in zip(steps, shifted):
        expected = AndNode(Prime("Q", ("x",)), apply_step(phi, original, 1))
        assert apply_step(host, moved, 1) is expected
