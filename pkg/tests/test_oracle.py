from collections import Counter

from prenexify.formula import alpha_canonical, free_vars
from prenexify.hierarchy import in_pi_plus, in_sigma_plus
from prenexify.oracle import (
    REACHABLE_SCHEMA,
    Signature,
    can_reach,
    enumerate_formulas,
    reachable_set,
)
from prenexify.parser import parse, render
from prenexify.rewrite import verify_trace
from prenexify.semiclassical import Classifier

SIG = Signature.make({"P": 1, "Q": 1}, ("x", "y"), 4)


def test_reachable_set_no_redex():
    rs = reachable_set(parse("P(x)"), 0)
    assert [render(m) for m in rs.members] == ["P(x)"]
    assert rs.exhausted and rs.edges == {}


def test_reachable_set_disjunction():
    rs = reachable_set(parse("(exists x. P(x)) | (forall y. Q(y))"), 0)
    assert rs.exhausted
    target = alpha_canonical(parse("exists x. forall y. P(x) | Q(y)"))
    assert target in rs.members
    assert parse("exists a. forall b. P(a) | Q(b)") in rs  # alpha-invariant


def test_reachable_set_blocked_at_degree_zero():
    rs = reachable_set(parse("(forall x. P(x)) -> false"), 0)
    assert rs.exhausted
    assert len(rs.members) == 1


def test_degree_monotone_members():
    phi = parse("(forall x. P(x)) | (exists y. Q(y))")
    low = reachable_set(phi, 0)
    high = reachable_set(phi, 1)
    assert set(low.members) <= set(high.members)


def test_budget_produces_unexhausted():
    rs = reachable_set(parse("(exists x. P(x)) | (forall y. Q(y))"), 0, node_budget=2)
    assert not rs.exhausted
    assert len(rs.members) == 2


def test_can_reach_yes_with_shortest_trace():
    phi = parse("(exists x. P(x)) | (forall y. Q(y))")
    result = can_reach(phi, 0, lambda m: in_sigma_plus(m, 2))
    assert result.status == "yes"
    assert len(result.trace.steps) == 2
    final = verify_trace(result.trace)
    assert in_sigma_plus(final, 2)
    assert free_vars(final) == free_vars(phi)


def test_can_reach_reflexive():
    phi = parse("exists x. P(x)")
    result = can_reach(phi, 0, lambda m: in_sigma_plus(m, 1))
    assert result.status == "yes" and result.trace.steps == ()


def test_can_reach_pinned_negative():
    phi = parse("((forall x. P(x)) | (exists y. Q(y))) -> R(x)")
    result = can_reach(phi, 1, lambda m: in_sigma_plus(m, 2))
    assert result.status == "no"


def test_can_reach_unknown_on_budget():
    phi = parse("(exists x. P(x)) | (forall y. Q(y))")
    result = can_reach(phi, 0, lambda m: False, node_budget=2)
    assert result.status == "unknown"


def test_can_reach_class_predicates():
    checker = Classifier()
    phi = parse("(forall y. Q(y)) | (exists x. P(x))")
    result = can_reach(phi, 1, lambda m: in_pi_plus(m, 2), checker=checker)
    assert result.status == "yes"
    assert verify_trace(result.trace, checker) is parse(
        "forall y. exists x. Q(y) | P(x)"
    )


def test_enumeration_contains_basics():
    small = Signature.make({"P": 1}, ("x",), 3)
    rendered = [render(phi) for phi in enumerate_formulas(small)]
    assert "false" in rendered and "P(x)" in rendered
    assert "exists v0. P(v0)" in rendered
    assert "P(x) -> false" in rendered and "P(x) & P(x)" in rendered


def test_enumeration_golden_counts():
    # pinned after first computation; cross-checked against raw generation
    counts = Counter(phi.size for phi in enumerate_formulas(SIG))
    assert dict(counts) == {1: 5, 2: 14, 3: 111, 4: 754}


def test_enumeration_is_alpha_distinct_and_deterministic():
    first = list(enumerate_formulas(SIG))
    second = list(enumerate_formulas(SIG))
    assert first == second
    assert len(set(first)) == len(first)
    assert all(alpha_canonical(phi) is phi for phi in first)


def test_reachable_set_json():
    rs = reachable_set(parse("(exists x. P(x)) & Q(y)"), 0)
    data = rs.to_json()
    assert data["schema"] == REACHABLE_SCHEMA
    assert data["exhausted"] is True
    assert data["members"][0] == "(exists v0. P(v0)) & Q(y)"
    assert data["edges"][0]["rule"] == "ExistsAnd"
    assert data["edges"][0]["path"] == "/"


def test_witness_traces_replay_from_original_not_canonical():
    # start formula uses bound name y; states are canonicalized internally
    phi = parse("(exists y. P(y)) & Q(x)")
    result = can_reach(phi, 0, lambda m: in_sigma_plus(m, 1))
    assert result.status == "yes"
    assert result.trace.start is phi
    assert verify_trace(result.trace) is parse("exists y. P(y) & Q(x)")
