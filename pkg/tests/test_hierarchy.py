from hypothesis import given, settings

from prenexify.hierarchy import (
    SIGMA,
    classify_prenex,
    in_pi,
    in_pi_plus,
    in_sigma,
    in_sigma_plus,
    is_prenex,
)
from prenexify.parser import parse
from test_formula import formulas


def test_classify_examples():
    shape = classify_prenex(parse("exists x. forall y. P(x, y)"))
    assert (shape.kind, shape.level, shape.blocks) == (SIGMA, 2, (1, 1))
    shape = classify_prenex(parse("exists x. exists y. P(x, y)"))
    assert (shape.kind, shape.level, shape.blocks) == (SIGMA, 1, (2,))
    shape = classify_prenex(parse("exists x. P(x) -> Q(x)"))
    assert (shape.kind, shape.level) == (SIGMA, 1)
    assert classify_prenex(parse("(exists x. P(x)) | Q(y)")) is None


def test_quantifier_free_is_sigma_zero():
    shape = classify_prenex(parse("P(x) -> false"))
    assert (shape.kind, shape.level, shape.blocks) == (SIGMA, 0, ())


def test_strict_membership():
    phi = parse("forall x. exists y. P(x, y)")
    assert not in_sigma(phi, 3)
    assert in_pi(phi, 2)
    assert in_sigma(parse("P(x)"), 0)
    assert in_pi(parse("P(x)"), 0)
    # maximal blocks: two existentials form one block, not two levels
    two = parse("exists x. exists y. P(x, y)")
    assert in_sigma(two, 1)
    assert not in_sigma(two, 2)


def test_cumulative_membership():
    pi1 = parse("forall x. P(x)")
    assert in_sigma_plus(pi1, 2)
    assert not in_sigma_plus(pi1, 1)
    assert all(in_sigma_plus(parse("P(x)"), k) for k in range(5))
    assert in_pi_plus(pi1, 1)
    assert not in_pi_plus(parse("exists x. P(x)"), 1)
    assert in_pi_plus(parse("exists x. P(x)"), 2)


@settings(max_examples=300)
@given(formulas())
def test_cumulative_classes_grow(phi):
    for k in range(4):
        if in_sigma_plus(phi, k):
            assert in_sigma_plus(phi, k + 1)
        if in_pi_plus(phi, k):
            assert in_sigma_plus(phi, k + 1)
            assert in_pi_plus(phi, k + 1)


@settings(max_examples=300)
@given(formulas())
def test_classified_level_is_unique_for_unit_blocks(phi):
    shape = classify_prenex(phi)
    if shape is None or any(b != 1 for b in shape.blocks):
        return
    level = shape.level
    for k in range(6):
        strict = in_sigma(phi, k) or in_pi(phi, k)
        assert strict == (k == level)


@settings(max_examples=300)
@given(formulas())
def test_strict_membership_matches_shape(phi):
    shape = classify_prenex(phi)
    assert is_prenex(phi) == (shape is not None)
    if shape is not None:
        if shape.level == 0:
            assert in_sigma(phi, 0) and in_pi(phi, 0)
        elif shape.kind == SIGMA:
            assert in_sigma(phi, shape.level) and not in_pi(phi, shape.level)
        else:
            assert in_pi(phi, shape.level) and not in_sigma(phi, shape.level)
