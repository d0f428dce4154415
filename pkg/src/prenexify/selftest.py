"""Full invariant suite at desk scale.

Seven checks, each over the exhaustively enumerated corpus (or seeded
random data for the rewrite-conformance check):

1. characterization: J/R membership agrees with exhaustive reachability
   into Sigma_k+/Pi_k+ for every corpus formula, degree and level;
2. normalizer soundness on every positive classification;
3. stabilization of J_k^n / R_k^n for n >= k;
4. monotonicity suites: cumulativity in k, monotonicity in n, the prenex
   inclusions, subformula closure of D, and the five inversion laws;
5. backward closure of J/R along every rewrite edge explored in 1;
6. pinned negative witnesses;
7. rewrite-engine conformance on seeded random steps.

The module is consumed both by ``prenexify selftest`` and by the
acceptance test suite, which asserts every criterion at full scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import oracle
from .formula import (
    FALSUM,
    And,
    Exists,
    Forall,
    Formula,
    Imp,
    Or,
    Prime,
    free_vars,
    subformulas,
)
from .hierarchy import (
    in_pi_plus,
    in_sigma_plus,
    pi_plus_floor,
    sigma_plus_floor,
)
from .normalizer import normalize_J, normalize_R
from .oracle import Signature, clear_transition_cache, enumerate_formulas
from .parser import parse, render
from .rewrite import (
    Trace,
    applicable_steps,
    apply_step,
    measure,
    trace_from_text,
    trace_to_text,
    verify_trace,
)
from .semiclassical import Classifier

__all__ = ["CriterionResult", "run_selftest", "default_signature", "DEFAULT_SEED"]

DEFAULT_SEED = 20240 + 5
RANDOM_STEP_COUNT = 10_000


@dataclass
class CriterionResult:
    name: str
    passed: bool
    checks: int
    failures: list[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.passed = False
        if len(self.failures) < 10:
            self.failures.append(message)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name} ({self.checks} checks)"
        if self.failures:
            text += "\n  " + "\n  ".join(self.failures)
        return text


def default_signature(size: int) -> Signature:
    return Signature.make({"P": 1, "Q": 1}, ("x", "y"), size)


def _floors(members) -> tuple[Optional[int], Optional[int]]:
    """Least Sigma+/Pi+ levels realized among the prenex members."""
    best_s: Optional[int] = None
    best_p: Optional[int] = None
    for m in members:
        s = sigma_plus_floor(m)
        if s is not None and (best_s is None or s < best_s):
            best_s = s
        p = pi_plus_floor(m)
        if p is not None and (best_p is None or p < best_p):
            best_p = p
    return best_s, best_p


def run_selftest(
    size: int = 6,
    n_max: int = 2,
    k_max: int = 4,
    seed: int = DEFAULT_SEED,
    budget: int = oracle.DEFAULT_NODE_BUDGET,
    progress: Optional[Callable[[str], None]] = None,
) -> list[CriterionResult]:
    say = progress or (lambda message: None)
    corpus = list(enumerate_formulas(default_signature(size)))
    say(f"corpus: {len(corpus)} alpha-distinct formulas up to size {size}")

    c1 = CriterionResult("criterion-1 characterization", True, 0)
    c2 = CriterionResult("criterion-2 normalizer soundness", True, 0)
    c5 = CriterionResult("criterion-5 backward closure", True, 0)

    for n in range(n_max + 1):
        checker = Classifier()
        clear_transition_cache()
        for count, phi in enumerate(corpus):
            if progress and count % 5000 == 0 and count:
                say(f"  degree {n}: {count}/{len(corpus)}")
            rs = oracle.reachable_set(phi, n, budget, checker)
            if not rs.exhausted:
                c1.fail(f"budget hit for {render(phi)} at n={n}")
                continue
            floor_s, floor_p = _floors(rs.members)
            for k in range(k_max + 1):
                j, r = checker.decide(phi, k, n)
                reach_j = floor_s is not None and floor_s <= k
                reach_r = floor_p is not None and floor_p <= k
                c1.checks += 2
                if j != reach_j:
                    c1.fail(
                        f"J mismatch {render(phi)} k={k} n={n}: "
                        f"classifier={j} oracle={reach_j}"
                    )
                if r != reach_r:
                    c1.fail(
                        f"R mismatch {render(phi)} k={k} n={n}: "
                        f"classifier={r} oracle={reach_r}"
                    )
                if j:
                    _check_normal_form(c2, phi, k, n, "sigma", checker)
                if r:
                    _check_normal_form(c2, phi, k, n, "pi", checker)
        _check_backward_closure(c5, n, n_max, k_max, checker)
        say(f"degree {n} done")

    c3 = _check_stabilization(corpus, k_max)
    say("stabilization done")
    c4 = _check_monotonicity(corpus, n_max, k_max)
    say("monotonicity done")
    c6 = _check_pinned_negatives(budget)
    say("pinned negatives done")
    c7 = _check_rewrite_conformance(seed)
    say("rewrite conformance done")

    return [c1, c2, c3, c4, c5, c6, c7]


def _check_normal_form(
    result: CriterionResult,
    phi: Formula,
    k: int,
    n: int,
    target: str,
    checker: Classifier,
) -> None:
    result.checks += 1
    try:
        res = (
            normalize_J(phi, k, n, checker)
            if target == "sigma"
            else normalize_R(phi, k, n, checker)
        )
    except Exception as exc:  # noqa: BLE001 - report any failure verbatim
        result.fail(f"normalize {target} failed for {render(phi)} k={k} n={n}: {exc}")
        return
    try:
        replayed = verify_trace(res.trace, checker)
    except Exception as exc:  # noqa: BLE001
        result.fail(f"trace replay failed for {render(phi)} k={k} n={n}: {exc}")
        return
    member = in_sigma_plus if target == "sigma" else in_pi_plus
    if replayed is not res.output:
        result.fail(f"replay diverges for {render(phi)} k={k} n={n}")
    elif not member(res.output, k):
        result.fail(
            f"output {render(res.output)} not in target class "
            f"({target} {k}) for {render(phi)} n={n}"
        )
    elif free_vars(res.output) != free_vars(phi):
        result.fail(f"free variables changed for {render(phi)} k={k} n={n}")


def _check_backward_closure(
    result: CriterionResult, n: int, n_max: int, k_max: int, checker: Classifier
) -> None:
    # Every expansion cached during this degree's searches is an edge
    # source ~>_n successor; rules only gain at higher degrees.
    for (state, degree), successors in oracle._transitions.items():
        if degree != n:
            continue
        for _, succ in successors:
            for n2 in range(n, n_max + 1):
                for k in range(k_max + 1):
                    sj, sr = checker.decide(succ, k, n2)
                    pj, pr = checker.decide(state, k, n2)
                    result.checks += 2
                    if sj and not pj:
                        result.fail(
                            f"J not backward closed: {render(state)} ~> "
                            f"{render(succ)} k={k} n={n2}"
                        )
                    if sr and not pr:
                        result.fail(
                            f"R not backward closed: {render(state)} ~> "
                            f"{render(succ)} k={k} n={n2}"
                        )


def _check_stabilization(corpus: list[Formula], k_max: int) -> CriterionResult:
    result = CriterionResult("criterion-3 stabilization", True, 0)
    checker = Classifier()
    for phi in corpus:
        for k in range(min(3, k_max) + 1):
            base = checker.decide(phi, k, k)
            for n in (k + 1, k + 2):
                result.checks += 2
                if checker.decide(phi, k, n) != base:
                    result.fail(f"J/R not stable for {render(phi)} k={k} n={n}")
    return result


def _check_monotonicity(
    corpus: list[Formula], n_max: int, k_max: int
) -> CriterionResult:
    result = CriterionResult("criterion-4 monotonicity suites", True, 0)
    checker = Classifier()
    for phi in corpus:
        for n in range(n_max + 1):
            masks = [checker.decide(phi, k, n) for k in range(k_max + 2)]
            for k in range(k_max + 1):
                j, r = masks[k]
                j_up, r_up = masks[k + 1]
                result.checks += 1
                if (j or r) and not (j_up and r_up):
                    result.fail(f"cumulativity fails {render(phi)} k={k} n={n}")
                if n < n_max:
                    j_n, r_n = checker.decide(phi, k, n + 1)
                    result.checks += 1
                    if (j and not j_n) or (r and not r_n):
                        result.fail(f"n-monotonicity fails {render(phi)} k={k} n={n}")
            for k in range(k_max + 1):
                result.checks += 1
                if in_sigma_plus(phi, k) and not checker.in_J(phi, k, 0):
                    result.fail(f"Sigma_{k}+ not within J_{k}^0: {render(phi)}")
                if in_pi_plus(phi, k) and not checker.in_R(phi, k, 0):
                    result.fail(f"Pi_{k}+ not within R_{k}^0: {render(phi)}")
            _check_subformula_closure(result, phi, n_max, k_max, checker)
            _check_inversions(result, phi, n_max, k_max, checker)
    return result


def _check_subformula_closure(
    result: CriterionResult,
    phi: Formula,
    n_max: int,
    k_max: int,
    checker: Classifier,
) -> None:
    subs = list(subformulas(phi))
    for n in range(n_max + 1):
        for k in range(k_max + 1):
            if checker.in_D(phi, k, n):
                result.checks += 1
                if not all(checker.in_D(psi, k, n) for psi in subs):
                    result.fail(f"subformula closure fails {render(phi)} k={k} n={n}")


def _check_inversions(
    result: CriterionResult,
    phi: Formula,
    n_max: int,
    k_max: int,
    checker: Classifier,
) -> None:
    """The five inversion laws, with their case splits on level vs degree."""
    for n in range(n_max + 1):
        for k in range(1, k_max + 1):
            kk = k - 1
            j, r = checker.decide(phi, k, n)
            if not (j or r):
                continue
            result.checks += 1
            ok = True
            if isinstance(phi, And):
                if j:
                    ok &= checker.in_J(phi.left, k, n) and checker.in_J(phi.right, k, n)
                if r:
                    ok &= checker.in_R(phi.left, k, n) and checker.in_R(phi.right, k, n)
            elif isinstance(phi, Or):
                if j:
                    if kk <= n:
                        ok &= checker.in_J(phi.left, k, n) and checker.in_J(
                            phi.right, k, n
                        )
                    else:
                        ok &= (
                            checker.in_J(phi.left, k, n)
                            and checker.in_J(phi.right, n + 1, n)
                        ) or (
                            checker.in_J(phi.left, n + 1, n)
                            and checker.in_J(phi.right, k, n)
                        )
                if r:
                    if kk < n:
                        ok &= checker.in_R(phi.left, k, n) and checker.in_R(
                            phi.right, k, n
                        )
                    elif kk == n:
                        ok &= (
                            checker.in_R(phi.left, k, n)
                            and checker.in_D(phi.right, kk, n)
                        ) or (
                            checker.in_D(phi.left, kk, n)
                            and checker.in_R(phi.right, k, n)
                        )
                    else:
                        ok &= (
                            checker.in_R(phi.left, k, n)
                            and checker.in_J(phi.right, n + 1, n)
                        ) or (
                            checker.in_J(phi.left, n + 1, n)
                            and checker.in_R(phi.right, k, n)
                        )
            elif isinstance(phi, Imp):
                if j:
                    if kk < n:
                        ok &= checker.in_R(phi.left, k, n)
                    elif kk == n:
                        ok &= checker.in_D(phi.left, kk, n)
                    else:
                        ok &= checker.in_J(phi.left, n + 1, n)
                    ok &= checker.in_J(phi.right, k, n)
                if r:
                    if kk <= n:
                        ok &= checker.in_J(phi.left, k, n)
                    else:
                        ok &= checker.in_J(phi.left, n + 1, n)
                    ok &= checker.in_R(phi.right, k, n)
            elif isinstance(phi, Exists):
                if j:
                    ok &= checker.in_J(phi.body, k, n)
                if r:
                    ok &= kk > 0 and checker.in_J(phi, kk, n)
            elif isinstance(phi, Forall):
                if j:
                    ok &= kk > 0 and checker.in_R(phi, kk, n)
                if r:
                    ok &= checker.in_R(phi.body, k, n)
            if not ok:
                result.fail(f"inversion fails for {render(phi)} k={k} n={n}")


def _check_pinned_negatives(budget: int) -> CriterionResult:
    result = CriterionResult("criterion-6 pinned negatives", True, 0)
    checker = Classifier()

    neg = parse("(forall x. P(x)) -> false")
    for k in range(7):
        result.checks += 2
        if checker.in_J(neg, k, 0):
            result.fail(f"(forall x. P(x)) -> false entered J_{k}^0")
        if checker.in_R(neg, k, 0):
            result.fail(f"(forall x. P(x)) -> false entered R_{k}^0")
    result.checks += 1
    if not checker.in_J(neg, 2, 1):
        result.fail("(forall x. P(x)) -> false missing from J_2^1")

    # semantically reducible at degree 1, yet syntactically out of reach
    gap = parse("((forall x. P(x)) | (exists y. Q(y))) -> R(x)")
    search = oracle.can_reach(gap, 1, lambda m: in_sigma_plus(m, 2), budget, checker)
    result.checks += 1
    if search.status != "no":
        result.fail(
            f"gap witness unexpectedly {search.status} for Sigma_2+ at degree 1"
        )
    return result


def _random_formula(rng: random.Random, budget: int) -> Formula:
    if budget <= 1:
        return rng.choice(
            [FALSUM, Prime("P", ("x",)), Prime("P", ("y",)), Prime("Q", ("x",)),
             Prime("Q", ("y",))]
        )
    shape = rng.randrange(6)
    if shape <= 1:
        kind = Exists if shape == 0 else Forall
        return kind(rng.choice(("x", "y")), _random_formula(rng, budget - 1))
    if shape == 5:
        return _random_formula(rng, 1)
    op = (And, Or, Imp)[shape - 2]
    left_budget = rng.randrange(1, budget - 1) if budget > 2 else 1
    left = _random_formula(rng, left_budget)
    right = _random_formula(rng, budget - 1 - left_budget)
    return op(left, right)


def _check_rewrite_conformance(seed: int) -> CriterionResult:
    result = CriterionResult("criterion-7 rewrite conformance", True, 0)
    rng = random.Random(seed)
    checker = Classifier()
    applied = 0
    while applied < RANDOM_STEP_COUNT:
        phi = _random_formula(rng, rng.randrange(4, 10))
        n = rng.randrange(3)
        steps = applicable_steps(phi, n, checker)
        up = applicable_steps(phi, n + 1, checker)
        result.checks += 1
        if not set(steps) <= set(up):
            result.fail(f"degree monotonicity fails for {render(phi)} n={n}")
        if not steps:
            continue
        step = rng.choice(steps)
        psi = apply_step(phi, step, n, checker)
        applied += 1
        result.checks += 3
        if free_vars(psi) != free_vars(phi):
            result.fail(f"free variables changed: {render(phi)} via {step.rule}")
        if measure(psi) != measure(phi) - 1:
            result.fail(f"measure not decreased by 1: {render(phi)} via {step.rule}")
        text = trace_to_text(Trace(phi, (step,), n))
        reparsed = trace_from_text(text)
        if trace_to_text(reparsed) != text:
            result.fail(f"trace text round-trip unstable for {render(phi)}")
        elif verify_trace(reparsed, checker) is not psi:
            result.fail(f"trace replay diverges for {render(phi)}")
    return result
