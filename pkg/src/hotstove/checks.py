"""Check suites behind the theorem-check command: exact identities, sign laws, and cross-backend agreement."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

from hotstove import analytic, oracle
from hotstove.distributions import (
    DiscreteSymmetric,
    FiniteDiscrete,
    FixedMean,
    HierarchicalNormal,
    Laplace,
    Normal,
)
from hotstove.engine import ExperimentConfig, run_experiment
from hotstove.learners import Averaging, BayesianNormal, RecencyWeighted
from hotstove.policies import Constant, Monotonicity, Step, monotonicity_class

EXACT_TOL = 1e-12
Z = 4.0  # standard errors allowed in statistical checks

RADEMACHER = DiscreteSymmetric(0.0, ((1.0, 0.5),))
UNIFORM3 = FiniteDiscrete(((-1.0, 1 / 3), (0.0, 1 / 3), (1.0, 1 / 3)))
SKEWED = FiniteDiscrete(((-1.0, 0.2), (0.5, 0.5), (2.0, 0.3)))
WIDE5 = DiscreteSymmetric(1.0, ((1.0, 0.3), (3.0, 0.2)))

INCREASING = Step(0.0, 10, 1)
DECREASING = Step(0.0, 1, 10)


@dataclass
class Check:
    name: str
    observed: float
    threshold: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Budget:
    trials: int = 1_000_000
    seed: int = 20240101
    workers: Optional[int] = None


def _f(x: float) -> float:
    return float(x)


def _run(budget: Budget, env, learner, policy, k=2, offset=0):
    cfg = ExperimentConfig(env, learner, policy, k, budget.trials, budget.seed + offset)
    return run_experiment(cfg, budget.workers).summary


def _sign_check(name, s, mono) -> Check:
    diff = s.mean - s.reference
    bound = Z * s.se_mean
    if mono is Monotonicity.INCREASING:
        return Check(name, _f(diff), f"< -{bound:.3g}", diff < -bound)
    if mono is Monotonicity.DECREASING:
        return Check(name, _f(diff), f"> {bound:.3g}", diff > bound)
    return Check(name, _f(diff), f"|.| < {bound:.3g}", abs(diff) < bound)


def _majority_check(name, s, mono) -> Check:
    p = s.prob_below_reference
    bound = Z * s.se_prob_below
    if mono is Monotonicity.INCREASING:
        return Check(name, _f(p), f"> {0.5 + bound:.4f}", p > 0.5 + bound)
    return Check(name, _f(p), f"< {0.5 - bound:.4f}", p < 0.5 - bound)


def _agree(name, observed, target, se) -> Check:
    return Check(name, _f(observed), f"{target:.6g} +/- {Z * se:.3g}", abs(observed - target) < Z * se,
                 detail=f"exact={target!r}")


# --- exact (enumeration / closed-form) configurations ----------------------

EXACT_CONFIGS = [
    ("rademacher k=1 step(0,2,1)", RADEMACHER, 1, Step(0.0, 2, 1)),
    ("rademacher k=1 step(0,1,2)", RADEMACHER, 1, Step(0.0, 1, 2)),
    ("uniform{-1,0,1} k=2 step(0,3,1)", UNIFORM3, 2, Step(0.0, 3, 1)),
    ("rademacher k=3 step(0,4,1)", RADEMACHER, 3, Step(0.0, 4, 1)),
    ("skewed k=3 step(0.65,4,1)", SKEWED, 3, Step(0.65, 4, 1)),
    ("skewed k=2 step(0.65,1,5)", SKEWED, 2, Step(0.65, 1, 5)),
    ("wide5 k=2 step(1,6,2)", WIDE5, 2, Step(1.0, 6, 2)),
    ("uniform{-1,0,1} k=2 constant(4)", UNIFORM3, 2, Constant(4)),
]


def suite_1(budget: Budget) -> list[Check]:
    checks = []
    for label, dist, k, policy in EXACT_CONFIGS:
        bias, cov, _ = oracle.enumerate_covariance_identity(dist, k, policy)
        checks.append(Check(f"averaging bias: exact identity bias == Cov(S1, 1/(k+n)) [{label}]",
                            _f(bias - cov), f"|.| <= {EXACT_TOL}", abs(bias - cov) <= EXACT_TOL,
                            detail=f"bias={bias!r} covariance={cov!r}"))
        mono = monotonicity_class(policy)
        ok = {Monotonicity.INCREASING: bias < -EXACT_TOL, Monotonicity.DECREASING: bias > EXACT_TOL,
              Monotonicity.CONSTANT: abs(bias) <= EXACT_TOL}[mono]
        checks.append(Check(f"averaging bias: exact sign law ({mono.value}) [{label}]", _f(bias),
                            {"increasing": "< 0", "decreasing": "> 0", "constant": "== 0"}[mono.value], ok))

    for sd, c in ((1.0, 0.0), (5.0, 0.0), (2.0, 0.7)):
        closed = analytic.step_policy_bias_closed_form(2, 10, 1, c, sd)
        quad = analytic.averaging_expected_final(2, Step(c, 10, 1), sd)
        checks.append(Check(f"averaging bias: closed form vs quadrature [sigma={sd}, c={c}]", _f(closed - quad),
                            "|.| <= 1e-9", abs(closed - quad) <= 1e-9))

    payoffs = [
        ("normal(0,1)", Normal(0.0, 1.0), 0.0),
        ("laplace(0,1)", Laplace(0.0, 1.0), 0.0),
        ("skewed discrete", SKEWED, SKEWED.mean),
    ]
    for i, (label, dist, u) in enumerate(payoffs):
        for j, (plabel, policy) in enumerate((("increasing", Step(u, 10, 1)), ("decreasing", Step(u, 1, 10)),
                                              ("constant", Constant(5)))):
            s = _run(budget, FixedMean(dist), Averaging(), policy, offset=10 * i + j)
            checks.append(_sign_check(f"averaging bias: MC mean - u, {plabel} policy [{label}]", s,
                                      monotonicity_class(policy)))

    exact = oracle.enumerate_expected_final_average(SKEWED, 2, Step(0.65, 4, 1))
    s = _run(budget, FixedMean(SKEWED), Averaging(), Step(0.65, 4, 1), offset=100)
    checks.append(_agree("averaging bias: engine vs oracle mean [skewed k=2 step(0.65,4,1)]", s.mean,
                         exact.expected_final_belief, s.se_mean))
    p = exact.prob_final_below_u
    checks.append(_agree("averaging bias: engine vs oracle P(below u) [skewed k=2 step(0.65,4,1)]",
                         s.prob_below_reference, p, math.sqrt(p * (1 - p) / s.count)))
    return checks


def suite_2(budget: Budget) -> list[Check]:
    checks = []
    for kk in range(1, 6):
        a = analytic.normal_sum_tail_prob(kk, 1.0, 1.0)
        b = analytic.normal_sum_tail_prob(kk + 1, 1.0, 1.0)
        checks.append(Check(f"normal tail P(S_{kk + 1} > 1) > P(S_{kk} > 1)", _f(b - a), "> 0", b > a))
    for i, (label, dist) in enumerate((("normal(0,1)", Normal(0.0, 1.0)), ("laplace(0,1)", Laplace(0.0, 1.0)),
                                       ("normal(2,9)", Normal(2.0, 9.0)))):
        u = dist.mean
        for j, policy in enumerate((Step(u, 10, 1), Step(u, 1, 10))):
            s = _run(budget, FixedMean(dist), Averaging(), policy, offset=200 + 10 * i + j)
            mono = monotonicity_class(policy)
            checks.append(_majority_check(f"averaging majority: MC P(final < u), {mono.value} [{label}]", s, mono))
    q = analytic.averaging_prob_final_below(2, INCREASING, 1.0)
    checks.append(Check("averaging majority: quadrature P(final < 0) normal step(0,10,1)", _f(q), "> 0.5", q > 0.5))
    s = _run(budget, FixedMean(Normal(0.0, 1.0)), Averaging(), INCREASING, offset=300)
    checks.append(_agree("averaging majority: engine vs quadrature P(final < 0)", s.prob_below_reference, q,
                         math.sqrt(q * (1 - q) / s.count)))
    return checks


def suite_3(budget: Budget) -> list[Check]:
    checks = []
    r = oracle.enumerate_expected_final_belief_recency(RADEMACHER, 1, Step(0.0, 2, 1), 0.5, 0.0)
    checks.append(Check("recency: exact E[z2] rademacher k=1 b=0.5 step(0,2,1)", r.expected_final_belief,
                        "-0.0625 +/- 1e-12", abs(r.expected_final_belief + 0.0625) <= EXACT_TOL))
    for label, dist, k, policy, b in (
        ("rademacher k=1 step(0,2,1) b=0.5", RADEMACHER, 1, Step(0.0, 2, 1), 0.5),
        ("uniform{-1,0,1} k=2 step(0,3,1) b=0.3", UNIFORM3, 2, Step(0.0, 3, 1), 0.3),
        ("skewed k=3 step(0.65,1,4) b=0.4", SKEWED, 3, Step(0.65, 1, 4), 0.4),
        ("wide5 k=2 step(1,5,1) b=0.2", WIDE5, 2, Step(1.0, 5, 1), 0.2),
    ):
        bias, cov = oracle.enumerate_recency_covariance_identity(dist, k, policy, b, dist.mean)
        checks.append(Check(f"recency: exact identity E[z2]-u == Cov(z1,(1-b)^n) [{label}]", _f(bias - cov),
                            f"|.| <= {EXACT_TOL}", abs(bias - cov) <= EXACT_TOL))
    offset = 400
    for b in (0.1, 0.5):
        for dist in (Normal(0.0, 1.0), Laplace(1.0, 2.0)):
            u = dist.mean
            for policy in (Step(u, 10, 1), Step(u, 1, 10)):
                offset += 1
                s = _run(budget, FixedMean(dist), RecencyWeighted(b, u), policy, offset=offset)
                checks.append(_sign_check(
                    f"recency: MC mean(z2) - u, {monotonicity_class(policy).value}, b={b} [{type(dist).__name__}]",
                    s, monotonicity_class(policy)))
    return checks


def suite_4(budget: Budget) -> list[Check]:
    checks = []
    offset = 500
    for m, su, se in ((0.0, 1.0, 1.0), (0.0, 1.0, 5.0), (1.5, 2.0, 3.0)):
        for policy in (Step(m, 10, 1), Step(m, 1, 10)):
            offset += 1
            s = _run(budget, HierarchicalNormal(m, su, se), BayesianNormal(m, su, se), policy, offset=offset)
            diff = s.mean - m
            checks.append(Check(
                f"martingale: MC mean(b2) - m, {monotonicity_class(policy).value} [m={m}, su2={su}, se2={se}]",
                _f(diff), f"|.| < {Z * s.se_mean:.3g}", abs(diff) < Z * s.se_mean))
    return checks


REPORTED_BAYES = (
    # (noise variance, reported value, label)
    (1.0, 0.534, "sigma_e^2 = 1"),
    (25.0, 0.577, "sigma_e = 5 (variance 25)"),
)


def suite_5(budget: Budget) -> list[Check]:
    checks = []
    for se, target, label in REPORTED_BAYES:
        q = analytic.bayes_prob_final_negative(2, INCREASING, 1.0, se)
        checks.append(Check(f"bayes: quadrature P(b2 < 0) vs reported value [{label}]", _f(q),
                            f"{target} +/- 0.002", abs(q - target) <= 0.002))
    offset = 600
    for su, se, m in ((1.0, 1.0, 0.0), (1.0, 5.0, 0.0), (1.0, 25.0, 0.0), (2.0, 3.0, 1.5)):
        for policy in (Step(m, 10, 1), Step(m, 1, 10), Constant(4)):
            offset += 1
            q = analytic.bayes_prob_final_negative(2, policy, su, se, prior_mean=m)
            mono = monotonicity_class(policy)
            if mono is Monotonicity.CONSTANT:
                checks.append(Check(f"bayes: quadrature constant policy [su2={su}, se2={se}]", _f(q),
                                    "0.5 +/- 1e-9", abs(q - 0.5) <= 1e-9))
                continue
            s = _run(budget, HierarchicalNormal(m, su, se), BayesianNormal(m, su, se), policy, offset=offset)
            tag = f"{mono.value} [m={m}, su2={su}, se2={se}]"
            checks.append(_majority_check(f"bayes: MC P(b2 < m), {tag}", s, mono))
            checks.append(_agree(f"bayes: engine vs quadrature P(b2 < m), {tag}", s.prob_below_reference, q,
                                 math.sqrt(q * (1 - q) / s.count)))
            pn = analytic.flip_prob_pos_to_neg(2, analytic.shift_policy(policy, m), su, se)
            np_ = analytic.flip_prob_neg_to_pos(2, analytic.shift_policy(policy, m), su, se)
            want = pn > np_ if mono is Monotonicity.INCREASING else pn < np_
            checks.append(Check(f"bayes: Pr(+->-) vs Pr(-->+), {tag}", _f(pn - np_),
                                "> 0" if mono is Monotonicity.INCREASING else "< 0", want))
    return checks


SUITES: dict[str, Callable[[Budget], list[Check]]] = {
    "1": suite_1,
    "2": suite_2,
    "3": suite_3,
    "4": suite_4,
    "5": suite_5,
}


def run_suites(names: list[str], budget: Budget) -> dict:
    report = {"budget": asdict(budget), "suites": {}}
    all_ok = True
    for name in names:
        checks = SUITES[name](budget)
        ok = all(c.passed for c in checks)
        all_ok &= ok
        report["suites"][name] = {"passed": ok, "checks": [c.to_dict() for c in checks]}
    report["passed"] = all_ok
    return report
