"""Runtime verification suite: exact simulation against the closed forms.

Each check sweeps a parameter grid and reports the worst residual relative to
its tolerance. ``run_suite("small")`` is a fast subset of ``run_suite("full")``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .extraction import forward_v_b, intrinsic_from_A, intrinsic_from_B
from .fock import InternalLabel, trace_distance
from .hom import g_hom, hom_stats, predict_hom, reference_stats, visibility_A, visibility_B
from .interferometer import beam_splitter, emulator_unitary, unitarity_residual
from .source import (
    CHANNEL_INPUTS,
    EpsilonMode,
    LabelAllocator,
    SourceParams,
    Variant,
    build_source,
    channel_output,
    channel_output_first_order,
    effective_epsilon,
    measured_epsilon_tilde,
    p_for_g2,
    predict_g2,
    predict_pn,
    single_photon_overlap,
)

# absolute slack for bounds that hold with equality in exact arithmetic
FLOAT_SLACK = 1e-14

# empirical constant for trace distance between the two noise models, delta <= C eta g2
DICHROIC_DISTANCE_CONSTANT = 0.6


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    detail: str

    def __post_init__(self):
        # checks accumulate numpy comparisons; keep the public fields plain Python
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "worst", float(self.worst))


GRIDS = {
    "small": dict(
        etas=(0.1, 0.5, 0.9),
        errs=(0.0, 0.05, 1.0),
        ps=(1e-3, 1e-2),
        unit=tuple(i / 10 for i in range(11)),
        hom_etas=(1e-2, 1e-3, 1e-4),
    ),
    "full": dict(
        etas=tuple(i / 10 for i in range(1, 10)),
        errs=(0.0, 0.05, 0.2, 1.0),
        ps=(1e-4, 1e-3, 1e-2),
        unit=tuple(i / 20 for i in range(21)),
        hom_etas=(1e-2, 1e-3, 1e-4),
    ),
}


def _pairs(errs):
    return [(e, x) for e in errs for x in errs if e <= x]


def _ratio_ok(big: float, small: float, lo: float, hi: float) -> bool:
    return small > 0 and lo <= big / small <= hi


def check_unitarity(g) -> CheckResult:
    worst = 0.0
    for r in g["unit"]:
        worst = max(worst, unitarity_residual(beam_splitter(r).matrix))
    for eta in g["unit"]:
        for p in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5):
            worst = max(worst, unitarity_residual(emulator_unitary(eta, p).matrix))
    return CheckResult("unitarity", worst <= 1e-12, worst, "max|UU^dag - I| <= 1e-12")


def check_channel_outputs(g) -> CheckResult:
    ok, worst = True, 0.0
    ps = (1e-2, 5e-3, 2.5e-3)
    for kind, eta in itertools.product(CHANNEL_INPUTS, (0.5,) + g["etas"][:1]):
        residuals = []
        for p in ps:
            exact, approx = channel_output(kind, eta, p), channel_output_first_order(kind, eta, p)
            if set(exact) - set(approx):
                ok = False
            res = {key: abs(exact.get(key, 0.0) - approx[key]) for key in approx}
            worst = max(worst, max(res[k] / (4 * p * p) for k in res))
            residuals.append(res)
        for a, b in zip(residuals, residuals[1:]):
            ok &= all(_ratio_ok(a[k], b[k], 3, 5) for k in a)
    return CheckResult("channel_outputs", ok and worst <= 1, worst, "|coef - first order| <= 4p^2, halving ratio in [3,5]")


def check_photon_numbers(g) -> CheckResult:
    ok, worst = True, 0.0
    for eta, (eps, xi), p in itertools.product(g["etas"], _pairs(g["errs"]), g["ps"]):
        params = SourceParams(eta, p, eps, xi)
        src = build_source(params)
        res = max(abs(a - b) for a, b in zip(src.probabilities, predict_pn(params)))
        g2_res = abs(src.g2 - predict_g2(params))
        worst = max(worst, res / (4 * eta**2 * p**2 + FLOAT_SLACK), g2_res / (10 * p**2))
        half = build_source(params.replace(p=p / 2))
        res_half = max(abs(a - b) for a, b in zip(half.probabilities, predict_pn(params.replace(p=p / 2))))
        ok &= _ratio_ok(res, res_half, 3, 5)
    return CheckResult("photon_numbers_and_g2", ok and worst <= 1, worst, "|P_n| <= 4 eta^2 p^2, |g2| <= 10 p^2")


def check_effective_epsilon(g) -> CheckResult:
    ok, worst = True, 0.0
    for eta, (eps, xi), p in itertools.product(g["etas"], _pairs(g["errs"]), g["ps"]):
        params = SourceParams(eta, p, eps, xi)
        alloc = LabelAllocator()
        a, b = build_source(params, alloc), build_source(params, alloc)
        measured = measured_epsilon_tilde(a)
        ok &= measured >= eps - 1e-12
        worst = max(worst, abs(measured - effective_epsilon(params)) / (10 * p * p))
        ok &= abs(single_photon_overlap(a, b) - (1 - measured) ** 2) <= 1e-12
    return CheckResult("effective_epsilon", ok and worst <= 1, worst, "eps <= eps~, |eps~ - consistency| <= 10p^2, overlap = (1-eps~)^2")


def check_first_order_expansion(g) -> CheckResult:
    ok, worst = True, 0.0
    for eta, (eps, xi) in itertools.product(g["etas"], _pairs(g["errs"])):
        diffs = []
        for p in (1e-2, 5e-3):
            params = SourceParams(eta, p, eps, xi)
            d = abs(effective_epsilon(params, EpsilonMode.FIRST_ORDER) - effective_epsilon(params))
            diffs.append(d)
            worst = max(worst, d / predict_g2(params) ** 2 if predict_g2(params) else 0.0)
        if diffs[1] > 1e-15:
            ok &= _ratio_ok(diffs[0], diffs[1], 3, 5)
    return CheckResult("first_order_vs_consistency", ok, worst, "difference O(g2^2), quarters when g2 halves")


def _hom_pair(params: SourceParams):
    alloc = LabelAllocator()
    return build_source(params, alloc), build_source(params, alloc)


def check_hom_leading_order(g) -> CheckResult:
    ok, worst = True, 0.0
    for eps, xi in ((0.02, 1.0), (0.05, 0.5)):
        residuals = []
        for eta in g["hom_etas"]:
            a, b = _hom_pair(SourceParams(eta, 0.02, eps, xi))
            pred = predict_hom(measured_epsilon_tilde(a), a.g2, eta)
            res = abs(g_hom(hom_stats(a, b)) - pred.g_hom)
            scale = eta**2 + eta * a.g2 + a.g2**2
            worst = max(worst, res / scale)
            residuals.append(res)
        ok &= all(big >= 5 * small for big, small in zip(residuals, residuals[1:]))
    return CheckResult("hom_leading_order", ok, worst, "g_HOM residual / (eta^2 + eta g2 + g2^2); drops >= 5x per decade")


def check_method_equivalence(g) -> CheckResult:
    worst = 0.0
    for eta, eps, xi in itertools.product(g["hom_etas"], (0.02, 0.1), (0.5, 1.0)):
        a, b = _hom_pair(SourceParams(eta, 0.01, eps, xi))
        stats, ref = hom_stats(a, b), reference_stats(a, b)
        g2, overlap = a.g2, single_photon_overlap(a, b)
        scale = eta + g2**2
        worst = max(
            worst,
            abs(visibility_A(stats, ref) * (1 + g2) - overlap) / scale,
            abs(visibility_B(stats) + g2 - overlap) / scale,
        )
    return CheckResult("method_equivalence", worst <= 1, worst, "V_A(1+g2), V_B+g2 vs overlap within eta + g2^2")


def check_monotonicity(g) -> CheckResult:
    ok = True
    for eta, xi in itertools.product((1e-3, 0.5), (0.5, 1.0)):
        joints = [hom_stats(*_hom_pair(SourceParams(eta, 0.01, eps, xi))).p_joint for eps in (0.0, 0.05, 0.2, 0.5)]
        ok &= all(x <= y for x, y in zip(joints, joints[1:]))
    return CheckResult("hom_monotone_in_eps", ok, 0.0, "p_joint non-decreasing in eps")


def check_label_blindness(g) -> CheckResult:
    a, b = _hom_pair(SourceParams(0.3, 0.05, 0.1, 0.6))
    perm = {0: 3, 1: 2, 2: 0, 3: 1}
    mapping = lambda lab: lab if lab.is_target else InternalLabel(perm[lab.error_id])  # noqa: E731
    same = hom_stats(a, b) == hom_stats(a.relabel(mapping), b.relabel(mapping))
    return CheckResult("label_blindness", same, 0.0, "error-id permutation leaves click statistics bit-identical")


def check_extraction(g) -> CheckResult:
    ok, worst = True, 0.0
    for eps, g2, xi in itertools.product(np.linspace(0, 0.3, 7), np.linspace(0, 0.1, 5), (0, 0.25, 0.5, 0.75, 1)):
        back = intrinsic_from_B(forward_v_b(eps, g2, xi), g2, xi)
        worst = max(worst, abs(back - eps))
    ok &= worst <= 1e-10
    for v, g2 in itertools.product((0.8, 0.85, 0.9), (0.01, 0.05)):
        eps_a = intrinsic_from_A(v, g2)
        ok &= eps_a <= 1 - math.sqrt(v * (1 + g2))
    return CheckResult("extraction_inversion", ok, worst, "general-xi round trip <= 1e-10, eps <= eps~")


def check_dichroic(g) -> CheckResult:
    ok, worst = True, 0.0
    for g2 in (0.01, 0.005):
        p = p_for_g2(g2, variant=Variant.DICHROIC)
        distances = []
        for eta in (0.2, 0.1, 0.05):
            dich = build_source(SourceParams(eta, p, 0.02, 1.0, Variant.DICHROIC))
            closed = predict_pn(SourceParams(eta, p, 0.02, 1.0, Variant.DICHROIC))
            worst = max(worst, max(abs(dich.P(n) - closed[n]) for n in (0, 1)) / (4 * g2**2))
            agn = build_source(SourceParams(eta, p, 0.02, 1.0))
            d = trace_distance(agn.state, dich.state)
            ok &= d <= DICHROIC_DISTANCE_CONSTANT * eta * g2
            distances.append(d)
        ok &= all(0.75 <= 2 * small / big <= 1.25 for big, small in zip(distances, distances[1:]))
    return CheckResult("dichroic_model", ok and worst <= 1, worst, "closed-form P0,P1 within 4 g2^2; delta = O(eta g2)")


CHECKS: tuple[Callable[[dict], CheckResult], ...] = (
    check_unitarity,
    check_channel_outputs,
    check_photon_numbers,
    check_effective_epsilon,
    check_first_order_expansion,
    check_hom_leading_order,
    check_method_equivalence,
    check_monotonicity,
    check_label_blindness,
    check_extraction,
    check_dichroic,
)


def run_check(check: Callable[[dict], CheckResult], grid: str) -> CheckResult:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            return check(GRIDS[grid])
        except Exception as exc:  # a crashing check is a failed check
            return CheckResult(check.__name__.removeprefix("check_"), False, math.nan, f"raised {exc!r}")


def run_suite(grid: str = "small", jobs: int = 1) -> list[CheckResult]:
    if grid not in GRIDS:
        raise ValueError(f"grid must be one of {sorted(GRIDS)}, got {grid!r}")
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_check, CHECKS, [grid] * len(CHECKS)))
    return [run_check(c, grid) for c in CHECKS]
