"""Acceptance criteria AC-1 to AC-8.

Each criterion collects every violated clause instead of stopping at the
first, records a PASS/FAIL line (shown in the pytest terminal summary), and
then fails the test if anything was violated. Run this file directly for the
lines alone: ``python3 tests/test_acceptance.py``.
"""

import itertools
import math
import sys
import warnings
from collections import defaultdict

import numpy as np
import pytest

import acceptance_log
import oracles
from indist.extraction import forward_v_b, intrinsic_from_A, intrinsic_from_B
from indist.fock import trace_distance
from indist.hom import hom_stats, predict_hom, reference_stats, visibility_A, visibility_B
from indist.interferometer import beam_splitter, emulator_unitary, unitarity_residual
from indist.source import (
    CHANNEL_INPUTS,
    LabelAllocator,
    SourceParams,
    Variant,
    build_source,
    channel_output_first_order,
    effective_epsilon,
    g2_of,
    measured_epsilon_tilde,
    p_for_g2,
    pn_from_g2,
    predict_pn,
    single_photon_overlap,
)
from indist.verify import FLOAT_SLACK

ETAS = [i / 10 for i in range(1, 10)]
ERRS = [0.0, 0.05, 0.2, 1.0]
PS = [1e-4, 1e-3, 1e-2]
GRID = [(eta, eps, xi, p) for eta in ETAS for eps in ERRS for xi in ERRS for p in PS if eps <= xi]


def pair(params):
    alloc = LabelAllocator()
    return build_source(params, alloc), build_source(params, alloc)


def ac1():
    failures = []
    tenths = [i / 10 for i in range(11)]
    for r in tenths:
        res = unitarity_residual(beam_splitter(r).matrix)
        if res > 1e-12:
            failures.append(f"beam_splitter({r}) residual {res:.2e}")
    for eta, p in itertools.product(tenths, tenths[:6]):
        res = unitarity_residual(emulator_unitary(eta, p).matrix)
        if res > 1e-12:
            failures.append(f"emulator_unitary({eta}, {p}) residual {res:.2e}")
    return failures


def oracle_channel(kind, eta, p):
    """Channel table from permanents, keyed (target photons, error photons) in the kept mode."""
    sig = "T" if kind[0] == "1" else "E0"
    noise = "T" if kind[1] == "1" else "E1"
    table = defaultdict(float)
    for key, prob in oracles.labeled_distribution(oracles.emulator_matrix(eta, p), [(0, sig), (1, noise)]).items():
        kept = [lab for m, lab in key if m == 0]
        table[(kept.count("T"), len(kept) - kept.count("T"))] += prob
    return dict(table)


def ac2():
    failures = []
    for kind, eta in itertools.product(CHANNEL_INPUTS, (0.1, 0.5, 0.9)):
        residuals = []
        for p in (1e-2, 5e-3, 2.5e-3):
            exact, approx = oracle_channel(kind, eta, p), channel_output_first_order(kind, eta, p)
            extra = {k for k, v in exact.items() if v > 1e-15} - set(approx)
            if extra:
                failures.append(f"{kind} eta={eta} p={p}: oracle terms {sorted(extra)} missing from first-order table")
            res = {k: abs(exact.get(k, 0.0) - v) for k, v in approx.items()}
            worst = max(res.values())
            if worst > 4 * p * p:
                failures.append(f"{kind} eta={eta} p={p}: residual {worst:.3e} > 4p^2")
            residuals.append(res)
        for big, small in zip(residuals, residuals[1:]):
            for k in big:
                if big[k] < 1e-15 and small[k] < 1e-15:
                    continue  # coefficient exact to rounding
                ratio = big[k] / small[k] if small[k] else math.inf
                if not 3 <= ratio <= 5:
                    failures.append(f"{kind} eta={eta} {k}: halving ratio {ratio:.3f}")
    return failures


def ac3():
    failures = []
    for eta, eps, xi, p in GRID:
        src = build_source(SourceParams(eta, p, eps, xi))
        closed = predict_pn(SourceParams(eta, p, eps, xi))
        res = max(abs(a - b) for a, b in zip(src.probabilities, closed))
        # the P1 bound is attained exactly at eps = xi = 0, so allow absolute rounding
        if res > 4 * eta**2 * p**2 + FLOAT_SLACK:
            failures.append(f"P_n at {(eta, eps, xi, p)}: {res:.3e} > 4 eta^2 p^2")
        g2_res = abs(src.g2 - 2 * p * (1 + (1 - eps) * (1 - xi)))
        if g2_res > 10 * p * p:
            failures.append(f"g2 at {(eta, eps, xi, p)}: {g2_res:.3e} > 10 p^2")
    if abs(g2_of(0.475, 0.0125) - 0.1) > 1e-15:
        failures.append(f"g2_of(0.475, 0.0125) = {g2_of(0.475, 0.0125)!r}")
    return failures


def ac4():
    failures = []
    for eta, eps, xi, p in GRID:
        params = SourceParams(eta, p, eps, xi)
        a, b = pair(params)
        measured = measured_epsilon_tilde(a)
        if measured < eps - 1e-12:
            failures.append(f"lower bound at {(eta, eps, xi, p)}: {measured} < {eps}")
        res = abs(measured - effective_epsilon(params))
        if res > 10 * p * p:
            failures.append(f"consistency at {(eta, eps, xi, p)}: {res:.3e} > 10 p^2")
        overlap = single_photon_overlap(a, b)
        if abs(overlap - (1 - measured) ** 2) > 1e-12:
            failures.append(f"two-copy overlap at {(eta, eps, xi, p)}: {overlap} vs {(1 - measured) ** 2}")
    golden = effective_epsilon(SourceParams(0.5, 0.025, 0.02, 1.0))
    if abs(golden - 0.0325641) > 1e-6:
        failures.append(f"golden eps~ {golden}")
    return failures


def extract_both(eta, eps, g2):
    a, b = pair(SourceParams(eta, p_for_g2(g2, eps, 1.0), eps, 1.0))
    stats, ref = hom_stats(a, b), reference_stats(a, b)
    g2_sim = a.g2
    return intrinsic_from_A(visibility_A(stats, ref), g2_sim), intrinsic_from_B(visibility_B(stats), g2_sim, 1.0)


def ac5():
    failures = []
    for eps, g2 in itertools.product((0.01, 0.05, 0.1), (0.01, 0.04)):
        disagreement = {}
        for eta in (1e-3, 1e-4):
            eps_a, eps_b = extract_both(eta, eps, g2)
            bound = 5 * (eta + g2**2)
            for name, got in (("A", eps_a), ("B", eps_b)):
                if abs(got - eps) > bound:
                    failures.append(f"method {name} at eta={eta}, eps={eps}, g2={g2}: |{got:.6f} - eps| > {bound:.2e}")
            disagreement[eta] = abs(eps_a - eps_b)
        shrink = disagreement[1e-3] / disagreement[1e-4]
        if shrink < 5:
            failures.append(
                f"eps={eps}, g2={g2}: A/B disagreement {disagreement[1e-3]:.3e} -> {disagreement[1e-4]:.3e} "
                f"(shrinks {shrink:.2f}x, needs >= 5x)"
            )
    return failures


def ac6():
    failures = []
    pred = predict_hom(0.05, 0.04, 0.0)
    for name, got, want in (("g_hom", pred.g_hom, 0.068750), ("v_a", pred.v_a, 0.867788), ("v_b", pred.v_b, 0.8625)):
        if abs(got - want) > 1e-6:
            failures.append(f"{name} = {got} vs {want}")
    dip = hom_stats(*pair(SourceParams(1.0, 0.0, 0.0, 1.0))).p_joint
    if abs(dip) > 1e-15:
        failures.append(f"perfect dip p_joint = {dip}")
    dist = hom_stats(*pair(SourceParams(1.0, 0.0, 1.0, 1.0)))
    if abs(dist.p_joint - 0.5) > 1e-12 or abs(dist.p_d1 - 0.75) > 1e-12 or abs(dist.p_d2 - 0.75) > 1e-12:
        failures.append(f"distinguishable pair gives {dist}")
    return failures


def dichroic_closed_form(eta, g2):
    p0 = 1 - eta - 0.5 * eta * g2 + 0.5 * eta**2 * g2
    p1 = eta + 0.5 * eta * g2 - eta**2 * g2
    return p0, p1, 1 - p0 - p1


def ac7():
    failures = []
    for eta, g2 in itertools.product((0.1, 0.5, 0.9), (0.0, 0.01, 0.05)):
        want = dichroic_closed_form(eta, g2)
        if pn_from_g2(eta, g2, Variant.DICHROIC) != want:
            failures.append(f"pn_from_g2 at eta={eta}, g2={g2}: {pn_from_g2(eta, g2, Variant.DICHROIC)} vs {want}")
        # through p the requested g2 is only recovered to rounding
        got = predict_pn(SourceParams(eta, p_for_g2(g2, variant=Variant.DICHROIC), 0.0, 1.0, Variant.DICHROIC))
        if max(abs(a - b) for a, b in zip(got, want)) > 1e-12:
            failures.append(f"predict_pn at eta={eta}, g2={g2}: {got} vs {want}")
    for g2 in (0.01, 0.005):
        p = p_for_g2(g2, variant=Variant.DICHROIC)
        for eta in (0.1, 0.5, 0.9):
            dist = oracles.dichroic_distribution(eta, p, 0.02)
            oracle_p = [math.fsum(v for k, v in dist.items() if len(k) == n) for n in (0, 1)]
            want = dichroic_closed_form(eta, g2)
            res = max(abs(oracle_p[n] - want[n]) for n in (0, 1))
            if res > 4 * g2**2:
                failures.append(f"oracle P0,P1 at eta={eta}, g2={g2}: residual {res:.3e} > 4 g2^2")
        distances = []
        for eta in (0.2, 0.1, 0.05):
            agn = build_source(SourceParams(eta, p_for_g2(g2, 0.02, 1.0), 0.02, 1.0))
            dich = build_source(SourceParams(eta, p, 0.02, 1.0, Variant.DICHROIC))
            distances.append(trace_distance(agn.state, dich.state))
        for big, small in zip(distances, distances[1:]):
            if not 0.75 <= 2 * small / big <= 1.25:
                failures.append(f"trace distance at g2={g2}: {big:.3e} -> {small:.3e} does not halve")
    return failures


def ac8():
    failures = []
    worst = 0.0
    for eps, g2, xi in itertools.product(np.linspace(0, 0.3, 7), np.linspace(0, 0.1, 5), (0, 0.25, 0.5, 0.75, 1)):
        worst = max(worst, abs(intrinsic_from_B(forward_v_b(eps, g2, xi), g2, xi) - eps))
    if worst > 1e-10:
        failures.append(f"general-xi round trip worst {worst:.2e}")
    eps_a, eps_b = intrinsic_from_A(0.95, 0.02), intrinsic_from_B(0.93, 0.02)
    if abs(eps_a - 0.006018) > 1e-6:
        failures.append(f"method A reference value {eps_a}")
    if abs(eps_b - 0.015425) > 1e-6:
        failures.append(f"method B reference value {eps_b}")
    return failures


CRITERIA = {
    "AC-1": ("unitarity of beam splitter and emulator", ac1),
    "AC-2": ("channel outputs match first-order tables", ac2),
    "AC-3": ("photon-number decomposition and g2", ac3),
    "AC-4": ("effective indistinguishability error", ac4),
    "AC-5": ("round-trip extraction from simulated HOM", ac5),
    "AC-6": ("HOM golden values", ac6),
    "AC-7": ("dichroic noise model", ac7),
    "AC-8": ("extraction inversions", ac8),
}


def evaluate(criterion):
    title, fn = CRITERIA[criterion]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        failures = fn()
    acceptance_log.record(criterion, title, failures)
    return failures


@pytest.mark.parametrize("criterion", list(CRITERIA))
def test_acceptance(criterion):
    failures = evaluate(criterion)
    print(f"{criterion} {'FAIL' if failures else 'PASS'}: {CRITERIA[criterion][0]}")
    assert not failures, "\n".join(failures)


if __name__ == "__main__":
    for c in CRITERIA:
        evaluate(c)
    print("\n".join(acceptance_log.lines()))
    sys.exit(0 if all(ok for ok, _, _ in acceptance_log.RESULTS.values()) else 1)
