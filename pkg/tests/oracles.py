"""Independent brute-force oracles.

Nothing here touches the creation-operator expansion in ``indist``: output
statistics come from matrix permanents over label groups, since photons with
different internal labels never interfere and their routing distributions
simply multiply.
"""

import itertools
import math
from collections import Counter, defaultdict

import numpy as np


def permanent(m):
    n = m.shape[0]
    return sum(math.prod(m[i, s[i]] for i in range(n)) for s in itertools.permutations(range(n)))


def identical_distribution(u, input_modes):
    """Output occupation (sorted mode tuple) -> probability for identical photons."""
    u = np.asarray(u)
    n, dim = len(input_modes), u.shape[0]
    in_norm = math.prod(math.factorial(c) for c in Counter(input_modes).values())
    out = {}
    for modes in itertools.combinations_with_replacement(range(dim), n):
        out_norm = math.prod(math.factorial(c) for c in Counter(modes).values())
        amp = permanent(u[np.ix_(list(input_modes), list(modes))])
        out[modes] = abs(amp) ** 2 / (in_norm * out_norm)
    return out


def labeled_distribution(u, photons):
    """``photons`` is a list of (mode, label); returns {sorted ((mode, label), ...): prob}."""
    groups = defaultdict(list)
    for mode, label in photons:
        groups[label].append(mode)
    dist = {(): 1.0}
    for label, modes in groups.items():
        group = identical_distribution(u, modes)
        nxt = defaultdict(float)
        for key, pk in dist.items():
            for out, po in group.items():
                nxt[tuple(sorted(key + tuple((m, label) for m in out)))] += pk * po
        dist = dict(nxt)
    return dist


def emulator_matrix(eta, p):
    s = math.sqrt
    return np.array(
        [
            [s(eta * (1 - p)), s(p), s((1 - eta) * (1 - p))],
            [s(eta * p), -s(1 - p), s((1 - eta) * p)],
            [s(1 - eta), 0.0, -s(eta)],
        ]
    )


def source_distribution(eta, p, eps, xi, tag=""):
    """Labels left in the monitored mode -> probability, for the four-term input mixture.

    Labels: "T" target, "Es<tag>" signal error mode, "En<tag>" noise error mode.
    """
    u = emulator_matrix(eta, p)
    terms = [
        ((1 - eps) * (1 - xi), "T", "T"),
        ((1 - eps) * xi, "T", "En" + tag),
        (eps * (1 - xi), "Es" + tag, "T"),
        (eps * xi, "Es" + tag, "En" + tag),
    ]
    out = defaultdict(float)
    for w, sig, noise in terms:
        if w == 0:
            continue
        for key, prob in labeled_distribution(u, [(0, sig), (1, noise)]).items():
            kept = tuple(sorted(lab for m, lab in key if m == 0))
            out[kept] += w * prob
    return dict(out)


def dichroic_distribution(eta, p, eps, tag=""):
    out = defaultdict(float)
    for w_sig, sig in ((1 - eps, "T"), (eps, "Es" + tag)):
        for w_noise, photons in ((1 - p, [sig]), (p, [sig, "En" + tag])):
            # each photon survives independently with probability eta
            for kept_mask in itertools.product((0, 1), repeat=len(photons)):
                prob = math.prod(eta if k else 1 - eta for k in kept_mask)
                kept = tuple(sorted(lab for lab, k in zip(photons, kept_mask) if k))
                out[kept] += w_sig * w_noise * prob
    return dict(out)


def hom_clicks(dist_a, dist_b):
    """(p_joint, p_d1, p_d2) for copies with label distributions dist_a, dist_b on a 50:50 splitter."""
    r = math.sqrt(0.5)
    bs = np.array([[r, r], [r, -r]])
    joint = d1 = d2 = 0.0
    for (la, pa), (lb, pb) in itertools.product(dist_a.items(), dist_b.items()):
        photons = [(0, lab) for lab in la] + [(1, lab) for lab in lb]
        for key, prob in labeled_distribution(bs, photons).items():
            n0 = sum(1 for m, _ in key if m == 0)
            n1 = len(key) - n0
            w = pa * pb * prob
            joint += w * (n0 > 0 and n1 > 0)
            d1 += w * (n0 > 0)
            d2 += w * (n1 > 0)
    return joint, d1, d2


def relabel_target(dist, new):
    return {tuple(sorted(new if lab == "T" else lab for lab in key)): p for key, p in dist.items()}
