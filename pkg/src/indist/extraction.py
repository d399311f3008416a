"""Recover effective and intrinsic indistinguishability errors from (V_HOM, g2).

Method A visibilities come from coincidence suppression against a
distinguishable reference; method B visibilities from ``1 - 2 g_HOM``. The
correction factors here drop all O(eta) terms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

DOMAIN_TOL = 1e-9
ROOT_XTOL = 1e-13


class InconsistentMeasurement(ValueError):
    """The (visibility, g2) pair cannot be produced by the source model."""


class Method(str, enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class Measurement:
    visibility: float
    method: Method
    g2: float
    xi_assumption: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.g2 >= 0:
            raise ValueError(f"g2 must be non-negative, got {self.g2}")
        if not self.visibility <= 1:
            raise ValueError(f"visibility must not exceed 1, got {self.visibility}")
        if not 0.0 <= self.xi_assumption <= 1.0:
            raise ValueError(f"xi must lie in [0, 1], got {self.xi_assumption}")


@dataclass(frozen=True)
class ExtractionResult:
    eps_tilde: float
    eps_intrinsic: float | None
    overlap_effective: float
    diagnostics: tuple[str, ...] = field(default_factory=tuple)


def _error_from_overlap(overlap: float, what: str, flags: list[str]) -> float:
    if overlap < 0 or overlap > 1 + DOMAIN_TOL:
        raise InconsistentMeasurement(f"inconsistent measurement: {what} = {overlap!r} outside [0, 1]")
    if overlap > 1:
        flags.append(f"{what} clamped from {overlap!r} to 1")
        overlap = 1.0
    return 1.0 - math.sqrt(overlap)


def effective_overlap(m: Measurement) -> float:
    """``(1 - eps_tilde)^2`` implied by the measurement, before any domain check."""
    if m.method is Method.A:
        return m.visibility * (1 + m.g2)
    return m.visibility + m.g2


def effective_from_measurement(m: Measurement, flags: list[str] | None = None) -> float:
    flags = [] if flags is None else flags
    return _error_from_overlap(effective_overlap(m), "(1-eps_tilde)^2", flags)


def intrinsic_from_A(v_a: float, g2: float, flags: list[str] | None = None) -> float:
    """Intrinsic error for method A under fully distinguishable noise photons."""
    flags = [] if flags is None else flags
    return _error_from_overlap(v_a * (1 + 2 * g2), "(1-eps)^2", flags)


def forward_v_b(eps: float, g2: float, xi: float) -> float:
    """Method-B visibility predicted for intrinsic error ``eps`` and noise error ``xi``."""
    x = 1 - eps
    return x * x - (1 + x * x) / (1 + x * (1 - xi)) * g2


def intrinsic_from_B(v_b: float, g2: float, xi: float = 1.0, flags: list[str] | None = None) -> float:
    """Intrinsic error for method B.

    For ``xi == 1`` the closed form ``(1-eps)^2 = (V_B + g2) / (1 - g2)`` is used;
    otherwise ``x = 1 - eps`` is found by bisection on [0, 1].
    """
    flags = [] if flags is None else flags
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi must lie in [0, 1], got {xi}")
    if xi == 1.0:
        if g2 >= 1:
            raise InconsistentMeasurement(f"inconsistent measurement: g2 = {g2} >= 1")
        return _error_from_overlap((v_b + g2) / (1 - g2), "(1-eps)^2", flags)

    def f(x: float) -> float:
        return x * x - (1 + x * x) * g2 / (1 + x * (1 - xi)) - v_b

    samples = np.array([f(x) for x in np.linspace(0.0, 1.0, 16)])
    if np.any(np.diff(samples) < -1e-15):
        raise ValueError(
            f"visibility relation is not monotone on [0, 1] for g2={g2}, xi={xi}; root would be ambiguous"
        )
    lo, hi = f(0.0), f(1.0)
    if hi < 0:
        if hi >= -DOMAIN_TOL:
            flags.append(f"root clamped to eps = 0 (f(1) = {hi!r})")
            return 0.0
        raise InconsistentMeasurement(f"inconsistent measurement: no eps in [0, 1] reproduces V_B={v_b}, g2={g2}")
    if lo > 0:
        raise InconsistentMeasurement(f"inconsistent measurement: no eps in [0, 1] reproduces V_B={v_b}, g2={g2}")
    if hi == 0:
        return 0.0
    if lo == 0:
        return 1.0
    x = bisect(f, 0.0, 1.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
    return 1.0 - x


def extract(m: Measurement) -> ExtractionResult:
    """Effective error from the measurement-dependent correction, intrinsic error where defined.

    Method A only has an intrinsic-error formula for ``xi = 1``; other ``xi``
    values leave ``eps_intrinsic`` as ``None`` and add a diagnostic.
    """
    flags: list[str] = []
    eps_tilde = effective_from_measurement(m, flags)
    if m.method is Method.A:
        if m.xi_assumption == 1.0:
            eps = intrinsic_from_A(m.visibility, m.g2, flags)
        else:
            eps = None
            flags.append(f"intrinsic eps for method A is only defined for xi = 1 (got {m.xi_assumption})")
    else:
        eps = intrinsic_from_B(m.visibility, m.g2, m.xi_assumption, flags)
    return ExtractionResult(
        eps_tilde=eps_tilde,
        eps_intrinsic=eps,
        overlap_effective=(1 - eps_tilde) ** 2,
        diagnostics=tuple(flags),
    )
