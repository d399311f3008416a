"""Imperfect single-photon source model.

A partially distinguishable signal photon and a noise photon are mixed on a
beam splitter of reflectivity ``p`` and then attenuated to transmission
``eta``; tracing out everything but the monitored mode gives the source state.
Each photon is an orthogonal-bad-bit mixture of the target internal mode and
its own fresh error mode.

Besides the exact simulation this module holds the first-order closed forms
for the photon-number distribution, g2(0) and the effective
indistinguishability error.
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass

from .fock import (
    TARGET,
    InternalLabel,
    MixedState,
    OccupationState,
    PureState,
    error_label,
    mutual_overlap,
    number_decompose,
    partial_trace,
    photon,
    tensor_product,
    vacuum,
)
from .interferometer import apply_unitary, beam_splitter, emulator_unitary


# rounding-level excursions past [0, 1] are clamped without a warning
CLAMP_TOL = 1e-12


class Variant(str, enum.Enum):
    """How the noise photon enters the signal mode.

    ``AGNOSTIC`` treats signal and noise alike on an ordinary beam splitter;
    ``DICHROIC`` merges a fully distinguishable noise photon into the signal
    mode without interference.
    """

    AGNOSTIC = "agnostic"
    DICHROIC = "dichroic"


class EpsilonMode(str, enum.Enum):
    EXACT_CONSISTENCY = "exact_consistency"
    FIRST_ORDER = "first_order"
    XI_ONE_FIRST_ORDER = "xi_one_first_order"


class ParameterOrderWarning(UserWarning):
    """Intrinsic error exceeds the noise-photon error (eps > xi)."""


class OutOfDomainWarning(UserWarning):
    """A closed-form estimate fell outside [0, 1] and was clamped."""


@dataclass(frozen=True)
class SourceParams:
    """Source parameters.

    Attributes:
        eta: transmission efficiency in [0, 1].
        p: multiphoton error parameter in [0, 1/2].
        eps: intrinsic indistinguishability error of the signal photon.
        xi: indistinguishability error of the noise photon.
        variant: noise-injection model.
        strict: raise instead of warn when ``eps > xi``.
    """

    eta: float
    p: float
    eps: float = 0.0
    xi: float = 1.0
    variant: Variant = Variant.AGNOSTIC
    strict: bool = False

    def __post_init__(self):
        for name, hi in (("eta", 1.0), ("p", 0.5), ("eps", 1.0), ("xi", 1.0)):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and 0.0 <= value <= hi):
                raise ValueError(f"{name} must lie in [0, {hi}], got {value!r}")
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.eps > self.xi:
            msg = f"eps={self.eps} exceeds xi={self.xi}; the model assumes eps <= xi"
            if self.strict:
                raise ValueError(msg)
            warnings.warn(msg, ParameterOrderWarning, stacklevel=3)
        if self.variant is Variant.DICHROIC and self.xi != 1.0:
            warnings.warn("dichroic variant ignores xi and uses xi = 1", UserWarning, stacklevel=3)

    @property
    def noise_xi(self) -> float:
        """Noise-photon error actually used by the model (1 for the dichroic variant)."""
        return 1.0 if self.variant is Variant.DICHROIC else self.xi

    def replace(self, **changes) -> SourceParams:
        fields = dict(eta=self.eta, p=self.p, eps=self.eps, xi=self.xi, variant=self.variant, strict=self.strict)
        fields.update(changes)
        return SourceParams(**fields)


class LabelAllocator:
    """Hands out globally fresh error ids; own one per simulation run."""

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)

    def fresh(self) -> InternalLabel:
        return error_label(next(self._counter))


@dataclass(frozen=True, eq=False)
class SourceState:
    """Simulated single-mode source state with its photon-number decomposition."""

    state: MixedState
    decomposition: tuple[tuple[float, MixedState | None], ...]
    error_ids: frozenset[int]

    @classmethod
    def from_state(cls, state: MixedState, error_ids=None) -> SourceState:
        decomposition = tuple(number_decompose(state, 0))
        if error_ids is None:
            error_ids = state.error_ids
        return cls(state, decomposition, frozenset(error_ids))

    def P(self, n: int) -> float:
        return self.decomposition[n][0] if n < len(self.decomposition) else 0.0

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return self.P(0), self.P(1), self.P(2)

    def rho(self, n: int) -> MixedState | None:
        return self.decomposition[n][1] if n < len(self.decomposition) else None

    @property
    def g2(self) -> float:
        return g2_of(self.P(1), self.P(2))

    def relabel(self, mapping) -> SourceState:
        """Apply a label map to every photon; error ids are recomputed from the result."""
        state = self.state.relabel(mapping)
        ids = {mapping(error_label(i)) for i in self.error_ids}
        return SourceState.from_state(state, {lab.error_id for lab in ids if not lab.is_target})


def obb_mixed(err: float, error_id: int, mode: int = 0) -> MixedState:
    """Orthogonal-bad-bit photon: target with weight ``1-err``, error mode ``error_id`` with ``err``."""
    if not 0.0 <= err <= 1.0:
        raise ValueError(f"error must lie in [0, 1], got {err}")
    return MixedState(
        [(1.0 - err, photon(mode, TARGET)), (err, photon(mode, error_label(error_id)))],
        {mode},
    )


def _agnostic_state(params: SourceParams, signal: InternalLabel, noise: InternalLabel) -> MixedState:
    inputs = tensor_product(
        tensor_product(obb_mixed(params.eps, signal.error_id, 0), obb_mixed(params.xi, noise.error_id, 1)),
        vacuum({2}),
    )
    out = apply_unitary(emulator_unitary(params.eta, params.p), inputs)
    return partial_trace(out, {0}).merged()


def _dichroic_state(params: SourceParams, signal: InternalLabel, noise: InternalLabel) -> MixedState:
    sig = obb_mixed(params.eps, signal.error_id, 0)
    # noise photon, when present, joins the signal mode with an orthogonal label
    members = [((1.0 - params.p) * w, s) for w, s in sig.members]
    noise_ket = OccupationState.from_counts({(0, noise): 1})
    for w, s in sig.members:
        ket = next(iter(s)).merge(noise_ket)
        members.append((params.p * w, PureState.basis(ket, {0})))
    emitted = MixedState(members, {0})
    loss = beam_splitter(params.eta)
    out = apply_unitary(loss, tensor_product(emitted, vacuum({1})))
    return partial_trace(out, {0}).merged()


def build_source(params: SourceParams, allocator: LabelAllocator | None = None) -> SourceState:
    """Simulate the source exactly; signal and noise photons draw fresh error ids."""
    allocator = LabelAllocator() if allocator is None else allocator
    signal, noise = allocator.fresh(), allocator.fresh()
    if params.variant is Variant.AGNOSTIC:
        state = _agnostic_state(params, signal, noise)
    else:
        state = _dichroic_state(params, signal, noise)
    return SourceState.from_state(state, {signal.error_id, noise.error_id})


def g2_of(p1: float, p2: float) -> float:
    """g2(0) of a state truncated at two photons, ``2 P2 / (P1 + 2 P2)^2``."""
    if p1 < 0 or p2 < 0:
        raise ValueError("photon-number probabilities must be non-negative")
    mean = p1 + 2 * p2
    if mean <= 0:
        raise ValueError("g2 is undefined for zero mean photon number")
    return 2 * p2 / mean**2


def predict_g2(params: SourceParams) -> float:
    if params.variant is Variant.DICHROIC:
        return 2 * params.p / (1 + params.p) ** 2
    overlap = (1 - params.eps) * (1 - params.xi)
    return 2 * params.p * (1 + overlap)


def pn_from_g2(eta: float, g2: float, variant: Variant = Variant.AGNOSTIC) -> tuple[float, float, float]:
    """First-order photon-number distribution written in terms of measurable g2."""
    if Variant(variant) is Variant.DICHROIC:
        p0 = 1 - eta - 0.5 * eta * g2 + 0.5 * eta**2 * g2
        p1 = eta + 0.5 * eta * g2 - eta**2 * g2
        return p0, p1, 1 - p0 - p1
    return 1 - eta + 0.5 * eta**2 * g2, eta - eta**2 * g2, 0.5 * eta**2 * g2


def predict_pn(params: SourceParams) -> tuple[float, float, float]:
    return pn_from_g2(params.eta, predict_g2(params), params.variant)


def p_for_g2(g2: float, eps: float = 0.0, xi: float = 1.0, variant: Variant = Variant.AGNOSTIC) -> float:
    """Multiphoton parameter whose *simulated* source shows the requested g2.

    Inverts the exact simulated relations ``g2 = 2p(1-p)(1 + (1-eps)(1-xi))``
    (agnostic) and ``g2 = 2p / (1+p)^2`` (dichroic) on the branch p <= 1/2.
    """
    if g2 < 0:
        raise ValueError("g2 must be non-negative")
    if Variant(variant) is Variant.DICHROIC:
        if g2 == 0:
            return 0.0
        if g2 > 0.5 + 1e-15:
            raise ValueError(f"dichroic source cannot reach g2={g2} with p <= 1/2")
        b = 1 - g2
        return (b - math.sqrt(max(b * b - g2 * g2, 0.0))) / g2
    k = g2 / (2 * (1 + (1 - eps) * (1 - xi)))
    if k > 0.25:
        raise ValueError(f"agnostic source cannot reach g2={g2} for eps={eps}, xi={xi}")
    return 0.5 * (1 - math.sqrt(1 - 4 * k))


def effective_epsilon(params: SourceParams, mode: EpsilonMode | str = EpsilonMode.EXACT_CONSISTENCY) -> float:
    """Closed-form effective indistinguishability error.

    ``EXACT_CONSISTENCY`` solves the single-photon consistency condition using
    the first-order ``P1 = eta - eta^2 g2``; ``FIRST_ORDER`` is its expansion to
    first order in g2; ``XI_ONE_FIRST_ORDER`` is the xi = 1 special case
    ``eps + (1-eta)(1-eps) g2 / 2``.

    Values outside [0, 1] are clamped with an :class:`OutOfDomainWarning`.
    """
    mode = EpsilonMode(mode)
    eta, eps, xi = params.eta, params.eps, params.noise_xi
    g2 = predict_g2(params)
    denom = 1 + (1 - eps) * (1 - xi)
    if mode is EpsilonMode.EXACT_CONSISTENCY:
        p1 = eta - eta**2 * g2
        if p1 <= 0:
            raise ValueError(f"single-photon probability P1 = {p1} must be positive")
        value = eta * (eps + 0.5 * (xi - eps - eta * (xi + eps)) / denom * g2) / p1
    elif mode is EpsilonMode.FIRST_ORDER:
        value = (
            eps
            + 0.5 * (1 - eta) * (xi - eps) / denom * g2
            + eta * eps * (1 - eps) * (1 - xi) / denom * g2
        )
    else:
        value = eps + 0.5 * (1 - eta) * (1 - eps) * g2
    if not -CLAMP_TOL <= value <= 1.0 + CLAMP_TOL:
        warnings.warn(f"effective epsilon {value} outside [0, 1]; clamped", OutOfDomainWarning, stacklevel=2)
    return min(max(value, 0.0), 1.0)


def measured_epsilon_tilde(source: SourceState) -> float:
    """``1 - <1|rho_1|1>`` read off the simulated single-photon component."""
    rho1 = source.rho(1)
    if rho1 is None:
        raise ValueError("source has no single-photon component (P1 = 0)")
    target = OccupationState.from_counts({(0, TARGET): 1})
    return 1.0 - rho1.probability(lambda k: k == target)


def single_photon_overlap(a: SourceState, b: SourceState) -> float:
    """Two-copy trace overlap of the single-photon components, Tr[rho1_a rho1_b]."""
    if a.error_ids & b.error_ids:
        raise ValueError("copies must use disjoint error ids")
    ra, rb = a.rho(1), b.rho(1)
    if ra is None or rb is None:
        raise ValueError("both copies need a single-photon component")
    return mutual_overlap(ra, rb)


@dataclass(frozen=True)
class ClosedFormReport:
    P0: float
    P1: float
    P2: float
    g2: float
    eps_tilde_exact: float
    eps_tilde_first_order: float
    purity: float


def closed_form_report(params: SourceParams) -> ClosedFormReport:
    """All first-order predictions for ``params``; purity is ``(1 - eps_tilde)^2``."""
    p0, p1, p2 = predict_pn(params)
    exact = effective_epsilon(params, EpsilonMode.EXACT_CONSISTENCY)
    return ClosedFormReport(
        P0=p0,
        P1=p1,
        P2=p2,
        g2=predict_g2(params),
        eps_tilde_exact=exact,
        eps_tilde_first_order=effective_epsilon(params, EpsilonMode.FIRST_ORDER),
        purity=(1 - exact) ** 2,
    )


# Inputs of the four-term decomposition, written (signal, noise) with
# "1" a target photon and "e" a photon in its own error mode.
CHANNEL_INPUTS = ("11", "1e", "e1", "ee")


def channel_output(kind: str, eta: float, p: float) -> dict[tuple[int, int], float]:
    """Exact emulator output for one decomposition term.

    Returns the probability of each kept occupation, keyed by
    ``(target photons, error photons)``.
    """
    if kind not in CHANNEL_INPUTS:
        raise ValueError(f"kind must be one of {CHANNEL_INPUTS}, got {kind!r}")
    allocator = LabelAllocator()
    signal = TARGET if kind[0] == "1" else allocator.fresh()
    noise = TARGET if kind[1] == "1" else allocator.fresh()
    ket = OccupationState.from_counts({(0, signal): 1}).merge(OccupationState.from_counts({(1, noise): 1}))
    out = apply_unitary(emulator_unitary(eta, p), PureState.basis(ket, {0, 1, 2}))
    kept = partial_trace(out, {0})
    table: dict[tuple[int, int], list[float]] = {}
    for w, s in kept.members:
        for k, a in s.amplitudes.items():
            n_target = sum(n for _, lab, n in k.entries if lab.is_target)
            key = (n_target, k.total_photons - n_target)
            table.setdefault(key, []).append(w * abs(a) ** 2)
    return {key: math.fsum(v) for key, v in sorted(table.items())}


def channel_output_first_order(kind: str, eta: float, p: float) -> dict[tuple[int, int], float]:
    """First-order-in-p coefficients of the same table."""
    if kind == "11":
        return {(0, 0): 1 - eta + 2 * eta**2 * p, (1, 0): eta * (1 - 4 * eta * p), (2, 0): 2 * eta**2 * p}
    if kind == "1e":
        return {
            (0, 0): 1 - eta + eta**2 * p,
            (1, 0): eta * (1 - p) - eta**2 * p,
            (0, 1): eta * (1 - eta) * p,
            (1, 1): eta**2 * p,
        }
    if kind == "e1":
        return {
            (0, 0): 1 - eta + eta**2 * p,
            (1, 0): eta * (1 - eta) * p,
            (0, 1): eta * (1 - p) - eta**2 * p,
            (1, 1): eta**2 * p,
        }
    if kind == "ee":
        return {(0, 0): 1 - eta + eta**2 * p, (0, 1): eta * (1 - 2 * eta * p), (0, 2): eta**2 * p}
    raise ValueError(f"kind must be one of {CHANNEL_INPUTS}, got {kind!r}")
