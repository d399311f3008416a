"""Hong-Ou-Mandel experiment with two independent copies of a source.

The copies enter the two ports of a balanced beam splitter and are detected by
ideal, label-blind threshold detectors. Detector efficiency is folded into the
source transmission ``eta``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .fock import TARGET, InternalLabel, tensor_product
from .interferometer import apply_unitary, beam_splitter
from .source import SourceState


@dataclass(frozen=True)
class HOMStats:
    """Click probabilities of one HOM run: joint ``P(D1 & D2)`` and marginals ``P(Di)``."""

    p_joint: float
    p_d1: float
    p_d2: float

    def __post_init__(self):
        tol = 1e-12
        for name in ("p_joint", "p_d1", "p_d2"):
            value = getattr(self, name)
            if not -tol <= value <= 1 + tol:
                raise ValueError(f"{name}={value} is not a probability")
        if self.p_joint > min(self.p_d1, self.p_d2) + tol:
            raise ValueError("joint click probability exceeds a marginal")


@dataclass(frozen=True)
class HOMPrediction:
    g_hom: float
    v_a: float
    v_b: float
    p_joint: float
    p_d: float

    def as_dict(self) -> dict:
        return asdict(self)


def _click_stats(a: SourceState, b: SourceState) -> HOMStats:
    if a.error_ids & b.error_ids:
        raise ValueError(
            f"copies share error ids {sorted(a.error_ids & b.error_ids)}; allocate them from one LabelAllocator"
        )
    joint = tensor_product(a.state, b.state.remap_modes({0: 1}))
    out = apply_unitary(beam_splitter(0.5), joint)
    return HOMStats(
        p_joint=out.probability(lambda k: k.photons_in(0) > 0 and k.photons_in(1) > 0),
        p_d1=out.probability(lambda k: k.photons_in(0) > 0),
        p_d2=out.probability(lambda k: k.photons_in(1) > 0),
    )


def hom_stats(a: SourceState, b: SourceState) -> HOMStats:
    """Exact click statistics for copy ``a`` in port 0 and copy ``b`` in port 1."""
    return _click_stats(a, b)


def reference_stats(a: SourceState, b: SourceState, fresh_id: int | None = None) -> HOMStats:
    """Click statistics with copy ``b`` made fully distinguishable from ``a``.

    All of ``b``'s target photons move to one fresh error mode, so they still
    bunch among themselves but never interfere with ``a``.
    """
    if fresh_id is None:
        fresh_id = max(a.error_ids | b.error_ids, default=-1) + 1
    if fresh_id in a.error_ids | b.error_ids:
        raise ValueError(f"error id {fresh_id} is already in use")
    orthogonal = InternalLabel(fresh_id)
    b_ref = b.relabel(lambda lab: orthogonal if lab == TARGET else lab)
    return _click_stats(a, b_ref)


def g_hom(stats: HOMStats) -> float:
    """Normalized cross-correlation ``P(D1 & D2) / (P(D1) P(D2))``."""
    denom = stats.p_d1 * stats.p_d2
    if denom <= 0:
        raise ValueError("g_HOM undefined: a detector never clicks")
    return stats.p_joint / denom


def visibility_A(stats: HOMStats, ref: HOMStats) -> float:
    """Coincidence-suppression visibility against a distinguishable reference run."""
    if ref.p_joint <= 0:
        raise ValueError("reference run has no coincidences")
    return 1.0 - stats.p_joint / ref.p_joint


def visibility_B(stats: HOMStats) -> float:
    return 1.0 - 2.0 * g_hom(stats)


def predict_hom(eps_tilde: float, g2: float, eta: float) -> HOMPrediction:
    """Leading-order HOM observables in terms of the effective error, g2 and eta.

    ``p_joint`` and ``p_d`` are the click probabilities to order eta^2;
    visibilities drop their O(eta) terms except ``v_b``, which keeps
    ``-eta (1 - (1-eps_tilde)^4) / 2``.
    """
    for name, value in (("eps_tilde", eps_tilde), ("g2", g2), ("eta", eta)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    overlap = (1 - eps_tilde) ** 2
    loss_term = 0.5 * eta * (1 - overlap**2)
    return HOMPrediction(
        g_hom=0.5 * (1 - overlap + g2 + loss_term),
        v_a=overlap / (1 + g2),
        v_b=overlap - g2 - loss_term,
        p_joint=0.5 * eta**2 * (1 - overlap + g2),
        p_d=eta - 0.25 * eta**2 * (1 + overlap + g2),
    )
