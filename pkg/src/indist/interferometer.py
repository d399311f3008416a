"""Linear-optical unitaries and exact Fock-state propagation.

Unitaries act on creation operators row-wise, ``a_i^dag -> sum_j U[i, j] a_j^dag``.
With this convention, sending a state through ``U1`` and then ``U2`` is the
same as a single pass through the matrix product ``U1 @ U2``
(see :meth:`UnitaryMatrix.then`). Internal labels are spectators.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import defaultdict
from typing import Sequence

import numpy as np

from .fock import MixedState, OccupationState, PureState, _csum, as_mixed

UNITARITY_TOL = 1e-12


class UnitaryMatrix:
    """Square matrix checked for unitarity on construction."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, tol: float = UNITARITY_TOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
        residual = unitarity_residual(m)
        if residual > tol:
            raise ValueError(f"matrix is not unitary: max|UU^dag - I| = {residual:.3e}")
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def dagger(self) -> UnitaryMatrix:
        return UnitaryMatrix(self._matrix.conj().T)

    def then(self, other: UnitaryMatrix) -> UnitaryMatrix:
        """The cascade: this interferometer followed by ``other``."""
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")
        return UnitaryMatrix(self._matrix @ other._matrix)

    def __repr__(self) -> str:
        return f"UnitaryMatrix({np.array2string(self._matrix, precision=6)})"


def unitarity_residual(matrix) -> float:
    m = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))


def _check_unit_interval(name: str, value: float, upper: float = 1.0) -> None:
    if not 0.0 <= value <= upper:
        raise ValueError(f"{name} must lie in [0, {upper}], got {value}")


def beam_splitter(reflectivity: float) -> UnitaryMatrix:
    """Real two-port beam splitter ``[[sqrt R, sqrt(1-R)], [sqrt(1-R), -sqrt R]]``."""
    _check_unit_interval("reflectivity", reflectivity)
    r, t = math.sqrt(reflectivity), math.sqrt(1.0 - reflectivity)
    return UnitaryMatrix([[r, t], [t, -r]])


def emulator_unitary(eta: float, p: float) -> UnitaryMatrix:
    """Three-mode signal/noise/loss emulator.

    Mode 0 carries the signal photon and is the monitored output, mode 1 the
    noise photon and mode 2 the vacuum ancilla that absorbs loss. ``p`` is the
    signal-noise reflectivity and ``eta`` the transmission efficiency.
    """
    _check_unit_interval("eta", eta)
    _check_unit_interval("p", p, 0.5)
    s = math.sqrt
    return UnitaryMatrix(
        [
            [s(eta * (1 - p)), s(p), s((1 - eta) * (1 - p))],
            [s(eta * p), -s(1 - p), s((1 - eta) * p)],
            [s(1 - eta), 0.0, -s(eta)],
        ]
    )


def embed(unitary: UnitaryMatrix, modes: Sequence[int], dim: int) -> UnitaryMatrix:
    """Act with ``unitary`` on ``modes`` of a ``dim``-mode circuit, identity elsewhere."""
    if len(modes) != unitary.dim or len(set(modes)) != len(modes):
        raise ValueError(f"need {unitary.dim} distinct modes, got {modes}")
    full = np.eye(dim, dtype=complex)
    idx = np.asarray(modes)
    full[np.ix_(idx, idx)] = unitary.matrix
    return UnitaryMatrix(full)


def _ordered_product(factors: list[complex]) -> complex:
    # sorting makes the rounded product independent of photon order
    out = 1 + 0j
    for f in sorted(factors, key=lambda z: (z.real, z.imag)):
        out *= f
    return out


@functools.lru_cache(maxsize=65536)
def _propagate_ket(rows: tuple[tuple[complex, ...], ...], ket: OccupationState) -> tuple[tuple[OccupationState, complex], ...]:
    photons = ket.photons()
    choices = [[(j, u) for j, u in enumerate(rows[mode]) if u != 0] for mode, _ in photons]
    terms: dict[OccupationState, list[complex]] = defaultdict(list)
    for assignment in itertools.product(*choices):
        out = OccupationState.from_photons(
            (j, label) for (j, _), (_, label) in zip(assignment, photons)
        )
        terms[out].append(_ordered_product([u for _, u in assignment]))

    in_norm = math.prod(math.factorial(n) for _, _, n in ket.entries)
    result = []
    for out, ts in terms.items():
        out_norm = math.prod(math.factorial(n) for _, _, n in out.entries)
        result.append((out, _csum(ts) * math.sqrt(out_norm / in_norm)))
    return tuple(result)


def _apply_pure(rows: tuple[tuple[complex, ...], ...], state: PureState) -> PureState:
    terms: dict[OccupationState, list[complex]] = defaultdict(list)
    for ket, amp in state.amplitudes.items():
        for out, a in _propagate_ket(rows, ket):
            terms[out].append(amp * a)
    amps = {k: _csum(ts) for k, ts in terms.items()}
    return PureState(amps, state.modes)


def apply_unitary(unitary: UnitaryMatrix, state: PureState | MixedState) -> MixedState:
    """Propagate every ensemble member through the interferometer.

    Each ket is rewritten as its normalized creation-operator monomial with
    ``a_i^dag -> sum_j U[i, j] a_j^dag`` substituted, then expanded with the
    bosonic ``sqrt(m!)`` factors of the output occupations.
    """
    state = as_mixed(state)
    if state.modes != frozenset(range(unitary.dim)):
        raise ValueError(
            f"{unitary.dim}-mode unitary cannot act on a state over modes {sorted(state.modes)}"
        )
    rows = tuple(tuple(complex(u) for u in row) for row in unitary.matrix)
    return MixedState([(w, _apply_pure(rows, s)) for w, s in state.members], state.modes)
