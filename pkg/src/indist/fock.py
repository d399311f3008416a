"""Few-photon Fock states with internal (distinguishability) labels.

Every photon lives in an integer *external* mode (the one interferometers act
on) and carries an :class:`InternalLabel`. Photons sharing a label occupy the
same internal mode and interfere; different labels are exactly orthogonal.

States are immutable values. A :class:`PureState` is a sparse amplitude map
over :class:`OccupationState` kets, and a :class:`MixedState` is a weighted
ensemble of pure states (not necessarily orthogonal).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

PRUNE_THRESHOLD = 1e-15
NORM_TOL = 1e-12


@dataclass(frozen=True)
class InternalLabel:
    """Internal mode of a photon: the target mode or one of the error modes."""

    error_id: int | None = None

    def __post_init__(self):
        if self.error_id is not None and self.error_id < 0:
            raise ValueError(f"error id must be non-negative, got {self.error_id}")

    @property
    def is_target(self) -> bool:
        return self.error_id is None

    @property
    def sort_key(self) -> int:
        return -1 if self.error_id is None else self.error_id

    def __repr__(self) -> str:
        return "T" if self.error_id is None else f"E{self.error_id}"


TARGET = InternalLabel()


def error_label(error_id: int) -> InternalLabel:
    return InternalLabel(error_id)


def _slot_key(slot: tuple[int, InternalLabel]) -> tuple[int, int]:
    return slot[0], slot[1].sort_key


@dataclass(frozen=True)
class OccupationState:
    """A Fock basis ket: photon counts keyed by (external mode, internal label).

    Stored as a sorted tuple of ``(mode, label, count)`` with no zero counts, so
    equality and hashing follow the occupation map.
    """

    entries: tuple[tuple[int, InternalLabel, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[tuple[int, InternalLabel], int]) -> OccupationState:
        items = []
        for (mode, label), n in counts.items():
            if n < 0:
                raise ValueError(f"negative photon count {n} at {(mode, label)}")
            if n:
                items.append((int(mode), label, int(n)))
        items.sort(key=lambda e: (e[0], e[1].sort_key))
        return cls(tuple(items))

    @classmethod
    def from_photons(cls, photons: Iterable[tuple[int, InternalLabel]]) -> OccupationState:
        counts: dict[tuple[int, InternalLabel], int] = defaultdict(int)
        for slot in photons:
            counts[slot] += 1
        return cls.from_counts(counts)

    @property
    def total_photons(self) -> int:
        return sum(n for _, _, n in self.entries)

    @property
    def modes(self) -> frozenset[int]:
        """External modes holding at least one photon."""
        return frozenset(m for m, _, _ in self.entries)

    @property
    def labels(self) -> frozenset[InternalLabel]:
        return frozenset(lab for _, lab, _ in self.entries)

    def counts(self) -> dict[tuple[int, InternalLabel], int]:
        return {(m, lab): n for m, lab, n in self.entries}

    def photons(self) -> list[tuple[int, InternalLabel]]:
        """One ``(mode, label)`` slot per photon, repeated by multiplicity."""
        return [(m, lab) for m, lab, n in self.entries for _ in range(n)]

    def photons_in(self, mode: int) -> int:
        return sum(n for m, _, n in self.entries if m == mode)

    def count(self, mode: int, label: InternalLabel) -> int:
        for m, lab, n in self.entries:
            if m == mode and lab == label:
                return n
        return 0

    def restrict(self, modes: Iterable[int]) -> OccupationState:
        keep = set(modes)
        return OccupationState(tuple(e for e in self.entries if e[0] in keep))

    def relabel(self, mapping: Callable[[InternalLabel], InternalLabel]) -> OccupationState:
        counts: dict[tuple[int, InternalLabel], int] = defaultdict(int)
        for m, lab, n in self.entries:
            counts[(m, mapping(lab))] += n
        return OccupationState.from_counts(counts)

    def remap_modes(self, mapping: Mapping[int, int]) -> OccupationState:
        counts: dict[tuple[int, InternalLabel], int] = defaultdict(int)
        for m, lab, n in self.entries:
            counts[(mapping.get(m, m), lab)] += n
        return OccupationState.from_counts(counts)

    def merge(self, other: OccupationState) -> OccupationState:
        counts: dict[tuple[int, InternalLabel], int] = defaultdict(int)
        for m, lab, n in self.entries + other.entries:
            counts[(m, lab)] += n
        return OccupationState.from_counts(counts)

    def __repr__(self) -> str:
        if not self.entries:
            return "|vac>"
        body = ", ".join(f"{m}:{lab}" + (f"^{n}" if n > 1 else "") for m, lab, n in self.entries)
        return f"|{body}>"


VACUUM = OccupationState()


def _csum(terms: Iterable[complex]) -> complex:
    # order-independent complex sum (exactly rounded per component)
    terms = list(terms)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def _prune(amps: Mapping[OccupationState, complex]) -> dict[OccupationState, complex]:
    return {k: complex(v) for k, v in amps.items() if abs(v) >= PRUNE_THRESHOLD}


class PureState:
    """Normalized state vector over occupation kets on a fixed set of external modes."""

    __slots__ = ("_amps", "_modes")

    def __init__(self, amplitudes: Mapping[OccupationState, complex], modes: Iterable[int]):
        amps = _prune(amplitudes)
        modes = frozenset(int(m) for m in modes)
        for ket in amps:
            if not ket.modes <= modes:
                raise ValueError(f"{ket} occupies modes outside {sorted(modes)}")
        norm = math.fsum(abs(a) ** 2 for a in amps.values())
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm!r}")
        self._amps = MappingProxyType(amps)
        self._modes = modes

    @classmethod
    def basis(cls, ket: OccupationState, modes: Iterable[int] | None = None) -> PureState:
        return cls({ket: 1.0}, ket.modes if modes is None else modes)

    @classmethod
    def normalized(cls, amplitudes: Mapping[OccupationState, complex], modes: Iterable[int]) -> PureState:
        norm = math.sqrt(math.fsum(abs(a) ** 2 for a in amplitudes.values()))
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls({k: v / norm for k, v in amplitudes.items()}, modes)

    @property
    def amplitudes(self) -> Mapping[OccupationState, complex]:
        return self._amps

    @property
    def modes(self) -> frozenset[int]:
        return self._modes

    @property
    def labels(self) -> frozenset[InternalLabel]:
        return frozenset().union(*(k.labels for k in self._amps)) if self._amps else frozenset()

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self) -> Iterator[OccupationState]:
        return iter(self._amps)

    def amplitude(self, ket: OccupationState) -> complex:
        return self._amps.get(ket, 0j)

    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self._amps.values())

    def relabel(self, mapping: Callable[[InternalLabel], InternalLabel]) -> PureState:
        terms: dict[OccupationState, list[complex]] = defaultdict(list)
        for k, a in self._amps.items():
            terms[k.relabel(mapping)].append(a)
        return PureState({k: _csum(v) for k, v in terms.items()}, self._modes)

    def remap_modes(self, mapping: Mapping[int, int]) -> PureState:
        return PureState(
            {k.remap_modes(mapping): a for k, a in self._amps.items()},
            {mapping.get(m, m) for m in self._modes},
        )

    def allclose(self, other: PureState, atol: float = 1e-12) -> bool:
        if self._modes != other._modes:
            return False
        keys = set(self._amps) | set(other._amps)
        return all(abs(self.amplitude(k) - other.amplitude(k)) <= atol for k in keys)

    def __repr__(self) -> str:
        terms = " + ".join(f"({a:.6g}){k!r}" for k, a in self._amps.items())
        return f"PureState({terms}; modes={sorted(self._modes)})"


class MixedState:
    """Density operator in ensemble form, ``rho = sum_k w_k |phi_k><phi_k|``."""

    __slots__ = ("_members", "_modes")

    def __init__(self, members: Iterable[tuple[float, PureState]], modes: Iterable[int] | None = None):
        members = tuple((float(w), s) for w, s in members if w > 0)
        if not members:
            raise ValueError("ensemble has no members with positive weight")
        if modes is None:
            modes = members[0][1].modes
        modes = frozenset(int(m) for m in modes)
        for w, s in members:
            if s.modes != modes:
                raise ValueError(f"member modes {sorted(s.modes)} differ from {sorted(modes)}")
            if w > 1 + NORM_TOL:
                raise ValueError(f"member weight {w} exceeds 1")
        total = math.fsum(w for w, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"ensemble weights sum to {total!r}, not 1")
        self._members = members
        self._modes = modes

    @classmethod
    def pure(cls, state: PureState) -> MixedState:
        return cls([(1.0, state)])

    @property
    def members(self) -> tuple[tuple[float, PureState], ...]:
        return self._members

    @property
    def modes(self) -> frozenset[int]:
        return self._modes

    @property
    def labels(self) -> frozenset[InternalLabel]:
        return frozenset().union(*(s.labels for _, s in self._members))

    @property
    def error_ids(self) -> frozenset[int]:
        return frozenset(lab.error_id for lab in self.labels if not lab.is_target)

    def __len__(self) -> int:
        return len(self._members)

    def probability(self, predicate: Callable[[OccupationState], bool]) -> float:
        """Total weight of kets satisfying ``predicate`` (a number-diagonal observable)."""
        return math.fsum(
            w * abs(a) ** 2 for w, s in self._members for k, a in s.amplitudes.items() if predicate(k)
        )

    def relabel(self, mapping: Callable[[InternalLabel], InternalLabel]) -> MixedState:
        return MixedState([(w, s.relabel(mapping)) for w, s in self._members], self._modes)

    def remap_modes(self, mapping: Mapping[int, int]) -> MixedState:
        return MixedState(
            [(w, s.remap_modes(mapping)) for w, s in self._members],
            {mapping.get(m, m) for m in self._modes},
        )

    def merged(self) -> MixedState:
        """Combine members that are the same single ket (up to a global phase)."""
        singles: dict[OccupationState, list[float]] = defaultdict(list)
        rest = []
        for w, s in self._members:
            if len(s) == 1:
                singles[next(iter(s))].append(w)
            else:
                rest.append((w, s))
        members = [(math.fsum(ws), PureState.basis(k, self._modes)) for k, ws in singles.items()]
        return MixedState(members + rest, self._modes)

    def basis(self) -> list[OccupationState]:
        kets = {k for _, s in self._members for k in s}
        return sorted(kets, key=lambda k: [(m, lab.sort_key, n) for m, lab, n in k.entries])

    def density_matrix(self, basis: list[OccupationState] | None = None) -> np.ndarray:
        basis = self.basis() if basis is None else basis
        index = {k: i for i, k in enumerate(basis)}
        rho = np.zeros((len(basis), len(basis)), dtype=complex)
        for w, s in self._members:
            vec = np.zeros(len(basis), dtype=complex)
            for k, a in s.amplitudes.items():
                vec[index[k]] = a
            rho += w * np.outer(vec, vec.conj())
        return rho

    def __repr__(self) -> str:
        body = ", ".join(f"{w:.6g}: {s!r}" for w, s in self._members)
        return f"MixedState([{body}])"


def photon(mode: int = 0, label: InternalLabel = TARGET, modes: Iterable[int] | None = None) -> PureState:
    """Single photon in ``mode`` with the given internal label."""
    ket = OccupationState.from_counts({(mode, label): 1})
    return PureState.basis(ket, {mode} if modes is None else modes)


def vacuum(modes: Iterable[int]) -> PureState:
    return PureState({VACUUM: 1.0}, modes)


def as_mixed(state: PureState | MixedState) -> MixedState:
    return MixedState.pure(state) if isinstance(state, PureState) else state


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, summed over shared kets."""
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    terms = [
        a.amplitude(k).conjugate() * b.amplitude(k)
        for k in small
        if k in large.amplitudes
    ]
    return _csum(terms)


def tensor_pure(a: PureState, b: PureState) -> PureState:
    if a.modes & b.modes:
        raise ValueError(f"tensor factors share external modes {sorted(a.modes & b.modes)}")
    amps = {ka.merge(kb): aa * ab for ka, aa in a.amplitudes.items() for kb, ab in b.amplitudes.items()}
    return PureState(amps, a.modes | b.modes)


def tensor_product(a: PureState | MixedState, b: PureState | MixedState) -> MixedState:
    """Product ensemble on the disjoint union of the two mode sets."""
    a, b = as_mixed(a), as_mixed(b)
    if a.modes & b.modes:
        raise ValueError(f"tensor factors share external modes {sorted(a.modes & b.modes)}")
    return MixedState(
        [(wa * wb, tensor_pure(sa, sb)) for wa, sa in a.members for wb, sb in b.members],
        a.modes | b.modes,
    )


def partial_trace(state: PureState | MixedState, keep: Iterable[int]) -> MixedState:
    """Trace out every external mode not in ``keep``.

    The traced Fock basis is orthonormal, so each member splits exactly into one
    new member per traced occupation pattern.
    """
    state = as_mixed(state)
    keep = frozenset(keep)
    if not keep:
        raise ValueError("keep must name at least one external mode")
    if not keep <= state.modes:
        raise ValueError(f"cannot keep modes {sorted(keep - state.modes)} absent from the state")
    traced = state.modes - keep
    members = []
    for w, s in state.members:
        groups: dict[OccupationState, dict[OccupationState, complex]] = defaultdict(dict)
        for k, a in s.amplitudes.items():
            groups[k.restrict(traced)][k.restrict(keep)] = a
        for amps in groups.values():
            norm2 = math.fsum(abs(a) ** 2 for a in amps.values())
            members.append((w * norm2, PureState.normalized(amps, keep)))
    return MixedState(members, keep)


def mutual_overlap(a: PureState | MixedState, b: PureState | MixedState) -> float:
    """Tr[rho_a rho_b]."""
    a, b = as_mixed(a), as_mixed(b)
    return math.fsum(
        wa * wb * abs(inner_product(sa, sb)) ** 2 for wa, sa in a.members for wb, sb in b.members
    )


def trace_purity(state: PureState | MixedState) -> float:
    """Tr[rho^2]."""
    return mutual_overlap(state, state)


def number_decompose(state: PureState | MixedState, mode: int) -> list[tuple[float, MixedState | None]]:
    """Split a single-mode state into photon-number sectors ``[(P_n, rho_n), ...]``.

    Coherences between sectors are dropped. Sectors with zero probability carry
    ``None`` in place of a state; the list runs from n = 0 to the largest
    occupied photon number.
    """
    state = as_mixed(state)
    if state.modes != {mode}:
        raise ValueError(f"state occupies modes {sorted(state.modes)}, expected only {mode}")
    sectors: dict[int, list[tuple[float, PureState]]] = defaultdict(list)
    for w, s in state.members:
        by_n: dict[int, dict[OccupationState, complex]] = defaultdict(dict)
        for k, a in s.amplitudes.items():
            by_n[k.total_photons][k] = a
        for n, amps in by_n.items():
            norm2 = math.fsum(abs(a) ** 2 for a in amps.values())
            sectors[n].append((w * norm2, PureState.normalized(amps, {mode})))
    out: list[tuple[float, MixedState | None]] = []
    for n in range(max(sectors) + 1):
        parts = sectors.get(n, [])
        p_n = math.fsum(w for w, _ in parts)
        if p_n > 0:
            out.append((p_n, MixedState([(w / p_n, s) for w, s in parts], {mode})))
        else:
            out.append((0.0, None))
    return out


def trace_distance(a: PureState | MixedState, b: PureState | MixedState) -> float:
    """Half the trace norm of ``rho_a - rho_b``, via explicit density matrices."""
    a, b = as_mixed(a), as_mixed(b)
    if a.modes != b.modes:
        raise ValueError("states live on different external modes")
    basis = sorted(set(a.basis()) | set(b.basis()), key=lambda k: [(m, lab.sort_key, n) for m, lab, n in k.entries])
    diff = a.density_matrix(basis) - b.density_matrix(basis)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())
