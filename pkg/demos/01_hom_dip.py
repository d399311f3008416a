"""
Two photons on a balanced beam splitter
=======================================

Identical photons entering opposite ports always leave together. Photons
carrying different internal labels ignore each other and split at random.
"""

import math

from indist.fock import TARGET, OccupationState, PureState, error_label
from indist.interferometer import apply_unitary, beam_splitter

bs = beam_splitter(0.5)
print(bs)

# One target photon in each input port.
identical = PureState.basis(OccupationState.from_photons([(0, TARGET), (1, TARGET)]), {0, 1})
(_, out), = apply_unitary(bs, identical).members
for ket, amp in out.amplitudes.items():
    print(f"identical   {ket}  amplitude {amp.real:+.6f}")

# Give the second photon its own error label and the coincidence comes back.
tagged = PureState.basis(OccupationState.from_photons([(0, TARGET), (1, error_label(0))]), {0, 1})
(_, out), = apply_unitary(bs, tagged).members
coincidence = math.fsum(abs(a) ** 2 for k, a in out.amplitudes.items() if k.photons_in(0) == 1)
print(f"orthogonal labels: coincidence probability {coincidence:.3f}")
