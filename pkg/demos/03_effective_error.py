"""
How noise photons inflate the indistinguishability error
========================================================

Loss lets an unpaired noise photon land in the single-photon sector, where it
looks like a distinguishable signal photon. The effective error read off the
single-photon state is therefore larger than the intrinsic one.
"""

from indist.source import EpsilonMode, LabelAllocator, SourceParams, build_source
from indist.source import effective_epsilon, measured_epsilon_tilde, single_photon_overlap

eps, xi, p = 0.02, 1.0, 0.01
print("eta    eps~ (sim)   consistency   first order   Tr[rho_a rho_b]")
for eta in (0.05, 0.25, 0.5, 0.75, 0.95):
    params = SourceParams(eta, p, eps, xi)
    alloc = LabelAllocator()
    a, b = build_source(params, alloc), build_source(params, alloc)
    print(
        f"{eta:.2f}   {measured_epsilon_tilde(a):.6f}     {effective_epsilon(params):.6f}"
        f"      {effective_epsilon(params, EpsilonMode.FIRST_ORDER):.6f}      {single_photon_overlap(a, b):.6f}"
    )

# Even a perfect emitter picks up an effective error from the noise alone.
print("perfect emitter, eta = 0.1:", measured_epsilon_tilde(build_source(SourceParams(0.1, p, 0.0, 1.0))))
