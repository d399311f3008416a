"""
Where the noise photon comes from hardly matters
================================================

The beam-splitter emulator lets noise and signal interfere before loss. A
dichroic injection instead drops a distinguishable noise photon straight into
the signal mode. At matched g2 the two reduced states differ by a trace
distance that scales like eta * g2.
"""

from indist.fock import trace_distance
from indist.source import SourceParams, Variant, build_source, p_for_g2

g2, eps = 0.01, 0.02
print("eta     delta        delta / (eta g2)")
for eta in (0.4, 0.2, 0.1, 0.05):
    agnostic = build_source(SourceParams(eta, p_for_g2(g2, eps, 1.0), eps, 1.0))
    dichroic = build_source(SourceParams(eta, p_for_g2(g2, variant=Variant.DICHROIC), eps, 1.0, Variant.DICHROIC))
    delta = trace_distance(agnostic.state, dichroic.state)
    print(f"{eta:.2f}    {delta:.3e}    {delta / (eta * g2):.3f}")
