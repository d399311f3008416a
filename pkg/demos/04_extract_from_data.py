"""
From measured visibility and g2 to the intrinsic error
======================================================

Method A normalises coincidences by a distinguishable reference run; method
B uses the intensity correlation of a single run. Each has its own correction
for multiphoton noise. Below we simulate a weak-transmission experiment,
feed the "measured" numbers back, and see how close both get to the truth.
"""

from indist.extraction import InconsistentMeasurement, Measurement, extract
from indist.hom import hom_stats, reference_stats, visibility_A, visibility_B
from indist.source import LabelAllocator, SourceParams, build_source, p_for_g2

eta, eps, g2_target = 1e-3, 0.05, 0.02
params = SourceParams(eta, p_for_g2(g2_target, eps, 1.0), eps, 1.0)
alloc = LabelAllocator()
a, b = build_source(params, alloc), build_source(params, alloc)
stats, ref = hom_stats(a, b), reference_stats(a, b)

for method, v in (("A", visibility_A(stats, ref)), ("B", visibility_B(stats))):
    result = extract(Measurement(v, method, a.g2))
    print(f"method {method}: V = {v:.6f}  eps~ = {result.eps_tilde:.6f}  eps = {result.eps_intrinsic:.6f}")
print(f"true intrinsic error {eps}")

# Numbers that no source in the model can produce are rejected.
try:
    extract(Measurement(0.99, "B", 0.05))
except InconsistentMeasurement as exc:
    print("rejected:", exc)
