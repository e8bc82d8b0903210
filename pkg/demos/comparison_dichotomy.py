"""
Two possible singular behaviours
================================

Comparison problems on shrinking annuli, anchored either at the
fundamental solution or at the strong power profile. Their limits settle
on one of the two decay rates.
"""

from choquard_singular import (DEFAULT_ANCHORS, dichotomy_pipeline, derive_exponents,
                               validate_params)

P = validate_params(5, 2, 1.4, 1.4, 1, 1)
d = derive_exponents(P)
print(f"fundamental rate {float(d.phi_exponent):.4f}, strong rate {float(d.sigma):.4f}")

res = dichotomy_pipeline(P, DEFAULT_ANCHORS)
print(f"theta = {res.theta:.4f}")
for e in res.entries:
    print(f"{e.anchor.label:>20}: slope {e.fit.slope:8.4f}  -> {e.fit.classification.value:12}"
          f" converged={e.converged} ({e.direction})")
print("all classified:", res.passed)
