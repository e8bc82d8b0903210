"""
Which parameter sets admit singular solutions
=============================================

Exact rational classification of a few parameter sets, the decay rates
that make a pure power a solution, and the explicit candidate.
"""

from choquard_singular import (candidate_gamma_range, classify_existence, classify_profile,
                               construct_candidate, derive_exponents, validate_params)

sets = {
    "subcritical dimension": (3, 2, 2, 2, 1.5, 1),
    "sigma*p above beta": (5, 2, 1.4, 1.4, 1, 1),
    "sigma*p equal to beta": (5, 2, 1, 2, 1, 3),
    "sigma*p below beta": (5, 2, 1.01, 2.3, 1, 2.5),
    "p+q on the bound": (5, 2, "3/2", "3/2", 1, 1),
}

for name, raw in sets.items():
    P = validate_params(*raw)
    verdict = classify_existence(P)
    d = derive_exponents(P)
    print(f"{name}: {verdict.exists.value}  sigma={d.sigma}  theta+={d.theta_plus}")
    if verdict.failed_conditions:
        print("   failed:", ", ".join(verdict.failed_conditions))
        continue
    try:
        lo, hi = candidate_gamma_range(P)
        print(f"   gamma range ({lo}, {hi})")
    except Exception as e:
        print("   no gamma range:", e)
    # the double-inequality candidate exists only in supercritical dimension
    if P.gap > 0:
        print("   profile class:", classify_profile(P).kind.value)
        print("   candidate:", construct_candidate(P).to_dict())
