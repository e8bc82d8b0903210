"""Shared parameter generators and presets for the test suite."""

import math

import numpy as np

from choquard_singular.ansatz import LOG_CONST, PowerLogProfile
from choquard_singular.exponents import validate_params

CASE1 = (5, 2, 1.4, 1.4, 1, 1)
CRITICAL = (5, 2, 1, 2, 1, 3)
CASE2 = (5, 2, 1.01, 2.3, 1, 2.5)
SUBDIM = (3, 2, 2, 2, 1.5, 1)


def random_operator_cases(n, seed=0, r_min=1e-4):
    """(P, profile) pairs with m in [1.5, 4] whose operator keeps one sign.

    The gradient factor -gamma L + tau must not vanish on (0, 1] (tau below
    gamma log 5) and the quadratic A L^2 + B L + C must stay away from zero,
    otherwise a relative comparison is meaningless.
    """
    rng = np.random.default_rng(seed)
    out = []
    L = np.log(LOG_CONST / np.geomspace(r_min, 1, 200))
    while len(out) < n:
        N = int(rng.integers(2, 8))
        m = float(rng.uniform(1.5, 4))
        alpha = float(rng.uniform(0.1, 2))
        gap = N - m - alpha
        gamma = float(rng.uniform(0.2, 4))
        phi = gap / (m - 1)
        if abs(gamma - phi) < 0.3:
            continue
        tau = float(rng.uniform(0, min(1.5, 0.8 * gamma * math.log(LOG_CONST))))
        A = gamma * (gamma * (m - 1) - gap)
        B = tau * (-2 * gamma * (m - 1) + gap)
        C = (m - 1) * tau * (tau + 1)
        quad = A * L ** 2 + B * L + C
        if np.any(np.abs(quad) < 0.1 * (abs(A) * L ** 2 + abs(B) * L + C)):
            continue
        P = validate_params(N, m, m, m, alpha, 0.5)
        out.append((P, PowerLogProfile(1.0, gamma, tau)))
    return out
