"""
Both sides of the inequality on a log grid
==========================================

The weighted m-Laplacian of a power profile in closed form, checked
against finite differences, next to the Riesz potential of u^p.
"""

import numpy as np

from choquard_singular import (PowerLogProfile, RadialGrid, riesz_convolve_radial,
                               validate_params, weighted_m_laplace_closed_form,
                               weighted_m_laplace_fd_all)

P = validate_params(5, 2, 1.4, 1.4, 1, 1)
u = PowerLogProfile(1.0, 2.1)

# closed form against a 10^4 node stencil
grid = RadialGrid.sample(u, 1e-4, 10_000)
fd = weighted_m_laplace_fd_all(grid, P)
cf = weighted_m_laplace_closed_form(u, P, grid.radii[1:-1])
print("max relative FD error:", np.max(np.abs(fd / cf - 1)))

# right-hand side (I_beta * u^p) u^q on a coarse grid
radii = np.geomspace(1e-4, 1, 9)
conv = riesz_convolve_radial(u, P, power=1.4, radii=radii)
lhs = weighted_m_laplace_closed_form(u, P, radii)
rhs = conv.grid.values * u(radii) ** 1.4
print(f"{'r':>10} {'LHS':>12} {'RHS':>12} {'LHS/RHS':>10}")
for r, a, b in zip(radii, lhs, rhs):
    print(f"{r:10.1e} {a:12.4e} {b:12.4e} {a / b:10.4f}")
# the ratio grows toward the origin, so kappa*u works once kappa is small
print("kappa bound:", np.min(lhs / rhs) ** (1 / 1.8))
