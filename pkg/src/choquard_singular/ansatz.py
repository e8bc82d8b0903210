"""Power-log profiles and the weighted m-Laplacian acting on them.

The profiles are u(r) = kappa r^-gamma (log(5/r))^-tau on 0 < r <= 1. Their
image under div(|x|^-alpha |grad u|^(m-2) grad u) has a closed form quadratic
in L = log(5/r); a log-coordinate finite-difference stencil serves as an
independent check on it.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridTooCoarse, SingularGradient
from .grid import RadialGrid

LOG_CONST = 5.0


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r > 1):
        raise DomainError("radius must lie in (0, 1]")
    return r


@dataclass(frozen=True)
class PowerLogProfile:
    kappa: float
    gamma: float
    tau: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0 or not self.gamma > 0 or not self.tau >= 0:
            raise ValueError("need kappa > 0, gamma > 0, tau >= 0")

    def __call__(self, r):
        return eval_profile(self, r)

    def scaled(self, factor):
        return PowerLogProfile(self.kappa * factor, self.gamma, self.tau)

    def with_amplitude(self, kappa):
        return PowerLogProfile(kappa, self.gamma, self.tau)

    def to_dict(self):
        return {"kappa": self.kappa, "gamma": self.gamma, "tau": self.tau}


def eval_profile(u, r):
    r = _check_radius(r)
    out = u.kappa * r ** (-u.gamma)
    if u.tau:
        out = out * np.log(LOG_CONST / r) ** (-u.tau)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class OperatorClosedForm:
    A: float
    B: float
    C: float
    power_exponent: float
    log_exponent: float


def closed_form_coefficients(u, P):
    N, m, _, _, alpha, _ = P.floats
    g, t = u.gamma, u.tau
    gap = N - m - alpha
    return OperatorClosedForm(
        A=g * (g * (m - 1) - gap),
        B=t * (-2 * g * (m - 1) + gap),
        C=(m - 1) * t * (t + 1),
        power_exponent=-g * (m - 1) - m - alpha,
        log_exponent=-t * (m - 1) - m,
    )


def weighted_m_laplace_closed_form(u, P, r):
    r = _check_radius(r)
    m = float(P.m)
    c = closed_form_coefficients(u, P)
    L = np.log(LOG_CONST / r)
    slope = -u.gamma * L + u.tau
    if m < 2 and np.any(slope == 0):
        raise SingularGradient("|u'| vanishes inside (0, 1] with m < 2")
    grad_factor = np.abs(slope) ** (m - 2) if m != 2 else 1.0
    val = (u.kappa ** (m - 1) * r ** c.power_exponent * L ** c.log_exponent
           * grad_factor * (c.A * L ** 2 + c.B * L + c.C))
    return val if np.ndim(val) else float(val)


def _signed_pow(x, e):
    return np.sign(x) * np.abs(x) ** e


def radial_flux(r, du_dr, P):
    """r^(N-1-alpha) |u'|^(m-2) u'."""
    N, m, _, _, alpha, _ = P.floats
    return r ** (N - 1 - alpha) * _signed_pow(du_dr, m - 1)


def weighted_m_laplace_fd_all(grid, P, max_log_step=0.25):
    """Finite-difference operator at every interior node of ``grid``.

    Works in s = log r: the flux is evaluated at half nodes from one-sided
    differences of u, then differenced again, giving
    r^-N d/ds [r^(N-alpha) |u_r|^(m-2) u_r] with a second-order stencil.
    Returns an array aligned with ``grid.radii[1:-1]``.
    """
    if len(grid) < 3:
        raise GridTooCoarse("need at least three nodes")
    s = np.log(grid.radii)
    h = np.diff(s)
    if h.max() > max_log_step:
        raise GridTooCoarse(f"log-spacing {h.max():.3g} exceeds {max_log_step}")
    u = grid.values
    s_half = 0.5 * (s[1:] + s[:-1])
    r_half = np.exp(s_half)
    du_dr = np.diff(u) / h / r_half
    flux = radial_flux(r_half, du_dr, P)
    dflux_ds = np.diff(flux) / (0.5 * (h[1:] + h[:-1]))
    r_in = grid.radii[1:-1]
    return dflux_ds * r_in ** (-float(P.N))


def weighted_m_laplace_fd(grid, P, r, max_log_step=0.25):
    """Finite-difference operator at the interior node closest to ``r``."""
    i = int(np.argmin(np.abs(grid.radii - r)))
    if not np.isclose(grid.radii[i], r, rtol=1e-12, atol=0):
        raise GridTooCoarse(f"r={r} is not a grid node")
    if i == 0 or i == len(grid) - 1:
        raise GridTooCoarse("r must be strictly interior to the grid")
    local = RadialGrid(grid.radii[i - 1:i + 2], grid.values[i - 1:i + 2])
    return float(weighted_m_laplace_fd_all(local, P, max_log_step)[0])


def fundamental_solution(P, r):
    r = _check_radius(r)
    if P.gap == 0:
        out = np.log(LOG_CONST / r)
    else:
        out = r ** (-float(P.gap / (P.m - 1)))
    return out if out.ndim else float(out)


def fundamental_exponent(P):
    """Decay rate of the fundamental solution; 0 flags the log branch."""
    return float(P.gap / (P.m - 1))
