"""Radial comparison problems (r^(N-1-alpha)|w'|^(m-2) w')' = C r^(N-1-theta) w^q.

The equation is integrated as a first-order system in s = log r with the flux
v = r^(N-1-alpha)|w'|^(m-2) w' as second state variable:

    dw/ds = r sign(v) (|v| r^-(N-1-alpha))^(1/(m-1))
    dv/ds = C r^(N-theta) w^q

Two-point problems on [r_in, 1] are solved by shooting inward from r = 1 on
the unknown flux v(1).
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .ansatz import LOG_CONST
from .errors import (MaxIterations, MonotonicityViolation, NoBracket,
                     PreconditionError, WindowTooShort)
from .grid import RadialGrid, log_radii

FLUX_FLOOR = 1e-30
BLOWUP_GUARD = 1e200
ODE_RTOL = 1e-11
ODE_ATOL = 1e-14


class Status(str, enum.Enum):
    OK = "OK"
    BLOWUP = "BLOWUP"
    HIT_ZERO = "HIT_ZERO"
    STEP_UNDERFLOW = "STEP_UNDERFLOW"


@dataclass(frozen=True)
class RadialEquation:
    """Right-hand side data: C |x|^-theta w^q with the operator from ``P``."""

    P: object
    theta: float = 0.0
    C_rhs: float = 1.0
    q: float | None = None

    def __post_init__(self):
        if self.q is None:
            object.__setattr__(self, "q", float(self.P.q))
        m, alpha = float(self.P.m), float(self.P.alpha)
        if self.theta < 0 or self.theta >= m + alpha:
            raise PreconditionError("need 0 <= theta < m+alpha")
        if self.C_rhs < 0:
            raise PreconditionError("C must be nonnegative")

    @property
    def fundamental_exponent(self):
        return float(self.P.gap / (self.P.m - 1))

    @property
    def strong_exponent(self):
        m, alpha = float(self.P.m), float(self.P.alpha)
        return (m + alpha - self.theta) / (self.q - m + 1)

    def strong_amplitude(self):
        """lambda with lambda r^-g an exact solution, g = strong exponent."""
        N, m, _, _, alpha, _ = self.P.floats
        g = self.strong_exponent
        A = g * (g * (m - 1) - (N - m - alpha))
        if A <= 0 or self.C_rhs <= 0:
            raise PreconditionError("no positive power solution for these data")
        return (g ** (m - 2) * A / self.C_rhs) ** (1 / (self.q - m + 1))

    def to_dict(self):
        return {"P": self.P.to_dict(), "theta": self.theta, "C_rhs": self.C_rhs, "q": self.q}


@dataclass(frozen=True)
class RadialBVP:
    equation: RadialEquation
    r_in: float
    w_in: float
    w_out: float
    r_out: float = 1.0

    def __post_init__(self):
        eq = self.equation
        # only q > m-1 is needed for the two-point problem; q > theta is the
        # extra hypothesis of the a priori bound and is not enforced here
        if not eq.q > float(eq.P.m) - 1:
            raise PreconditionError("need q > m-1")
        if not (0 < self.r_in < self.r_out <= 1):
            raise PreconditionError("need 0 < r_in < r_out <= 1")
        if not (self.w_in > 0 and self.w_out > 0):
            raise PreconditionError("boundary values must be positive")


@dataclass
class ODESolution:
    grid: RadialGrid
    flux: RadialGrid
    derivative: np.ndarray
    status: Status = Status.OK
    residual: float = 0.0
    floor_hits: int = 0
    shoot_flux: float | None = None
    dense: object = field(default=None, repr=False)

    def w(self, r):
        """Evaluate w at radii inside the solved range (dense output)."""
        return self.dense(np.log(np.asarray(r, dtype=float)))[0]

    def to_csv(self):
        return self.grid.to_csv(header=("r", "w", "v"), extra=[self.flux.values])

    def to_dict(self):
        return {"r": self.grid.radii.tolist(), "w": self.grid.values.tolist(),
                "v": self.flux.values.tolist(), "status": self.status.value,
                "residual": self.residual, "floor_hits": self.floor_hits}


def _flux_to_slope(v, r, k, m, counter=None):
    """w' from the flux; regularized near v = 0 when m > 2."""
    if m > 2 and 0 < abs(v) < FLUX_FLOOR:
        if counter is not None:
            counter[0] += 1
        return v * FLUX_FLOOR ** ((2 - m) / (m - 1)) * r ** (-k / (m - 1))
    return math.copysign((abs(v) * r ** (-k)) ** (1 / (m - 1)), v)


def integrate_radial(eq, start, w0, v0, stop, n_out=400, rtol=ODE_RTOL, atol=ODE_ATOL):
    """Integrate from radius ``start`` to ``stop`` (either direction)."""
    if w0 <= 0:
        raise PreconditionError("w0 must be positive")
    N, m, _, _, alpha, _ = eq.P.floats
    k = N - 1 - alpha
    C, q, theta = eq.C_rhs, eq.q, eq.theta
    hits = [0]

    def rhs(s, y):
        r = math.exp(s)
        w, v = y
        dw = r * _flux_to_slope(v, r, k, m, hits)
        dv = C * r ** (N - theta) * max(w, 0.0) ** q
        return [dw, dv]

    def hit_zero(s, y):
        return y[0]

    def blowup(s, y):
        return y[0] - BLOWUP_GUARD

    hit_zero.terminal = blowup.terminal = True
    s0, s1 = math.log(start), math.log(stop)
    sol = solve_ivp(rhs, (s0, s1), [w0, v0], method="DOP853", rtol=rtol, atol=atol,
                    events=[hit_zero, blowup], dense_output=True)
    if sol.status == 1:
        status = Status.HIT_ZERO if sol.t_events[0].size else Status.BLOWUP
    elif sol.status == -1:
        status = Status.STEP_UNDERFLOW
    else:
        status = Status.OK
    s_end = sol.t[-1]
    lo, hi = sorted((s0, s_end))
    s_nodes = np.linspace(lo, hi, n_out) if hi > lo else np.array([s0])
    w, v = sol.sol(s_nodes) if hi > lo else (np.array([w0]), np.array([v0]))
    radii = np.minimum(np.exp(s_nodes), 1.0)
    keep = np.isfinite(w) & (w > 0) & np.isfinite(v)
    if not keep.any():
        radii, w, v = np.array([start]), np.array([w0]), np.array([v0])
    else:
        radii, w, v = radii[keep], w[keep], v[keep]
    dw = np.array([_flux_to_slope(vi, ri, k, m) for vi, ri in zip(v, radii)])
    return ODESolution(RadialGrid(radii, w), RadialGrid(radii, v), dw, status,
                       floor_hits=hits[0], dense=sol.sol)


def _flux_of_slope(dw, r, k, m):
    return r ** k * math.copysign(abs(dw) ** (m - 1), dw)


def _initial_fluxes(bvp):
    """Flux at r_out of the fundamental-type and strong-type interpolants."""
    eq = bvp.equation
    N, m, _, _, alpha, _ = eq.P.floats
    k = N - 1 - alpha
    ro = bvp.r_out
    phi = eq.fundamental_exponent
    if phi == 0:
        Phi = lambda r: math.log(LOG_CONST / r)
        dPhi = -1 / ro
    else:
        Phi = lambda r: r ** (-phi)
        dPhi = -phi * ro ** (-phi - 1)
    b = (bvp.w_in - bvp.w_out) / (Phi(bvp.r_in) - Phi(ro))
    g = eq.strong_exponent
    return (_flux_of_slope(b * dPhi, ro, k, m),
            _flux_of_slope(-g * bvp.w_out / ro, ro, k, m))


def solve_bvp_shooting(bvp, tol=1e-9, max_iter=200, n_out=400, seed_flux=None):
    """Dirichlet problem on [r_in, r_out] by bisection/Brent on v(r_out)."""
    calls = [0]

    def mismatch(v):
        calls[0] += 1
        if calls[0] > 4 * max_iter:
            raise MaxIterations("shooting exceeded its evaluation budget")
        sol = integrate_radial(bvp.equation, bvp.r_out, bvp.w_out, v, bvp.r_in, n_out=2)
        if sol.status is Status.BLOWUP:
            return math.inf
        if sol.status is Status.HIT_ZERO:
            return -math.inf
        if sol.status is Status.STEP_UNDERFLOW:
            return math.inf
        return math.log(sol.grid.values[0] / bvp.w_in)

    phi_flux, strong_flux = _initial_fluxes(bvp)
    # search in x = asinh(v / scale): geometric in |v|, linear near 0
    scale = max(abs(strong_flux), 1e-12)
    to_v = lambda x: scale * math.sinh(x)
    G = lambda x: mismatch(to_v(x))
    if seed_flux is not None:
        x0 = math.asinh(seed_flux / scale)
        lo, hi, step = x0 - 0.05, x0 + 0.05, 0.1
    else:
        lo, hi = sorted((math.asinh(phi_flux / scale), math.asinh(strong_flux / scale)))
        lo, hi, step = lo - 0.5, hi + 0.5, 1.0
    # g is decreasing in v: a more negative outer flux gives a larger w(r_in)
    g_lo, g_hi = G(lo), G(hi)
    n = 0
    while g_lo < 0:
        hi, g_hi = lo, g_lo
        lo -= step * 2 ** n
        g_lo = G(lo)
        n += 1
        if n > 60:
            raise NoBracket("could not find a flux giving w(r_in) above target")
    n = 0
    while g_hi > 0:
        lo, g_lo = hi, g_hi
        hi += step * 2 ** n
        g_hi = G(hi)
        n += 1
        if n > 60:
            raise NoBracket("could not find a flux giving w(r_in) below target")
    # bisect until both ends are finite, then Brent
    it = 0
    while not (math.isfinite(g_lo) and math.isfinite(g_hi)):
        mid = 0.5 * (lo + hi)
        gm = G(mid)
        if gm == 0:
            lo = hi = mid
            break
        if gm > 0:
            lo, g_lo = mid, gm
        else:
            hi, g_hi = mid, gm
        it += 1
        if it > max_iter:
            raise MaxIterations("bisection did not reach a finite bracket")
    if g_lo == 0:
        v = to_v(lo)
    elif g_hi == 0 or lo == hi:
        v = to_v(hi)
    else:
        v = brentq(mismatch, to_v(lo), to_v(hi), xtol=1e-300, rtol=1e-15, maxiter=max_iter)
    sol = integrate_radial(bvp.equation, bvp.r_out, bvp.w_out, v, bvp.r_in, n_out=n_out)
    if sol.status is not Status.OK:
        raise MaxIterations(f"final shot ended with {sol.status.value}")
    residual = abs(sol.grid.values[0] - bvp.w_in) / bvp.w_in
    if residual > tol:
        raise MaxIterations(f"boundary mismatch {residual:.3g} above tolerance {tol:.3g}")
    sol.residual = residual
    sol.shoot_flux = v
    return sol


@dataclass
class MonotoneLimit:
    solution: ODESolution
    radii: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    direction: str
    k_values: list
    max_violation: float

    @property
    def grid(self):
        return RadialGrid(self.radii, self.values)

    def is_converged(self, window):
        """True when every node inside ``window`` carries the convergence flag."""
        a, b = sorted(window)
        sel = (self.radii >= a) & (self.radii <= b)
        return bool(sel.any() and self.converged[sel].all())

    def to_dict(self):
        return {"r": self.radii.tolist(), "w": self.values.tolist(),
                "converged": self.converged.tolist(), "direction": self.direction,
                "k_values": list(self.k_values), "max_violation": self.max_violation}


def monotone_limit(eq, inner_data, outer_value, r_min=1e-4, k_start=1, tol=1e-8,
                   conv_tol=0.05, n_nodes=161, bvp_tol=1e-8):
    """Solve the family on [2^-k, 1] down to r_k <= r_min and track monotonicity.

    ``inner_data`` maps r_k to the inner Dirichlet value. The iterates are
    compared on their common annulus; the family must be monotone in k in a
    single direction (nondecreasing for subsolution data, nonincreasing for
    supersolution data) up to the relative slack ``tol``, otherwise
    :class:`MonotonicityViolation` is raised. A node is flagged converged when
    the last two iterates differ by less than ``conv_tol`` relatively; the
    approach in k is geometric but slow for near-critical exponents, hence
    the loose default.
    """
    k_end = math.ceil(math.log2(1 / r_min))
    ks = list(range(k_start, k_end + 1))
    if not ks:
        raise PreconditionError("r_min must be below 2^-k_start")
    nodes = log_radii(2.0 ** -k_end, n_nodes)
    prev = None
    direction = None
    worst = 0.0
    seed = None
    sol = None
    for k in ks:
        rk = 2.0 ** -k
        bvp = RadialBVP(eq, rk, float(inner_data(rk)), float(outer_value))
        sol = solve_bvp_shooting(bvp, tol=bvp_tol, seed_flux=seed)
        seed = sol.shoot_flux
        mask = nodes >= rk * (1 - 1e-12)
        cur = np.full(nodes.shape, np.nan)
        cur[mask] = sol.w(nodes[mask])
        if prev is not None:
            common = mask & np.isfinite(prev)
            diff = (cur[common] - prev[common]) / cur[common]
            up, down = diff.max(initial=0.0), -diff.min(initial=0.0)
            if direction is None and max(up, down) > tol:
                direction = "nondecreasing" if up >= down else "nonincreasing"
            bad = down if direction == "nondecreasing" else up if direction else 0.0
            worst = max(worst, bad)
            if bad > tol:
                raise MonotonicityViolation(
                    f"k={k}: iterates move against the {direction} trend by {bad:.3g}")
            last_diff = np.full(nodes.shape, np.inf)
            last_diff[common] = np.abs(diff)
        prev = cur
    converged = (last_diff < conv_tol) if len(ks) > 1 else np.zeros(nodes.shape, bool)
    return MonotoneLimit(sol, nodes, prev, converged, direction or "constant", ks, worst)


class FitClass(str, enum.Enum):
    FUNDAMENTAL = "FUNDAMENTAL"
    STRONG = "STRONG"
    BOUNDED = "BOUNDED"
    UNDETERMINED = "UNDETERMINED"


@dataclass(frozen=True)
class AsymptoticFit:
    slope: float
    classification: FitClass
    window: tuple
    strong_exponent_ref: float
    fundamental_exponent_ref: float
    relative_error: float

    def to_dict(self):
        return {"slope": self.slope, "classification": self.classification.value,
                "window": list(self.window), "strong_exponent_ref": self.strong_exponent_ref,
                "fundamental_exponent_ref": self.fundamental_exponent_ref,
                "relative_error": self.relative_error}


def fit_asymptotic_slope(sol, window, eq, tol=0.05):
    """Least-squares slope of log w against log r and the nearest branch."""
    if isinstance(sol, ODESolution):
        grid = sol.grid
    elif isinstance(sol, MonotoneLimit):
        grid = sol.grid
    else:
        grid = sol
    a, b = sorted(window)
    if b / a < 10 * (1 - 1e-9):
        raise WindowTooShort("fit window must span at least one decade")
    r, w = grid.radii, grid.values
    sel = (r >= a * (1 - 1e-12)) & (r <= b * (1 + 1e-12)) & np.isfinite(w)
    if sel.sum() < 3 or r[sel][0] > a * 1.5 or r[sel][-1] < b / 1.5:
        raise WindowTooShort("window not covered by the solved annulus")
    x, y = np.log(r[sel]), np.log(w[sel])
    slope = float(np.polyfit(x, y, 1)[0])
    g_s = eq.strong_exponent
    phi = eq.fundamental_exponent
    err_s = abs(slope + g_s) / g_s
    if phi == 0:
        # log profile: w / log(5/r) should be flat in log r
        ratio_slope = float(np.polyfit(x, np.log(w[sel] / np.log(LOG_CONST / r[sel])), 1)[0])
        err_f = abs(ratio_slope)
        cands = [(err_s, FitClass.STRONG), (err_f, FitClass.FUNDAMENTAL)]
    else:
        err_f = abs(slope + phi) / phi
        cands = [(err_s, FitClass.STRONG), (err_f, FitClass.FUNDAMENTAL)]
    err, cls = min(cands, key=lambda c: c[0])
    if err >= tol:
        if abs(slope) < tol and (phi != 0):
            cls, err = FitClass.BOUNDED, abs(slope)
        else:
            cls = FitClass.UNDETERMINED
    return AsymptoticFit(slope, cls, (a, b), g_s, phi, float(err))
