"""Radial Riesz potentials on the unit ball and the two-sided envelope checks.

For radial f the convolution reduces to a one-dimensional integral

    (I_beta * f)(r) = A_beta int_0^1 f(s) s^(N-1) K_e(r, s) ds,

where K_e(r, s) is the integral of |r zeta - s eta|^-e over eta on the unit
sphere, e = N - beta. K_e is computed with the half-angle substitution
t = sin(theta/2), which turns the angular integral into

    2^(N-1) |S^(N-2)| int_0^1 ((r-s)^2 + 4 r s t^2)^(-e/2) t^(N-2) (1-t^2)^((N-3)/2) dt.

Near the diagonal s = r the integrand concentrates at t ~ |r-s|/(2 sqrt(rs));
the outer integral is split at s = r, where K_e has an integrable
singularity.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from .ansatz import LOG_CONST, PowerLogProfile
from .errors import (CriticalThetaOneWarning, NotIntegrable, NumericalError,
                     ToleranceNotMet)
from .grid import RadialGrid

INNER_TOL = 1e-9
OUTER_TOL = 1e-7
_QUAD_LIMIT = 200


def sphere_area(N):
    """Surface measure of the unit sphere S^(N-1) in R^N."""
    return 2 * math.pi ** (N / 2) / math.gamma(N / 2)


def riesz_constant(N, beta):
    return gamma_fn((N - beta) / 2) / (gamma_fn(beta / 2) * math.pi ** (N / 2) * 2 ** beta)


@dataclass(frozen=True)
class KernelSpec:
    N: int
    exponent: float

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("the radial reduction needs N >= 2")
        if not 0 < self.exponent < self.N:
            raise ValueError("kernel exponent must lie in (0, N)")


def _quad(f, a, b, epsabs, epsrel, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel,
                                        limit=_QUAD_LIMIT, full_output=1, **kw)[:3]
    return val, err


def angular_kernel(spec, r, s, tol=INNER_TOL, return_error=False):
    """Integral of |r zeta - s eta|^-e over the unit sphere (zeta fixed)."""
    N, e = spec.N, float(spec.exponent)
    if r < 0 or s < 0:
        raise ValueError("radii must be nonnegative")
    big = max(r, s)
    if big == 0:
        raise NotIntegrable("kernel is infinite at r = s = 0")
    if r == 0 or s == 0:
        val = sphere_area(N) * big ** (-e)
        return (val, 0.0) if return_error else val
    pref = 2 ** (N - 1) * sphere_area(N - 1)
    half = (N - 3) / 2
    if r == s:
        if e >= N - 1:
            raise NotIntegrable(f"angular integral diverges at r = s for e = {e} >= N-1")
        # (4 r^2 t^2)^(-e/2) t^(N-2) = (2r)^-e t^(N-2-e): put the power in the weight
        c = (2 * r) ** (-e)
        val, err = _quad(lambda t: c * (1 + t) ** half, 0, 1, 0, tol,
                         weight="alg", wvar=(N - 2 - e, half))
        val, err = pref * val, pref * err
        return (val, err) if return_error else val
    d2 = (r - s) ** 2
    c4 = 4 * r * s
    width = abs(r - s) / math.sqrt(c4)

    def f(t):
        return (d2 + c4 * t * t) ** (-e / 2) * t ** (N - 2) * (1 + t) ** half

    if width < 0.25:
        # resolve the near-diagonal peak on [0, t0]; smooth tail uses the
        # (1-t)^half endpoint weight
        t0 = min(0.5, 8 * width)
        v1, e1 = _quad(lambda t: f(t) * (1 - t) ** half, 0, t0, 0, tol,
                       points=[width, 2 * width] if 2 * width < t0 else [width])
        v2, e2 = _quad(f, t0, 1, 0, tol, weight="alg", wvar=(0, half))
        val, err = v1 + v2, e1 + e2
    else:
        val, err = _quad(f, 0, 1, 0, tol, weight="alg", wvar=(0, half))
    val, err = pref * val, pref * err
    return (val, err) if return_error else val


def radial_integral(integrand_s, r, tol=OUTER_TOL):
    """Integrate integrand_s(s) over (0, 1) with breakpoints adapted to r.

    The integrand may have an integrable singularity at s = r and at s = 0.
    Returns (value, error estimate).
    """
    edges = [0.0]
    if r > 0:
        if r < 1:
            edges += [r / 2, r]
            if 2 * r < 1:
                edges.append(2 * r)
            if 10 * r < 1:
                edges.append(10 * r)
        else:
            edges += [0.5]
    edges.append(1.0)
    edges = sorted(set(edges))
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _quad(integrand_s, a, b, 0, tol)
        total += v
        err += e
    return total, err


class EnvelopeRegime(str, enum.Enum):
    SUPER = "SUPER"
    CRITICAL = "CRITICAL"
    SUB = "SUB"


@dataclass(frozen=True)
class EnvelopeCase:
    a: float
    b: float
    theta: float = 0.0
    N: int = 3

    def __post_init__(self):
        if not (0 < self.a < self.N and 0 < self.b < self.N) or self.theta < 0:
            raise ValueError("need a, b in (0, N) and theta >= 0")

    @property
    def regime(self):
        s = self.a + self.b
        if math.isclose(s, self.N, rel_tol=0, abs_tol=1e-12):
            return EnvelopeRegime.CRITICAL
        return EnvelopeRegime.SUPER if s > self.N else EnvelopeRegime.SUB

    def to_dict(self):
        return {"N": self.N, "a": self.a, "b": self.b, "theta": self.theta,
                "regime": self.regime.value}


def bound_envelope(case, r):
    r = np.asarray(r, dtype=float)
    L = np.log(LOG_CONST / r)
    reg = case.regime
    if reg is EnvelopeRegime.SUPER:
        out = r ** (case.N - case.a - case.b) * L ** (-case.theta)
    elif reg is EnvelopeRegime.CRITICAL:
        if case.theta == 1:
            warnings.warn("theta = 1 at a+b = N: using the constant envelope",
                          CriticalThetaOneWarning, stacklevel=2)
            out = np.ones_like(r)
        else:
            out = L ** max(1 - case.theta, 0.0)
    else:
        out = np.ones_like(r)
    return out if out.ndim else float(out)


def envelope_integral(case, r, inner_tol=INNER_TOL, outer_tol=OUTER_TOL):
    """J(r): integral over |y| < 1 of (log 5/|y|)^-theta |x-y|^-a |y|^-b dy."""
    spec = KernelSpec(case.N, case.a)

    def g(s):
        k = angular_kernel(spec, r, s, inner_tol)
        w = s ** (case.N - 1 - case.b)
        if case.theta:
            w *= math.log(LOG_CONST / s) ** (-case.theta)
        return w * k

    return radial_integral(g, r, outer_tol)


@dataclass(frozen=True)
class EnvelopeReport:
    case: EnvelopeCase
    radii: np.ndarray
    integrals: np.ndarray
    ratios: np.ndarray
    min_ratio: float
    max_ratio: float
    factor: float
    passed: bool
    flagged: bool = False

    def to_dict(self):
        return {"case": self.case.to_dict(), "radii": self.radii.tolist(),
                "integrals": self.integrals.tolist(), "ratios": self.ratios.tolist(),
                "min_ratio": self.min_ratio, "max_ratio": self.max_ratio,
                "factor": self.factor, "passed": self.passed, "flagged": self.flagged}


def verify_envelope(case, radii, factor=1e2, inner_tol=INNER_TOL, outer_tol=OUTER_TOL):
    """Sandwich J(r) between multiples of the envelope over sampled radii."""
    radii = np.sort(np.asarray(radii, dtype=float))
    if radii[0] <= 0 or radii[-1] > 0.5 or radii[-1] / radii[0] < 1e3 * (1 - 1e-9):
        raise ValueError("radii must span at least three decades inside (0, 1/2]")
    flagged = case.regime is EnvelopeRegime.CRITICAL and case.theta == 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CriticalThetaOneWarning)
        env = bound_envelope(case, radii)
    J = np.array([envelope_integral(case, r, inner_tol, outer_tol)[0] for r in radii])
    ratio = J / env
    lo, hi = float(ratio.min()), float(ratio.max())
    ok = bool(lo > 0 and np.isfinite(hi) and hi / lo < factor)
    return EnvelopeReport(case, radii, J, ratio, lo, hi, factor, ok, flagged)


@dataclass(frozen=True)
class ConvolutionResult:
    grid: RadialGrid
    quadrature_error_estimate: np.ndarray
    normalization: float

    def to_csv(self):
        return self.grid.to_csv(header=("r", "value", "error_estimate"),
                                extra=[self.quadrature_error_estimate])

    def to_dict(self):
        d = self.grid.to_dict()
        d["error_estimate"] = self.quadrature_error_estimate.tolist()
        d["normalization"] = self.normalization
        return d


def _integrand_source(f, power, N):
    """Return (callable s -> f(s)^power, exponent estimate of f at 0)."""
    if isinstance(f, PowerLogProfile):
        if f.gamma * power >= N:
            raise NotIntegrable(f"gamma*power = {f.gamma * power} >= N = {N}")
        u = f
        return (lambda s: u(s) ** power), f.gamma
    if isinstance(f, RadialGrid):
        if np.any(f.values <= 0):
            raise ValueError("f must be positive")
        interp = f.loglog_interpolator()
        k = min(4, len(f) - 1)
        slope = -(np.log(f.values[k]) - np.log(f.values[0])) / (np.log(f.radii[k]) - np.log(f.radii[0]))
        if slope * power >= N:
            raise NotIntegrable(f"sampled decay rate {slope:.4g} * power >= N")
        return (lambda s: float(interp(s)) ** power), slope
    if callable(f):
        return (lambda s: f(s) ** power), None
    raise TypeError("f must be a PowerLogProfile, RadialGrid or callable")


def riesz_potential(f, N, beta, r, power=1.0, inner_tol=INNER_TOL, outer_tol=OUTER_TOL):
    """(I_beta * f^power)(r) over the unit ball; r = 0 allowed.

    Returns (value, error estimate).
    """
    if power < 0:
        raise ValueError("power must be nonnegative")
    fp, _ = _integrand_source(f, power, N)
    spec = KernelSpec(N, N - beta)
    A = riesz_constant(N, beta)
    if r == 0:
        val, err = radial_integral(lambda s: fp(s) * s ** (beta - 1), 0.0, outer_tol)
        c = A * sphere_area(N)
        return c * val, c * err
    # the kernel's relative error bounds the inner contribution to the total
    inner_rel = [0.0]

    def g(s):
        k, ke = angular_kernel(spec, r, s, inner_tol, return_error=True)
        if k > 0:
            inner_rel[0] = max(inner_rel[0], ke / k)
        return fp(s) * s ** (N - 1) * k

    val, err = radial_integral(g, r, outer_tol)
    return A * val, A * err + inner_rel[0] * abs(A * val)


def riesz_convolve_radial(f, P, power=1.0, radii=None, inner_tol=INNER_TOL,
                          outer_tol=OUTER_TOL, check_tol=True):
    """(I_beta * f^power) at every node of ``radii`` (default: f's own grid)."""
    if radii is None:
        if not isinstance(f, RadialGrid):
            raise ValueError("radii required unless f is a RadialGrid")
        radii = f.radii
    N, beta = P.N, float(P.beta)
    _integrand_source(f, power, N)
    vals, errs = [], []
    for r in np.asarray(radii, dtype=float):
        v, e = riesz_potential(f, N, beta, float(r), power, inner_tol, outer_tol)
        if check_tol and e > 1e3 * outer_tol * max(abs(v), 1e-300):
            raise ToleranceNotMet(f"r={r}: error estimate {e:.3g} vs value {v:.3g}")
        vals.append(v)
        errs.append(e)
    vals = np.array(vals)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("non-finite convolution value")
    return ConvolutionResult(RadialGrid(np.asarray(radii, dtype=float), vals),
                             np.array(errs), riesz_constant(N, beta))
