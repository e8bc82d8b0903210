"""Certification pipelines built from the exponent, operator, convolution and ODE layers.

Each check returns a small result object with the measured numbers; the
:class:`VerificationReport` collects them into a deterministic JSON document.
Every PASS/FAIL threshold lives in :class:`VerifyConfig`.
"""

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .ansatz import LOG_CONST, PowerLogProfile, eval_profile, weighted_m_laplace_closed_form
from .errors import NegativeLHS, PreconditionError
from .exponents import (Existence, ProfileKind, classify_existence, classify_profile,
                        construct_candidate, construction_admissible, derive_exponents)
from .grid import RadialGrid, log_radii
from .odesolver import FitClass, RadialEquation, fit_asymptotic_slope, monotone_limit
from .riesz import OUTER_TOL, riesz_convolve_radial, sphere_area

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class VerifyConfig:
    """Thresholds and grid sizes for every check.

    r_min, n_nodes
        Log grid on [r_min, 1] used by the pointwise and ratio checks.
    kappa_safety
        Amplitude used for the margin test is ``kappa_safety * kappa_star``.
    degeneracy_slope
        The pointwise check FAILs when d log(l/g) / d log r over the innermost
        decade exceeds this: the amplitude bound would then shrink to zero
        as r_min -> 0.
    drift_bound
        Largest admissible |d log(LHS/RHS) / d log r| over the innermost two
        decades for the double inequality.
    refine_change
        Largest relative change of a_hat/b_hat under one refinement, which
        extends the grid one decade inward at twice the node density.
    ko_thresholds, ko_growth
        Nested lower radii for the Keller-Osserman sup and the largest
        relative growth of that sup over the last decade.
    apriori_R, apriori_trend, apriori_decay, apriori_nodes
        Dyadic exponents k for R = 2^-k; the ratio counts as bounded when the
        slope of log(ratio) against log R is at least ``apriori_trend``, or
        when the successive log-increments shrink geometrically with rate at
        most ``apriori_decay`` (a convergent approach, whereas a power-law
        mismatch gives constant increments); convolution nodes used for the
        interpolated right-hand side.
    fit_window, fit_tol, dichotomy_r_min
        Window and relative tolerance for asymptotic slope fits and the
        innermost radius reached by the comparison family.
    """

    r_min: float = 1e-4
    n_nodes: int = 33
    kappa_safety: float = 0.9
    degeneracy_slope: float = 0.01
    drift_bound: float = 0.1
    refine_change: float = 0.1
    ko_thresholds: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    ko_growth: float = 0.05
    apriori_R: tuple = (2, 3, 4, 5, 6, 7, 8)
    apriori_trend: float = -0.1
    apriori_decay: float = 0.95
    apriori_nodes: int = 41
    fit_window: tuple = (1e-3, 1e-1)
    fit_tol: float = 0.05
    dichotomy_r_min: float = 1e-4
    outer_tol: float = OUTER_TOL

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


DEFAULT_CONFIG = VerifyConfig()


def _loglog_slope(r, y):
    return float(np.polyfit(np.log(r), np.log(y), 1)[0])


# ---------------------------------------------------------------- pointwise


@dataclass
class InequalityMargin:
    grid: RadialGrid
    kappa_star: float
    lhs_profile: RadialGrid
    rhs_profile: RadialGrid
    amplitude: float
    inner_slope: float
    passed: bool
    reason: str = ""

    def to_dict(self):
        return {"kappa_star": self.kappa_star, "amplitude": self.amplitude,
                "inner_slope": self.inner_slope, "min_margin": float(self.grid.values.min()),
                "passed": self.passed, "reason": self.reason,
                "r": self.grid.radii.tolist(), "margin": self.grid.values.tolist()}


def _rhs_unit(u, P, radii, cfg):
    """(I_beta * u^p) u^q for the unit-amplitude profile."""
    conv = riesz_convolve_radial(u, P, power=float(P.p), radii=radii, outer_tol=cfg.outer_tol)
    return conv.grid.values * eval_profile(u, radii) ** float(P.q)


def verify_pointwise_inequality(u, P, cfg=DEFAULT_CONFIG, radii=None):
    """Check the inequality for ``kappa * u`` on a log grid and calibrate kappa.

    With LHS = kappa^(m-1) l(r) and RHS = kappa^(p+q) g(r), the largest
    admissible amplitude is kappa_star = inf (l/g)^(1/(p+q-m+1)). The
    margins are then evaluated directly at ``min(1, safety * kappa_star)``.
    """
    if not construction_admissible(P):
        raise PreconditionError("pointwise check needs the existence conditions")
    _, m, p, q, _, _ = P.floats
    if radii is None:
        radii = log_radii(cfg.r_min, cfg.n_nodes)
    unit = u.with_amplitude(1.0)
    ell = weighted_m_laplace_closed_form(unit, P, radii)
    if np.any(ell <= 0):
        raise NegativeLHS(f"operator is non-positive at r = {radii[np.argmin(ell)]:.3g}")
    g = _rhs_unit(unit, P, radii, cfg)
    ratio = ell / g
    kappa_star = float(np.min(ratio) ** (1 / (p + q - m + 1)))
    amp = min(1.0, cfg.kappa_safety * kappa_star)
    # margins recomputed at the chosen amplitude rather than rescaled
    scaled = unit.with_amplitude(amp)
    lhs = weighted_m_laplace_closed_form(scaled, P, radii)
    rhs = g * amp ** (p + q)
    margin = lhs - rhs
    inner = radii <= radii[0] * 10 * (1 + 1e-12)
    inner_slope = _loglog_slope(radii[inner], ratio[inner])
    passed, reason = True, ""
    if inner_slope > cfg.degeneracy_slope:
        passed = False
        reason = (f"l/g decays like r^{inner_slope:.3g} at the origin: "
                  "kappa_star -> 0 under refinement")
    elif np.any(margin < 0):
        passed = False
        reason = "negative margin at the calibrated amplitude"
    return InequalityMargin(RadialGrid(radii, margin), kappa_star, RadialGrid(radii, ell),
                            RadialGrid(radii, g), amp, inner_slope, passed, reason)


# ------------------------------------------------------- double inequality


@dataclass
class DoubleInequalityEstimate:
    a_hat: float
    b_hat: float
    drift: float
    refined_a_hat: float
    refined_b_hat: float
    ratio_change: float
    passed: bool
    profile: PowerLogProfile
    ratio: RadialGrid = field(repr=False, default=None)
    reason: str = ""

    def to_dict(self):
        return {"a_hat": self.a_hat, "b_hat": self.b_hat, "drift": self.drift,
                "refined_a_hat": self.refined_a_hat, "refined_b_hat": self.refined_b_hat,
                "ratio_change": self.ratio_change, "passed": self.passed,
                "profile": self.profile.to_dict(), "reason": self.reason}


def _lhs_rhs_ratio(u, P, radii, cfg):
    lhs = weighted_m_laplace_closed_form(u, P, radii)
    rhs = _rhs_unit(u, P, radii, cfg) * u.kappa ** float(P.p + P.q)
    return lhs / rhs


def verify_double_inequality(P, cfg=DEFAULT_CONFIG):
    """Estimate a >= b > 0 with b RHS <= LHS <= a RHS for the explicit candidate."""
    if not construction_admissible(P):
        raise PreconditionError("double inequality needs the existence conditions")
    u = construct_candidate(P)
    radii = log_radii(cfg.r_min, cfg.n_nodes)
    ratio = _lhs_rhs_ratio(u, P, radii, cfg)
    # one refinement: a decade further in, with twice the node density
    fine = log_radii(cfg.r_min / 10, 2 * cfg.n_nodes + 15)
    ratio_fine = _lhs_rhs_ratio(u, P, fine, cfg)
    a_hat, b_hat = float(ratio.max()), float(ratio.min())
    fa, fb = float(ratio_fine.max()), float(ratio_fine.min())
    inner = radii <= radii[0] * 100 * (1 + 1e-12)
    passed, reason = True, ""
    if not (b_hat > 0 and math.isfinite(a_hat)):
        passed, reason = False, "ratio not positive and finite"
        drift = math.nan
        change = math.nan
    else:
        drift = abs(_loglog_slope(radii[inner], ratio[inner]))
        change = abs((fa / fb) / (a_hat / b_hat) - 1)
        if drift > cfg.drift_bound:
            passed, reason = False, f"log-ratio drifts with slope {drift:.3g}"
        elif change > cfg.refine_change:
            passed, reason = False, f"a_hat/b_hat changed by {change:.3g} under refinement"
    return DoubleInequalityEstimate(a_hat, b_hat, drift, fa, fb, change, passed, u,
                                    RadialGrid(radii, ratio), reason)


# ---------------------------------------------------------- Keller-Osserman


@dataclass
class KellerOssermanResult:
    sups: list
    thresholds: list
    growth: float
    passed: bool

    def to_dict(self):
        return {"sups": self.sups, "thresholds": self.thresholds,
                "growth": self.growth, "passed": self.passed}


def keller_osserman_check(u, P, cfg=DEFAULT_CONFIG):
    """sup of r^sigma u over [t, 1] for shrinking t; PASS when it settles."""
    _, m, p, q, _, _ = P.floats
    if not p + q > 2 * (m - 1):
        raise PreconditionError("Keller-Osserman bound needs p+q > 2(m-1)")
    if not isinstance(u, RadialGrid):
        u = RadialGrid.sample(u, min(cfg.ko_thresholds), 8 * len(cfg.ko_thresholds) * 10 + 1)
    sigma = float(derive_exponents(P).sigma)
    scaled = u.radii ** sigma * u.values
    ts = sorted(cfg.ko_thresholds, reverse=True)
    if u.r_min > ts[-1] * (1 + 1e-12):
        raise PreconditionError("grid does not reach the smallest threshold")
    sups = [float(scaled[u.radii >= t * (1 - 1e-12)].max()) for t in ts]
    growth = sups[-1] / sups[-2] - 1
    return KellerOssermanResult(sups, ts, growth, growth <= cfg.ko_growth)


# ------------------------------------------------------------ a priori ratio


@dataclass(frozen=True)
class AprioriCheckConfig:
    """Parameters of the cutoff test; ``ell`` defaults to (p+q)/2."""

    ell: float | None = None
    lam: float | None = None
    R_exponents: tuple = DEFAULT_CONFIG.apriori_R
    source: str = "convolution"

    def resolve(self, P):
        _, m, p, q, _, _ = P.floats
        ell = (p + q) / 2 if self.ell is None else self.ell
        lam = 2 * m if self.lam is None else self.lam
        if not ell > m - 1:
            raise PreconditionError("need ell > m-1")
        if self.source not in ("convolution", "operator"):
            raise ValueError("source must be 'convolution' or 'operator'")
        return ell, lam


def smoothstep_cutoff(r, R):
    """C^2 bump: 1 on [R, 2R], 0 outside (R/2, 4R), quintic smoothstep joins."""
    r = np.asarray(r, dtype=float)

    def s(x):
        x = np.clip(x, 0.0, 1.0)
        return x ** 3 * (10 - 15 * x + 6 * x * x)

    up = s((r - R / 2) / (R / 2))
    down = 1 - s((r - 2 * R) / (2 * R))
    return np.where(r < R, up, np.where(r > 2 * R, down, 1.0))


@dataclass
class AprioriResult:
    R: list
    lhs: list
    rhs: list
    ratio: list
    trend: float
    increment_decay: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def _source_term(u, P, cfg, acfg):
    if acfg.source == "operator":
        return lambda r: weighted_m_laplace_closed_form(u, P, r)
    r_lo = 2.0 ** -(max(acfg.R_exponents) + 1)
    radii = log_radii(r_lo, cfg.apriori_nodes)
    conv = riesz_convolve_radial(u, P, power=float(P.p), radii=radii, outer_tol=cfg.outer_tol)
    interp = conv.grid.loglog_interpolator()
    q = float(P.q)
    return lambda r: interp(r) * eval_profile(u, r) ** q


def _quad(f, a, b, pts):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, points=pts, epsabs=0, epsrel=1e-10, limit=200)[0]


def apriori_ratio_check(u, P, acfg=AprioriCheckConfig(), cfg=DEFAULT_CONFIG):
    """Cutoff-weighted integral of the right-hand side against the u^ell bound.

    For each R the ratio is
        int f phi^lam dx / (R^(N-m-alpha-(m-1)N/ell) (int u^ell phi^lam dx)^((m-1)/ell))
    with f = (I_beta * u^p) u^q, or the operator applied to u when
    ``acfg.source == 'operator'``. PASS when the ratio shows no growth as R
    shrinks.
    """
    ell, lam = acfg.resolve(P)
    N, m, _, _, alpha, _ = P.floats
    f = _source_term(u, P, cfg, acfg)
    area = sphere_area(P.N)
    Rs, lhs, rhs = [], [], []
    for k in acfg.R_exponents:
        R = 2.0 ** -k
        pts = [R, 2 * R]
        phi = lambda r: smoothstep_cutoff(r, R) ** lam
        a = _quad(lambda r: float(f(r)) * phi(r) * r ** (N - 1), R / 2, 4 * R,
                  pts)
        b = _quad(lambda r: eval_profile(u, r) ** ell * phi(r) * r ** (N - 1),
                  R / 2, 4 * R, pts)
        Rs.append(R)
        lhs.append(area * a)
        rhs.append(R ** (N - m - alpha - (m - 1) * N / ell) * (area * b) ** ((m - 1) / ell))
    ratio = np.array(lhs) / np.array(rhs)
    if np.all(ratio == 0):
        trend = 0.0
    elif np.all(ratio > 0):
        trend = _loglog_slope(np.array(Rs), ratio)
    else:
        trend = math.nan
    decay = _increment_decay(ratio)
    bounded = trend >= cfg.apriori_trend or decay <= cfg.apriori_decay
    passed = bool(np.all(np.isfinite(ratio)) and math.isfinite(trend) and bounded)
    return AprioriResult(Rs, lhs, rhs, ratio.tolist(), trend, decay, passed)


def _increment_decay(ratio):
    """Geometric rate of |log ratio_{k+1} - log ratio_k|; nan when undefined."""
    if np.any(ratio <= 0) or ratio.size < 4:
        return math.nan
    d = np.abs(np.diff(np.log(ratio)))
    if np.any(d == 0):
        return 0.0
    return float(np.exp(np.polyfit(np.arange(d.size), np.log(d), 1)[0]))


# ----------------------------------------------------------------- dichotomy


@dataclass(frozen=True)
class Anchor:
    """Inner boundary data c * Phi(r_k) or c * lambda r_k^-g (strong profile)."""

    kind: str
    factor: float

    @property
    def label(self):
        return f"{self.factor:g}*{self.kind}"


DEFAULT_ANCHORS = (
    Anchor("fundamental", 1e-3), Anchor("fundamental", 3e-3),
    Anchor("fundamental", 1e-2), Anchor("fundamental", 3e-2),
    Anchor("strong", 0.25), Anchor("strong", 0.5),
    Anchor("strong", 1.0), Anchor("strong", 2.0),
)


def anchor_function(anchor, eq):
    if anchor.kind == "fundamental":
        phi = eq.fundamental_exponent
        if phi == 0:
            return lambda r: anchor.factor * math.log(LOG_CONST / r)
        return lambda r: anchor.factor * r ** (-phi)
    if anchor.kind == "strong":
        lam, g = eq.strong_amplitude(), eq.strong_exponent
        return lambda r: anchor.factor * lam * r ** (-g)
    raise ValueError(f"unknown anchor kind {anchor.kind!r}")


@dataclass
class DichotomyEntry:
    anchor: Anchor
    fit: object
    converged: bool
    direction: str

    def to_dict(self):
        return {"anchor": self.anchor.label, "fit": self.fit.to_dict(),
                "converged": self.converged, "direction": self.direction}


@dataclass
class DichotomyResult:
    theta: float
    entries: list
    passed: bool
    offending: list

    def to_dict(self):
        return {"theta": self.theta, "entries": [e.to_dict() for e in self.entries],
                "passed": self.passed, "offending": self.offending}


def comparison_equation(P, C=1.0):
    """Radial comparison equation with weight power theta = (sigma p - beta)^+."""
    theta = float(derive_exponents(P).theta_plus)
    return RadialEquation(P, theta, C, float(P.q))


def dichotomy_pipeline(P, anchors=DEFAULT_ANCHORS, cfg=DEFAULT_CONFIG):
    """Monotone comparison families for each anchor and their slope classes."""
    if classify_profile(P).kind is not ProfileKind.DICHOTOMY:
        raise PreconditionError("dichotomy pipeline needs a DICHOTOMY classification")
    eq = comparison_equation(P)
    entries, bad = [], []
    for a in anchors:
        f = anchor_function(a, eq)
        lim = monotone_limit(eq, f, f(1.0), r_min=cfg.dichotomy_r_min)
        fit = fit_asymptotic_slope(lim, cfg.fit_window, eq, tol=cfg.fit_tol)
        entries.append(DichotomyEntry(a, fit, lim.is_converged(cfg.fit_window), lim.direction))
        if fit.classification not in (FitClass.FUNDAMENTAL, FitClass.STRONG):
            bad.append(a.label)
    return DichotomyResult(eq.theta, entries, not bad, bad)


# ------------------------------------------------------------------- report


PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"


@dataclass
class CheckResult:
    name: str
    status: str
    measured: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    reason: str = ""


@dataclass
class VerificationReport:
    params: dict
    checks: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.status != FAIL for c in self.checks)

    def add(self, check):
        self.checks.append(check)

    def to_dict(self):
        return {"schema": SCHEMA_VERSION, "params": self.params, "inputs": self.inputs,
                "config": self.config, "checks": [asdict(c) for c in self.checks],
                "passed": self.passed}

    def to_json(self):
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if d.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        rep = cls(d["params"], config=d["config"], inputs=d["inputs"])
        for c in d["checks"]:
            rep.add(CheckResult(**c))
        return rep

    def summary(self):
        lines = [f"parameters: {self.params}"]
        for c in self.checks:
            line = f"  [{c.status}] {c.name}"
            if c.reason:
                line += f": {c.reason}"
            lines.append(line)
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if hasattr(x, "value") and hasattr(x, "name"):
        return x.value
    return x


def run_pipeline(P, cfg=DEFAULT_CONFIG, dichotomy=False, inputs=None, gamma=None):
    """Existence, pointwise (when ``gamma`` is given), double inequality,
    Keller-Osserman, a priori and (optionally) dichotomy checks."""
    inputs = dict(inputs or {})
    inputs["gamma"] = gamma
    rep = VerificationReport(P.to_dict(), config=cfg.to_dict(), inputs=inputs)
    ex = classify_existence(P)
    measured = {"verdict": ex.exists.value, "failed": list(ex.failed_conditions)}
    if ex.exists is Existence.YES:
        rep.add(CheckResult("existence", PASS, measured))
    elif ex.exists is Existence.UNDETERMINED and construction_admissible(P):
        rep.add(CheckResult("existence", SKIPPED, measured, reason=ex.reason))
    else:
        rep.add(CheckResult("existence", FAIL, measured, reason=ex.reason))
        for name in ("pointwise_inequality", "double_inequality", "keller_osserman",
                     "apriori_ratio", "dichotomy"):
            rep.add(CheckResult(name, SKIPPED, reason="existence conditions fail"))
        return rep

    u = None
    if gamma is None:
        rep.add(CheckResult("pointwise_inequality", SKIPPED, reason="no gamma supplied"))
    else:
        u = PowerLogProfile(1.0, gamma)
        pm = verify_pointwise_inequality(u, P, cfg)
        d = pm.to_dict()
        del d["r"], d["margin"]
        rep.add(CheckResult("pointwise_inequality", PASS if pm.passed else FAIL, d,
                            {"kappa_safety": cfg.kappa_safety,
                             "degeneracy_slope": cfg.degeneracy_slope}, pm.reason))
        u = u.with_amplitude(pm.amplitude)

    try:
        dbl = verify_double_inequality(P, cfg)
    except PreconditionError as e:
        rep.add(CheckResult("double_inequality", SKIPPED, reason=str(e)))
    else:
        rep.add(CheckResult("double_inequality", PASS if dbl.passed else FAIL, dbl.to_dict(),
                            {"drift_bound": cfg.drift_bound, "refine_change": cfg.refine_change},
                            dbl.reason))
        u = dbl.profile

    _, m, p, q, _, _ = P.floats
    if u is None:
        for name in ("keller_osserman", "apriori_ratio"):
            rep.add(CheckResult(name, SKIPPED, reason="no verified profile"))
    elif p + q > 2 * (m - 1):
        ko = keller_osserman_check(u, P, cfg)
        rep.add(CheckResult("keller_osserman", PASS if ko.passed else FAIL, ko.to_dict(),
                            {"growth": cfg.ko_growth}))
        ap = apriori_ratio_check(u, P, cfg=cfg)
        rep.add(CheckResult("apriori_ratio", PASS if ap.passed else FAIL, ap.to_dict(),
                            {"trend": cfg.apriori_trend, "decay": cfg.apriori_decay}))
    else:
        for name in ("keller_osserman", "apriori_ratio"):
            rep.add(CheckResult(name, SKIPPED, reason="needs p+q > 2(m-1)"))

    if not dichotomy:
        rep.add(CheckResult("dichotomy", SKIPPED, reason="not requested"))
    elif P.gap < 0 or classify_profile(P).kind is not ProfileKind.DICHOTOMY:
        rep.add(CheckResult("dichotomy", SKIPPED, reason="profile class is not DICHOTOMY"))
    else:
        dr = dichotomy_pipeline(P, cfg=cfg)
        rep.add(CheckResult("dichotomy", PASS if dr.passed else FAIL, dr.to_dict(),
                            {"fit_tol": cfg.fit_tol, "fit_window": list(cfg.fit_window)},
                            "" if dr.passed else "undetermined: " + ", ".join(dr.offending)))
    return rep
