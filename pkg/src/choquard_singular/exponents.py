"""Exponent algebra and the existence / asymptotic-profile decision logic.

Every parameter is stored as a :class:`fractions.Fraction`, so that boundary
equalities such as ``p + q == (N + beta)(m - 1)/(N - m - alpha)`` are decided
exactly. Floats are converted through their shortest decimal repr, which means
``1.4`` is read as ``7/5`` rather than as the nearest binary double.
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational

from .errors import EmptyRangeError, ParameterError, PreconditionError


def to_rational(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (Integral, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class ProblemParams:
    N: int
    m: Fraction
    p: Fraction
    q: Fraction
    alpha: Fraction
    beta: Fraction

    @property
    def floats(self):
        """(N, m, p, q, alpha, beta) as Python floats."""
        return (float(self.N), float(self.m), float(self.p), float(self.q),
                float(self.alpha), float(self.beta))

    @property
    def gap(self):
        """N - m - alpha (exact)."""
        return self.N - self.m - self.alpha

    def to_dict(self):
        return {"N": self.N, "m": str(self.m), "p": str(self.p), "q": str(self.q),
                "alpha": str(self.alpha), "beta": str(self.beta)}


def validate_params(N, m, p, q, alpha, beta):
    """Build a :class:`ProblemParams`, reporting every violated baseline bound."""
    N_r = to_rational(N)
    m, p, q, alpha, beta = (to_rational(x) for x in (m, p, q, alpha, beta))
    bad = []
    if N_r.denominator != 1 or N_r < 1:
        bad.append("N must be an integer >= 1")
    if m <= 1:
        bad.append("m <= 1")
    if p <= 0:
        bad.append("p <= 0")
    if q <= m - 1:
        bad.append("q <= m-1")
    if alpha <= 0:
        bad.append("alpha <= 0")
    if beta <= 0:
        bad.append("beta <= 0")
    if beta >= N_r:
        bad.append("beta >= N")
    if bad:
        raise ParameterError(bad)
    return ProblemParams(int(N_r), m, p, q, alpha, beta)


class Geometry(str, enum.Enum):
    SUBCRITICAL_DIM = "SUBCRITICAL_DIM"      # N <= m + alpha
    SUPERCRITICAL_DIM = "SUPERCRITICAL_DIM"  # N > m + alpha


class Regime(str, enum.Enum):
    """Position of sigma*p relative to beta."""
    ABOVE = "SIGMA_P_ABOVE_BETA"
    EQUAL = "SIGMA_P_EQUALS_BETA"
    BELOW = "SIGMA_P_BELOW_BETA"


class Existence(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    UNDETERMINED = "UNDETERMINED"


class ProfileKind(str, enum.Enum):
    DICHOTOMY = "DICHOTOMY"
    OUT_OF_RANGE = "OUT_OF_RANGE"
    BOUNDARY_CASE = "BOUNDARY_CASE"


COND_MAX = "max(p,q) < N(m-1)/(N-m-alpha)"
COND_SUM = "p+q < (N+beta)(m-1)/(N-m-alpha)"
COND_DIM = "N-2m < 2alpha+beta"


@dataclass(frozen=True)
class DerivedExponents:
    sigma: Fraction
    tau: Fraction
    nu: Fraction | None
    phi_exponent: Fraction
    theta_plus: Fraction
    strong_exponent: Fraction
    regime: Regime
    geometry: Geometry

    def to_dict(self):
        return {k: (None if v is None else str(v.value if isinstance(v, enum.Enum) else v))
                for k, v in self.__dict__.items()}


def derive_exponents(P):
    s = P.p + P.q - P.m + 1
    sigma = (P.m + P.alpha + P.beta) / s
    sp = sigma * P.p
    if sp > P.beta:
        regime = Regime.ABOVE
    elif sp == P.beta:
        regime = Regime.EQUAL
    else:
        regime = Regime.BELOW
    # at sigma*p == beta the two strong exponents coincide
    strong = sigma if regime is not Regime.BELOW else (P.m + P.alpha) / (P.q - P.m + 1)
    geom = Geometry.SUPERCRITICAL_DIM if P.gap > 0 else Geometry.SUBCRITICAL_DIM
    return DerivedExponents(
        sigma=sigma,
        tau=1 / s,
        nu=P.N * (P.m - 1) / P.gap if P.gap > 0 else None,
        phi_exponent=P.gap / (P.m - 1),
        theta_plus=max(sp - P.beta, Fraction(0)),
        strong_exponent=strong,
        regime=regime,
        geometry=geom,
    )


@dataclass(frozen=True)
class ExistenceVerdict:
    exists: Existence
    failed_conditions: tuple
    geometry: Geometry
    # condition name -> (lhs, rhs); empty in the subcritical geometry
    margins: dict = field(default_factory=dict)
    reason: str = ""

    def to_dict(self):
        return {
            "exists": self.exists.value,
            "failed_conditions": list(self.failed_conditions),
            "geometry": self.geometry.value,
            "margins": {k: {"lhs": str(a), "rhs": str(b), "holds": a < b}
                        for k, (a, b) in self.margins.items()},
            "reason": self.reason,
        }


def _conditions(P):
    g = P.gap
    return {
        COND_MAX: (max(P.p, P.q), P.N * (P.m - 1) / g),
        COND_SUM: (P.p + P.q, (P.N + P.beta) * (P.m - 1) / g),
        COND_DIM: (P.N - 2 * P.m, 2 * P.alpha + P.beta),
    }


def classify_existence(P):
    if P.gap <= 0:
        return ExistenceVerdict(Existence.YES, (), Geometry.SUBCRITICAL_DIM,
                                reason="N <= m+alpha: singular solutions always exist")
    margins = _conditions(P)
    failed = tuple(name for name, (a, b) in margins.items() if not a < b)
    if P.p <= P.m - 1:
        return ExistenceVerdict(Existence.UNDETERMINED, failed, Geometry.SUPERCRITICAL_DIM,
                                margins, reason="p <= m-1: existence is not decided for this range")
    verdict = Existence.NO if failed else Existence.YES
    return ExistenceVerdict(verdict, failed, Geometry.SUPERCRITICAL_DIM, margins)


def construction_admissible(P):
    """True when the explicit power-type construction applies.

    That is N <= m+alpha, or all three strict inequalities hold. Unlike
    :func:`classify_existence` this does not require p > m-1, which the
    construction itself never uses.
    """
    if P.gap <= 0:
        return True
    return all(a < b for a, b in _conditions(P).values())


def _require_construction(P, what):
    if not construction_admissible(P):
        v = classify_existence(P)
        raise PreconditionError(f"{what}: existence conditions fail ({', '.join(v.failed_conditions)})")


@dataclass(frozen=True)
class ProfileClass:
    kind: ProfileKind
    weak_profile: str
    strong_profile: Fraction | None
    q_bound: Fraction | None
    reason: str = ""

    def to_dict(self):
        return {"kind": self.kind.value, "weak_profile": self.weak_profile,
                "strong_profile": None if self.strong_profile is None else str(self.strong_profile),
                "q_bound": None if self.q_bound is None else str(self.q_bound),
                "reason": self.reason}


def weak_profile_label(P):
    if P.gap == 0:
        return "log(5/|x|)"
    return f"|x|^-({P.gap / (P.m - 1)})"


def classify_profile(P):
    if P.gap < 0:
        raise PreconditionError("asymptotic classification needs N >= m+alpha")
    _require_construction(P, "classify_profile")
    d = derive_exponents(P)
    weak = weak_profile_label(P)
    q_bound = None if P.gap == 0 else (P.N - d.theta_plus) * (P.m - 1) / P.gap
    if d.regime is Regime.EQUAL:
        return ProfileClass(ProfileKind.BOUNDARY_CASE, weak, None, q_bound,
                            "sigma*p == beta is not covered by the dichotomy")
    if q_bound is not None and P.q >= q_bound:
        return ProfileClass(ProfileKind.OUT_OF_RANGE, weak, d.strong_exponent, q_bound,
                            f"q >= {q_bound}")
    if d.sigma * P.p >= P.N:
        return ProfileClass(ProfileKind.OUT_OF_RANGE, weak, d.strong_exponent, q_bound,
                            "sigma*p >= N")
    if P.p <= P.m - 1:
        return ProfileClass(ProfileKind.OUT_OF_RANGE, weak, d.strong_exponent, q_bound,
                            "p <= m-1")
    return ProfileClass(ProfileKind.DICHOTOMY, weak, d.strong_exponent, q_bound)


def gamma_interval(P):
    """Raw (lower, upper) bounds for the power construction, unchecked."""
    d = derive_exponents(P)
    if P.gap <= 0:
        return Fraction(0), min(P.beta / P.p, (P.m + P.alpha) / (P.q - P.m + 1))
    if d.regime is Regime.ABOVE:
        return max(d.phi_exponent, P.beta / P.p), min(d.sigma, P.N / P.p)
    return d.phi_exponent, (P.m + P.alpha) / (P.q - P.m + 1)


def candidate_gamma_range(P):
    """Open interval of decay rates gamma making kappa*|x|^-gamma a solution."""
    _require_construction(P, "candidate_gamma_range")
    lo, hi = gamma_interval(P)
    if not lo < hi:
        raise EmptyRangeError(f"empty gamma range ({lo}, {hi})")
    return lo, hi


def construct_candidate(P):
    """Unit-amplitude power-log profile solving the double inequality."""
    from .ansatz import PowerLogProfile

    _require_construction(P, "construct_candidate")
    d = derive_exponents(P)
    if d.regime is Regime.ABOVE:
        gamma, tau = d.sigma, Fraction(0)
    elif d.regime is Regime.EQUAL:
        gamma, tau = d.sigma, d.tau
    else:
        gamma, tau = (P.m + P.alpha) / (P.q - P.m + 1), Fraction(0)
    if gamma * P.p >= P.N:
        raise PreconditionError("candidate is not in L^p(B_1): gamma*p >= N")
    return PowerLogProfile(1.0, float(gamma), float(tau))
