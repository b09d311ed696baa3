"""Random-dual objective, its Gaussian integrals, and closed-form partials.

Everything here is an exact scalar evaluation of the dual objective

    xi = -sqrt(c2) + gamma1 sqrt(alpha) sqrt(1 - 2 c1 + c2 + sigma^2)
         - sqrt(c2 I) - gamma1 r - nu c1 sqrt(beta)

with I the beta-weighted combination of the truncated-Gaussian second
moments i11/i12, plus the partial derivatives used by the stationary-point
solvers. All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import scipy.integrate
from scipy.special import erfcx as _erfcx

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
# exp underflows past ~745.1; t^2/2 beyond this means the branch mass is
# below 1e-300 and the closed form is exactly 0 in doubles.
_EXP_UNDERFLOW = 745.0


@dataclass(frozen=True)
class TheoryPoint:
    """Macroscopic problem description and tuning knobs.

    alpha, beta are the sampling and sparsity ratios, alpha_w the weak
    threshold of the l1 phase transition, sigma the noise scale, r_sc the
    radius multiplier and c_l1 the sqrt(n)-scaled l1 weight. The scaled
    residual-ball radius entering the dual objective is
    r = r_sc * sigma * sqrt(alpha - alpha_w).
    """

    alpha: float
    beta: float
    sigma: float
    alpha_w: float
    r_sc: float
    c_l1: float

    def __post_init__(self):
        if not 0.0 < self.beta < self.alpha_w < self.alpha <= 1.0:
            raise ValueError(
                f"need 0 < beta < alpha_w < alpha <= 1, got "
                f"beta={self.beta}, alpha_w={self.alpha_w}, alpha={self.alpha}")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be > 0")
        if self.r_sc <= 0.0 or self.c_l1 <= 0.0:
            raise ValueError("r_sc and c_l1 must be > 0")

    @property
    def r(self) -> float:
        """Scaled radius r_sc * sigma * sqrt(alpha - alpha_w)."""
        return self.r_sc * self.sigma * math.sqrt(self.alpha - self.alpha_w)


@dataclass(frozen=True)
class DualVariables:
    """Dual/overlap variables (c1, c2, gamma1, nu).

    c1 is the overlap with the planted vector, c2 the squared norm, gamma1
    the residual-constraint multiplier and nu the overlap multiplier
    (negative branch at any solution). nu is stored as a free real; the
    solvers enforce the sign.
    """

    c1: float
    c2: float
    gamma1: float
    nu: float

    def is_valid(self, tol: float = 1e-9) -> bool:
        return (self.gamma1 > 0.0 and self.nu < 0.0
                and -tol <= self.c2 <= 1.0 + tol
                and -tol <= self.c1 <= math.sqrt(max(self.c2, 0.0)) + tol
                and 1.0 - 2.0 * self.c1 + self.c2 > -tol)


def _branch_moment(gamma1: float, a: float) -> float:
    """E[(gamma1 h - a)^2 ; gamma1 h > a] for standard normal h.

    Closed form 0.5 erfc(t/sqrt2)(gamma1^2 + a^2) - gamma1 a phi-term with
    t = a/gamma1. For large positive t the two terms nearly cancel; the
    scaled-complementary (erfcx) form factors out exp(-t^2/2) so the
    evaluation never multiplies an underflowed factor by a huge one.
    """
    g1 = max(gamma1, 1e-300)
    t = a / g1
    t2h = 0.5 * t * t
    if t <= 8.0:
        expterm = math.exp(-t2h) if t2h < _EXP_UNDERFLOW else 0.0
        return 0.5 * math.erfc(t / _SQRT2) * (gamma1 * gamma1 + a * a) \
            - gamma1 / _SQRT_2PI * expterm * a
    if t2h >= _EXP_UNDERFLOW:
        return 0.0
    bracket = 0.5 * _erfcx(t / _SQRT2) * (gamma1 * gamma1 + a * a) \
        - gamma1 * a / _SQRT_2PI
    return math.exp(-t2h) * float(bracket)


def i11(gamma1: float, nu: float, cl1: float) -> float:
    """E[(gamma1 h - (c - nu))^2 ; gamma1 h > c - nu], c = cl1."""
    return _branch_moment(gamma1, cl1 - nu)


def i12(gamma1: float, nu: float, cl1: float) -> float:
    """Mirror branch: E[(gamma1 h - (c + nu))^2 ; gamma1 h > c + nu]."""
    return _branch_moment(gamma1, cl1 + nu)


def big_i(tp: TheoryPoint, dv: DualVariables) -> float:
    """beta-weighted integral I = b*(i11+i12)(nu) + (1-b)*(i11+i12)(0)."""
    b, g1, nu, c = tp.beta, dv.gamma1, dv.nu, tp.c_l1
    return b * (i11(g1, nu, c) + i12(g1, nu, c)) \
        + (1.0 - b) * (i11(g1, 0.0, c) + i12(g1, 0.0, c))


def soft_threshold_moment(gamma1: float, nu: float, cl1: float) -> float:
    """Brute-force oracle for i11 + i12: E[max(|gamma1 h - nu| - cl1, 0)^2].

    Integrates the two half-lines beyond the kinks of the soft threshold
    against the standard normal density; stays independent of the closed
    forms it checks.
    """
    if gamma1 <= 0.0:
        raise ValueError("gamma1 must be > 0")

    def upper(h: float) -> float:
        z = gamma1 * h - nu - cl1
        return z * z * math.exp(-0.5 * h * h) / _SQRT_2PI

    def lower(h: float) -> float:
        z = gamma1 * h - nu + cl1
        return z * z * math.exp(-0.5 * h * h) / _SQRT_2PI

    h_hi = (nu + cl1) / gamma1
    h_lo = (nu - cl1) / gamma1
    up, _ = scipy.integrate.quad(upper, h_hi, math.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    lo, _ = scipy.integrate.quad(lower, -math.inf, h_lo, epsabs=1e-13, epsrel=1e-12, limit=200)
    return up + lo


def _xi_terms(tp: TheoryPoint, dv: DualVariables) -> tuple[float, float, float, float]:
    d2 = 1.0 - 2.0 * dv.c1 + dv.c2 + tp.sigma ** 2
    if d2 < 0.0:
        raise ValueError("1 - 2 c1 + c2 + sigma^2 must be > 0")
    big = big_i(tp, dv)
    gain = dv.gamma1 * math.sqrt(tp.alpha) * math.sqrt(d2)
    cost = math.sqrt(dv.c2 * big) + dv.gamma1 * tp.r + dv.nu * dv.c1 * math.sqrt(tp.beta)
    return gain, cost, big, d2


def xi_rd(tp: TheoryPoint, dv: DualVariables) -> float:
    """Gamma-eliminated dual objective (contraction-target variant)."""
    gain, cost, _, _ = _xi_terms(tp, dv)
    return -math.sqrt(dv.c2) + gain - cost


def xi_rd_socp(tp: TheoryPoint, dv: DualVariables) -> float:
    """Adjusted LASSO/SOCP variant: same objective without the -sqrt(c2) term."""
    gain, cost, _, _ = _xi_terms(tp, dv)
    return gain - cost


def _di11_dnu(gamma1: float, nu: float, cl1: float) -> float:
    gamma1 = max(gamma1, 1e-300)
    t2h = (nu - cl1) ** 2 / (2.0 * gamma1 * gamma1)
    expterm = math.exp(-t2h) if t2h < _EXP_UNDERFLOW else 0.0
    return _SQRT_2_OVER_PI * gamma1 * expterm \
        + (nu - cl1) * math.erf((nu - cl1) / (_SQRT2 * gamma1)) + (nu - cl1)


def _di12_dnu(gamma1: float, nu: float, cl1: float) -> float:
    gamma1 = max(gamma1, 1e-300)
    t2h = (nu + cl1) ** 2 / (2.0 * gamma1 * gamma1)
    expterm = math.exp(-t2h) if t2h < _EXP_UNDERFLOW else 0.0
    return nu + cl1 - (_SQRT_2_OVER_PI * gamma1 * expterm
                       + (nu + cl1) * math.erf((nu + cl1) / (_SQRT2 * gamma1)))


def dI_dnu(tp: TheoryPoint, dv: DualVariables) -> float:
    """dI/dnu; only the beta-weighted branch depends on nu."""
    g1, nu, c = dv.gamma1, dv.nu, tp.c_l1
    return tp.beta * (_di11_dnu(g1, nu, c) + _di12_dnu(g1, nu, c))


def _di11_dgamma1(gamma1: float, nu: float, cl1: float) -> float:
    g1 = max(gamma1, 1e-300)
    return gamma1 * math.erf((nu - cl1) / (_SQRT2 * g1)) + gamma1


def _di12_dgamma1(gamma1: float, nu: float, cl1: float) -> float:
    g1 = max(gamma1, 1e-300)
    return -gamma1 * math.erf((nu + cl1) / (_SQRT2 * g1)) + gamma1


def dI_dgamma1(tp: TheoryPoint, dv: DualVariables) -> float:
    """dI/dgamma1, beta-weighted over the nu and nu=0 branches."""
    g1, nu, c = dv.gamma1, dv.nu, tp.c_l1
    return tp.beta * (_di11_dgamma1(g1, nu, c) + _di12_dgamma1(g1, nu, c)) \
        + (1.0 - tp.beta) * (_di11_dgamma1(g1, 0.0, c) + _di12_dgamma1(g1, 0.0, c))


def d_xi_dnu(tp: TheoryPoint, dv: DualVariables) -> float:
    """Closed-form d(xi)/d(nu) at fixed (c1, c2, gamma1)."""
    big = big_i(tp, dv)
    return -math.sqrt(dv.c2) / (2.0 * math.sqrt(big)) * dI_dnu(tp, dv) \
        - dv.c1 * math.sqrt(tp.beta)


def d_xi_dgamma1(tp: TheoryPoint, dv: DualVariables) -> float:
    """Closed-form d(xi)/d(gamma1) at fixed (c1, c2, nu)."""
    d2 = 1.0 - 2.0 * dv.c1 + dv.c2 + tp.sigma ** 2
    big = big_i(tp, dv)
    return math.sqrt(tp.alpha) * math.sqrt(d2) - tp.r \
        - math.sqrt(dv.c2) / (2.0 * math.sqrt(big)) * dI_dgamma1(tp, dv)
