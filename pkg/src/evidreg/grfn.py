"""Belief calculus for Gaussian random fuzzy numbers.

A Gaussian fuzzy number ``Gfn(m, h)`` is a fuzzy subset of the reals with
membership ``exp(-(h/2) * (x - m)**2)``: ``m`` is the mode and ``h >= 0``
the precision.  A Gaussian random fuzzy number ``Grfn(mu, sigma2, h)`` is
a Gfn whose mode is itself random, ``N(mu, sigma2)``.  The two spread
parameters carry the two kinds of uncertainty: ``sigma2`` is
probabilistic (aleatory) variance, ``h`` is possibilistic (epistemic)
precision.  Three limits anchor the semantics:

* ``h = 0``: the induced belief function is vacuous (total ignorance --
  every bounded interval has belief 0 and plausibility 1);
* ``h = +inf``: the number behaves exactly like the Gaussian
  ``N(mu, sigma2)`` and belief equals plausibility;
* ``sigma2 = 0``: a purely possibilistic quantity with membership
  ``Gfn(mu, h)``.

A Grfn induces belief and plausibility measures on real intervals.
Writing ``s2 = 1 + h*sigma2``, ``t = sigma*sqrt(s2)``, ``c = (x + y)/2``
and ``pl`` for the contour function,

    Pl([x,y]) = Phi((y-mu)/sigma) - Phi((x-mu)/sigma)
              + pl(x)*Phi((x-mu)/t) + pl(y)*(1 - Phi((y-mu)/t))

    Bel([x,y]) = Phi((y-mu)/sigma) - Phi((x-mu)/sigma)
               - pl(x)*[Phi((c-mu + h*sigma2*(c-x))/t) - Phi((x-mu)/t)]
               - pl(y)*[Phi((y-mu)/t) - Phi((c-mu + h*sigma2*(c-y))/t)]

Both forms follow from integrating the possibility / necessity of the
interval over the random mode; each term is a Gaussian product integral.
``tests/test_grfn.py`` checks them against direct quadrature of those
defining integrals, which is the independent oracle for this module.

Everything here is an immutable value or a pure function with no shared
state; all operations are safe to call from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from .errors import NumericFault, UnboundedQuantile

__all__ = [
    "Gfn",
    "Grfn",
    "RealInterval",
    "gfn_membership",
    "gfn_product",
    "combine",
    "contour",
    "pl_interval",
    "bel_interval",
    "upper_cdf",
    "lower_cdf",
    "quantile_upper",
    "quantile_lower",
    "lower_expectation",
    "upper_expectation",
    "prediction_interval",
]

_SQRT2 = math.sqrt(2.0)
# Floor on sigma inside ratios only: turns the sigma2 = 0 case into exact
# step-function limits without a separate code path.
_SIGMA_FLOOR = 1e-150
# Quantile inversion: |F(x) - p| tolerance and iteration cap.
_QUANTILE_TOL = 1e-8
_QUANTILE_MAX_ITER = 200


def _ncdf(z: float) -> float:
    """Standard normal CDF via erfc, accurate to full double precision."""
    return 0.5 * math.erfc(-z / _SQRT2)


def _nsf(z: float) -> float:
    """Standard normal survival function 1 - Phi(z), stable in the tail."""
    return 0.5 * math.erfc(z / _SQRT2)


def _nprob(a: float, b: float) -> float:
    """P(a < Z <= b) for standard normal Z, relative-accurate in both tails.

    Differences of near-equal Phi values lose all precision in the tails;
    differencing erfc values of the same sign does not.
    """
    if b <= a:
        return 0.0
    if a >= 0.0:
        return 0.5 * (math.erfc(a / _SQRT2) - math.erfc(b / _SQRT2))
    if b <= 0.0:
        return 0.5 * (math.erfc(-b / _SQRT2) - math.erfc(-a / _SQRT2))
    return 0.5 * (math.erf(b / _SQRT2) + math.erf(-a / _SQRT2))


def _check_real(name: str, value: float, nonneg: bool = False, allow_inf: bool = False) -> float:
    value = float(value)
    if math.isnan(value):
        raise ValueError(f"{name} must not be NaN")
    if not allow_inf and math.isinf(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if nonneg and value < 0.0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value


@dataclass(frozen=True)
class Gfn:
    """Gaussian fuzzy number: mode ``m`` and precision ``h`` in [0, +inf]."""

    m: float
    h: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", _check_real("m", self.m))
        object.__setattr__(self, "h", _check_real("h", self.h, nonneg=True, allow_inf=True))


@dataclass(frozen=True)
class Grfn:
    """Gaussian random fuzzy number with location ``mu``, variance
    ``sigma2`` and precision ``h`` in [0, +inf]."""

    mu: float
    sigma2: float
    h: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", _check_real("mu", self.mu))
        object.__setattr__(self, "sigma2", _check_real("sigma2", self.sigma2, nonneg=True))
        object.__setattr__(self, "h", _check_real("h", self.h, nonneg=True, allow_inf=True))

    @property
    def is_vacuous(self) -> bool:
        return self.h == 0.0


@dataclass(frozen=True)
class RealInterval:
    """Closed real interval; endpoints may be -inf / +inf."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo = float(self.lo)
        hi = float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"interval endpoints out of order: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def gfn_membership(g: Gfn, x: float) -> float:
    """Membership ``exp(-(h/2)(x-m)^2)``; 1 everywhere when ``h = 0``,
    the indicator of ``x == m`` when ``h = +inf``."""
    if g.h == 0.0:
        return 1.0
    if math.isinf(g.h):
        return 1.0 if x == g.m else 0.0
    return math.exp(-0.5 * g.h * (x - g.m) ** 2)


def gfn_product(g1: Gfn, g2: Gfn) -> Gfn:
    """Normalized product intersection of two Gfns.

    Modes combine precision-weighted, precisions add.  A vacuous operand
    (``h = 0``) is neutral; two vacuous operands return the first
    operand's mode by convention (any mode is observationally the same).
    """
    if g2.h == 0.0:
        return Gfn(g1.m, g1.h)
    if g1.h == 0.0:
        return Gfn(g2.m, g2.h)
    if math.isinf(g1.h) and math.isinf(g2.h):
        return Gfn(0.5 * (g1.m + g2.m), math.inf)
    if math.isinf(g1.h):
        return Gfn(g1.m, math.inf)
    if math.isinf(g2.h):
        return Gfn(g2.m, math.inf)
    ht = g1.h + g2.h
    return Gfn((g1.h * g1.m + g2.h * g2.m) / ht, ht)


def combine(g1: Grfn, g2: Grfn) -> Grfn:
    """Pool two independent Grfns (product-intersection rule).

    Locations combine precision-weighted, variances with squared-precision
    weights, precisions add:

        mu12     = (h1 mu1 + h2 mu2) / (h1 + h2)
        sigma12^2 = (h1^2 s1^2 + h2^2 s2^2) / (h1 + h2)^2
        h12      = h1 + h2

    The operation is commutative and associative, and any vacuous number
    is a two-sided neutral element (returned branch-exact, so neutrality
    holds bit for bit).  Combining two vacuous numbers returns the first
    operand's ``(mu, sigma2)`` with ``h = 0``.
    """
    if g2.h == 0.0:
        return Grfn(g1.mu, g1.sigma2, g1.h)
    if g1.h == 0.0:
        return Grfn(g2.mu, g2.sigma2, g2.h)
    if math.isinf(g1.h) and math.isinf(g2.h):
        return Grfn(0.5 * (g1.mu + g2.mu), 0.25 * (g1.sigma2 + g2.sigma2), math.inf)
    if math.isinf(g1.h):
        return Grfn(g1.mu, g1.sigma2, math.inf)
    if math.isinf(g2.h):
        return Grfn(g2.mu, g2.sigma2, math.inf)
    ht = g1.h + g2.h
    mu = (g1.h * g1.mu + g2.h * g2.mu) / ht
    sigma2 = (g1.h * g1.h * g1.sigma2 + g2.h * g2.h * g2.sigma2) / (ht * ht)
    return Grfn(mu, sigma2, ht)


def contour(g: Grfn, x: float) -> float:
    """Pointwise plausibility pl(x) = Pl({x}).

    ``(1/sqrt(1+h*sigma2)) * exp(-h(x-mu)^2 / (2(1+h*sigma2)))``; equals 1
    everywhere for ``h = 0``, the Gfn membership for ``sigma2 = 0``, and
    collapses to an indicator (sigma2 = 0) or to 0 (sigma2 > 0) for
    ``h = +inf``.
    """
    if g.h == 0.0:
        return 1.0
    if math.isinf(g.h):
        if g.sigma2 == 0.0:
            return 1.0 if x == g.mu else 0.0
        return 0.0
    s2 = 1.0 + g.h * g.sigma2
    return math.exp(-g.h * (x - g.mu) ** 2 / (2.0 * s2)) / math.sqrt(s2)


def _check_bounded(iv: RealInterval) -> None:
    if math.isinf(iv.lo) or math.isinf(iv.hi):
        raise ValueError(
            "interval endpoints must be finite; use upper_cdf/lower_cdf for half-lines"
        )


def pl_interval(g: Grfn, iv: RealInterval) -> float:
    """Plausibility of a bounded interval."""
    _check_bounded(iv)
    if g.h == 0.0:
        return 1.0
    if math.isinf(g.h):
        return _gaussian_prob(g, iv)
    x, y = iv.lo, iv.hi
    sig = max(math.sqrt(g.sigma2), _SIGMA_FLOOR)
    t = sig * math.sqrt(1.0 + g.h * g.sigma2)
    body = _nprob((x - g.mu) / sig, (y - g.mu) / sig)
    tails = contour(g, x) * _ncdf((x - g.mu) / t) + contour(g, y) * _nsf((y - g.mu) / t)
    return min(max(body + tails, 0.0), 1.0)


def bel_interval(g: Grfn, iv: RealInterval) -> float:
    """Belief of a bounded interval; always within [0, pl_interval]."""
    _check_bounded(iv)
    if g.h == 0.0:
        return 0.0
    if math.isinf(g.h):
        return _gaussian_prob(g, iv)
    x, y = iv.lo, iv.hi
    c = x + 0.5 * (y - x)
    hs2 = g.h * g.sigma2
    sig = max(math.sqrt(g.sigma2), _SIGMA_FLOOR)
    t = sig * math.sqrt(1.0 + hs2)
    body = _nprob((x - g.mu) / sig, (y - g.mu) / sig)
    lo_cut = contour(g, x) * _nprob((x - g.mu) / t, (c - g.mu + hs2 * (c - x)) / t)
    hi_cut = contour(g, y) * _nprob((c - g.mu + hs2 * (c - y)) / t, (y - g.mu) / t)
    return min(max(body - lo_cut - hi_cut, 0.0), 1.0)


def _gaussian_prob(g: Grfn, iv: RealInterval) -> float:
    """Gaussian interval probability for the infinite-precision branch."""
    if g.sigma2 == 0.0:
        return 1.0 if iv.contains(g.mu) else 0.0
    sig = math.sqrt(g.sigma2)
    return _nprob((iv.lo - g.mu) / sig, (iv.hi - g.mu) / sig)


def upper_cdf(g: Grfn, y: float) -> float:
    """Upper CDF Pl((-inf, y]); the limit of pl_interval as lo -> -inf."""
    if math.isnan(y):
        raise ValueError("y must not be NaN")
    if math.isinf(y):
        return 1.0 if y > 0 else 0.0
    if g.h == 0.0:
        return 1.0
    if math.isinf(g.h):
        if g.sigma2 == 0.0:
            return 1.0 if y >= g.mu else 0.0
        return _ncdf((y - g.mu) / math.sqrt(g.sigma2))
    sig = max(math.sqrt(g.sigma2), _SIGMA_FLOOR)
    t = sig * math.sqrt(1.0 + g.h * g.sigma2)
    v = _ncdf((y - g.mu) / sig) + contour(g, y) * _nsf((y - g.mu) / t)
    return min(max(v, 0.0), 1.0)


def lower_cdf(g: Grfn, y: float) -> float:
    """Lower CDF Bel((-inf, y]); the limit of bel_interval as lo -> -inf."""
    if math.isnan(y):
        raise ValueError("y must not be NaN")
    if math.isinf(y):
        return 1.0 if y > 0 else 0.0
    if g.h == 0.0:
        return 0.0
    if math.isinf(g.h):
        if g.sigma2 == 0.0:
            return 1.0 if y >= g.mu else 0.0
        return _ncdf((y - g.mu) / math.sqrt(g.sigma2))
    sig = max(math.sqrt(g.sigma2), _SIGMA_FLOOR)
    t = sig * math.sqrt(1.0 + g.h * g.sigma2)
    v = _ncdf((y - g.mu) / sig) - contour(g, y) * _ncdf((y - g.mu) / t)
    return min(max(v, 0.0), 1.0)


def _sigma_eff(g: Grfn) -> float:
    """Combined scale used to seed quantile brackets."""
    return math.sqrt(g.sigma2 + 1.0 / max(g.h, 1e-6))


def _check_level(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability level must lie in (0, 1), got {p}")
    return p


def _invert_cdf(g: Grfn, cdf, p: float) -> float:
    """Expanding-bracket bisection on a continuous nondecreasing CDF."""
    se = _sigma_eff(g)
    lo = g.mu - 8.0 * se
    hi = g.mu + 8.0 * se
    for _ in range(_QUANTILE_MAX_ITER):
        if cdf(g, lo) <= p:
            break
        lo = g.mu - 2.0 * (g.mu - lo)
        if math.isinf(lo):
            raise NumericFault(f"quantile bracket underflowed at level {p}")
    else:
        raise NumericFault(f"no lower bracket found for quantile at level {p}")
    for _ in range(_QUANTILE_MAX_ITER):
        if cdf(g, hi) >= p:
            break
        hi = g.mu + 2.0 * (hi - g.mu)
        if math.isinf(hi):
            raise NumericFault(f"quantile bracket overflowed at level {p}")
    else:
        raise NumericFault(f"no upper bracket found for quantile at level {p}")
    for _ in range(_QUANTILE_MAX_ITER):
        mid = lo + 0.5 * (hi - lo)
        fm = cdf(g, mid)
        if abs(fm - p) <= _QUANTILE_TOL:
            return mid
        if fm < p:
            lo = mid
        else:
            hi = mid
    raise NumericFault(
        f"quantile bisection did not converge to {_QUANTILE_TOL} after "
        f"{_QUANTILE_MAX_ITER} iterations (level {p})"
    )


def quantile_upper(g: Grfn, p: float) -> float:
    """x with upper_cdf(g, x) = p, to within 1e-8 on the CDF scale."""
    p = _check_level(p)
    if g.h == 0.0:
        raise UnboundedQuantile("upper CDF is identically 1 for a vacuous number")
    if math.isinf(g.h):
        if g.sigma2 == 0.0:
            return g.mu
        return g.mu + math.sqrt(g.sigma2) * NormalDist().inv_cdf(p)
    return _invert_cdf(g, upper_cdf, p)


def quantile_lower(g: Grfn, p: float) -> float:
    """x with lower_cdf(g, x) = p, to within 1e-8 on the CDF scale."""
    p = _check_level(p)
    if g.h == 0.0:
        raise UnboundedQuantile("lower CDF is identically 0 for a vacuous number")
    if math.isinf(g.h):
        if g.sigma2 == 0.0:
            return g.mu
        return g.mu + math.sqrt(g.sigma2) * NormalDist().inv_cdf(p)
    return _invert_cdf(g, lower_cdf, p)


def lower_expectation(g: Grfn) -> float:
    """mu - sqrt(pi / (2h)); -inf when vacuous, mu at infinite precision."""
    if g.h == 0.0:
        return -math.inf
    if math.isinf(g.h):
        return g.mu
    return g.mu - math.sqrt(math.pi / (2.0 * g.h))


def upper_expectation(g: Grfn) -> float:
    """mu + sqrt(pi / (2h)); +inf when vacuous, mu at infinite precision."""
    if g.h == 0.0:
        return math.inf
    if math.isinf(g.h):
        return g.mu
    return g.mu + math.sqrt(math.pi / (2.0 * g.h))


def prediction_interval(g: Grfn, level: float) -> RealInterval:
    """Two-sided interval [F_upper^-1(a/2), F_lower^-1(1 - a/2)], a = 1 - level.

    Built from the upper CDF on the left and the lower CDF on the right,
    so it contains the corresponding Gaussian interval whenever ``h`` is
    finite.  Intervals are nested in ``level``.  A vacuous number yields
    the whole real line.
    """
    level = _check_level(level)
    if g.h == 0.0:
        return RealInterval(-math.inf, math.inf)
    alpha = 1.0 - level
    return RealInterval(quantile_upper(g, 0.5 * alpha), quantile_lower(g, 1.0 - 0.5 * alpha))
