"""Shared oracles and generators for the test suite.

The quadrature oracles integrate the *defining* possibility/necessity
integrals of an interval over the random mode.  They are deliberately
independent of the closed forms in the package: membership of a Gaussian
fuzzy number at the endpoints is all they use.
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from evidreg.grfn import Grfn


def pl_quadrature(g: Grfn, lo: float, hi: float) -> float:
    """Plausibility by direct integration: for a mode m, the possibility of
    [lo, hi] is 1 if m is inside, else the membership of the nearest
    endpoint."""
    sig = math.sqrt(g.sigma2)

    def possibility(m):
        if lo <= m <= hi:
            return 1.0
        return max(math.exp(-0.5 * g.h * (lo - m) ** 2),
                   math.exp(-0.5 * g.h * (hi - m) ** 2))

    v, _ = integrate.quad(
        lambda m: stats.norm.pdf(m, g.mu, sig) * possibility(m),
        g.mu - 14 * sig, g.mu + 14 * sig,
        points=[p for p in (lo, hi) if abs(p - g.mu) < 14 * sig],
        limit=300,
    )
    return v


def bel_quadrature(g: Grfn, lo: float, hi: float) -> float:
    """Belief by direct integration: necessity is 1 minus the possibility
    of the complement, which for a mode inside the interval is the larger
    endpoint membership."""
    sig = math.sqrt(g.sigma2)
    mid = 0.5 * (lo + hi)

    def necessity(m):
        if lo <= m <= hi:
            return 1.0 - max(math.exp(-0.5 * g.h * (lo - m) ** 2),
                             math.exp(-0.5 * g.h * (hi - m) ** 2))
        return 0.0

    v, _ = integrate.quad(
        lambda m: stats.norm.pdf(m, g.mu, sig) * necessity(m),
        g.mu - 14 * sig, g.mu + 14 * sig,
        points=[p for p in (lo, mid, hi) if abs(p - g.mu) < 14 * sig],
        limit=300,
    )
    return v


def random_grfn(rng, h_range=(-3.0, 3.0)) -> Grfn:
    """Log-uniform spreads over sensible ranges."""
    return Grfn(
        rng.uniform(-10.0, 10.0),
        10.0 ** rng.uniform(-3.0, 2.0),
        10.0 ** rng.uniform(*h_range),
    )


def cost_highprec(theta, X, y, lam, eps, xi, J, p):
    """Training cost recomputed from scratch in 30-digit arithmetic.

    Written independently of the package (plain loops, mpmath special
    functions) so that central finite differences of it make a clean
    gradient oracle: at step 1e-5 the float64 cost's own rounding noise
    would dominate the quotient, this one's does not.
    """
    import mpmath as mp

    with mp.workdps(30):
        sq2 = mp.sqrt(2)

        def nprob(a, b):
            if a >= 0:
                return (mp.erfc(a / sq2) - mp.erfc(b / sq2)) / 2
            if b <= 0:
                return (mp.erfc(-b / sq2) - mp.erfc(-a / sq2)) / 2
            return (mp.erf(b / sq2) + mp.erf(-a / sq2)) / 2

        th = [mp.mpf(float(t)) for t in theta]
        o = 0
        center = [th[o + j * p:o + (j + 1) * p] for j in range(J)]; o += J * p
        scale = th[o:o + J]; o += J
        slope = [th[o + j * p:o + (j + 1) * p] for j in range(J)]; o += J * p
        intercept = th[o:o + J]; o += J
        log_var = th[o:o + J]; o += J
        root_prec = th[o:o + J]
        var = [mp.e**v for v in log_var]
        prec = [u * u for u in root_prec]
        lam, eps, xi = mp.mpf(lam), mp.mpf(eps), mp.mpf(xi)
        floor = mp.mpf("1e-300")
        total = mp.mpf(0)
        for i in range(X.shape[0]):
            xs = [mp.mpf(float(v)) for v in X[i]]
            S = mp.mpf(0)
            num_mu = mp.mpf(0)
            num_v = mp.mpf(0)
            for j in range(J):
                d2 = sum((xs[k] - center[j][k]) ** 2 for k in range(p))
                w = mp.e ** (-scale[j] ** 2 * d2) * prec[j]
                S += w
                num_mu += w * (sum(slope[j][k] * xs[k] for k in range(p))
                               + intercept[j])
                num_v += w * w * var[j]
            M = num_mu / S
            V = num_v / S**2
            yy = mp.mpf(float(y[i]))
            s2 = 1 + S * V
            sig = mp.sqrt(V)
            t = sig * mp.sqrt(s2)
            da = (yy - eps) - M
            db = (yy + eps) - M
            dm = yy - M
            pla = mp.e ** (-S * da**2 / (2 * s2)) / mp.sqrt(s2)
            plb = mp.e ** (-S * db**2 / (2 * s2)) / mp.sqrt(s2)
            G0 = nprob(da / sig, db / sig)
            pl = G0 + pla * mp.erfc(-(da / t) / sq2) / 2 \
                + plb * mp.erfc((db / t) / sq2) / 2
            ma = (dm + S * V * eps) / t
            mb = (dm - S * V * eps) / t
            bel = G0 - pla * nprob(da / t, ma) - plb * nprob(mb, db / t)
            total += -lam * mp.log(max(bel, floor)) \
                - (1 - lam) * mp.log(max(pl, floor))
        return total / X.shape[0] + xi / J * sum(prec)


def sigma_eff(g: Grfn) -> float:
    return math.sqrt(g.sigma2 + 1.0 / max(g.h, 1e-6))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
