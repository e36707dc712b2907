"""Fitting the evidential regressor.

The per-sample loss scores the output random fuzzy number against the
observed response y through a small interval [y - eps, y + eps]:

    loss = -lam * ln Bel([y]_eps) - (1 - lam) * ln Pl([y]_eps)

Belief rewards precise, well-centered evidence; plausibility rewards
caution, so ``lam`` sets how assertive the fitted precisions become.
The training objective is the mean loss plus ``(xi / J) * sum_j h_j``,
which prices total claimed precision and prunes prototypes (a prototype
with h_j = 0 contributes nothing for any input).

Free parameters are optimized in an unconstrained reparameterization:
precision as ``h = u^2`` (can reach exactly 0), variance as
``sigma2 = exp(v)`` (stays positive).  Gradients are closed-form and are
pinned to central finite differences by `tests/test_train.py`.

The optimizer is a mini-batch first-order method with per-parameter step
scaling from EMA-accumulated squared gradients plus momentum (Adam-style
bias-corrected updates); early stopping watches a 20% internal
validation split.  Per-sample loss terms are independent, so batches
vectorize; cross-validation folds are embarrassingly parallel and can
run on multiple processes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .data import Dataset, Standardization, standardize
from .errors import InputError, NumericFault
from .grfn import Grfn, RealInterval, bel_interval, pl_interval
from .model import Model, Prototype, forward_batch

__all__ = [
    "TrainConfig",
    "TrainTrace",
    "loss",
    "cost",
    "gradient",
    "model_to_vector",
    "vector_to_model",
    "kmeans_init",
    "init_params",
    "fit",
    "cross_validate_xi",
]

_BEL_FLOOR = 1e-300
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters and optimizer settings for one fit.

    ``epsilon`` is the absolute half-width of the target interval; when
    following the usual convention of 1% of the response spread, resolve
    ``0.01 * y.std()`` before constructing the config.  ``decay`` and
    ``momentum`` are the EMA coefficients of the squared-gradient and
    gradient accumulators.  ``fixed_scale`` freezes every prototype's
    activation decay at the given value (useful to force a global linear
    model with ``n_prototypes = 1, fixed_scale = 0``).
    """

    n_prototypes: int = 30
    lam: float = 0.9
    epsilon: float = 0.01
    xi: float = 1e-3
    learning_rate: float = 0.01
    momentum: float = 0.9
    decay: float = 0.999
    batch_size: int = 32
    max_epochs: int = 300
    patience: int = 50
    seed: int = 0
    fixed_scale: float | None = None

    def __post_init__(self) -> None:
        if self.n_prototypes < 1:
            raise InputError("n_prototypes must be >= 1")
        if not 0.0 <= self.lam <= 1.0:
            raise InputError(f"lam must lie in [0, 1], got {self.lam}")
        if not self.epsilon > 0.0:
            raise InputError(f"epsilon must be > 0, got {self.epsilon}")
        if self.xi < 0.0:
            raise InputError(f"xi must be >= 0, got {self.xi}")
        if self.learning_rate <= 0.0:
            raise InputError("learning_rate must be > 0")
        if not 0.0 <= self.momentum < 1.0 or not 0.0 < self.decay <= 1.0:
            raise InputError("momentum must lie in [0, 1), decay in (0, 1]")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 0:
            raise InputError("batch_size/max_epochs must be >= 1, patience >= 0")


@dataclass
class TrainTrace:
    """Per-epoch costs plus how and where the run stopped."""

    train_cost: list[float] = field(default_factory=list)
    val_cost: list[float] = field(default_factory=list)
    stop_reason: str = "max_epochs"
    best_epoch: int = 0

    @property
    def n_epochs(self) -> int:
        return len(self.train_cost)

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_cost,val_cost\n")
            for e, (tc, vc) in enumerate(zip(self.train_cost, self.val_cost), start=1):
                fh.write(f"{e},{tc!r},{vc!r}\n")


# ---------------------------------------------------------------------------
# Loss: scalar reference and vectorized batch versions
# ---------------------------------------------------------------------------


def loss(y: float, g: Grfn, lam: float, epsilon: float) -> float:
    """Evidential loss of one prediction against one observed response.

    Belief of the target interval is floored at 1e-300 inside the log, so
    vacuous evidence yields a large finite value instead of diverging.
    """
    if not epsilon > 0.0:
        raise InputError(f"epsilon must be > 0, got {epsilon}")
    if not 0.0 <= lam <= 1.0:
        raise InputError(f"lam must lie in [0, 1], got {lam}")
    iv = RealInterval(y - epsilon, y + epsilon)
    b = max(bel_interval(g, iv), _BEL_FLOOR)
    p = max(pl_interval(g, iv), _BEL_FLOOR)
    return -lam * math.log(b) - (1.0 - lam) * math.log(p)


def _npdf(z):
    return np.exp(-0.5 * z * z) * _INV_SQRT_2PI


def _ncdf(z):
    return 0.5 * special.erfc(-z / _SQRT2)


def _nsf(z):
    return 0.5 * special.erfc(z / _SQRT2)


def _nprob(a, b):
    """P(a < Z <= b) elementwise (a <= b), tail-stable like the scalar twin."""
    hi = 0.5 * (special.erfc(a / _SQRT2) - special.erfc(b / _SQRT2))
    lo = 0.5 * (special.erfc(-b / _SQRT2) - special.erfc(-a / _SQRT2))
    mid = 0.5 * (special.erf(b / _SQRT2) - special.erf(a / _SQRT2))
    out = np.where(a >= 0.0, hi, np.where(b <= 0.0, lo, mid))
    return np.maximum(out, 0.0)


def _interval_evidence(mu, V, S, y, eps, lam, want_grad):
    """Vectorized loss of the intervals [y - eps, y + eps].

    ``mu, V, S`` are the per-sample output parameters (location, variance,
    precision).  Returns ``(L,)`` or ``(L, dL/dmu, dL/dV, dL/dS)``.
    Matches the scalar path through ``grfn``; a cross-check test holds the
    two together.
    """
    sig = np.maximum(np.sqrt(V), 1e-150)
    s2 = 1.0 + S * V
    t = sig * np.sqrt(s2)
    t2 = t * t
    da = (y - eps) - mu
    db = (y + eps) - mu
    dm = y - mu
    hv = S * V
    za = da / sig
    zb = db / sig
    Za = da / t
    Zb = db / t
    Ma = (dm + hv * eps) / t
    Mb = (dm - hv * eps) / t
    lpa = -0.5 * np.log(s2) - S * da * da / (2.0 * s2)
    lpb = -0.5 * np.log(s2) - S * db * db / (2.0 * s2)
    pla = np.exp(lpa)
    plb = np.exp(lpb)
    G0 = _nprob(za, zb)
    GA = _nprob(Za, Ma)
    GB = _nprob(Mb, Zb)
    cdf_Za = _ncdf(Za)
    sf_Zb = _nsf(Zb)
    pl = np.clip(G0 + pla * cdf_Za + plb * sf_Zb, 0.0, 1.0)
    bel = np.clip(G0 - pla * GA - plb * GB, 0.0, 1.0)
    vac = S == 0.0
    if vac.any():
        # exactly vacuous evidence: Pl = 1 and Bel = 0, not their float echo
        pl = np.where(vac, 1.0, pl)
        bel = np.where(vac, 0.0, bel)
    L = -lam * np.log(np.maximum(bel, _BEL_FLOOR)) \
        - (1.0 - lam) * np.log(np.maximum(pl, _BEL_FLOOR))
    if not want_grad:
        return (L,)

    fza, fzb = _npdf(za), _npdf(zb)
    fZa, fZb = _npdf(Za), _npdf(Zb)
    fMa, fMb = _npdf(Ma), _npdf(Mb)
    Vs = np.maximum(V, 1e-300)
    dt2_dV = 1.0 + 2.0 * hv          # d(t^2)/dV
    dt2_dS = V * V

    def belpl_partials(dza, dzb, dZa, dZb, dMa, dMb, dlpa, dlpb):
        dG0 = fzb * dzb - fza * dza
        dPl = (dG0 + pla * dlpa * cdf_Za + pla * fZa * dZa
               + plb * dlpb * sf_Zb - plb * fZb * dZb)
        dGA = fMa * dMa - fZa * dZa
        dGB = fZb * dZb - fMb * dMb
        dBel = dG0 - pla * (dlpa * GA + dGA) - plb * (dlpb * GB + dGB)
        return dBel, dPl

    # location
    dza_m = -1.0 / sig
    dZ_m = -1.0 / t
    dBel_m, dPl_m = belpl_partials(
        dza_m, dza_m, dZ_m, dZ_m, dZ_m, dZ_m,
        S * da / s2, S * db / s2,
    )
    # variance
    dza_v = -za / (2.0 * Vs)
    dzb_v = -zb / (2.0 * Vs)
    shrink_v = dt2_dV / (2.0 * t2)
    dBel_v, dPl_v = belpl_partials(
        dza_v, dzb_v,
        -Za * shrink_v, -Zb * shrink_v,
        S * eps / t - Ma * shrink_v, -S * eps / t - Mb * shrink_v,
        -S / (2.0 * s2) + S * S * da * da / (2.0 * s2 * s2),
        -S / (2.0 * s2) + S * S * db * db / (2.0 * s2 * s2),
    )
    # precision
    zero = np.zeros_like(mu)
    shrink_s = dt2_dS / (2.0 * t2)
    dBel_s, dPl_s = belpl_partials(
        zero, zero,
        -Za * shrink_s, -Zb * shrink_s,
        V * eps / t - Ma * shrink_s, -V * eps / t - Mb * shrink_s,
        -V / (2.0 * s2) - da * da / (2.0 * s2 * s2),
        -V / (2.0 * s2) - db * db / (2.0 * s2 * s2),
    )

    cb = np.where(bel > _BEL_FLOOR, -lam / np.maximum(bel, _BEL_FLOOR), 0.0)
    cp = np.where(pl > _BEL_FLOOR, -(1.0 - lam) / np.maximum(pl, _BEL_FLOOR), 0.0)
    dL_mu = cb * dBel_m + cp * dPl_m
    dL_V = cb * dBel_v + cp * dPl_v
    dL_S = cb * dBel_s + cp * dPl_s
    return L, dL_mu, dL_V, dL_S


# ---------------------------------------------------------------------------
# Flat parameter vector <-> model
# ---------------------------------------------------------------------------


def _unpack(theta: np.ndarray, J: int, p: int):
    o = 0
    center = theta[o:o + J * p].reshape(J, p); o += J * p
    scale = theta[o:o + J]; o += J
    slope = theta[o:o + J * p].reshape(J, p); o += J * p
    intercept = theta[o:o + J]; o += J
    log_var = theta[o:o + J]; o += J
    root_prec = theta[o:o + J]; o += J
    return center, scale, slope, intercept, log_var, root_prec


def _scale_slice(J: int, p: int) -> slice:
    return slice(J * p, J * p + J)


def model_to_vector(model: Model) -> np.ndarray:
    """Flatten to the unconstrained layout
    [centers, scales, slopes, intercepts, ln(variance), sqrt(precision)]."""
    pr = model.prototypes
    return np.concatenate([
        np.stack([q.center for q in pr]).ravel(),
        [q.scale for q in pr],
        np.stack([q.slope for q in pr]).ravel(),
        [q.intercept for q in pr],
        [math.log(q.variance) for q in pr],
        [math.sqrt(q.precision) for q in pr],
    ])


def vector_to_model(theta: np.ndarray, template: Model) -> Model:
    """Inverse of ``model_to_vector``; scaler and metadata come from the template."""
    J, p = template.n_prototypes, template.input_dim
    center, scale, slope, intercept, log_var, root_prec = _unpack(np.asarray(theta, float), J, p)
    protos = tuple(
        Prototype(center[j].copy(), scale[j], slope[j].copy(), intercept[j],
                  math.exp(log_var[j]), root_prec[j] ** 2)
        for j in range(J)
    )
    return replace(template, prototypes=protos)


def _cost_grad(theta, X, y, lam, eps, xi, J, p, want_grad=True):
    """Cost (and gradient) of the flat parameter vector on one batch of
    standardized features.

    Intermediate over/underflows are silenced: callers check the result
    for finiteness and raise NumericFault with the offending index.
    """
    with np.errstate(all="ignore"):
        return _cost_grad_raw(theta, X, y, lam, eps, xi, J, p, want_grad)


def _cost_grad_raw(theta, X, y, lam, eps, xi, J, p, want_grad):
    center, scale, slope, intercept, log_var, root_prec = _unpack(theta, J, p)
    var = np.exp(log_var)
    prec = root_prec**2
    diff = X[:, None, :] - center[None, :, :]
    d2 = np.einsum("njp,njp->nj", diff, diff)
    act = np.exp(-(scale**2)[None, :] * d2)
    W = act * prec[None, :]
    S = W.sum(axis=1)
    safe = np.where(S > 0.0, S, 1.0)
    muj = X @ slope.T + intercept[None, :]
    M = (W * muj).sum(axis=1) / safe
    V = (W**2 * var[None, :]).sum(axis=1) / safe**2
    dead = S == 0.0
    if dead.any():
        M = np.where(dead, muj[:, 0], M)
        V = np.where(dead, var[0], V)
    terms = _interval_evidence(M, V, S, y, eps, lam, want_grad)
    total = float(terms[0].mean() + xi / J * prec.sum())
    if not want_grad:
        return total, None
    n = X.shape[0]
    _, dmu, dV, dS = terms
    if dead.any():
        dmu = np.where(dead, 0.0, dmu)
        dV = np.where(dead, 0.0, dV)
    dW = (dmu[:, None] * (muj - M[:, None]) / safe[:, None]
          + dV[:, None] * (2.0 * W * var[None, :] / safe[:, None]**2
                           - 2.0 * V[:, None] / safe[:, None])
          + dS[:, None])
    dmuj = dmu[:, None] * W / safe[:, None]
    g_center = np.einsum("nj,njp->jp", dW * 2.0 * (scale**2)[None, :] * W, diff) / n
    g_scale = (dW * W * (-2.0 * scale[None, :] * d2)).sum(axis=0) / n
    g_slope = np.einsum("nj,np->jp", dmuj, X) / n
    g_intercept = dmuj.sum(axis=0) / n
    g_log_var = (dV[:, None] * W**2 / safe[:, None]**2).sum(axis=0) / n * var
    g_root_prec = (dW * act).sum(axis=0) / n * 2.0 * root_prec \
        + (xi / J) * 2.0 * root_prec
    grad = np.concatenate([
        g_center.ravel(), g_scale, g_slope.ravel(), g_intercept, g_log_var, g_root_prec,
    ])
    return total, grad


def cost(model: Model, data: Dataset, cfg: TrainConfig) -> float:
    """Mean loss over the dataset plus the precision penalty (xi / J) sum h_j."""
    y = data.require_response()
    if data.n == 0:
        raise InputError("cost needs a nonempty dataset")
    Xs = _standardized_features(model, data)
    theta = model_to_vector(model)
    value, _ = _cost_grad(theta, Xs, y, cfg.lam, cfg.epsilon, cfg.xi,
                          model.n_prototypes, model.input_dim, want_grad=False)
    return value


def gradient(model: Model, batch: Dataset, cfg: TrainConfig) -> np.ndarray:
    """Gradient of ``cost`` w.r.t. the flat unconstrained parameter vector
    (layout of ``model_to_vector``)."""
    y = batch.require_response()
    if batch.n == 0:
        raise InputError("gradient needs a nonempty batch")
    Xs = _standardized_features(model, batch)
    theta = model_to_vector(model)
    _, grad = _cost_grad(theta, Xs, y, cfg.lam, cfg.epsilon, cfg.xi,
                         model.n_prototypes, model.input_dim, want_grad=True)
    _check_grad_finite(grad)
    return grad


def _standardized_features(model: Model, data: Dataset) -> np.ndarray:
    if data.p != model.input_dim:
        raise InputError(
            f"data has {data.p} features, model expects {model.input_dim}"
        )
    return model.scaler.transform(data.X)


def _check_grad_finite(grad: np.ndarray) -> None:
    bad = ~np.isfinite(grad)
    if bad.any():
        raise NumericFault(
            f"non-finite gradient at parameter index {int(np.flatnonzero(bad)[0])}"
        )


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------


def kmeans_init(X, J: int, seed: int = 0) -> np.ndarray:
    """Lloyd's algorithm with k-means++ seeding.

    Stops when the largest center movement drops below 1e-6 or after 100
    sweeps.  An emptied cluster is repaired by moving its center onto the
    point currently farthest from its assigned center.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < J:
        raise InputError(f"k-means needs at least J={J} points, got {n}")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp(X, J, rng)
    for _ in range(100):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        new = centers.copy()
        counts = np.bincount(labels, minlength=J)
        for j in range(J):
            if counts[j]:
                new[j] = X[labels == j].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            order = np.argsort(-d2[np.arange(n), labels])
            for rank, j in enumerate(empty):
                idx = order[rank]
                new[j] = X[idx]
                labels[idx] = j
        move = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if move < 1e-6:
            break
    return centers


def _kmeans_pp(X: np.ndarray, J: int, rng) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((J, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for k in range(1, J):
        total = d2.sum()
        if total > 0.0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[k] = X[idx]
        d2 = np.minimum(d2, ((X - centers[k]) ** 2).sum(axis=1))
    return centers


def init_params(
    data: Dataset,
    centers: np.ndarray,
    cfg: TrainConfig,
    scaler: Standardization | None = None,
    feature_names: tuple[str, ...] | None = None,
    response_name: str | None = None,
) -> Model:
    """Initial model around k-means centers.

    Per cluster: intercept = mean response, variance = response variance
    (floored at 1e-4 of the global response variance), precision = 1,
    slope = 0, and scale = 1 / (sqrt(2) * mean member distance) so that a
    typical member activates at about exp(-1/4); scales are floored at
    1e-3.  ``cfg.fixed_scale`` overrides every scale.
    """
    y = data.require_response()
    centers = np.asarray(centers, dtype=float)
    J = centers.shape[0]
    d2 = ((data.X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    var_y = float(y.var())
    var_floor = max(1e-4 * var_y, 1e-12)
    prototypes = []
    for j in range(J):
        members = labels == j
        if members.any():
            alpha = float(y[members].mean())
            s2 = max(float(y[members].var()), var_floor)
            dbar = float(np.sqrt(d2[members, j]).mean())
        else:
            alpha = float(y.mean())
            s2 = max(var_y, var_floor)
            dbar = 0.0
        gamma = 1.0 / (math.sqrt(2.0) * dbar) if dbar > 0.0 else 1.0
        gamma = max(gamma, 1e-3)
        if cfg.fixed_scale is not None:
            gamma = cfg.fixed_scale
        prototypes.append(
            Prototype(centers[j].copy(), gamma, np.zeros(data.p), alpha, s2, 1.0)
        )
    if scaler is None:
        scaler = Standardization(np.zeros(data.p), np.ones(data.p))
    return Model(tuple(prototypes), data.p, scaler, cfg.lam, cfg.epsilon, cfg.xi,
                 feature_names, response_name)


# ---------------------------------------------------------------------------
# Optimization
# ---------------------------------------------------------------------------


def fit(data: Dataset, cfg: TrainConfig) -> tuple[Model, TrainTrace]:
    """Standardize, initialize from k-means, optimize, early-stop.

    Returns the model with the best validation cost seen, plus the trace.
    Fully deterministic for a fixed ``cfg.seed``.
    """
    y = data.require_response()
    n = data.n
    if n < cfg.n_prototypes:
        raise InputError(
            f"need at least n_prototypes={cfg.n_prototypes} samples, got {n}"
        )
    std_data, scaler = standardize(data)
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(n)
    n_val = max(min(n // 5, n - cfg.n_prototypes), 0)
    val_idx = perm[:n_val]
    tr_idx = perm[n_val:]
    Xtr, ytr = std_data.X[tr_idx], y[tr_idx]
    Xval, yval = std_data.X[val_idx], y[val_idx]

    centers = kmeans_init(Xtr, cfg.n_prototypes, seed=cfg.seed)
    model0 = init_params(Dataset(Xtr, ytr), centers, cfg, scaler=scaler,
                         feature_names=data.feature_names,
                         response_name=data.response_name)
    J, p = cfg.n_prototypes, data.p
    theta = model_to_vector(model0)
    frozen = np.zeros(theta.shape, dtype=bool)
    if cfg.fixed_scale is not None:
        frozen[_scale_slice(J, p)] = True

    def full_cost(X, yv):
        value, _ = _cost_grad(theta, X, yv, cfg.lam, cfg.epsilon, cfg.xi, J, p,
                              want_grad=False)
        return value

    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    step_count = 0
    initial_cost = full_cost(Xtr, ytr)
    trace = TrainTrace()
    best_val = math.inf
    best_theta = theta.copy()
    best_epoch = 0
    stale = 0
    reason = "max_epochs"
    n_tr = len(tr_idx)
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(n_tr)
        for start in range(0, n_tr, cfg.batch_size):
            sel = order[start:start + cfg.batch_size]
            _, g = _cost_grad(theta, Xtr[sel], ytr[sel], cfg.lam, cfg.epsilon,
                              cfg.xi, J, p, want_grad=True)
            _check_grad_finite(g)
            g[frozen] = 0.0
            step_count += 1
            m = cfg.momentum * m + (1.0 - cfg.momentum) * g
            v = cfg.decay * v + (1.0 - cfg.decay) * g * g
            m_hat = m / (1.0 - cfg.momentum**step_count)
            v_hat = v / (1.0 - cfg.decay**step_count)
            theta -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + 1e-8)
        train_cost = full_cost(Xtr, ytr)
        val_cost = full_cost(Xval, yval) if n_val else train_cost
        trace.train_cost.append(train_cost)
        trace.val_cost.append(val_cost)
        # The first epochs can regress from a good init (adaptive-step
        # warm-up lasts up to ~10 epochs), so judge misconfiguration on a
        # longer window.
        if epoch == min(15, cfg.max_epochs) and min(trace.train_cost) >= initial_cost:
            warnings.warn(
                "training cost did not decrease over the first epochs; "
                "check the learning rate and batch size",
                stacklevel=2,
            )
        if val_cost < best_val:
            best_val = val_cost
            best_theta = theta.copy()
            best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale > cfg.patience:
                reason = "early_stopping"
                break
    trace.stop_reason = reason
    trace.best_epoch = best_epoch
    return vector_to_model(best_theta, model0), trace


def cross_validate_xi(
    data: Dataset,
    grid,
    folds: int,
    cfg: TrainConfig,
    n_jobs: int = 1,
) -> tuple[float, list[tuple[float, float]]]:
    """Pick the precision penalty by k-fold cross-validated MSE.

    Fold assignment is a seeded shuffle from ``cfg.seed``; each (xi, fold)
    pair is one independent ``fit``, so exactly ``folds * len(grid)`` fits
    run.  Ties break toward the larger (more regularized) xi.  Returns the
    winner and the (xi, mean MSE) table in grid order.
    """
    grid = [float(x) for x in grid]
    if not grid:
        raise InputError("xi grid must be nonempty")
    if folds < 2:
        raise InputError(f"need at least 2 folds, got {folds}")
    y = data.require_response()
    if data.n // folds < 1:
        raise InputError(f"fold size < 1 with n={data.n} and {folds} folds")
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(data.n)
    parts = np.array_split(perm, folds)

    def fold_mse(xi: float, k: int) -> float:
        test_idx = np.sort(parts[k])
        train_idx = np.sort(np.concatenate([parts[i] for i in range(folds) if i != k]))
        mdl, _ = fit(data.subset(train_idx), replace(cfg, xi=xi))
        mu, _, _ = forward_batch(mdl, data.X[test_idx])
        return float(np.mean((mu - y[test_idx]) ** 2))

    tasks = [(xi, k) for xi in grid for k in range(folds)]
    if n_jobs == 1:
        flat = [fold_mse(xi, k) for xi, k in tasks]
    else:
        from joblib import Parallel, delayed

        flat = Parallel(n_jobs=n_jobs)(delayed(fold_mse)(xi, k) for xi, k in tasks)
    table = []
    for i, xi in enumerate(grid):
        chunk = flat[i * folds:(i + 1) * folds]
        table.append((xi, float(np.mean(chunk))))
    best_mse = min(mse for _, mse in table)
    best_xi = max(xi for xi, mse in table if mse == best_mse)
    return best_xi, table
