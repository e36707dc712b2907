"""Prototype-based evidential regressor: forward pass and persistence.

Each prototype is one source of evidence about the response.  For an
input x (in standardized feature space) prototype j contributes the
random fuzzy number

    Grfn(slope_j . x + intercept_j,  variance_j,  a_j(x) * precision_j)

where the activation a_j(x) = exp(-scale_j^2 * ||x - center_j||^2) decays
with distance, so remote prototypes fade into vacuity instead of voting.
The model output is the combination of all J contributions, which stays
in closed form:

    h(x)      = sum_j a_j h_j
    mu(x)     = sum_j a_j h_j mu_j(x) / h(x)
    sigma2(x) = sum_j (a_j h_j)^2 s_j^2 / h(x)^2

``forward`` computes these sums directly; a sequential fold of
``grfn.combine`` over the per-prototype numbers is the same quantity and
is kept as the test oracle.

Standardization statistics live on the model, so prediction accepts raw
features and a saved model file is self-contained.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .data import Standardization
from .errors import InputError
from .grfn import Grfn

__all__ = [
    "Prototype",
    "Model",
    "activation",
    "prototype_grfn",
    "forward",
    "forward_batch",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "grfn-regressor"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Prototype:
    """Parameter block of one evidence source (standardized feature space)."""

    center: np.ndarray      # (p,) reference point
    scale: float            # activation decay; enters squared
    slope: np.ndarray       # (p,) local linear coefficient
    intercept: float
    variance: float         # > 0, aleatory spread of this source
    precision: float        # >= 0, evidential weight; 0 removes the prototype

    def __post_init__(self) -> None:
        center = np.asarray(self.center, dtype=float)
        slope = np.asarray(self.slope, dtype=float)
        if center.ndim != 1 or slope.shape != center.shape:
            raise InputError("prototype center and slope must be 1-D with equal length")
        if not (np.isfinite(center).all() and np.isfinite(slope).all()):
            raise InputError("prototype parameters must be finite")
        if not self.variance > 0.0:
            raise InputError(f"prototype variance must be > 0, got {self.variance}")
        if not self.precision >= 0.0:
            raise InputError(f"prototype precision must be >= 0, got {self.precision}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "slope", slope)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "variance", float(self.variance))
        object.__setattr__(self, "precision", float(self.precision))


@dataclass(frozen=True)
class Model:
    """Trained regressor: J prototypes plus the preprocessing statistics
    and the hyperparameters it was fitted with (kept for provenance)."""

    prototypes: tuple[Prototype, ...]
    input_dim: int
    scaler: Standardization
    lam: float
    epsilon: float
    xi: float
    feature_names: tuple[str, ...] | None = None
    response_name: str | None = None

    def __post_init__(self) -> None:
        if not self.prototypes:
            raise InputError("a model needs at least one prototype")
        protos = tuple(self.prototypes)
        for pr in protos:
            if pr.center.shape[0] != self.input_dim:
                raise InputError(
                    f"prototype dimension {pr.center.shape[0]} does not match "
                    f"input_dim {self.input_dim}"
                )
        if self.scaler.mean.shape[0] != self.input_dim:
            raise InputError("standardization statistics do not match input_dim")
        object.__setattr__(self, "prototypes", protos)

    @property
    def n_prototypes(self) -> int:
        return len(self.prototypes)


def _check_vector(x, p: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (p,):
        raise InputError(f"expected input vector of length {p}, got shape {x.shape}")
    return x


def activation(proto: Prototype, x) -> float:
    """exp(-scale^2 * ||x - center||^2), in (0, 1]."""
    x = _check_vector(x, proto.center.shape[0])
    d2 = float(np.sum((x - proto.center) ** 2))
    return math.exp(-proto.scale ** 2 * d2)


def prototype_grfn(proto: Prototype, x) -> Grfn:
    """The evidence contributed by one prototype at input x
    (x already in standardized feature space)."""
    x = _check_vector(x, proto.center.shape[0])
    mu = float(proto.slope @ x + proto.intercept)
    return Grfn(mu, proto.variance, activation(proto, x) * proto.precision)


def _stacked(model: Model):
    pr = model.prototypes
    return (
        np.stack([q.center for q in pr]),
        np.array([q.scale for q in pr]),
        np.stack([q.slope for q in pr]),
        np.array([q.intercept for q in pr]),
        np.array([q.variance for q in pr]),
        np.array([q.precision for q in pr]),
    )


def propagate(center, scale, slope, intercept, variance, precision, X):
    """Closed-form output parameters for a batch of standardized inputs.

    Returns (mu, sigma2, h) arrays of length n.  Rows where every
    contribution is vacuous fall back to the first prototype's local
    parameters with h = 0, matching a fold of ``grfn.combine``.
    """
    diff = X[:, None, :] - center[None, :, :]
    d2 = np.einsum("njp,njp->nj", diff, diff)
    act = np.exp(-(scale**2)[None, :] * d2)
    weight = act * precision[None, :]
    h = weight.sum(axis=1)
    mu_j = X @ slope.T + intercept[None, :]
    safe = np.where(h > 0.0, h, 1.0)
    mu = (weight * mu_j).sum(axis=1) / safe
    sigma2 = (weight**2 * variance[None, :]).sum(axis=1) / safe**2
    dead = h == 0.0
    if dead.any():
        mu = np.where(dead, mu_j[:, 0], mu)
        sigma2 = np.where(dead, variance[0], sigma2)
    return mu, sigma2, h


def forward_batch(model: Model, X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized forward pass over raw-feature rows; returns (mu, sigma2, h)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise InputError(
            f"expected feature matrix with {model.input_dim} columns, got shape {X.shape}"
        )
    Xs = model.scaler.transform(X)
    return propagate(*_stacked(model), Xs)


def forward(model: Model, x) -> Grfn:
    """Predict one raw-feature input; the combined evidence of all prototypes."""
    x = _check_vector(x, model.input_dim)
    mu, sigma2, h = forward_batch(model, x[None, :])
    return Grfn(float(mu[0]), float(sigma2[0]), float(h[0]))


def _fmt_floats(values) -> str:
    return " ".join(repr(float(v)) for v in np.atleast_1d(values))


def save_model(model: Model, path: str) -> None:
    """Serialize to the versioned key-value text format.

    repr() round-trips doubles exactly, so a save/load cycle reproduces
    predictions bit for bit.
    """
    lines = [
        f"format {MODEL_FORMAT}",
        f"version {MODEL_VERSION}",
        f"input_dim {model.input_dim}",
        f"prototype_count {model.n_prototypes}",
        f"lambda {model.lam!r}",
        f"epsilon {model.epsilon!r}",
        f"xi {model.xi!r}",
    ]
    if model.feature_names is not None:
        lines.append("feature_names " + json.dumps(list(model.feature_names)))
    if model.response_name is not None:
        lines.append("response_name " + json.dumps(model.response_name))
    lines.append("feature_mean " + _fmt_floats(model.scaler.mean))
    lines.append("feature_std " + _fmt_floats(model.scaler.std))
    for j, pr in enumerate(model.prototypes):
        lines.append(f"prototype {j}")
        lines.append("center " + _fmt_floats(pr.center))
        lines.append(f"scale {pr.scale!r}")
        lines.append("slope " + _fmt_floats(pr.slope))
        lines.append(f"intercept {pr.intercept!r}")
        lines.append(f"variance {pr.variance!r}")
        lines.append(f"precision {pr.precision!r}")
    lines.append("end")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


class _ModelReader:
    def __init__(self, path: str):
        self.path = path
        try:
            with open(path, encoding="utf-8") as fh:
                self.lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        except FileNotFoundError:
            raise InputError(f"no such model file: {path}") from None
        self.pos = 0

    def fail(self, message: str):
        raise InputError(f"{self.path}: corrupt model file: {message}")

    def take(self, key: str) -> str:
        if self.pos >= len(self.lines):
            self.fail(f"unexpected end of file, wanted {key!r}")
        line = self.lines[self.pos]
        self.pos += 1
        head, _, rest = line.partition(" ")
        if head != key:
            self.fail(f"expected {key!r}, found {head!r} on line {self.pos}")
        return rest

    def peek_key(self) -> str:
        if self.pos >= len(self.lines):
            return ""
        return self.lines[self.pos].partition(" ")[0]

    def floats(self, key: str, count: int) -> np.ndarray:
        raw = self.take(key).split()
        if len(raw) != count:
            self.fail(f"{key!r} expects {count} values, found {len(raw)}")
        try:
            return np.array([float(v) for v in raw])
        except ValueError:
            self.fail(f"{key!r} has a non-numeric value")

    def scalar(self, key: str) -> float:
        return float(self.floats(key, 1)[0])

    def integer(self, key: str) -> int:
        raw = self.take(key)
        try:
            return int(raw)
        except ValueError:
            self.fail(f"{key!r} has a non-integer value {raw!r}")


def load_model(path: str) -> Model:
    """Parse a saved model; raises InputError on any structural problem."""
    r = _ModelReader(path)
    if r.take("format") != MODEL_FORMAT:
        r.fail(f"not a {MODEL_FORMAT} file")
    version = r.integer("version")
    if version != MODEL_VERSION:
        r.fail(f"unsupported version {version}")
    p = r.integer("input_dim")
    count = r.integer("prototype_count")
    if p < 1 or count < 1:
        r.fail("input_dim and prototype_count must be positive")
    lam = r.scalar("lambda")
    epsilon = r.scalar("epsilon")
    xi = r.scalar("xi")
    feature_names = None
    response_name = None
    if r.peek_key() == "feature_names":
        try:
            feature_names = tuple(json.loads(r.take("feature_names")))
        except (json.JSONDecodeError, TypeError):
            r.fail("feature_names is not a JSON list")
    if r.peek_key() == "response_name":
        try:
            response_name = str(json.loads(r.take("response_name")))
        except json.JSONDecodeError:
            r.fail("response_name is not a JSON string")
    mean = r.floats("feature_mean", p)
    std = r.floats("feature_std", p)
    prototypes = []
    for j in range(count):
        idx = r.integer("prototype")
        if idx != j:
            r.fail(f"prototype blocks out of order: expected {j}, found {idx}")
        center = r.floats("center", p)
        scale = r.scalar("scale")
        slope = r.floats("slope", p)
        intercept = r.scalar("intercept")
        variance = r.scalar("variance")
        precision = r.scalar("precision")
        prototypes.append(Prototype(center, scale, slope, intercept, variance, precision))
    if r.take("end") != "":
        r.fail("trailing content on end line")
    if r.pos != len(r.lines):
        r.fail("trailing content after end")
    return Model(
        tuple(prototypes),
        p,
        Standardization(mean, std),
        lam,
        epsilon,
        xi,
        feature_names,
        response_name,
    )
