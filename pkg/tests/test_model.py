"""Forward-pass and persistence tests.

The sequential fold of the combination rule over per-prototype numbers is
the oracle for the closed-form forward pass; a normalized RBF evaluation
written out directly is the oracle for the slope-free special case.
"""

import math
from dataclasses import replace
from functools import reduce

import numpy as np
import pytest

from evidreg.data import Standardization
from evidreg.errors import InputError
from evidreg.grfn import combine
from evidreg.model import (
    Model,
    Prototype,
    activation,
    forward,
    forward_batch,
    load_model,
    prototype_grfn,
    save_model,
)


def identity_scaler(p):
    return Standardization(np.zeros(p), np.ones(p))


def random_model(rng, p=None, J=None, zero_slope=False, precisions=None):
    p = p or rng.integers(1, 6)
    J = J or rng.integers(1, 21)
    protos = []
    for j in range(J):
        protos.append(Prototype(
            center=rng.normal(0, 2, p),
            scale=rng.uniform(0.1, 1.5),
            slope=np.zeros(p) if zero_slope else rng.normal(0, 1, p),
            intercept=rng.normal(0, 2),
            variance=10 ** rng.uniform(-2, 1),
            precision=(precisions[j] if precisions is not None
                       else 10 ** rng.uniform(-2, 1)),
        ))
    return Model(tuple(protos), int(p), identity_scaler(int(p)),
                 lam=0.9, epsilon=0.01, xi=1e-3)


def fold_forward(model, x):
    """Oracle: left fold of the combination rule over prototype evidence."""
    parts = [prototype_grfn(pr, x) for pr in model.prototypes]
    return reduce(combine, parts)


class TestActivation:
    def test_at_center(self):
        pr = Prototype(np.array([1.0, -2.0]), 0.7, np.zeros(2), 0.0, 1.0, 1.0)
        assert activation(pr, np.array([1.0, -2.0])) == 1.0

    def test_zero_scale(self):
        pr = Prototype(np.array([0.0]), 0.0, np.zeros(1), 0.0, 1.0, 1.0)
        assert activation(pr, np.array([123.0])) == 1.0

    def test_unit_distance(self):
        pr = Prototype(np.array([0.0, 0.0]), 1.0, np.zeros(2), 0.0, 1.0, 1.0)
        assert activation(pr, np.array([1.0, 0.0])) == pytest.approx(
            math.exp(-1.0), abs=1e-15
        )

    def test_dimension_mismatch(self):
        pr = Prototype(np.array([0.0, 0.0]), 1.0, np.zeros(2), 0.0, 1.0, 1.0)
        with pytest.raises(InputError):
            activation(pr, np.array([1.0]))


class TestPrototypeEvidence:
    def test_zero_slope_mean_is_intercept(self):
        pr = Prototype(np.array([0.0]), 0.5, np.zeros(1), 3.25, 1.0, 1.0)
        assert prototype_grfn(pr, np.array([42.0])).mu == 3.25

    def test_remote_input_evidence_is_nearly_vacuous(self):
        pr = Prototype(np.array([0.0]), 1.0, np.zeros(1), 0.0, 1.0, 5.0)
        g = prototype_grfn(pr, np.array([10.0]))
        assert 0.0 < g.h < 1e-8

    def test_linear_mean(self):
        pr = Prototype(np.zeros(2), 0.3, np.array([1.0, 0.0]), 1.0, 1.0, 1.0)
        assert prototype_grfn(pr, np.array([2.0, 5.0])).mu == pytest.approx(3.0)


class TestForward:
    def test_equals_fold_of_combine(self, rng):
        for _ in range(60):
            model = random_model(rng)
            x = rng.normal(0, 2, model.input_dim)
            got = forward(model, x)
            want = fold_forward(model, x)
            assert got.mu == pytest.approx(want.mu, rel=1e-10, abs=1e-12)
            assert got.sigma2 == pytest.approx(want.sigma2, rel=1e-10, abs=1e-12)
            assert got.h == pytest.approx(want.h, rel=1e-10, abs=1e-12)

    def test_zero_slope_matches_normalized_rbf(self, rng):
        # Independent oracle: softmax-style weights over exp(-scale^2 d^2) h.
        for _ in range(40):
            model = random_model(rng, zero_slope=True)
            x = rng.normal(0, 2, model.input_dim)
            w = np.array([
                math.exp(-pr.scale**2 * float(np.sum((x - pr.center) ** 2)))
                * pr.precision
                for pr in model.prototypes
            ])
            rbf = float(np.sum(w * [pr.intercept for pr in model.prototypes])
                        / np.sum(w))
            assert forward(model, x).mu == pytest.approx(rbf, rel=1e-12, abs=1e-12)

    def test_single_prototype_zero_scale_is_linear_model(self, rng):
        model = random_model(rng, p=3, J=1)
        pr = replace(model.prototypes[0], scale=0.0)
        model = replace(model, prototypes=(pr,))
        x = rng.normal(0, 2, 3)
        g = forward(model, x)
        assert g.mu == pytest.approx(float(pr.slope @ x + pr.intercept), rel=1e-12)
        assert g.h == pytest.approx(pr.precision, rel=1e-12)
        # the general propagation gives exactly the prototype variance here
        assert g.sigma2 == pytest.approx(pr.variance, rel=1e-12)

    def test_mu_is_convex_combination_of_local_means(self, rng):
        for _ in range(30):
            model = random_model(rng)
            x = rng.normal(0, 2, model.input_dim)
            locals_ = [float(pr.slope @ x + pr.intercept) for pr in model.prototypes]
            mu = forward(model, x).mu
            assert min(locals_) - 1e-9 <= mu <= max(locals_) + 1e-9

    def test_translation_covariance(self, rng):
        model = random_model(rng, p=2, J=5)
        shifted = replace(model, prototypes=tuple(
            replace(pr, intercept=pr.intercept + 2.5) for pr in model.prototypes
        ))
        x = rng.normal(0, 2, 2)
        a, b = forward(model, x), forward(shifted, x)
        assert b.mu == pytest.approx(a.mu + 2.5, rel=1e-12)
        assert b.sigma2 == pytest.approx(a.sigma2, rel=1e-12)
        assert b.h == pytest.approx(a.h, rel=1e-12)

    def test_zero_precision_prototype_is_removable(self, rng):
        model = random_model(rng, p=2, J=4, precisions=[1.0, 0.0, 2.0, 0.5])
        pruned = replace(
            model,
            prototypes=tuple(pr for pr in model.prototypes if pr.precision > 0),
        )
        for _ in range(20):
            x = rng.normal(0, 2, 2)
            a, b = forward(model, x), forward(pruned, x)
            assert (a.mu, a.sigma2, a.h) == (b.mu, b.sigma2, b.h)

    def test_all_vacuous_returns_first_prototype_convention(self, rng):
        model = random_model(rng, p=2, J=3, precisions=[0.0, 0.0, 0.0])
        x = rng.normal(0, 2, 2)
        g = forward(model, x)
        want = fold_forward(model, x)
        assert g.h == 0.0
        assert g.mu == want.mu and g.sigma2 == want.sigma2

    def test_forward_batch_matches_forward(self, rng):
        model = random_model(rng, p=2, J=6)
        X = rng.normal(0, 2, (15, 2))
        mu, sigma2, h = forward_batch(model, X)
        for i in range(15):
            g = forward(model, X[i])
            assert g.mu == pytest.approx(mu[i], rel=1e-14)
            assert g.sigma2 == pytest.approx(sigma2[i], rel=1e-14)
            assert g.h == pytest.approx(h[i], rel=1e-14)

    def test_standardization_is_applied(self):
        pr = Prototype(np.array([0.0]), 1.0, np.array([1.0]), 0.0, 1.0, 1.0)
        scaled = Model((pr,), 1, Standardization(np.array([10.0]), np.array([2.0])),
                       0.9, 0.01, 1e-3)
        # raw x = 12 -> standardized 1.0
        assert forward(scaled, np.array([12.0])).mu == pytest.approx(1.0)

    def test_dimension_mismatch(self, rng):
        model = random_model(rng, p=3, J=2)
        with pytest.raises(InputError):
            forward(model, np.zeros(2))
        with pytest.raises(InputError):
            forward_batch(model, np.zeros((4, 2)))


class TestPersistence:
    def test_round_trip_predictions_identical(self, rng, tmp_path):
        model = random_model(rng, p=3, J=7)
        model = replace(model, feature_names=("a", "b", "c"), response_name="y")
        path = tmp_path / "m.evidreg"
        save_model(model, str(path))
        back = load_model(str(path))
        assert back.feature_names == ("a", "b", "c")
        assert back.response_name == "y"
        assert back.lam == model.lam
        assert back.epsilon == model.epsilon
        assert back.xi == model.xi
        X = rng.normal(0, 2, (50, 3))
        a = forward_batch(model, X)
        b = forward_batch(back, X)
        for u, v in zip(a, b):
            np.testing.assert_allclose(u, v, rtol=1e-15)

    def test_round_trip_is_byte_stable(self, rng, tmp_path):
        model = random_model(rng, p=2, J=3)
        p1, p2 = tmp_path / "a", tmp_path / "b"
        save_model(model, str(p1))
        save_model(load_model(str(p1)), str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_corrupt_files_rejected(self, rng, tmp_path):
        model = random_model(rng, p=2, J=2)
        path = tmp_path / "m.evidreg"
        save_model(model, str(path))
        good = path.read_text().splitlines()

        cases = {
            "truncated": good[:5],
            "bad_format": ["format other-thing"] + good[1:],
            "bad_version": [good[0], "version 99"] + good[2:],
            "non_numeric": [ln if not ln.startswith("lambda") else "lambda abc"
                            for ln in good],
            "trailing": good + ["extra junk"],
        }
        for name, lines in cases.items():
            bad = tmp_path / f"{name}.evidreg"
            bad.write_text("\n".join(lines) + "\n")
            with pytest.raises(InputError):
                load_model(str(bad))

    def test_missing_file(self):
        with pytest.raises(InputError):
            load_model("/nonexistent/model.evidreg")


class TestValidation:
    def test_prototype_invariants(self):
        with pytest.raises(InputError):
            Prototype(np.zeros(2), 1.0, np.zeros(3), 0.0, 1.0, 1.0)
        with pytest.raises(InputError):
            Prototype(np.zeros(2), 1.0, np.zeros(2), 0.0, 0.0, 1.0)
        with pytest.raises(InputError):
            Prototype(np.zeros(2), 1.0, np.zeros(2), 0.0, 1.0, -0.1)

    def test_model_requires_consistent_dimensions(self, rng):
        model = random_model(rng, p=2, J=2)
        with pytest.raises(InputError):
            Model(model.prototypes, 3, identity_scaler(3), 0.9, 0.01, 1e-3)
        with pytest.raises(InputError):
            Model((), 2, identity_scaler(2), 0.9, 0.01, 1e-3)
