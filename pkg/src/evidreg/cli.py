"""Command-line interface: train, predict, eval, cv, simulate, plotdata.

Exit codes: 0 success, 1 input error (bad flags, files, columns,
dimensions), 2 numeric fault.  All tabular output is CSV with a header
row; the report commands (eval, plotdata) also render a matplotlib
figure next to the CSV unless told not to.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import grfn
from .data import Dataset, load_csv, save_csv, synthetic_gen
from .errors import EvidregError, InputError
from .grfn import Grfn, RealInterval
from .model import Model, forward_batch, load_model, save_model
from .train import TrainConfig, cost, cross_validate_xi, fit

__all__ = ["PredictionSummary", "summarize", "evaluate", "main"]


@dataclass(frozen=True)
class PredictionSummary:
    """Everything reported for one input: the output number's parameters,
    the epistemic expectation bounds, and the requested intervals."""

    mu: float
    sigma2: float
    h: float
    lower_expectation: float
    upper_expectation: float
    intervals: dict[float, RealInterval]


def summarize(g: Grfn, levels: list[float]) -> PredictionSummary:
    return PredictionSummary(
        g.mu,
        g.sigma2,
        g.h,
        grfn.lower_expectation(g),
        grfn.upper_expectation(g),
        {lv: grfn.prediction_interval(g, lv) for lv in levels},
    )


@dataclass(frozen=True)
class EvalMetrics:
    mse: float
    levels: list[float]
    coverage: list[float]
    mean_width: list[float]


def evaluate(model: Model, data: Dataset, levels: list[float]) -> EvalMetrics:
    """MSE of the point prediction plus, per level, the fraction of
    responses inside their closed prediction interval and the mean width."""
    y = data.require_response()
    if data.n == 0:
        raise InputError("evaluation needs a nonempty dataset")
    mu, sigma2, h = forward_batch(model, data.X)
    mse = float(np.mean((mu - y) ** 2))
    coverage = []
    mean_width = []
    for lv in levels:
        hits = 0
        widths = np.empty(data.n)
        for i in range(data.n):
            iv = grfn.prediction_interval(Grfn(mu[i], sigma2[i], h[i]), lv)
            hits += iv.contains(y[i])
            widths[i] = iv.width
        coverage.append(float(hits) / data.n)
        mean_width.append(float(widths.mean()))
    return EvalMetrics(mse, list(levels), coverage, mean_width)


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; this CLI reserves 2 for
    numeric faults, so usage problems are rethrown as input errors."""

    def error(self, message):
        raise InputError(message)


def _parse_levels(raw: str) -> list[float]:
    try:
        levels = sorted(float(part) for part in raw.split(","))
    except ValueError:
        raise InputError(f"cannot parse levels {raw!r}") from None
    if not levels or any(not 0.0 < lv < 1.0 for lv in levels):
        raise InputError(f"levels must lie strictly in (0, 1): {raw!r}")
    return levels


def _parse_grid(raw: str) -> list[float]:
    try:
        grid = [float(part) for part in raw.split(",")]
    except ValueError:
        raise InputError(f"cannot parse xi grid {raw!r}") from None
    if any(x < 0 for x in grid):
        raise InputError("xi values must be >= 0")
    return grid


def _resolve_epsilon(args, y: np.ndarray) -> float:
    if args.epsilon_abs is not None:
        return args.epsilon_abs
    return args.epsilon_rel * float(y.std())


def _config_from_args(args, epsilon: float) -> TrainConfig:
    return TrainConfig(
        n_prototypes=args.J,
        lam=args.lam,
        epsilon=epsilon,
        xi=args.xi,
        learning_rate=args.learning_rate,
        momentum=args.momentum,
        decay=args.decay,
        batch_size=args.batch_size,
        max_epochs=args.max_epochs,
        patience=args.patience,
        seed=args.seed,
        fixed_scale=args.fixed_scale,
    )


def _align_features(model: Model, data: Dataset) -> Dataset:
    """Reorder loaded columns to the model's feature list when both sides
    carry names (extra columns are dropped); otherwise require an exact
    column-count match."""
    if model.feature_names and data.feature_names:
        missing = [n for n in model.feature_names if n not in data.feature_names]
        if not missing:
            order = [data.feature_names.index(n) for n in model.feature_names]
            return Dataset(data.X[:, order], data.y, model.feature_names,
                           data.response_name)
        if data.p != model.input_dim:
            raise InputError(
                "data is missing model feature column(s): " + ", ".join(missing)
            )
    if data.p != model.input_dim:
        raise InputError(
            f"data has {data.p} feature columns, model expects {model.input_dim}"
        )
    return data


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _fig_path(args) -> str | None:
    if getattr(args, "no_fig", False):
        return None
    if args.fig is not None:
        return args.fig
    if getattr(args, "out", None):
        return str(Path(args.out).with_suffix(".png"))
    return None


def _interval_columns(levels: list[float]) -> list[str]:
    cols = []
    for lv in levels:
        cols += [f"lo_{lv:g}", f"hi_{lv:g}"]
    return cols


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_train(args) -> None:
    data = load_csv(args.data, args.response)
    cfg = _config_from_args(args, _resolve_epsilon(args, data.y))
    model, trace = fit(data, cfg)
    save_model(model, args.out_model)
    if args.trace:
        trace.to_csv(args.trace)
    final = cost(model, data, cfg)
    print(f"wrote {args.out_model} ({model.n_prototypes} prototypes, "
          f"{trace.n_epochs} epochs, stop: {trace.stop_reason})")
    print(f"final train cost: {final:.6f}")


def cmd_predict(args) -> None:
    model = load_model(args.model)
    data = _align_features(model, load_csv(args.data))
    levels = _parse_levels(args.levels)
    mu, sigma2, h = forward_batch(model, data.X)
    out, owns = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(
            ["mu", "sigma2", "h", "lower_expectation", "upper_expectation"]
            + _interval_columns(levels)
        )
        for i in range(data.n):
            s = summarize(Grfn(mu[i], sigma2[i], h[i]), levels)
            row = [s.mu, s.sigma2, s.h, s.lower_expectation, s.upper_expectation]
            for lv in levels:
                row += [s.intervals[lv].lo, s.intervals[lv].hi]
            writer.writerow([repr(v) for v in row])
    finally:
        if owns:
            out.close()


def cmd_eval(args) -> None:
    model = load_model(args.model)
    response = args.response or model.response_name
    if response is None:
        raise InputError("no response column: pass --response or use a model "
                         "trained through the CLI")
    data = _align_features(model, load_csv(args.data, response))
    levels = _parse_levels(args.levels)
    metrics = evaluate(model, data, levels)
    print(f"n: {data.n}")
    print(f"MSE: {metrics.mse:.6f}")
    for lv, cov, width in zip(metrics.levels, metrics.coverage, metrics.mean_width):
        print(f"level {lv:g}: coverage {cov:.4f}  mean width {width:.4f}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "level", "value"])
            writer.writerow(["mse", "", repr(metrics.mse)])
            for lv, cov, width in zip(metrics.levels, metrics.coverage,
                                      metrics.mean_width):
                writer.writerow(["coverage", f"{lv:g}", repr(cov)])
                writer.writerow(["mean_width", f"{lv:g}", repr(width)])
    fig = _fig_path(args)
    if fig:
        from .plots import render_coverage

        render_coverage(fig, metrics.levels, metrics.coverage, metrics.mean_width)
        print(f"wrote figure {fig}")


def cmd_cv(args) -> None:
    data = load_csv(args.data, args.response)
    cfg = _config_from_args(args, _resolve_epsilon(args, data.y))
    grid = _parse_grid(args.xi_grid)
    best, table = cross_validate_xi(data, grid, args.folds, cfg, n_jobs=args.jobs)
    for xi, mse in table:
        print(f"xi {xi:g}: cv mse {mse:.6f}")
    print(f"best xi: {best:g}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["xi", "cv_mse"])
            for xi, mse in table:
                writer.writerow([repr(xi), repr(mse)])


def cmd_simulate(args) -> None:
    data = synthetic_gen(args.n, args.seed)
    save_csv(data, args.out)
    print(f"wrote {args.out} ({data.n} rows)")


def cmd_plotdata(args) -> None:
    model = load_model(args.model)
    if model.input_dim != 1:
        raise InputError(
            f"plotdata needs a 1-feature model, this one has {model.input_dim}"
        )
    if not args.xmax > args.xmin:
        raise InputError("--xmax must be greater than --xmin")
    if args.steps < 2:
        raise InputError("--steps must be >= 2")
    levels = _parse_levels(args.levels)
    xs = np.linspace(args.xmin, args.xmax, args.steps)
    mu, sigma2, h = forward_batch(model, xs[:, None])
    elo = np.empty_like(xs)
    ehi = np.empty_like(xs)
    bounds = {lv: (np.empty_like(xs), np.empty_like(xs)) for lv in levels}
    for i in range(len(xs)):
        g = Grfn(mu[i], sigma2[i], h[i])
        elo[i] = grfn.lower_expectation(g)
        ehi[i] = grfn.upper_expectation(g)
        for lv in levels:
            iv = grfn.prediction_interval(g, lv)
            bounds[lv][0][i] = iv.lo
            bounds[lv][1][i] = iv.hi
    out, owns = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(["x", "mu", "lower_expectation", "upper_expectation"]
                        + _interval_columns(levels))
        for i in range(len(xs)):
            row = [xs[i], mu[i], elo[i], ehi[i]]
            for lv in levels:
                row += [bounds[lv][0][i], bounds[lv][1][i]]
            writer.writerow([repr(float(v)) for v in row])
    finally:
        if owns:
            out.close()
    fig = _fig_path(args)
    if fig:
        from .plots import render_fit

        scatter = None
        if args.data:
            response = model.response_name
            sdata = load_csv(args.data, response)
            sdata = _align_features(model, sdata)
            scatter = (sdata.X[:, 0], sdata.y)
        render_fit(fig, xs, mu, elo, ehi, bounds, scatter)
        print(f"wrote figure {fig}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--J", type=int, default=30, help="number of prototypes")
    p.add_argument("--lambda", dest="lam", type=float, default=0.9,
                   help="belief weight in the loss, in [0, 1]")
    p.add_argument("--epsilon-rel", type=float, default=0.01,
                   help="target half-width as a fraction of the response std")
    p.add_argument("--epsilon-abs", type=float, default=None,
                   help="absolute target half-width (overrides --epsilon-rel)")
    p.add_argument("--xi", type=float, default=1e-3, help="precision penalty")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--decay", type=float, default=0.999)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--max-epochs", type=int, default=300)
    p.add_argument("--patience", type=int, default=50)
    p.add_argument("--fixed-scale", type=float, default=None,
                   help="freeze every prototype's activation decay at this value")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evidreg",
                     description="Evidential regression with uncertainty-"
                                 "quantified predictions.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("train", parents=[], help="fit a model on a CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--response", required=True)
    _add_train_flags(p)
    p.add_argument("--out-model", required=True)
    p.add_argument("--trace", default=None, help="write per-epoch costs as CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="prediction summaries for a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--levels", default="0.5,0.9,0.99")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="MSE, coverage and width on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--response", default=None,
                   help="response column (default: the one stored in the model)")
    p.add_argument("--levels", default="0.5,0.9,0.99")
    p.add_argument("--out", default=None, help="write metrics as CSV")
    p.add_argument("--fig", default=None, help="write a coverage figure here")
    p.add_argument("--no-fig", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cv", help="cross-validate the precision penalty xi")
    p.add_argument("--data", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--xi-grid", required=True,
                   help="comma-separated xi values, e.g. 1e-4,1e-3,1e-2")
    p.add_argument("--folds", type=int, default=10)
    _add_train_flags(p)
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel processes for the fold fits")
    p.add_argument("--out", default=None, help="write the CV table as CSV")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("simulate", help="write a synthetic benchmark CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plotdata",
                       help="dense 1-D grid of predictions for plotting")
    p.add_argument("--model", required=True)
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--levels", default="0.5,0.9,0.99")
    p.add_argument("--out", default=None)
    p.add_argument("--fig", default=None, help="write the fit figure here")
    p.add_argument("--no-fig", action="store_true")
    p.add_argument("--data", default=None,
                   help="optional labeled CSV scattered under the fit")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise InputError("no command given (try --help)")
        args.func(args)
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EvidregError as exc:
        print(f"numeric fault: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
