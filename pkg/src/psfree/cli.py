"""Command-line front end: single counts, decompositions, constants,
exponential-sum spot checks, and geometric X-scans with error-slope fitting.

Scan rows share one schema across CSV and JSON
(X, c, count, mainTerm, error, normalizedError, elapsedSeconds); decimal
fields are rounded to 15 significant digits before writing, so the two
formats parse back to identical values.  Grid points run on a bounded
worker pool (overridden by --threads or PSFREE_THREADS) and rows are
written in X order regardless of completion order.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import click
import numpy as np

from . import constants, counting, expsum
from .exactpow import AmbiguousAtMaxPrecision, Exponent

__all__ = [
    "FitResult",
    "InsufficientData",
    "ScanConfig",
    "fit_error_exponent",
    "geometric_grid",
    "main",
    "run_scan",
]

SIGMA_CUTOFF = 10**7
ROW_FIELDS = ["X", "c", "count", "mainTerm", "error", "normalizedError", "elapsedSeconds"]

_REFERENCE_EXPONENTS = {"carlitz": 2.0 / 3.0, "caoZhai": 1.0}


class InsufficientData(Exception):
    """Too few usable points for a log-log fit."""


@dataclass
class ScanConfig:
    c: Exponent | None
    x_start: int
    x_stop: int
    sum_kind: str  # "carlitz" | "caoZhai" | "scPair"
    output_path: str | None = None
    output_format: str = "csv"
    grid_factor: float = 2.0
    append: bool = False
    threads: int | None = None

    def __post_init__(self):
        if self.x_start < 1 or self.x_stop < self.x_start:
            raise ValueError("need 1 <= x_start <= x_stop")
        if self.grid_factor <= 1:
            raise ValueError("grid_factor must be > 1")
        if self.sum_kind not in ("carlitz", "caoZhai", "scPair"):
            raise ValueError(f"unknown sum kind {self.sum_kind!r}")
        if self.sum_kind != "carlitz" and self.c is None:
            raise ValueError(f"{self.sum_kind} scans need an exponent")


@dataclass
class FitResult:
    slope: float
    intercept: float
    points_used: int
    reference_exponent: float

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "pointsUsed": self.points_used,
            "referenceExponent": self.reference_exponent,
        }


def geometric_grid(x_start: int, x_stop: int, factor: float) -> list[int]:
    """round(x_start * factor^i) for i = 0, 1, ... while <= x_stop,
    deduplicated."""
    grid = []
    i = 0
    while True:
        value = round(x_start * factor**i)
        if value > x_stop:
            break
        if not grid or value != grid[-1]:
            grid.append(value)
        i += 1
    return grid


def reference_exponent(kind: str, c: Exponent | None) -> float:
    if kind == "scPair":
        return (6 * c.a / c.b + 1) / 8
    return _REFERENCE_EXPONENTS[kind]


def _round15(v: float) -> float:
    return float(f"{v:.15g}")


def _sample_for(kind: str, x: int, c: Exponent | None, sigma, zeta) -> counting.ErrorSample:
    if kind == "scPair":
        return counting.error_sample(x, c, sigma)
    if kind == "carlitz":
        report = counting.carlitz_count(x)
        main = float(sigma.value) * x
    else:
        report = counting.cao_zhai_count(x, c)
        main = float(zeta.value) * x
    err = report.count - main
    return counting.ErrorSample(
        x=x,
        c=c,
        count=report.count,
        main_term=main,
        error=err,
        normalized_error=err / x ** reference_exponent(kind, c),
        elapsed_seconds=report.elapsed,
        sum_kind=kind,
    )


def _rounded_row(sample: counting.ErrorSample) -> dict:
    row = sample.to_row()
    for key in ("mainTerm", "error", "normalizedError", "elapsedSeconds"):
        row[key] = _round15(row[key])
    return row


def _completed_xs(path: str, fmt: str) -> set[int]:
    if not path or not os.path.exists(path):
        return set()
    try:
        if fmt == "json":
            with open(path) as fh:
                rows = json.load(fh)
            return {int(row["X"]) for row in rows}
        with open(path, newline="") as fh:
            return {int(row["X"]) for row in csv.DictReader(fh)}
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise OSError(f"cannot resume from {path}: {exc}") from exc


def _worker_count(requested: int | None) -> int:
    if requested:
        return max(1, requested)
    env = os.environ.get("PSFREE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_scan(cfg: ScanConfig, echo=lambda msg: None) -> list[counting.ErrorSample]:
    """One ErrorSample per grid point; rows stream to cfg.output_path as
    they complete.  With append=True, X values already present in the output
    are skipped."""
    sigma = constants.sigma_euler_product(SIGMA_CUTOFF)
    zeta = constants.reciprocal_zeta2()
    grid = geometric_grid(cfg.x_start, cfg.x_stop, cfg.grid_factor)
    done = _completed_xs(cfg.output_path, cfg.output_format) if cfg.append else set()
    todo = [x for x in grid if x not in done]
    if done:
        echo(f"skipping {len(grid) - len(todo)} completed grid points")

    samples: list[counting.ErrorSample] = []
    aborted: list[str] = []
    with ThreadPoolExecutor(max_workers=_worker_count(cfg.threads)) as pool:
        futures = [(x, pool.submit(_sample_for, cfg.sum_kind, x, cfg.c, sigma, zeta)) for x in todo]
        with _row_writer(cfg) as write_row:
            for x, fut in futures:  # X order, not completion order
                try:
                    sample = fut.result()
                except AmbiguousAtMaxPrecision as exc:
                    # abort just this row; the other grid points stand
                    echo(f"X={x} aborted: {exc}")
                    aborted.append(f"X={x}: {exc}")
                    continue
                uncertainty = float(sigma.error_bound) * x / (2 if cfg.sum_kind == "scPair" else 1)
                if cfg.sum_kind != "caoZhai" and abs(sample.error) <= uncertainty:
                    echo(
                        f"warning: X={x} error {sample.error:.3g} is inside the "
                        f"main-term uncertainty {uncertainty:.3g}"
                    )
                write_row(_rounded_row(sample))
                samples.append(sample)
    if aborted:
        raise AmbiguousAtMaxPrecision("; ".join(aborted))
    return samples


class _row_writer:
    """Streams rows to CSV, or accumulates and rewrites a JSON array; a null
    output path turns writing off."""

    def __init__(self, cfg: ScanConfig):
        self.cfg = cfg
        self.rows: list[dict] = []
        self.fh = None
        self.writer = None

    def __enter__(self):
        cfg = self.cfg
        if not cfg.output_path:
            return lambda row: None
        try:
            if cfg.output_format == "csv":
                exists = cfg.append and os.path.exists(cfg.output_path)
                self.fh = open(cfg.output_path, "a" if exists else "w", newline="")
                self.writer = csv.DictWriter(self.fh, fieldnames=ROW_FIELDS)
                if not exists:
                    self.writer.writeheader()
                return self._write_csv
            if cfg.append and os.path.exists(cfg.output_path):
                with open(cfg.output_path) as fh:
                    self.rows = json.load(fh)
            return self._write_json
        except OSError as exc:
            raise OSError(f"cannot write {cfg.output_path}: {exc}") from exc

    def _write_csv(self, row: dict):
        self.writer.writerow(row)
        self.fh.flush()

    def _write_json(self, row: dict):
        self.rows.append(row)
        with open(self.cfg.output_path, "w") as fh:
            json.dump(self.rows, fh, indent=1)
            fh.write("\n")

    def __exit__(self, *exc):
        if self.fh is not None:
            self.fh.close()
        return False


def write_samples(samples, path: str, fmt: str):
    """Write already-computed samples to CSV or JSON in the scan row schema."""
    rows = [_rounded_row(s) for s in samples]
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=ROW_FIELDS)
            writer.writeheader()
            writer.writerows(rows)
    else:
        with open(path, "w") as fh:
            json.dump(rows, fh, indent=1)
            fh.write("\n")


def fit_error_exponent(samples, kind: str | None = None, c: Exponent | None = None) -> FitResult:
    """Least-squares slope of log|error| against log X.  Samples with
    |error| < 1 carry no slope information (the count can land on the main
    term exactly) and are excluded."""
    usable = [s for s in samples if abs(s.error) >= 1.0]
    if len(usable) < 3:
        raise InsufficientData(
            f"{len(usable)} usable samples (of {len(samples)}); need >= 3"
        )
    if len({s.x for s in usable}) < 2:
        raise InsufficientData("all usable samples share one X; slope is undefined")
    logx = np.log([s.x for s in usable])
    logerr = np.log([abs(s.error) for s in usable])
    slope, intercept = np.polyfit(logx, logerr, 1)
    if kind is None:
        kind = usable[0].sum_kind
    if c is None:
        c = usable[0].c
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        points_used=len(usable),
        reference_exponent=reference_exponent(kind, c),
    )


# ---------------------------------------------------------------------------
# click commands

_KIND_NAMES = {"carlitz": "carlitz", "caozhai": "caoZhai", "scpair": "scPair"}


def _exponent_from(c_text: str | None, real: bool, required: bool) -> Exponent | None:
    if c_text is None:
        if required:
            raise click.UsageError("this sum kind needs --c a/b")
        return None
    try:
        return Exponent.parse(c_text, real=real)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _emit(payload: dict):
    click.echo(json.dumps(payload, indent=1))


def _run(body):
    try:
        body()
    except (AmbiguousAtMaxPrecision, expsum.RangeTooLarge, InsufficientData, counting.NotInvertible) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Desk-scale checks of squarefree pair counts along floor(n^c)."""


@main.command()
@click.option("--kind", type=click.Choice(sorted(_KIND_NAMES)), required=True)
@click.option("--x", type=click.IntRange(min=1), required=True)
@click.option("--c", "c_text", default=None, help="exponent a/b (or decimal)")
@click.option("--real", is_flag=True, help="evaluate floors by interval arithmetic")
def count(kind, x, c_text, real):
    """Run one counting sum and print its report."""
    kind = _KIND_NAMES[kind]
    c = _exponent_from(c_text, real, required=kind != "carlitz")

    def body():
        if kind == "carlitz":
            report = counting.carlitz_count(x)
        elif kind == "caoZhai":
            report = counting.cao_zhai_count(x, c)
        else:
            report = counting.scpair_count(x, c)
        payload = report.to_dict()
        if c is not None and not c.theorem_range():
            payload["theoremRange"] = False
        _emit(payload)

    _run(body)


@main.command()
@click.option("--x", type=click.IntRange(min=2), required=True)
@click.option("--c", "c_text", required=True)
@click.option("--z", type=float, default=None, help="override the dt-split point")
@click.option("--real", is_flag=True)
def decompose(x, c_text, z, real):
    """Exact split-sum decomposition with both k-range conventions."""
    c = _exponent_from(c_text, real, required=True)
    if z is not None and not (z > 0 and z != float("inf")):
        raise click.UsageError("--z must be a positive finite value")

    def body():
        payload = counting.decompose(x, c, z).to_dict()
        if not c.theorem_range():
            payload["theoremRange"] = False
        _emit(payload)

    _run(body)


@main.command()
@click.option("--cutoff", type=click.IntRange(min=3), required=True)
def sigma(cutoff):
    """Rigorous enclosure of the pair-density Euler product."""

    def body():
        value = constants.sigma_euler_product(cutoff)
        payload = value.to_dict()
        payload["primeCutoff"] = cutoff
        _emit(payload)

    _run(body)


@main.command("expsum-check")
@click.option("--seed", type=int, default=expsum.DEFAULT_SEED, show_default=True)
@click.option("--instances", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--c", "c_text", default="11/10", show_default=True)
@click.option("--x-max", type=click.IntRange(min=10), default=10**5, show_default=True)
@click.option("--real", is_flag=True)
def expsum_check(seed, instances, c_text, x_max, real):
    """Empirical second-derivative-bound check on seeded random sums."""
    c = _exponent_from(c_text, real, required=True)

    def body():
        reports = [expsum.check_vdc(inst) for inst in expsum.random_instances(instances, seed, c, x_max=x_max)]
        triangle_ok = all(r.abs_sum <= r.terms + 1e-9 for r in reports)
        _emit(
            {
                "seed": seed,
                "instances": len(reports),
                "c": str(c),
                "maxVdcRatio": _round15(max(r.ratio for r in reports)),
                "maxHestRatio": _round15(max(r.hest_ratio for r in reports)),
                "triangleInequalityHolds": triangle_ok,
            }
        )

    _run(body)


@main.command()
@click.option("--kind", type=click.Choice(sorted(_KIND_NAMES)), required=True)
@click.option("--c", "c_text", default=None)
@click.option("--x-start", type=click.IntRange(min=1), required=True)
@click.option("--x-stop", type=click.IntRange(min=1), required=True)
@click.option("--grid-factor", type=float, default=2.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--append", is_flag=True, help="skip X values already in the output file")
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.option("--real", is_flag=True)
def scan(kind, c_text, x_start, x_stop, grid_factor, out_path, fmt, append, threads, real):
    """Scan a geometric X-grid, stream error samples, and fit the slope."""
    kind = _KIND_NAMES[kind]
    c = _exponent_from(c_text, real, required=kind != "carlitz")
    try:
        cfg = ScanConfig(
            c=c,
            x_start=x_start,
            x_stop=x_stop,
            sum_kind=kind,
            output_path=out_path,
            output_format=fmt,
            grid_factor=grid_factor,
            append=append,
            threads=threads,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))

    def body():
        samples = run_scan(cfg, echo=lambda msg: click.echo(msg, err=True))
        click.echo(f"wrote {len(samples)} rows to {out_path}")
        try:
            fit = fit_error_exponent(samples, kind, c)
            click.echo(
                f"fitted |error| ~ X^{fit.slope:.4f} from {fit.points_used} points "
                f"(reference exponent {fit.reference_exponent:.4f})"
            )
        except InsufficientData as exc:
            click.echo(f"no slope fit: {exc}")

    _run(body)


@main.command("psi-check")
@click.option("--m-values", default="10,100,1000", show_default=True)
@click.option("--grid", type=click.IntRange(min=100), default=10**4, show_default=True)
def psi_check(m_values, grid):
    """Sawtooth truncation error against the 4/(M ||x||) envelope."""
    try:
        ms = [int(tok) for tok in m_values.split(",") if tok.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad --m-values: {exc}")

    def body():
        xs = np.linspace(0.0, 1.0, grid, endpoint=False)
        xs = xs[np.minimum(xs, 1.0 - xs) > 1e-3]
        results = {}
        ok = True
        for m in ms:
            err = np.abs(expsum.psi(xs) - expsum.psi_truncated(xs, m))
            envelope = 4.0 / (m * expsum.nearest_int_dist(xs))
            worst = float(np.max(err * m * expsum.nearest_int_dist(xs)) / 4.0)
            ok = ok and bool(np.all(err <= envelope))
            results[str(m)] = _round15(worst)
        _emit({"grid": int(xs.size), "worstEnvelopeFraction": results, "allWithinEnvelope": ok})
        if not ok:
            sys.exit(1)

    _run(body)


if __name__ == "__main__":
    main()
