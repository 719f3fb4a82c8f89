"""Monte Carlo harness over (n, p, sigma, M) grids.

``run_grid`` draws a fresh direction and dataset per replicate from
counter-derived streams, fits the ball-constrained estimator, and records
direction/length errors, the calibrated distance, separability and solver
diagnostics.  Everything except wall time is bit-deterministic given the
master seed, independent of execution order and BLAS thread count.

``rate_slope`` turns a report into a log-log convergence exponent: OLS of
log(mean error) against log(n) at fixed (p, sigma), which is how the
theoretical rates (-1/2 for direction error under large noise, -1 under
small noise) are checked without access to the hidden constants.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .estimator import FitConfig, fit
from .geometry import StarGeometry
from .model import ModelSpec, SeedSpec, sample
from .quadrature import sigma_to_tau_star
from .separability import SeparabilityUndecided, is_separable

__all__ = [
    "Cell",
    "CellStats",
    "ExperimentGrid",
    "ExperimentReport",
    "RegimeTag",
    "RateSlope",
    "run_grid",
    "rate_slope",
    "cell_stats",
    "classify_regime",
    "default_radius",
    "REPORT_COLUMNS",
    "SCHEMA_HASH",
]

REPORT_COLUMNS = [
    "n",
    "p",
    "sigma",
    "M",
    "rep",
    "seed",
    "tau_star",
    "beta_err",
    "tau_hat",
    "tau_err",
    "d_star",
    "separable",
    "wrong_label_frac",
    "loss",
    "iters",
    "converged",
    "wall_ms",
]

#: versions the column set; readers can refuse reports with a different layout
SCHEMA_HASH = hashlib.sha256(",".join(REPORT_COLUMNS).encode()).hexdigest()[:12]

_INT_COLUMNS = {"n", "p", "rep", "seed", "iters"}
_BOOL_COLUMNS = {"separable", "converged"}


def default_radius(n: int, p: int, tau_star: float) -> float:
    """Constraint radius keeping both rate regimes' conditions satisfied.

    ``max(10*tau_star, n/(p*log n))``: large enough that the target is
    well interior under large noise, and at least ``n/(p log n)`` so the
    small-noise length lower bound has room to bind.
    """
    return max(10.0 * tau_star, n / (p * math.log(n)))


@dataclass(frozen=True)
class Cell:
    """One grid cell; ``M=None`` means the default radius."""

    n: int
    p: int
    sigma: float
    M: float | None = None

    def __post_init__(self):
        if not (self.n >= self.p >= 1):
            raise ValueError(f"cell must satisfy n >= p >= 1, got n={self.n}, p={self.p}")
        if self.sigma <= 0:
            raise ValueError("cell sigma must be positive")
        if self.M is not None and self.M <= 0:
            raise ValueError("cell M must be positive")


@dataclass(frozen=True)
class ExperimentGrid:
    """Full experiment description: cells, replicates, seed, solver knobs."""

    cells: tuple[Cell, ...]
    replicates: int
    master_seed: int
    tol: float = 1e-8
    max_iter: int = 200_000
    fixed_beta: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        object.__setattr__(self, "cells", tuple(self.cells))

    @classmethod
    def from_config(cls, config: dict) -> "ExperimentGrid":
        """Build from the JSON config layout (see ``docs`` in README)."""
        cells = tuple(
            Cell(n=int(c["n"]), p=int(c["p"]), sigma=float(c["sigma"]),
                 M=float(c["M"]) if "M" in c and c["M"] is not None else None)
            for c in config["cells"]
        )
        fit_cfg = config.get("fit", {})
        return cls(
            cells=cells,
            replicates=int(config["replicates"]),
            master_seed=int(config["master_seed"]),
            tol=float(fit_cfg.get("tol", 1e-8)),
            max_iter=int(fit_cfg.get("max_iter", 200_000)),
            fixed_beta=bool(config.get("fixed_beta", False)),
        )


@dataclass
class ExperimentReport:
    """Rows produced by ``run_grid`` plus CSV/plot-file serialization."""

    rows: list[dict] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# problogit-report v1 schema={SCHEMA_HASH}\n")
            fh.write(",".join(REPORT_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(",".join(_format_cell(c, row[c]) for c in REPORT_COLUMNS) + "\n")

    @classmethod
    def read_csv(cls, path) -> "ExperimentReport":
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            header: list[str] | None = None
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if header is None:
                    header = line.split(",")
                    if header != REPORT_COLUMNS:
                        raise ValueError(
                            f"unexpected report columns {header}; wanted {REPORT_COLUMNS}"
                        )
                    continue
                rows.append(_parse_row(header, line.split(",")))
        if header is None:
            raise ValueError("report file has no header")
        return cls(rows=rows)

    def slices(self) -> list[tuple[int, float]]:
        """Distinct (p, sigma) pairs present, in first-seen order."""
        seen: list[tuple[int, float]] = []
        for row in self.rows:
            key = (row["p"], row["sigma"])
            if key not in seen:
                seen.append(key)
        return seen

    def write_dat_slices(self, stem: str) -> list[str]:
        """Per-(p, sigma) whitespace tables of mean errors and rate predictors.

        Columns: n, mean_beta_err, mean_tau_err, median_beta_err,
        pred_large = sqrt(sigma*p*log(n)/n), pred_small = p*log(n)/n.
        """
        written = []
        for p, sigma in self.slices():
            rows = [r for r in self.rows if r["p"] == p and r["sigma"] == sigma]
            ns = sorted({r["n"] for r in rows})
            path = f"{stem}_p{p}_sigma{_format_cell('sigma', sigma)}.dat"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(
                    "# n mean_beta_err mean_tau_err median_beta_err pred_large pred_small\n"
                )
                for n in ns:
                    be = np.array([r["beta_err"] for r in rows if r["n"] == n])
                    te = np.array([r["tau_err"] for r in rows if r["n"] == n])
                    pred_large = math.sqrt(sigma * p * math.log(n) / n)
                    fh.write(
                        f"{n} {be.mean():.17g} {te.mean():.17g} "
                        f"{float(np.median(be)):.17g} "
                        f"{pred_large:.17g} {p * math.log(n) / n:.17g}\n"
                    )
            written.append(path)
        return written


def _format_cell(column: str, value) -> str:
    if column in _INT_COLUMNS:
        return str(int(value))
    if column in _BOOL_COLUMNS:
        return str(bool(value)).lower()
    return format(float(value), ".17g")


def _parse_row(header: list[str], parts: list[str]) -> dict:
    row = {}
    for col, raw in zip(header, parts):
        if col in _INT_COLUMNS:
            row[col] = int(raw)
        elif col in _BOOL_COLUMNS:
            row[col] = raw == "true"
        else:
            row[col] = float(raw)
    return row


def run_grid(grid: ExperimentGrid) -> ExperimentReport:
    """Execute every (cell, replicate): draw, fit, measure, record.

    Solver non-convergence is recorded per row (``converged=false``) and
    never aborts the grid.  Rows are deterministic given the master seed;
    only ``wall_ms`` varies between runs.
    """
    seed_spec = SeedSpec(grid.master_seed)
    report = ExperimentReport()
    for cell_index, cell in enumerate(grid.cells):
        tau_star = sigma_to_tau_star(cell.sigma)
        geom = StarGeometry(tau_star)
        radius = cell.M if cell.M is not None else default_radius(cell.n, cell.p, tau_star)
        config = FitConfig(M=radius, tol=grid.tol, max_iter=grid.max_iter)
        for rep in range(grid.replicates):
            rng = seed_spec.rng(cell_index, rep)
            if grid.fixed_beta:
                beta_star = np.zeros(cell.p)
                beta_star[0] = 1.0
                rng.standard_normal(cell.p)  # keep the stream layout identical
            else:
                beta_star = rng.standard_normal(cell.p)
                beta_star /= np.linalg.norm(beta_star)
            spec = ModelSpec(p=cell.p, sigma=cell.sigma, beta_star=beta_star)
            data = sample(spec, cell.n, rng)

            t0 = time.perf_counter()
            result = fit(data.X, data.y, config)
            wall_ms = (time.perf_counter() - t0) * 1000.0

            try:
                separable = is_separable(
                    data.X, data.y, hint=result.gamma_hat
                ).separable
            except SeparabilityUndecided:
                separable = False  # conservatively counted as not separable

            noiseless = np.where(
                np.einsum("ij,j->i", data.X, beta_star) >= 0.0, 1.0, -1.0
            )
            report.rows.append(
                {
                    "n": cell.n,
                    "p": cell.p,
                    "sigma": cell.sigma,
                    "M": radius,
                    "rep": rep,
                    "seed": seed_spec.stream_id(cell_index, rep),
                    "tau_star": tau_star,
                    "beta_err": float(np.linalg.norm(result.beta_hat - beta_star)),
                    "tau_hat": result.tau_hat,
                    "tau_err": abs(result.tau_hat - tau_star),
                    "d_star": geom.d_star(beta_star, result.gamma_hat)
                    if result.tau_hat > 0
                    else math.inf,
                    "separable": separable,
                    "wrong_label_frac": float(np.mean(data.y != noiseless)),
                    "loss": result.loss,
                    "iters": result.iterations,
                    "converged": result.converged,
                    "wall_ms": wall_ms,
                }
            )
    return report


@dataclass(frozen=True)
class CellStats:
    """Aggregates of one grid cell's replicates."""

    n: int
    p: int
    sigma: float
    M: float
    replicates: int
    beta_err_mean: float
    beta_err_median: float
    beta_err_std: float
    tau_err_mean: float
    tau_err_median: float
    tau_err_std: float
    d_star_mean: float
    separable_frequency: float
    wrong_label_frequency: float
    converged_frequency: float
    wall_ms_mean: float


def cell_stats(report: ExperimentReport) -> list[CellStats]:
    """Collapse a report to per-cell statistics, in first-seen cell order."""
    keys: list[tuple] = []
    for row in report.rows:
        key = (row["n"], row["p"], row["sigma"], row["M"])
        if key not in keys:
            keys.append(key)
    out = []
    for n, p, sigma, M in keys:
        rows = [
            r
            for r in report.rows
            if (r["n"], r["p"], r["sigma"], r["M"]) == (n, p, sigma, M)
        ]
        be = np.array([r["beta_err"] for r in rows])
        te = np.array([r["tau_err"] for r in rows])
        out.append(
            CellStats(
                n=n,
                p=p,
                sigma=sigma,
                M=M,
                replicates=len(rows),
                beta_err_mean=float(be.mean()),
                beta_err_median=float(np.median(be)),
                beta_err_std=float(be.std(ddof=1)) if len(rows) > 1 else 0.0,
                tau_err_mean=float(te.mean()),
                tau_err_median=float(np.median(te)),
                tau_err_std=float(te.std(ddof=1)) if len(rows) > 1 else 0.0,
                d_star_mean=float(np.mean([r["d_star"] for r in rows])),
                separable_frequency=float(np.mean([r["separable"] for r in rows])),
                wrong_label_frequency=float(
                    np.mean([r["wrong_label_frac"] for r in rows])
                ),
                converged_frequency=float(np.mean([r["converged"] for r in rows])),
                wall_ms_mean=float(np.mean([r["wall_ms"] for r in rows])),
            )
        )
    return out


@dataclass(frozen=True)
class RateSlope:
    """OLS slope of log(mean metric) on log(n), with its standard error."""

    slope: float
    stderr: float
    n_values: tuple[int, ...]
    means: tuple[float, ...]


def rate_slope(
    report: ExperimentReport, metric: str, p: int, sigma: float
) -> RateSlope:
    """Fit the log-log convergence exponent of ``metric`` over ``n``.

    Requires at least four distinct sample sizes at the fixed (p, sigma).
    ``metric`` is ``beta_err`` or ``tau_err``.
    """
    if metric not in ("beta_err", "tau_err"):
        raise ValueError("metric must be 'beta_err' or 'tau_err'")
    rows = [
        r
        for r in report.rows
        if r["p"] == p and math.isclose(r["sigma"], sigma, rel_tol=1e-12)
    ]
    ns = sorted({r["n"] for r in rows})
    if len(ns) < 4:
        raise ValueError(
            f"need at least 4 distinct n values at (p={p}, sigma={sigma}), found {len(ns)}"
        )
    means = [float(np.mean([r[metric] for r in rows if r["n"] == n])) for n in ns]
    x = np.log(np.asarray(ns, dtype=float))
    z = np.log(np.asarray(means))
    xc = x - x.mean()
    slope = float(np.dot(xc, z) / np.dot(xc, xc))
    intercept = float(z.mean() - slope * x.mean())
    resid = z - (intercept + slope * x)
    dof = len(ns) - 2
    stderr = float(
        math.sqrt(float(np.dot(resid, resid)) / dof / float(np.dot(xc, xc)))
    ) if dof > 0 else math.nan
    return RateSlope(slope=slope, stderr=stderr, n_values=tuple(ns), means=tuple(means))


@dataclass(frozen=True)
class RegimeTag:
    """Noise-regime label with the threshold it was compared against."""

    kind: str  # large_noise | small_noise | boundary
    threshold: float


def classify_regime(n: int, p: int, sigma: float) -> RegimeTag:
    """Compare sigma to (p log n)/n; within a factor of 2 is the boundary.

    The comparison constant is 1: above ``2*(p log n)/n`` is large noise,
    below half of it small noise.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    threshold = p * math.log(n) / n
    if sigma > 2.0 * threshold:
        kind = "large_noise"
    elif sigma < 0.5 * threshold:
        kind = "small_noise"
    else:
        kind = "boundary"
    return RegimeTag(kind=kind, threshold=threshold)
