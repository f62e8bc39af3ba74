"""Experiment orchestration: dataset fan-out, metrics tables, diagnostics.

All tabular output is RFC-4180 CSV with '.' decimals and a header row;
floats are written with shortest round-trip repr so identical runs emit
identical bytes. Wall-clock timings go only to a sidecar log, keeping the
CSV outputs fully determined by (config, seed).
"""

import csv
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .archive import save_chain
from .errors import ConfigError
from .gibbs import Chain, GhsConfig, credible_interval_select, default_burnin, posterior_mean, run_ghs
from .metrics import ConfusionReport, LossReport, confusion, frobenius_error, roc_from_chain, steins_loss
from .samplers import RngHandle, substream_id
from .structures import (
    PRESETS,
    GroundTruth,
    StructureSpec,
    export_edge_list_csv,
    export_ground_truth_csv,
    gen_structure,
    scatter,
    simulate_data,
)
from .svg import render_line_plot

#: stream id reserved for ground-truth structure generation (above any
#: dataset substream).
STRUCTURE_STREAM = 1 << 40

METRIC_COLUMNS = [
    "steins_loss", "frobenius", "tpr", "fpr",
    "sensitivity", "specificity", "precision", "accuracy",
]


def worker_count() -> int:
    """Parallel chain bound: GHS_THREADS when set, else logical core count."""
    env = os.environ.get("GHS_THREADS")
    if env:
        try:
            k = int(env)
        except ValueError as exc:
            raise ConfigError(f"GHS_THREADS must be an integer, got {env!r}") from exc
        if k < 1:
            raise ConfigError(f"GHS_THREADS must be >= 1, got {k}")
        return k
    return os.cpu_count() or 1


@dataclass
class ExperimentConfig:
    """Settings for one simulation scenario."""

    structure: StructureSpec | str
    n: int
    num_datasets: int
    ghs: GhsConfig | None = None
    seed: int = 0
    output_dir: Path | None = None
    selection_level: float = 0.5
    emit_roc: bool = False
    emit_trace: bool = False

    def resolve_structure(self) -> StructureSpec:
        if isinstance(self.structure, str):
            if self.structure not in PRESETS:
                raise ConfigError(
                    f"unknown preset {self.structure!r}; known: {sorted(PRESETS)}"
                )
            return PRESETS[self.structure]
        return self.structure

    def resolve_ghs(self) -> GhsConfig:
        if self.ghs is not None:
            return self.ghs
        p = self.resolve_structure().dim
        return GhsConfig(burnin=default_burnin(p), nmc=5000)


@dataclass
class DatasetResult:
    dataset: int
    loss: LossReport
    sel: ConfusionReport
    chain: Chain


@dataclass
class ExperimentResult:
    ground_truth: GroundTruth
    datasets: list[DatasetResult]
    summary: dict[str, tuple[float, float]]
    single_dataset_sd_flag: bool = False


def _metric_values(r: DatasetResult) -> dict[str, float]:
    return {
        "steins_loss": r.loss.steins_loss,
        "frobenius": r.loss.frobenius,
        "tpr": r.sel.tpr,
        "fpr": r.sel.fpr,
        "sensitivity": r.sel.sensitivity,
        "specificity": r.sel.specificity,
        "precision": r.sel.precision,
        "accuracy": r.sel.accuracy,
    }


def _run_one_dataset(d: int, gt: GroundTruth, cfg: ExperimentConfig,
                     ghs_cfg: GhsConfig, trace: bool) -> DatasetResult:
    data_rng = RngHandle(cfg.seed, substream_id(d, 0))
    chain_rng = RngHandle(cfg.seed, substream_id(d, 1))
    y = simulate_data(gt, cfg.n, data_rng)
    sc = scatter(y)
    chain = run_ghs(sc.matrix, sc.n, ghs_cfg, chain_rng,
                    trace=trace, trace_truth=gt.omega0 if trace else None)
    est = posterior_mean(chain)
    loss = LossReport(
        steins_loss=steins_loss(est, gt.omega0),
        frobenius=frobenius_error(est, gt.omega0),
    )
    sel = confusion(
        credible_interval_select(chain, cfg.selection_level), gt.adjacency0
    )
    return DatasetResult(dataset=d, loss=loss, sel=sel, chain=chain)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Generate datasets from one ground truth, fit each, tabulate metrics.

    Datasets run on a bounded worker pool; each worker owns its RNG
    substream and results are aggregated in dataset order, so the thread
    count never changes the output.
    """
    if config.num_datasets < 1:
        raise ConfigError(f"num_datasets must be >= 1, got {config.num_datasets}")
    spec = config.resolve_structure()
    ghs_cfg = config.resolve_ghs()
    t0 = time.time()

    gt = gen_structure(spec, RngHandle(config.seed, STRUCTURE_STREAM))

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(
            pool.map(
                lambda d: _run_one_dataset(d, gt, config, ghs_cfg, config.emit_trace),
                range(config.num_datasets),
            )
        )
    results.sort(key=lambda r: r.dataset)

    single = config.num_datasets == 1
    summary = {}
    for col in METRIC_COLUMNS:
        vals = np.array([_metric_values(r)[col] for r in results])
        sd = 0.0 if single else float(np.std(vals, ddof=1))
        summary[col] = (float(np.mean(vals)), sd)
    out = ExperimentResult(
        ground_truth=gt, datasets=results, summary=summary,
        single_dataset_sd_flag=single,
    )

    if config.output_dir is not None:
        _write_experiment_outputs(out, config, spec, time.time() - t0)
    return out


def _write_experiment_outputs(result: ExperimentResult, config: ExperimentConfig,
                              spec: StructureSpec, elapsed: float) -> None:
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    export_ground_truth_csv(result.ground_truth, spec, outdir / "ground_truth.csv")
    export_edge_list_csv(result.ground_truth, outdir / "ground_truth_edges.csv")

    with open(outdir / "metrics.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset"] + METRIC_COLUMNS)
        for r in result.datasets:
            vals = _metric_values(r)
            w.writerow([r.dataset] + [repr(vals[c]) for c in METRIC_COLUMNS])

    with open(outdir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "mean", "sd", "sd_degenerate"])
        for col in METRIC_COLUMNS:
            mean, sd = result.summary[col]
            w.writerow([col, repr(mean), repr(sd),
                        int(result.single_dataset_sd_flag)])

    for r in result.datasets:
        save_chain(r.chain, outdir / f"chain_{r.dataset:03d}.ghs")
        if config.emit_roc:
            curve = roc_from_chain(r.chain, result.ground_truth.adjacency0)
            write_roc_csv(curve, outdir / f"roc_{r.dataset:03d}.csv")

    if config.emit_trace:
        emit_trace(
            [r.chain for r in result.datasets],
            result.ground_truth,
            outdir / "trace",
        )

    # timings are deliberately kept out of the deterministic CSVs
    with open(outdir / "run.log", "a") as fh:
        fh.write(
            f"{time.strftime('%Y-%m-%dT%H:%M:%S')} "
            f"datasets={config.num_datasets} wall_clock_s={elapsed:.3f}\n"
        )


def write_roc_csv(curve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "fpr", "tpr", "undefined_tpr"])
        for fpr, tpr, level in curve.points:
            w.writerow([repr(level), repr(fpr), repr(tpr), int(curve.undefined_tpr)])


def trace_convergence_stat(series: NDArray, early=(400, 500), late=(900, 1000)) -> float:
    """|mean(early window) - mean(late window)| / mean(late window)."""
    if len(series) < late[1]:
        raise ConfigError(
            f"trace has {len(series)} sweeps; needs at least {late[1]}"
        )
    e = float(np.mean(series[early[0]:early[1]]))
    l = float(np.mean(series[late[0]:late[1]]))
    return abs(e - l) / abs(l)


def emit_trace(chains: list[Chain], truth: GroundTruth | None, out,
               window: tuple[int, int] = (400, 1000)) -> dict[int, float]:
    """Per-sweep diagnostic traces for one or more chains, as CSV + SVG.

    Each chain must carry a recorded trace (run with ``trace=True``).
    With a ground truth the series is Stein's loss against it; without,
    the sampler records a log-likelihood-proportional quantity instead.
    Returns the running-mean convergence statistic per chain where the
    trace is long enough.
    """
    out = Path(out)
    series = []
    for k, chain in enumerate(chains):
        if chain.trace is None:
            raise ConfigError(f"chain {k} has no recorded trace")
        series.append(chain.trace)

    with open(out.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["chain_id", "iter", "loss"])
        for k, tr in enumerate(series):
            for it, v in enumerate(tr):
                w.writerow([k, it, repr(float(v))])

    label = "Stein's loss" if truth is not None else "log-likelihood (prop.)"
    render_line_plot(
        [(list(range(len(tr))), list(tr)) for tr in series],
        [f"chain {k}" for k in range(len(series))],
        out.with_suffix(".svg"),
        title=f"{label} per sweep",
        ylabel=label,
        inset=window,
    )

    stats = {}
    for k, tr in enumerate(series):
        if len(tr) >= 1000:
            stats[k] = trace_convergence_stat(tr)
    return stats


def _load_matrix_csv(path) -> NDArray:
    """Numeric n x p matrix from CSV; a non-numeric first row is a header."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ConfigError(f"{path}: empty input")
    start = 0
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        start = 1
    if start >= len(rows):
        raise ConfigError(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in r] for r in rows[start:]])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed numeric CSV: {exc}") from exc
    return data


@dataclass
class EstimateResult:
    estimate: NDArray
    adjacency: NDArray
    chain: Chain


def run_estimate(data_csv, ghs: GhsConfig | None, seed: int, output_dir,
                 *, selection_level: float = 0.5, center: bool = True) -> EstimateResult:
    """Fit the sampler to an observed data matrix and write the reports.

    Columns are mean-centered by default (the model is zero-mean); pass
    ``center=False`` for pre-centered data. Emits the posterior mean, the
    selected edge list with partial correlations, a vertex report with
    residual variances, and the chain archive.
    """
    y = _load_matrix_csv(data_csv)
    n, p = y.shape
    col_sd = y.std(axis=0)
    if np.any(col_sd == 0.0):
        warnings.warn(
            f"{int(np.sum(col_sd == 0.0))} constant column(s) in input; proceeding"
        )
    if center:
        y = y - y.mean(axis=0)

    cfg = ghs if ghs is not None else GhsConfig(burnin=default_burnin(p), nmc=5000)
    sc = scatter(y)
    chain = run_ghs(sc.matrix, sc.n, cfg, RngHandle(seed, substream_id(0, 0)))
    est = posterior_mean(chain)
    adj = credible_interval_select(chain, selection_level) if p > 1 \
        else np.zeros((1, 1), dtype=bool)

    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    with open(outdir / "posterior_mean.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        for row in est:
            w.writerow([repr(v) for v in row])

    diag = np.diag(est)
    with open(outdir / "edges.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "omega", "partial_correlation"])
        iu = np.triu_indices(p, k=1)
        for a, b in zip(*iu):
            if adj[a, b]:
                pc = -est[a, b] / np.sqrt(diag[a] * diag[b])
                w.writerow([int(a), int(b), repr(est[a, b]), repr(float(pc))])

    with open(outdir / "vertices.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "residual_variance", "degree"])
        deg = adj.sum(axis=0)
        for i in range(p):
            w.writerow([i, repr(float(1.0 / diag[i])), int(deg[i])])

    save_chain(chain, outdir / "chain.ghs")
    return EstimateResult(estimate=est, adjacency=adj, chain=chain)
