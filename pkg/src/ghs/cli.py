"""Command line interface.

Subcommands mirror the three workflows: ``simulate`` runs a replicated
simulation scenario, ``estimate`` fits the sampler to an observed data
matrix, ``trace`` produces multi-chain convergence diagnostics, and
``roc`` rebuilds a ROC curve from a stored chain. Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 I/O error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .archive import load_chain
from .errors import ArchiveCorruptionError, ArchiveFormatError, ConfigError, GhsError, NumericalError, ParameterError
from .experiment import (
    ExperimentConfig,
    emit_trace,
    run_estimate,
    run_experiment,
    write_roc_csv,
)
from .gibbs import GhsConfig, default_burnin, run_ghs
from .metrics import roc_from_chain
from .samplers import RngHandle, substream_id
from .structures import PRESETS, StructureKind, StructureSpec, gen_structure, load_edge_list_adjacency, scatter, simulate_data


def _add_ghs_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--nmc", type=int, default=None)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--fixed-tau", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)


def _ghs_config(args, p_dim: int) -> GhsConfig:
    return GhsConfig(
        burnin=args.burnin if args.burnin is not None else default_burnin(p_dim),
        nmc=args.nmc if args.nmc is not None else 5000,
        thin=args.thin,
        fixed_tau=args.fixed_tau,
    )


def _structure_from_args(args) -> StructureSpec | str:
    if args.preset:
        return args.preset
    if not args.structure:
        raise ConfigError("either --preset or --structure is required")
    kind = StructureKind(args.structure)
    if kind is StructureKind.RANDOM:
        return StructureSpec(kind, args.p, prob=args.prob,
                             magnitude_low=args.magnitude_low,
                             magnitude_high=args.magnitude_high)
    return StructureSpec(kind, args.p, num_groups=args.groups,
                         group_size=args.group_size, value=args.value)


def _cmd_simulate(args) -> int:
    structure = _structure_from_args(args)
    spec = PRESETS[structure] if isinstance(structure, str) else structure
    config = ExperimentConfig(
        structure=structure,
        n=args.n,
        num_datasets=args.datasets,
        ghs=_ghs_config(args, spec.dim),
        seed=args.seed,
        output_dir=args.out,
        selection_level=args.level,
        emit_roc=args.roc,
        emit_trace=args.trace,
    )
    result = run_experiment(config)
    for col, (mean, sd) in result.summary.items():
        print(f"{col}: {mean:.4f} ({sd:.4f})")
    return 0


def _cmd_estimate(args) -> int:
    cfg = GhsConfig(
        burnin=args.burnin if args.burnin is not None else 500,
        nmc=args.nmc if args.nmc is not None else 5000,
        thin=args.thin,
        fixed_tau=args.fixed_tau,
    )
    res = run_estimate(
        args.data, cfg, args.seed, args.out,
        selection_level=args.level, center=not args.no_center,
    )
    n_edges = int(np.sum(np.triu(res.adjacency, k=1)))
    print(f"p={res.estimate.shape[0]} selected_edges={n_edges}")
    return 0


def _cmd_trace(args) -> int:
    structure = _structure_from_args(args)
    spec = PRESETS[structure] if isinstance(structure, str) else structure
    gt = gen_structure(spec, RngHandle(args.seed, 1 << 40))
    y = simulate_data(gt, args.n, RngHandle(args.seed, substream_id(0, 0)))
    sc = scatter(y)
    cfg = _ghs_config(args, spec.dim)
    chains = []
    for c in range(args.chains):
        omega_init = None
        if c > 0:
            # alternate start: a random symmetric PD matrix
            g = RngHandle(args.seed, substream_id(0, 100 + c)).generator
            a = g.standard_normal((spec.dim, spec.dim))
            omega_init = a @ a.T / spec.dim + np.eye(spec.dim)
        chains.append(
            run_ghs(sc.matrix, sc.n, cfg, RngHandle(args.seed, substream_id(0, 1 + c)),
                    omega_init=omega_init, trace=True, trace_truth=gt.omega0)
        )
    args.out.mkdir(parents=True, exist_ok=True)
    stats = emit_trace(chains, gt, args.out / "trace")
    for k, v in stats.items():
        print(f"chain {k}: running-mean convergence stat = {v:.4f}")
    return 0


def _cmd_roc(args) -> int:
    chain = load_chain(args.chain)
    truth_adj = load_edge_list_adjacency(args.truth, chain.p)
    curve = roc_from_chain(chain, truth_adj)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_roc_csv(curve, args.out)
    print(f"wrote {len(curve.points)} ROC points to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghs",
        description="Graphical horseshoe sampler for sparse precision matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="replicated simulation scenario")
    sim.add_argument("--preset", choices=sorted(PRESETS), default=None)
    sim.add_argument("--structure", choices=[k.value for k in StructureKind], default=None)
    sim.add_argument("--p", type=int, default=100)
    sim.add_argument("--prob", type=float, default=0.01)
    sim.add_argument("--magnitude-low", type=float, default=-1.0)
    sim.add_argument("--magnitude-high", type=float, default=-0.2)
    sim.add_argument("--groups", type=int, default=10)
    sim.add_argument("--group-size", type=int, default=3)
    sim.add_argument("--value", type=float, default=0.75)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--datasets", type=int, default=50)
    sim.add_argument("--level", type=float, default=0.5)
    sim.add_argument("--roc", action="store_true")
    sim.add_argument("--trace", action="store_true")
    _add_ghs_flags(sim)
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate", help="fit a centered data matrix")
    est.add_argument("data", type=Path)
    est.add_argument("--level", type=float, default=0.5)
    est.add_argument("--no-center", action="store_true")
    _add_ghs_flags(est)
    est.set_defaults(func=_cmd_estimate)

    tr = sub.add_parser("trace", help="multi-chain convergence diagnostics")
    tr.add_argument("--preset", choices=sorted(PRESETS), default=None)
    tr.add_argument("--structure", choices=[k.value for k in StructureKind], default=None)
    tr.add_argument("--p", type=int, default=100)
    tr.add_argument("--prob", type=float, default=0.01)
    tr.add_argument("--magnitude-low", type=float, default=-1.0)
    tr.add_argument("--magnitude-high", type=float, default=-0.2)
    tr.add_argument("--groups", type=int, default=10)
    tr.add_argument("--group-size", type=int, default=3)
    tr.add_argument("--value", type=float, default=0.75)
    tr.add_argument("--n", type=int, required=True)
    tr.add_argument("--chains", type=int, default=2)
    _add_ghs_flags(tr)
    tr.set_defaults(func=_cmd_trace)

    roc = sub.add_parser("roc", help="ROC curve from a stored chain")
    roc.add_argument("--chain", type=Path, required=True)
    roc.add_argument("--truth", type=Path, required=True)
    roc.add_argument("--out", type=Path, required=True)
    roc.set_defaults(func=_cmd_roc)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError,) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ArchiveFormatError, ArchiveCorruptionError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    except GhsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
