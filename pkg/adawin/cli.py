"""
Command-line entry point.

Subcommands:

    adawin benchmark --config preset:smoke --out results/smoke
    adawin sweep --config run.json --axis p --values 0.003 0.005 0.008
    adawin oracle-check [--config run.json | --dem dem.json]
    adawin dem-export --config run.json --out dem.json

Exit codes: 0 on success, 1 on a runtime failure (or a failed oracle
check), 2 on a configuration or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from adawin.config import SWEEP_AXES, RunConfig, load_config
from adawin.codes import DetectorModel, load_dem, save_dem
from adawin.decoders import BpLsdDecoder
from adawin.errors import AdawinError, ConfigError
from adawin.harness import (
    Table,
    adaptive_comparison,
    build_dem,
    commit_size_sweep,
    detector_separation,
    format_oracle,
    format_report,
    format_table,
    git_revision,
    ler_vs_q_bins,
    oracle_check,
    oracle_fragments,
    records_csv,
    rows_to_csv,
    run_experiment,
    trace_csv,
    window_time_scaling,
    write_json,
    write_table,
    write_text_atomic,
)
from adawin.version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

SWEEP_COLUMNS = (
    'axis', 'value', 'mode', 'p', 'window', 'commit', 'shots', 'errors', 'ler',
    'ci_lo', 'ci_hi', 'ler_per_round', 'retry_rate', 'normalized_time', 'report',
)


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="adawin",
        description="Adaptive sliding-window decoding benchmarks.",
    )
    parser.add_argument('--version', action='version', version=f"adawin {__version__}")
    parser.add_argument(
        '-v', '--verbose', action='count', default=0,
        help="More logging (-v info, -vv debug)",
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        p.add_argument(
            '--config', required=config_required,
            help="Run configuration JSON, or preset:NAME",
        )
        p.add_argument('--shots', type=int, help="Override the shot count")
        p.add_argument('--seed', type=int, help="Override the base seed")
        p.add_argument('--threads', type=int, help="Worker threads for shot fan-out")
        p.add_argument('--out', help="Output directory (file for dem-export)")

    bench = sub.add_parser('benchmark', help="Run the configured study")
    common(bench)

    sweep = sub.add_parser('sweep', help="Run one experiment per value of an axis")
    common(sweep)
    sweep.add_argument('--axis', required=True, choices=SWEEP_AXES)
    sweep.add_argument('--values', required=True, nargs='+', type=float)
    sweep.add_argument(
        '--force', action='store_true', help="Recompute points whose report already exists",
    )

    oracle = sub.add_parser('oracle-check', help="Compare BP+LSD with the exhaustive oracle")
    common(oracle, config_required=False)
    oracle.add_argument('--dem', help="DEM JSON to check instead of the built-in fragments")

    export = sub.add_parser('dem-export', help="Write the configured DEM as JSON")
    common(export)
    return parser.parse_args(argv)


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _load(args: argparse.Namespace) -> RunConfig:
    overrides = {
        'shots': args.shots,
        'seed': args.seed,
        'threads': args.threads,
        'output': args.out,
    }
    return load_config(args.config, overrides)


def _study_document(cfg: RunConfig, table: Table) -> Dict[str, Any]:
    return {
        'config': cfg.to_dict(),
        'table': table.to_dict(),
        'metadata': {'version': __version__, 'git_revision': git_revision()},
    }


def run_study(cfg: RunConfig, out: Path) -> List[Path]:
    """
    Run the study selected by ``cfg.study.kind`` and write its outputs.

    Returns:
        Paths written.
    """
    kind = cfg.study.kind
    written: List[Path] = []
    if kind == 'experiment':
        spec = cfg.experiment_spec()
        report = run_experiment(spec)
        doc = report.to_dict()
        doc['config'] = cfg.to_dict()
        written.append(write_json(out / 'report.json', doc))
        written.append(write_text_atomic(out / 'windows.csv', records_csv(report.records)))
        if report.trace:
            written.append(write_text_atomic(out / 'trace.csv', trace_csv(report.trace)))
        print(format_report(report))
        return written

    spec = cfg.experiment_spec(force_adaptive=kind == 'adaptive_comparison')
    if kind == 'adaptive_comparison':
        table = adaptive_comparison(spec, [tuple(p) for p in cfg.study.pairs] or None)
    elif kind == 'ler_vs_q':
        table = ler_vs_q_bins(spec, list(cfg.study.q_edges) or cfg.study.q_bins)
    elif kind == 'separation':
        stats = detector_separation(spec)
        table = stats.to_table()
        limit = spec.code.distance // 2
        space, time = stats.fraction_within(limit)
        table.meta.update(
            limit=limit, fraction_space=space, fraction_time=time, pairs=len(stats.space)
        )
    elif kind == 'commit_sweep':
        table = commit_size_sweep(spec, cfg.study.commits)
    else:
        sizes = cfg.study.sizes or tuple(range(2, min(spec.code.distance, spec.rounds) + 1))
        table = window_time_scaling(spec, sizes)

    written.append(write_table(out / f"{table.name}.csv", table))
    written.append(write_json(out / f"{table.name}.json", _study_document(cfg, table)))
    print(format_table(table))
    return written


def cmd_benchmark(args: argparse.Namespace) -> int:
    cfg = _load(args)
    paths = run_study(cfg, Path(cfg.output))
    for path in paths:
        logger.info("Wrote %s", path)
    return EXIT_OK


def _point_name(axis: str, value: float) -> str:
    return f"{axis}={value:g}"


def cmd_sweep(args: argparse.Namespace) -> int:
    base = _load(args)
    root = Path(base.output)
    rows = []
    for value in args.values:
        cfg = base.with_axis(args.axis, value)
        target = root / _point_name(args.axis, value) / 'report.json'
        if target.is_file() and not args.force:
            logger.info("Skipping %s (report exists)", target)
            with open(target, 'r', encoding='utf-8') as f:
                doc = json.load(f)
        else:
            report = run_experiment(cfg.experiment_spec())
            doc = report.to_dict()
            doc['config'] = cfg.to_dict()
            write_json(target, doc)
            write_text_atomic(target.parent / 'windows.csv', records_csv(report.records))
        spec = doc['spec']
        window = spec['window']
        if spec['window_mode'] == 'adaptive':
            window = spec['adaptive']['target_window']
        rows.append({
            'axis': args.axis,
            'value': value,
            'mode': spec['window_mode'],
            'p': spec['noise']['p'],
            'window': window,
            'commit': spec['commit'],
            'shots': doc['shots'],
            'errors': doc['errors'],
            'ler': doc['ler'],
            'ci_lo': doc['ler_ci'][0],
            'ci_hi': doc['ler_ci'][1],
            'ler_per_round': doc['ler_per_round'],
            'retry_rate': doc['retry_rate'],
            'normalized_time': doc.get('normalized_time'),
            'report': str(target),
        })
    combined = write_text_atomic(root / f"sweep_{args.axis}.csv", rows_to_csv(SWEEP_COLUMNS, rows))
    print(combined)
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    shots = args.shots if args.shots is not None else 200
    seed = args.seed if args.seed is not None else 0
    targets: List[Tuple[str, DetectorModel]] = []
    decoder = BpLsdDecoder()
    if args.dem is not None:
        path = Path(args.dem)
        if not path.is_file():
            raise ConfigError(f"DEM file not found: {path}")
        targets.append((path.name, load_dem(path)))
    elif args.config is not None:
        cfg = _load(args)
        spec = cfg.experiment_spec()
        decoder = BpLsdDecoder(spec.bp, spec.weight_mode)
        shots = cfg.study.oracle_shots if args.shots is None else shots
        seed = cfg.seed
        targets.append(('config', build_dem(spec)))
    else:
        targets.extend(oracle_fragments())

    failed = 0
    for name, dem in targets:
        summary = oracle_check(dem, shots, seed, decoder)
        print(format_oracle(name, summary))
        failed += not summary.passed
    return EXIT_OK if failed == 0 else EXIT_FAILURE


def cmd_dem_export(args: argparse.Namespace) -> int:
    cfg = _load(args)
    dem: DetectorModel = build_dem(cfg.experiment_spec())
    target = Path(args.out) if args.out else Path(cfg.output) / 'dem.json'
    if target.is_dir():
        target = target / 'dem.json'
    save_dem(dem, target)
    print(target)
    return EXIT_OK


_COMMANDS = {
    'benchmark': cmd_benchmark,
    'sweep': cmd_sweep,
    'oracle-check': cmd_oracle_check,
    'dem-export': cmd_dem_export,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, OSError) as exc:
        print(f"adawin: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AdawinError, ValueError, RuntimeError) as exc:
        print(f"adawin: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
