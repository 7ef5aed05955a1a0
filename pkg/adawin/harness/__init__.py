"""
Adawin Harness Module

Benchmarks and validation:
- Deterministic Monte-Carlo experiments (global, fixed and adaptive windows)
- Wilson intervals, LER per round, timing and rank-correlation statistics
- Comparison, Q-binning, separation, commit and scaling studies
- Exhaustive oracle checks on small DEMs
- Atomic CSV and JSON report writers
"""

from adawin.decoders.oracle import OracleResult, oracle_decode
from adawin.harness.experiment import (
    CODE_FAMILIES,
    WINDOW_MODES,
    CodeSpec,
    ExperimentReport,
    ExperimentSpec,
    ShotOutcome,
    build_dem,
    git_revision,
    run_experiment,
    run_shots,
    summarize,
)
from adawin.harness.reports import (
    TABLE_COLUMNS,
    Table,
    records_csv,
    rows_to_csv,
    trace_csv,
    write_json,
    write_table,
    write_text_atomic,
)
from adawin.harness.stats import (
    ci_overlap,
    ler_per_round,
    shot_seed,
    spearman,
    timing_summary,
    wilson_interval,
)
from adawin.harness.studies import (
    ORACLE_PASS_RATE,
    OracleCheckSummary,
    SeparationStats,
    adaptive_comparison,
    commit_size_sweep,
    detector_separation,
    ler_vs_q_bins,
    max_nearest_neighbour,
    oracle_check,
    oracle_fragments,
    torus_distance,
    window_time_scaling,
)
from adawin.harness.summary import format_oracle, format_report, format_table

__all__ = [
    # Experiments
    "CodeSpec",
    "ExperimentSpec",
    "ExperimentReport",
    "ShotOutcome",
    "CODE_FAMILIES",
    "WINDOW_MODES",
    "build_dem",
    "run_shots",
    "run_experiment",
    "summarize",
    "git_revision",
    # Statistics
    "shot_seed",
    "wilson_interval",
    "ci_overlap",
    "ler_per_round",
    "timing_summary",
    "spearman",
    # Studies
    "adaptive_comparison",
    "ler_vs_q_bins",
    "SeparationStats",
    "detector_separation",
    "max_nearest_neighbour",
    "torus_distance",
    "commit_size_sweep",
    "window_time_scaling",
    "OracleCheckSummary",
    "ORACLE_PASS_RATE",
    "oracle_check",
    "oracle_decode",
    "OracleResult",
    "oracle_fragments",
    # Reports
    "Table",
    "TABLE_COLUMNS",
    "records_csv",
    "rows_to_csv",
    "trace_csv",
    "write_json",
    "write_table",
    "write_text_atomic",
    "format_report",
    "format_table",
    "format_oracle",
]
