"""Human-readable summaries of reports and tables."""

from typing import List

from adawin.harness.experiment import ExperimentReport
from adawin.harness.reports import Table
from adawin.harness.studies import OracleCheckSummary


def format_report(report: ExperimentReport) -> str:
    """
    A few lines describing one experiment report.

    Timing lines are included only when windows were timed.
    """
    spec = report.spec
    code = spec['code']
    lines: List[str] = [
        f"code      {code['family']} d={code['d']}"
        + (f" ({code['name']})" if code.get('name') else ''),
        f"noise     {spec['noise']['kind']} p={spec['noise']['p']:g}, {spec['rounds']} rounds",
        f"mode      {spec['window_mode']}",
        f"shots     {report.shots}, errors {report.errors}",
        f"LER       {report.ler:.4g} [{report.ler_ci[0]:.4g}, {report.ler_ci[1]:.4g}]",
        f"per round {report.ler_per_round:.4g}",
        f"windows   {report.windows}, retried {report.retries} ({report.retry_rate:.1%})",
    ]
    if report.windows:
        lines.append(f"time      mean {report.timing['mean_ns'] / 1e3:.1f} us per window")
    if report.normalized_time is not None:
        lines.append(f"relative  {report.normalized_time:.3f} of the target window time")
    return '\n'.join(lines)


def format_table(table: Table) -> str:
    """Fixed-width text rendering of a table."""
    cols = table.columns
    cells = [[_fmt(row.get(c)) for c in cols] for row in table.rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(cols)]
    out = ['  '.join(c.ljust(w) for c, w in zip(cols, widths))]
    out += ['  '.join(v.ljust(w) for v, w in zip(r, widths)) for r in cells]
    for key, value in sorted(table.meta.items()):
        out.append(f"{key}: {_fmt(value)}")
    return '\n'.join(out)


def format_oracle(name: str, summary: OracleCheckSummary) -> str:
    status = 'PASS' if summary.passed else 'FAIL'
    return (
        f"{status} {name}: {summary.agreements}/{summary.compared} agree "
        f"({summary.agreement_rate:.3f}), {summary.ties_excluded} tied, "
        f"{summary.decoder_failures} decoder failures"
    )


def _fmt(value: object) -> str:
    if value is None:
        return '-'
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)
