"""
Report and table output.

Every file is written atomically: the content goes to a temporary file in
the target directory which is then renamed over the destination, so a
crashed run never leaves a half-written report behind.

Table names and their columns:

    ler_vs_p        mode, window, p, shots, errors, ler, ci_lo, ci_hi,
                    ler_per_round, retry_rate, normalized_time
    time_vs_w       window, windows, mean_ns, median_ns, p95_ns, normalized
    ler_vs_q        bin, q_lo, q_hi, q_mean, shots, errors, probability, ci_lo, ci_hi
    separation_cdf  axis, distance, cdf
    commit_sweep    commit, window, shots, errors, ler, ci_lo, ci_hi, ler_per_round
"""

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from adawin.adaptive import TRACE_COLUMNS, TraceRow
from adawin.window import RECORD_COLUMNS, WindowRecord

PathLike = Union[str, Path]

TABLE_COLUMNS: Dict[str, Tuple[str, ...]] = {
    'ler_vs_p': (
        'mode', 'window', 'p', 'shots', 'errors', 'ler', 'ci_lo', 'ci_hi',
        'ler_per_round', 'retry_rate', 'normalized_time',
    ),
    'time_vs_w': ('window', 'windows', 'mean_ns', 'median_ns', 'p95_ns', 'normalized'),
    'ler_vs_q': (
        'bin', 'q_lo', 'q_hi', 'q_mean', 'shots', 'errors', 'probability', 'ci_lo', 'ci_hi',
    ),
    'separation_cdf': ('axis', 'distance', 'cdf'),
    'commit_sweep': (
        'commit', 'window', 'shots', 'errors', 'ler', 'ci_lo', 'ci_hi', 'ler_per_round',
    ),
}


@dataclass
class Table:
    """
    A named, plot-ready table.

    Attributes:
        name: One of ``TABLE_COLUMNS``.
        rows: Row dicts keyed by column name.
        meta: Extra values reported alongside (e.g. correlations).
    """

    name: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in TABLE_COLUMNS:
            raise ValueError(
                f"Unknown table {self.name!r}; expected one of {', '.join(TABLE_COLUMNS)}"
            )

    @property
    def columns(self) -> Tuple[str, ...]:
        return TABLE_COLUMNS[self.name]

    def column(self, name: str) -> List[Any]:
        return [row[name] for row in self.rows]

    def to_csv(self) -> str:
        return rows_to_csv(self.columns, self.rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'columns': list(self.columns),
            'rows': self.rows,
            'meta': self.meta,
        }


def rows_to_csv(columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
    """CSV text with a header row; missing cells are left empty."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator='\n', restval='')
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _cell(value: Any) -> Any:
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return value


def write_text_atomic(path: PathLike, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def write_json(path: PathLike, doc: Dict[str, Any]) -> Path:
    return write_text_atomic(path, json.dumps(doc, indent=2, sort_keys=True) + '\n')


def write_table(path: PathLike, table: Table) -> Path:
    return write_text_atomic(path, table.to_csv())


def records_csv(records: Iterable[WindowRecord]) -> str:
    """Window records, one row per window, in ``RECORD_COLUMNS`` order."""
    return rows_to_csv(RECORD_COLUMNS, (r.to_row() for r in records))


def trace_csv(trace: Iterable[Tuple[int, TraceRow]]) -> str:
    """Controller trace rows prefixed with their shot index."""
    columns = ('shot',) + TRACE_COLUMNS
    return rows_to_csv(columns, ({'shot': shot, **row.to_row()} for shot, row in trace))
