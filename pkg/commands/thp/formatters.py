import math
import os
from typing import Any, Dict, Iterable, List, Sequence

from .models import CheckResult, RateRecord

CSV_HEADER = 'scheme,P_dB,B,user_index,mean_rate_bits,stderr,trials,resampled'
REPORT_HEADER = 'check_name,statistic,threshold,verdict'


def _number(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return 'nan'
    return f"{value:.10g}"


class ResultFormatter:
    """result formatter"""

    @staticmethod
    def format_csv(records: Iterable[RateRecord]) -> str:
        """
        format rate records as CSV

        params:
            records: rate records in output order

        return:
            CSV text with CSV_HEADER as the first line
        """
        lines = [CSV_HEADER]
        for r in records:
            lines.append(f"{r.scheme},{_number(r.P_dB)},{r.B},{r.user_index},{_number(r.mean_rate)},"
                         f"{_number(r.stderr)},{r.trials},{r.resampled}")
        return '\n'.join(lines) + '\n'

    @staticmethod
    def format_report(checks: Iterable[CheckResult]) -> str:
        """one 'check_name,statistic,threshold,verdict' line per check"""
        lines = [REPORT_HEADER]
        for check in checks:
            lines.append(f"{check.name},{_number(check.statistic)},{_number(check.threshold)},{check.verdict}")
        return '\n'.join(lines) + '\n'

    @staticmethod
    def format_table(rows: Sequence[Dict[str, Any]]) -> str:
        """comma-separated table, columns in the key order of the first row"""
        if not rows:
            return ''
        columns = list(rows[0])
        lines = [','.join(columns)]
        for row in rows:
            lines.append(','.join(_number(row[c]) if isinstance(row[c], float) else str(row[c]) for c in columns))
        return '\n'.join(lines) + '\n'

    @staticmethod
    def write(text: str, path: str) -> str:
        """write text to path, creating parent directories; returns the path"""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as stream:
            stream.write(text)
        return path

    @staticmethod
    def format_plot_script(csv_name: str, title: str, x_column: str, series: List[str],
                           split_by_bits: bool = True) -> str:
        """
        standalone matplotlib script plotting across-user rows of a result CSV

        params:
            csv_name: CSV file name, resolved next to the script
            title: figure title
            x_column: 'P_dB' or 'B'
            series: scheme names to draw, one line each
            split_by_bits: draw one line per B for P_dB plots
        """
        xlabel = 'SNR (dB)' if x_column == 'P_dB' else 'feedback bits per user'
        image = os.path.splitext(csv_name)[0] + '.png'
        return f'''"""plot {csv_name}; run with python from any directory"""
import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
SERIES = {series!r}
X_COLUMN = {x_column!r}
SPLIT_BY_BITS = {split_by_bits!r}

lines = defaultdict(list)
with open(os.path.join(HERE, {csv_name!r}), newline='') as stream:
    for row in csv.DictReader(stream):
        if row['scheme'] not in SERIES or row['user_index'] != '-1':
            continue
        label = row['scheme'] if not SPLIT_BY_BITS or X_COLUMN == 'B' or row['B'] == '-1' else f"{{row['scheme']}} B={{row['B']}}"
        lines[label].append((float(row[X_COLUMN]), float(row['mean_rate_bits']), float(row['stderr'])))

fig, ax = plt.subplots()
for label, points in sorted(lines.items()):
    points.sort()
    xs, ys, es = zip(*points)
    ax.errorbar(xs, ys, yerr=es, marker='o', capsize=2, label=label)
ax.set_xlabel({xlabel!r})
ax.set_ylabel('bits per user')
ax.set_title({title!r})
ax.grid(True)
ax.legend()
fig.savefig(os.path.join(HERE, {image!r}), dpi=150)
'''
