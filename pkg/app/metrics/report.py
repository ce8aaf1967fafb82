"""Results table in the Test1 / Test2 / Test3 / Average layout.

Text form::

    Model        |     Test1     |     Test2     |    Average
                 |   PER   CER   |   PER   CER   |   PER   CER
    attention    | 21.14 34.90   | ...

CSV form (one value per line, header ``model,bucket,metric,value``)::

    attention,Test1,PER,21.14
"""

from __future__ import annotations

import csv
import dataclasses
import io
from typing import Mapping, Optional, Sequence

from app.constants import AVERAGE_COLUMN

METRICS = ("PER", "CER")
FOOTER = "Average pools edit distances and reference lengths over all utterances."

Results = Mapping[str, Mapping[str, Mapping[str, Optional[float]]]]   # model → metric → bucket → rate


@dataclasses.dataclass
class Report:
    columns: list[str]
    metrics: list[str]
    rows: dict[str, dict[str, dict[str, Optional[float]]]]

    def _value(self, model: str, metric: str, bucket: str) -> Optional[float]:
        return self.rows[model].get(metric, {}).get(bucket)

    def to_text(self) -> str:
        name_w = max([len("Model")] + [len(m) for m in self.rows]) + 2
        cell_w = 7
        group_w = cell_w * len(self.metrics) + 1
        head = "Model".ljust(name_w) + "".join(f"|{c:^{group_w}}" for c in self.columns)
        sub = " " * name_w + "".join(
            "|" + "".join(f"{m:>{cell_w}}" for m in self.metrics) + " " for _ in self.columns
        )
        lines = [head, sub, "-" * len(head)]
        for model in self.rows:
            line = model.ljust(name_w)
            for col in self.columns:
                cells = []
                for metric in self.metrics:
                    v = self._value(model, metric, col)
                    cells.append(f"{v:>{cell_w}.2f}" if v is not None else f"{'-':>{cell_w}}")
                line += "|" + "".join(cells) + " "
            lines.append(line.rstrip())
        lines.append("")
        lines.append(FOOTER)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model", "bucket", "metric", "value"])
        for model in self.rows:
            for col in self.columns:
                for metric in self.metrics:
                    v = self._value(model, metric, col)
                    if v is not None:
                        writer.writerow([model, col, metric, f"{v:.2f}"])
        return buf.getvalue()


def make_report(results: Results, columns: Optional[Sequence[str]] = None) -> Report:
    """Build the table; ``columns`` defaults to every bucket seen, Average last."""
    if columns is None:
        seen: dict[str, None] = {}
        for per_metric in results.values():
            for per_bucket in per_metric.values():
                seen.update(dict.fromkeys(per_bucket))
        seen.pop(AVERAGE_COLUMN, None)
        columns = [*seen, AVERAGE_COLUMN]
    used = {metric for per_metric in results.values() for metric in per_metric}
    metrics = [m for m in METRICS if m in used] + sorted(used - set(METRICS))
    rows = {model: {metric: dict(b) for metric, b in per_metric.items()}
            for model, per_metric in results.items()}
    return Report(list(columns), metrics, rows)


def sample_table(samples: Sequence[tuple[str, str, str]]) -> str:
    """Decoded-output table: utterance id, reference and hypothesis renderings."""
    lines = []
    for uid, ref, hyp in samples:
        lines.append(f"{uid}")
        lines.append(f"  REF: {ref}")
        lines.append(f"  HYP: {hyp}")
    return "\n".join(lines) + ("\n" if lines else "")
