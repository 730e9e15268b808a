"""Precision / recall / F-measure of user stances against gold labels."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .corpus import Stance

CLASSES = (Stance.FOR, Stance.AGAINST)
CSV_HEADER = ("method", "group", "class", "precision", "recall", "f1")


@dataclass(frozen=True)
class ConfusionCounts:
    # (gold, predicted) -> count
    pairs: dict[tuple[Stance, Stance], int]
    # gold stance -> users with no prediction
    unpredicted: dict[Stance, int]

    @property
    def total(self) -> int:
        return sum(self.pairs.values()) + sum(self.unpredicted.values())


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    per_class: dict[Stance, ClassScores]
    macro: ClassScores
    confusion: ConfusionCounts


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def evaluate(pred: Mapping[str, Stance], gold: Mapping[str, Stance]) -> MetricsReport:
    """Score ``pred`` on the users in ``gold``.

    Gold users missing from ``pred`` count as misses for their gold class.
    Macro F1 is the mean of the per-class F1 values. Scores are computed as
    exact fractions and rounded to float once.
    """
    if not gold:
        raise ValueError("gold labels are empty")
    pairs = {(g, p): 0 for g in CLASSES for p in CLASSES}
    unpredicted = {c: 0 for c in CLASSES}
    for user_id, g in gold.items():
        p = pred.get(user_id)
        if p is None:
            unpredicted[g] += 1
        else:
            pairs[g, p] += 1
    exact = {}
    for c in CLASSES:
        tp = pairs[c, c]
        n_pred = sum(pairs[g, c] for g in CLASSES)
        n_gold = sum(pairs[c, p] for p in CLASSES) + unpredicted[c]
        # F1 = 2PR/(P+R) = 2tp/(n_pred+n_gold)
        exact[c] = (_ratio(tp, n_pred), _ratio(tp, n_gold), _ratio(2 * tp, n_pred + n_gold))
    per_class = {c: ClassScores(*(float(v) for v in exact[c])) for c in CLASSES}
    macro = ClassScores(*(float(sum(v) / 2) for v in zip(*exact.values())))
    return MetricsReport(per_class, macro, ConfusionCounts(pairs, unpredicted))


@dataclass(frozen=True)
class RenderedTable:
    text: str
    csv: str


def _pct(v: float) -> str:
    return f"{100 * v:.2f}"


def csv_rows(method: str, group: str, report: MetricsReport) -> list[tuple[str, ...]]:
    rows = []
    for name, s in [(c.value, report.per_class[c]) for c in CLASSES] + [("macro", report.macro)]:
        rows.append((method, group, name, _pct(s.precision), _pct(s.recall), _pct(s.f1)))
    return rows


def report_table(
    results: Mapping[str, MetricsReport | Mapping[str, MetricsReport]],
) -> RenderedTable:
    """Render methods as rows with macro P/R/F per evaluation group.

    A bare MetricsReport value is treated as the single group ``all``.
    Methods keep the caller's ordering; groups keep first-seen ordering.
    """
    if not results:
        raise ValueError("no methods to report")
    grouped: dict[str, Mapping[str, MetricsReport]] = {
        m: ({"all": r} if isinstance(r, MetricsReport) else r) for m, r in results.items()
    }
    groups: list[str] = []
    for by_group in grouped.values():
        groups.extend(g for g in by_group if g not in groups)

    rows = [
        row
        for method, by_group in grouped.items()
        for g in groups
        if g in by_group
        for row in csv_rows(method, g, by_group[g])
    ]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    return RenderedTable(render_text(rows), buf.getvalue())


def render_text(rows: list[tuple[str, ...]]) -> str:
    """Plain-text table of the macro rows among CSV-shaped ``rows``."""
    macro: dict[str, dict[str, tuple[str, ...]]] = {}
    groups: list[str] = []
    for method, group, cls, p, r, f in rows:
        if cls != "macro":
            continue
        macro.setdefault(method, {})[group] = (p, r, f)
        if group not in groups:
            groups.append(group)
    width = max(len("Methods"), *(len(m) for m in macro))
    head1 = "Methods".ljust(width) + "".join(f" | {g:^30}" for g in groups)
    head2 = " " * width + " | {:>9} {:>8} {:>11}".format("precision", "recall", "F-measure") * len(groups)
    lines = [head1, head2, "-" * len(head2)]
    for method, by_group in macro.items():
        cells = "".join(
            " | {:>9} {:>8} {:>11}".format(*by_group.get(g, ("-", "-", "-"))) for g in groups
        )
        lines.append(method.ljust(width) + cells)
    return "\n".join(lines) + "\n"


def read_metrics_csv(path) -> list[tuple[str, ...]]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is not None and tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected metrics header")
        return [tuple(row) for row in reader if row]


def write_metrics_csv(rows: list[tuple[str, ...]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
