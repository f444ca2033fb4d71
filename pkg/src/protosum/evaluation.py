"""Summary evaluation: ROUGE metrics and the three stream criteria.

Relevance compares a summary against its set's reference; novelty compares
only the tokens that were not in the previous summary; distinctiveness
normalizes dissimilarity to other sets' references by dissimilarity to the
set's own. Scores aggregate unweighted over (set, context) rows.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .errors import DataError, UsageError

Tokens = Sequence[str]
MetricFn = Callable[[Tokens, Tokens], float]

DISTINCT_CLAMP = 1e-6


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Tokens, reference: Tokens, n: int) -> tuple[float, float, float]:
    """Clipped n-gram overlap: (precision, recall, F1). Inputs too short to
    form any n-gram score zero."""
    if n not in (1, 2):
        raise UsageError(f"rouge_n supports n in {{1, 2}}, got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    total_cand = sum(cand.values())
    total_ref = sum(ref.values())
    if total_cand == 0 or total_ref == 0:
        return 0.0, 0.0, 0.0
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    precision = overlap / total_cand
    recall = overlap / total_ref
    return precision, recall, _f1(precision, recall)


def _lcs_len(a: Tokens, b: Tokens) -> int:
    # One DP row per outer step; rows must be distinct objects.
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(candidate: Tokens, reference: Tokens) -> tuple[float, float, float]:
    """Longest-common-subsequence overlap: (precision, recall, F1)."""
    if not candidate or not reference:
        return 0.0, 0.0, 0.0
    lcs = _lcs_len(candidate, reference)
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return precision, recall, _f1(precision, recall)


METRICS: dict[str, MetricFn] = {
    "R1": lambda c, r: rouge_n(c, r, 1)[2],
    "R2": lambda c, r: rouge_n(c, r, 2)[2],
    "RL": lambda c, r: rouge_l(c, r)[2],
}


def _resolve_metric(metric: str | MetricFn) -> MetricFn:
    if callable(metric):
        return metric
    if metric not in METRICS:
        raise UsageError(f"unknown metric {metric!r}; have {sorted(METRICS)}")
    return METRICS[metric]


def token_diff(tokens: Tokens, prev: Tokens) -> list[str]:
    """Multiset difference keeping order: each token of `prev` cancels its
    earliest remaining match in `tokens`."""
    budget = Counter(prev)
    out: list[str] = []
    for tok in tokens:
        if budget[tok] > 0:
            budget[tok] -= 1
        else:
            out.append(tok)
    return out


def score_relevance(summary: Tokens, reference: Tokens, metric: str | MetricFn) -> float:
    return _resolve_metric(metric)(summary, reference)


def score_novelty(
    summary: Tokens, prev_summary: Tokens, reference: Tokens, metric: str | MetricFn
) -> float:
    return _resolve_metric(metric)(token_diff(summary, prev_summary), reference)


def score_distinctiveness(
    summary: Tokens,
    ref_own: Tokens,
    ref_others: Sequence[Tokens],
    metric: str | MetricFn,
) -> tuple[float | None, bool]:
    """Mean dissimilarity to other sets' references over dissimilarity to
    the own reference.

    Returns (score, clamped). With no concurrent other references the score
    is undefined and None is returned; a perfect own-reference match clamps
    the denominator to a small floor and sets the flag.
    """
    if not ref_others:
        return None, False
    fn = _resolve_metric(metric)
    numerator = sum(1.0 - fn(summary, other) for other in ref_others) / len(ref_others)
    own = fn(summary, ref_own)
    clamped = own >= 1.0
    denominator = max(1.0 - own, DISTINCT_CLAMP)
    return numerator / denominator, clamped


@dataclass(frozen=True)
class EvalRow:
    """All scores of one (set, context) pair."""

    set_id: str
    context_id: int
    relevance: Mapping[str, float]
    novelty: Mapping[str, float]
    distinctiveness: Mapping[str, float | None]
    distinct_flagged: bool
    novel_ratio: float


def evaluate_summary(
    set_id: str,
    context_id: int,
    summary: Tokens,
    prev_summary: Tokens,
    ref_own: Tokens,
    ref_others: Sequence[Tokens],
    metrics: Sequence[str] = ("R1", "R2", "RL"),
) -> EvalRow:
    relevance = {m: score_relevance(summary, ref_own, m) for m in metrics}
    novelty = {m: score_novelty(summary, prev_summary, ref_own, m) for m in metrics}
    distinct: dict[str, float | None] = {}
    flagged = False
    for m in metrics:
        value, clamp = score_distinctiveness(summary, ref_own, ref_others, m)
        distinct[m] = value
        flagged = flagged or clamp
    novel = len(token_diff(summary, prev_summary))
    ratio = novel / len(summary) if summary else 0.0
    return EvalRow(
        set_id=set_id,
        context_id=context_id,
        relevance=relevance,
        novelty=novelty,
        distinctiveness=distinct,
        distinct_flagged=flagged,
        novel_ratio=ratio,
    )


@dataclass(frozen=True)
class Aggregate:
    criterion: str
    metric: str
    mean: float
    stderr: float
    n: int


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    aggregates: tuple[Aggregate, ...]

    def aggregate_map(self) -> dict[tuple[str, str], Aggregate]:
        return {(a.criterion, a.metric): a for a in self.aggregates}


def _mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var) / math.sqrt(n)


def aggregate(rows: Sequence[EvalRow]) -> EvalReport:
    """Unweighted mean and standard error over rows, per criterion and
    metric. Null distinctiveness rows are excluded from that metric's n."""
    if not rows:
        raise DataError("cannot aggregate an empty row list")
    metrics = list(rows[0].relevance)
    aggs: list[Aggregate] = []
    for criterion in ("relevance", "novelty", "distinctiveness"):
        for metric in metrics:
            values = []
            for row in rows:
                value = getattr(row, criterion)[metric]
                if value is not None:
                    values.append(value)
            if not values:
                continue
            mean, stderr = _mean_stderr(values)
            aggs.append(Aggregate(criterion, metric, mean, stderr, len(values)))
    ratios = [row.novel_ratio for row in rows]
    mean, stderr = _mean_stderr(ratios)
    aggs.append(Aggregate("novel_ratio", "-", mean, stderr, len(ratios)))
    return EvalReport(rows=tuple(rows), aggregates=tuple(aggs))


def report_to_dict(report: EvalReport) -> dict:
    return {
        "rows": [
            {
                "set_id": r.set_id,
                "context_id": r.context_id,
                "relevance": dict(r.relevance),
                "novelty": dict(r.novelty),
                "distinctiveness": dict(r.distinctiveness),
                "distinct_flagged": r.distinct_flagged,
                "novel_ratio": r.novel_ratio,
            }
            for r in report.rows
        ],
        "aggregates": [
            {
                "criterion": a.criterion,
                "metric": a.metric,
                "mean": a.mean,
                "stderr": a.stderr,
                "n": a.n,
            }
            for a in report.aggregates
        ],
    }


def write_report_json(path: str | Path, report: EvalReport) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")


def write_report_csv(path: str | Path, report: EvalReport) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "criterion", "mean", "stderr", "n"])
        for a in report.aggregates:
            writer.writerow([a.metric, a.criterion, f"{a.mean:.10g}", f"{a.stderr:.10g}", a.n])
