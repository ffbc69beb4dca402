"""Baselines, cross-validation, confidence intervals, and 2x2 chi-square.

Error rates are percentages in [0, 100].  Confidence intervals are
two-sided 95% t-intervals over per-fold observed error rates; two results
differ significantly exactly when their intervals are disjoint.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Hashable, Sequence

from .corpus import Dataset
from .induction import (
    DecisionTree,
    Internal,
    LearnerParams,
    build_tree,
    classify,
    node_count,
    prune,
    ucf,
)

#: Two-sided 95% critical values of Student's t, indexed by df = 1..30.
T_TABLE_95 = (
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
)

#: Large-sample fallback beyond df = 30.
T_LARGE_SAMPLE_95 = 1.96

#: Critical chi-square value at alpha = .001 with one degree of freedom.
CHI2_CRITICAL_001_DF1 = 10.828


class InfeasibleFoldsError(ValueError):
    """Raised when a cross-validation request cannot be satisfied."""


def t_critical_95(df: int) -> float:
    if df < 1:
        raise ValueError("degrees of freedom must be at least 1")
    if df <= 30:
        return T_TABLE_95[df - 1]
    return T_LARGE_SAMPLE_95


def ci95(samples: Sequence[float]) -> tuple[float, float]:
    """Mean and halfwidth of the two-sided 95% t-interval.

    The halfwidth is zero exactly when all samples are equal.
    """
    k = len(samples)
    if k < 2:
        raise ValueError("a confidence interval needs at least two samples")
    first = samples[0]
    if all(x == first for x in samples):
        return float(first), 0.0
    mean = math.fsum(samples) / k
    variance = math.fsum((x - mean) ** 2 for x in samples) / (k - 1)
    halfwidth = t_critical_95(k - 1) * math.sqrt(variance) / math.sqrt(k)
    return mean, halfwidth


def majority_baseline(dataset: Dataset) -> float:
    """Error rate (%) of always predicting the most frequent class."""
    counts = dataset.class_counts()
    total = sum(counts)
    if total == 0:
        raise ValueError("baseline of an empty dataset is undefined")
    return 100.0 * (total - max(counts)) / total


def per_fold_baseline(
    dataset: Dataset,
    k: int = 10,
    seed: int = 0,
    stratify: bool = True,
) -> tuple[float, float]:
    """Mean and 95% halfwidth of the majority baseline scored per fold.

    Each fold's baseline predicts the training split's most frequent class
    on the held-out rows.  The full-dataset ``majority_baseline`` is the
    usual reference point; this variant exists for fold-matched
    comparisons.
    """
    n = len(dataset.rows)
    labels = [label for _, label in dataset.rows] if stratify else None
    folds = kfold(n, k, seed=seed, stratify=stratify, labels=labels)
    errors: list[float] = []
    for fold in folds:
        held_out = set(fold)
        train = dataset.take([i for i in range(n) if i not in held_out])
        counts = train.class_counts()
        top = max(range(len(counts)), key=lambda i: (counts[i], -i))
        majority = dataset.schema.class_values[top]
        wrong = sum(1 for i in fold if dataset.rows[i][1] != majority)
        errors.append(100.0 * wrong / len(fold))
    return ci95(errors)


def kfold(
    n: int,
    k: int,
    seed: int = 0,
    stratify: bool = False,
    labels: Sequence[Hashable] | None = None,
) -> list[list[int]]:
    """Deterministic k-fold index split of range(n).

    Fold sizes differ by at most one.  With stratify=True, ``labels`` must
    give one label per index; indices are shuffled within each label group
    and dealt round-robin, so per-fold label counts also differ by at most
    one per label.
    """
    if k < 2:
        raise InfeasibleFoldsError(f"k must be at least 2, got {k}")
    if k > n:
        raise InfeasibleFoldsError(f"cannot make {k} folds from {n} rows")
    rng = random.Random(seed)
    if stratify:
        if labels is None or len(labels) != n:
            raise ValueError("stratification requires one label per row")
        order: list[int] = []
        groups: dict[Hashable, list[int]] = {}
        for i, label in enumerate(labels):
            groups.setdefault(label, []).append(i)
        for label_indices in groups.values():
            rng.shuffle(label_indices)
            order.extend(label_indices)
    else:
        order = list(range(n))
        rng.shuffle(order)
    folds: list[list[int]] = [[] for _ in range(k)]
    for position, index in enumerate(order):
        folds[position % k].append(index)
    return [sorted(fold) for fold in folds]


@dataclass(frozen=True)
class CvResult:
    """Cross-validation outcome over k folds.

    ``fold_observed`` holds per-fold test error rates; ``fold_estimated``
    holds pessimistic estimates that charge each test row the binomial
    upper confidence limit of its leaf.  The headline interval is
    (mean_observed, halfwidth95).
    """

    fold_observed: tuple[float, ...]
    fold_estimated: tuple[float, ...]
    mean_observed: float
    mean_estimated: float
    halfwidth95: float
    mean_nodes: float

    def __post_init__(self) -> None:
        if len(self.fold_observed) < 2:
            raise ValueError("cross-validation needs at least two folds")
        if len(self.fold_observed) != len(self.fold_estimated):
            raise ValueError("observed/estimated fold counts differ")
        if self.halfwidth95 < 0:
            raise ValueError("halfwidth cannot be negative")
        for name in ("mean_observed", "mean_estimated"):
            value = getattr(self, name)
            if not 0.0 <= value <= 100.0:
                raise ValueError(f"{name} must lie in [0, 100], got {value}")

    @property
    def k(self) -> int:
        return len(self.fold_observed)

    @property
    def interval(self) -> tuple[float, float]:
        return (self.mean_observed, self.halfwidth95)

    @property
    def upper_bound(self) -> float:
        return self.mean_observed + self.halfwidth95


def cross_validate(
    dataset: Dataset,
    params: LearnerParams | None = None,
    k: int = 10,
    seed: int = 0,
    stratify: bool = True,
) -> CvResult:
    """Grow and prune a tree per fold, scoring on the held-out rows."""
    params = params or LearnerParams()
    n = len(dataset.rows)
    labels = [label for _, label in dataset.rows] if stratify else None
    folds = kfold(n, k, seed=seed, stratify=stratify, labels=labels)
    observed: list[float] = []
    estimated: list[float] = []
    nodes: list[int] = []
    for fold in folds:
        held_out = set(fold)
        train = dataset.take([i for i in range(n) if i not in held_out])
        tree = prune(build_tree(train, params), train, params.cf)
        test_rows = [dataset.rows[i] for i in fold]
        observed.append(_observed_error(tree, test_rows))
        estimated.append(_estimated_error(tree, test_rows, params.cf))
        nodes.append(node_count(tree.root))
    mean_observed, halfwidth = ci95(observed)
    return CvResult(
        fold_observed=tuple(observed),
        fold_estimated=tuple(estimated),
        mean_observed=mean_observed,
        mean_estimated=math.fsum(estimated) / len(estimated),
        halfwidth95=halfwidth,
        mean_nodes=math.fsum(nodes) / len(nodes),
    )


def _observed_error(tree: DecisionTree, rows: Sequence) -> float:
    wrong = sum(
        1 for values, label in rows if classify(tree, values)[0] != label
    )
    return 100.0 * wrong / len(rows)


def _estimated_error(tree: DecisionTree, rows: Sequence, cf: float) -> float:
    """Pessimistic test error: route rows to leaves, charge n * ucf(e, n)."""
    positions = {attr.name: i for i, attr in enumerate(tree.schema.attributes)}
    totals: list[tuple[int, int]] = []

    def walk(node, subset) -> None:
        if isinstance(node, Internal):
            branches = [[] for _ in node.children]
            fallback = max(
                range(len(node.children)),
                key=lambda i: (sum(node.children[i].counts), -i),
            )
            for row in subset:
                branch = node.test.branch_of(row[0][positions[node.test.attribute]])
                branches[branch if branch is not None else fallback].append(row)
            for child, rows_of_child in zip(node.children, branches):
                walk(child, rows_of_child)
        elif subset:
            n = len(subset)
            e = sum(1 for _, label in subset if label != node.label)
            totals.append((n, e))

    walk(tree.root, list(rows))
    total_rows = sum(n for n, _ in totals)
    charged = sum(n * ucf(e, n, cf) for n, e in totals)
    return 100.0 * charged / total_rows


Interval = tuple[float, float]


@dataclass(frozen=True)
class Comparison:
    """Significance verdict between two (mean, halfwidth) intervals."""

    a: Interval
    b: Interval
    verdict: str  # "a_better" | "b_better" | "equivalent"


def significantly_better(a: Interval, b: Interval) -> bool:
    """True when interval a lies entirely below interval b."""
    return a[0] + a[1] < b[0] - b[1]


def compare(a: Interval, b: Interval) -> Comparison:
    if significantly_better(a, b):
        verdict = "a_better"
    elif significantly_better(b, a):
        verdict = "b_better"
    else:
        verdict = "equivalent"
    return Comparison(a=a, b=b, verdict=verdict)


def error_reduction(baseline: float, best: Interval) -> float:
    """Percent error reduction of ``best`` relative to a baseline rate.

    Conservative: the reduction is measured against the upper bound
    mean + halfwidth of the best result.
    """
    if baseline <= 0:
        raise ValueError("error reduction needs a positive baseline")
    mean, halfwidth = best
    return 100.0 * (baseline - (mean + halfwidth)) / baseline


@dataclass(frozen=True)
class Chi2Result:
    chi2: float
    df: int
    significant_at_001: bool


def chi_square_2x2(a: int, b: int, c: int, d: int) -> Chi2Result:
    """Pearson chi-square (no continuity correction) of a 2x2 table.

    The table rows are (a, b) and (c, d).  Significance is judged at
    alpha = .001 against the df = 1 critical value 10.828.
    """
    for value in (a, b, c, d):
        if value < 0:
            raise ValueError("cell counts must be non-negative")
    row1, row2 = a + b, c + d
    col1, col2 = a + c, b + d
    total = row1 + row2
    if 0 in (row1, row2, col1, col2):
        raise ValueError("chi-square needs positive marginal totals")
    chi2 = 0.0
    for observed, rown, coln in ((a, row1, col1), (b, row1, col2), (c, row2, col1), (d, row2, col2)):
        expected = rown * coln / total
        chi2 += (observed - expected) ** 2 / expected
    return Chi2Result(chi2=chi2, df=1, significant_at_001=chi2 > CHI2_CRITICAL_001_DF1)
