"""Gain-ratio decision-tree induction with error-based pruning.

Trees are grown top-down.  Discrete attributes split through a grouped
test: observed values are greedily merged into value groups as long as the
gain ratio does not decrease, so a branch can cover several values.
Continuous attributes split on a binary threshold chosen from midpoints
between consecutive observed values.  Grown trees are pruned bottom-up by
comparing the pessimistic error estimate of each subtree against replacing
it with a leaf or with its largest branch.

The pessimistic estimate treats the e errors among n training rows at a
leaf as a binomial sample and charges the upper confidence limit
``ucf(e, n, cf)`` per row instead of the observed rate.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence, Union

from .corpus import AttributeSchema, Dataset

_EPS = 1e-12


@dataclass(frozen=True)
class LearnerParams:
    """Knobs of the tree learner.

    grouping enables discrete value grouping; with it off every observed
    value gets its own branch.  min_branch_instances is the smallest number
    of rows every branch of a chosen test must receive.  cf is the
    confidence level of the pessimistic error estimate.  gain_guard
    restricts split selection to candidates with at least mean gain.
    """

    grouping: bool = True
    min_branch_instances: int = 2
    cf: float = 0.25
    gain_guard: bool = True

    def __post_init__(self) -> None:
        if self.min_branch_instances < 1:
            raise ValueError("min_branch_instances must be >= 1")
        if not 0.0 < self.cf < 1.0:
            raise ValueError("cf must lie strictly between 0 and 1")


@dataclass(frozen=True)
class GroupedTest:
    """A discrete split: one branch per group of attribute values."""

    attribute: str
    groups: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if len(self.groups) < 2:
            raise ValueError("a grouped test needs at least two groups")
        flat = [v for group in self.groups for v in group]
        if len(set(flat)) != len(flat):
            raise ValueError("groups must be disjoint")

    @property
    def branch_count(self) -> int:
        return len(self.groups)

    def branch_of(self, value) -> int | None:
        """Branch index for a value; None for missing or unseen values."""
        if value is None:
            return None
        for i, group in enumerate(self.groups):
            if value in group:
                return i
        return None


@dataclass(frozen=True)
class ThresholdTest:
    """A continuous split: value <= threshold goes left, > goes right."""

    attribute: str
    threshold: float

    @property
    def branch_count(self) -> int:
        return 2

    def branch_of(self, value) -> int | None:
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(
                f"threshold test on {self.attribute!r} got non-numeric {value!r}"
            )
        return 0 if value <= self.threshold else 1


SplitTest = Union[GroupedTest, ThresholdTest]


class Evaluation(NamedTuple):
    gain: float
    split_info: float
    gain_ratio: float


@dataclass(frozen=True)
class Leaf:
    """A leaf predicts ``label``; counts is the training class distribution."""

    label: str
    counts: tuple[int, ...]

    @property
    def n(self) -> int:
        """Training rows covered by the leaf."""
        return sum(self.counts)

    @property
    def errors(self) -> int:
        """Covered training rows whose class differs from the prediction."""
        return self.n - max(self.counts, default=0)


@dataclass(frozen=True)
class Internal:
    test: SplitTest
    children: tuple["TreeNode", ...]
    counts: tuple[int, ...]
    majority: str


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    params: LearnerParams
    schema: AttributeSchema


@dataclass(frozen=True)
class TreeSummary:
    """Node count plus the highest-placed attributes as (level, name) pairs."""

    node_count: int
    features: tuple[tuple[int, str], ...]

    @property
    def root_attribute(self) -> str | None:
        if self.features and self.features[0][0] == 0:
            return self.features[0][1]
        return None


# --- split evaluation --------------------------------------------------------


def class_entropy(counts: Sequence[int]) -> float:
    """Entropy in bits of a class distribution given as counts."""
    total = 0
    for c in counts:
        if c < 0:
            raise ValueError("class counts must be non-negative")
        total += c
    if total == 0:
        raise ValueError("entropy of an empty distribution is undefined")
    ent = 0.0
    for c in counts:
        if c:
            p = c / total
            ent -= p * math.log2(p)
    return ent


def _partition_evaluation(branch_counts: Sequence[Sequence[int]]) -> Evaluation:
    """Gain, split info, and gain ratio of a branch partition.

    branch_counts holds one class-count vector per branch.  Raises if
    fewer than two branches are non-empty (the split separates nothing).
    """
    sizes = [sum(vec) for vec in branch_counts]
    total = sum(sizes)
    if sum(1 for s in sizes if s) < 2:
        raise ValueError("split leaves fewer than two non-empty branches")
    parent = [0] * len(branch_counts[0])
    for vec in branch_counts:
        for k, c in enumerate(vec):
            parent[k] += c
    child_ent = 0.0
    split_info = 0.0
    for vec, size in zip(branch_counts, sizes):
        if size:
            w = size / total
            child_ent += w * class_entropy(vec)
            split_info -= w * math.log2(w)
    gain = max(0.0, class_entropy(parent) - child_ent)
    return Evaluation(gain, split_info, gain / split_info)


def evaluate_split(dataset: Dataset, test: SplitTest) -> Evaluation:
    """Evaluate a test over a dataset; rows missing the value are dropped."""
    schema = dataset.schema
    pos = schema.attribute_index(test.attribute)
    attr = schema.attributes[pos]
    if isinstance(test, GroupedTest):
        if attr.is_continuous:
            raise ValueError(f"grouped test on continuous attribute {attr.name!r}")
        flat = {v for group in test.groups for v in group}
        if flat != set(attr.values):
            raise ValueError(
                f"groups do not cover declared values of {attr.name!r} exactly"
            )
    elif attr.values is not None:
        raise ValueError(f"threshold test on discrete attribute {attr.name!r}")
    n_classes = len(schema.class_values)
    label_index = {label: k for k, label in enumerate(schema.class_values)}
    branch_counts = [[0] * n_classes for _ in range(test.branch_count)]
    for values, label in dataset.rows:
        branch = test.branch_of(values[pos])
        if branch is not None:
            branch_counts[branch][label_index[label]] += 1
    return _partition_evaluation(branch_counts)


def best_threshold(dataset: Dataset, attribute: str) -> tuple[float, Evaluation] | None:
    """Best binary threshold on a continuous attribute, or None.

    Candidates are midpoints between consecutive distinct observed values;
    the one maximizing gain wins, ties going to the smallest threshold.
    Returns None when fewer than two distinct values are observed.
    """
    schema = dataset.schema
    pos = schema.attribute_index(attribute)
    if not schema.attributes[pos].is_continuous:
        raise ValueError(f"attribute {attribute!r} is not continuous")
    label_index = {label: k for k, label in enumerate(schema.class_values)}
    pairs = [
        (values[pos], label_index[label])
        for values, label in dataset.rows
        if values[pos] is not None
    ]
    return _scan_thresholds(pairs, len(schema.class_values))


def _scan_thresholds(
    pairs: list[tuple[float, int]], n_classes: int
) -> tuple[float, Evaluation] | None:
    if len({v for v, _ in pairs}) < 2:
        return None
    pairs = sorted(pairs, key=lambda p: p[0])
    total = len(pairs)
    parent = [0] * n_classes
    for _, k in pairs:
        parent[k] += 1
    parent_ent = class_entropy(parent)
    left = [0] * n_classes
    best_gain = -1.0
    best_t = 0.0
    for i in range(total - 1):
        left[pairs[i][1]] += 1
        if pairs[i][0] == pairs[i + 1][0]:
            continue
        n_left = i + 1
        right = [p - l for p, l in zip(parent, left)]
        gain = parent_ent - (
            n_left / total * class_entropy(left)
            + (total - n_left) / total * class_entropy(right)
        )
        if gain > best_gain + _EPS:
            best_gain = gain
            best_t = (pairs[i][0] + pairs[i + 1][0]) / 2
    test_counts = [[0] * n_classes, [0] * n_classes]
    for v, k in pairs:
        test_counts[0 if v <= best_t else 1][k] += 1
    return best_t, _partition_evaluation(test_counts)


def group_values(dataset: Dataset, attribute: str) -> GroupedTest:
    """Greedily group a discrete attribute's values for a split.

    Starts from one group per observed value and repeatedly merges the
    pair of groups whose merge maximizes the gain ratio, accepting a merge
    only if the ratio does not decrease, until two groups remain or no
    merge helps.  Declared-but-unobserved values are attached to the
    largest group afterwards.
    """
    schema = dataset.schema
    pos = schema.attribute_index(attribute)
    attr = schema.attributes[pos]
    if attr.is_continuous:
        raise ValueError(f"attribute {attribute!r} is not discrete")
    n_classes = len(schema.class_values)
    label_index = {label: k for k, label in enumerate(schema.class_values)}
    tally: dict[str, list[int]] = {}
    for values, label in dataset.rows:
        v = values[pos]
        if v is not None:
            tally.setdefault(v, [0] * n_classes)[label_index[label]] += 1
    entries = [(v, tally[v]) for v in attr.values if v in tally]
    if len(entries) < 2:
        raise ValueError(
            f"attribute {attribute!r} has fewer than two observed values"
        )
    groups = _greedy_merge(entries, merge=True)
    groups = _attach_unobserved(groups, tally, attr.values)
    return GroupedTest(attribute=attribute, groups=groups)


def _greedy_merge(
    entries: list[tuple[str, list[int]]], merge: bool
) -> list[list[str]]:
    """Merge singleton value groups while the gain ratio does not decrease.

    entries come in declared order; pair candidates are scanned in group
    order, so equal-ratio ties resolve to the earliest pair.
    """
    groups = [[v] for v, _ in entries]
    if not merge or len(groups) == 2:
        return groups
    vecs = [list(vec) for _, vec in entries]
    sizes = [sum(vec) for vec in vecs]
    ents = [class_entropy(vec) for vec in vecs]
    total = sum(sizes)
    parent = [0] * len(vecs[0])
    for vec in vecs:
        for k, c in enumerate(vec):
            parent[k] += c
    parent_ent = class_entropy(parent)

    def ratio_of(weighted_child_ent: float, group_sizes: list[int]) -> float:
        gain = max(0.0, parent_ent - weighted_child_ent / total)
        split_info = -sum(s / total * math.log2(s / total) for s in group_sizes)
        return gain / split_info

    weighted = sum(s * e for s, e in zip(sizes, ents))
    current = ratio_of(weighted, sizes)
    while len(groups) > 2:
        best_ratio = None
        best_pair = None
        best_parts = None
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                merged_vec = [a + b for a, b in zip(vecs[i], vecs[j])]
                merged_size = sizes[i] + sizes[j]
                merged_ent = class_entropy(merged_vec)
                w = weighted - sizes[i] * ents[i] - sizes[j] * ents[j] + merged_size * merged_ent
                group_sizes = [
                    s for k, s in enumerate(sizes) if k not in (i, j)
                ] + [merged_size]
                r = ratio_of(w, group_sizes)
                if best_ratio is None or r > best_ratio + _EPS:
                    best_ratio = r
                    best_pair = (i, j)
                    best_parts = (merged_vec, merged_size, merged_ent, w)
        if best_ratio is None or best_ratio < current - _EPS:
            break
        i, j = best_pair
        merged_vec, merged_size, merged_ent, weighted = best_parts
        groups[i] = groups[i] + groups[j]
        vecs[i], sizes[i], ents[i] = merged_vec, merged_size, merged_ent
        del groups[j], vecs[j], sizes[j], ents[j]
        current = best_ratio
    return groups


def _attach_unobserved(
    groups: list[list[str]], tally: dict[str, list[int]], declared: tuple[str, ...]
) -> tuple[tuple[str, ...], ...]:
    """Attach unobserved declared values to the largest group and canonicalize."""
    order = {v: i for i, v in enumerate(declared)}
    groups = sorted(
        (sorted(g, key=order.get) for g in groups),
        key=lambda g: order[g[0]],
    )
    unobserved = [v for v in declared if v not in tally]
    if unobserved:
        sizes = [sum(sum(tally[v]) for v in g if v in tally) for g in groups]
        target = max(range(len(groups)), key=lambda i: (sizes[i], -i))
        groups[target].extend(unobserved)
        groups = sorted(
            (sorted(g, key=order.get) for g in groups),
            key=lambda g: order[g[0]],
        )
    return tuple(tuple(g) for g in groups)


# --- growing ------------------------------------------------------------------


def build_tree(dataset: Dataset, params: LearnerParams | None = None) -> DecisionTree:
    """Grow an unpruned tree.

    Recursion stops at pure nodes, at nodes with fewer than
    2 * min_branch_instances rows, and when no candidate test has positive
    gain and (under the gain guard) at least the mean candidate gain.
    Among surviving candidates the highest gain ratio wins, ties resolved
    by attribute declaration order.  A discrete attribute is tested at most
    once per root-leaf path; continuous attributes may be re-thresholded.
    """
    if not dataset.rows:
        raise ValueError("cannot grow a tree from an empty dataset")
    params = params or LearnerParams()
    grower = _Grower(dataset, params)
    root = grower.grow(list(range(len(dataset.rows))), frozenset())
    return DecisionTree(root=root, params=params, schema=dataset.schema)


class _Candidate(NamedTuple):
    position: int
    test: SplitTest
    evaluation: Evaluation
    branch_rows: list[list[int]]


class _Grower:
    """Row-index recursion over pre-coded columns."""

    def __init__(self, dataset: Dataset, params: LearnerParams):
        self.params = params
        self.schema = dataset.schema
        self.class_values = dataset.schema.class_values
        self.n_classes = len(self.class_values)
        label_index = {label: k for k, label in enumerate(self.class_values)}
        self.labels = [label_index[label] for _, label in dataset.rows]
        self.columns = [
            [values[pos] for values, _ in dataset.rows]
            for pos in range(len(dataset.schema.attributes))
        ]

    def counts_of(self, rows: list[int]) -> list[int]:
        counts = [0] * self.n_classes
        for r in rows:
            counts[self.labels[r]] += 1
        return counts

    def grow(self, rows: list[int], used: frozenset) -> TreeNode:
        counts = self.counts_of(rows)
        majority = _majority_index(counts)
        label = self.class_values[majority]
        if counts[majority] == len(rows) or len(rows) < 2 * self.params.min_branch_instances:
            return Leaf(label=label, counts=tuple(counts))
        candidates = []
        for pos, attr in enumerate(self.schema.attributes):
            if attr.is_continuous:
                cand = self._threshold_candidate(pos, rows)
            elif attr.name in used:
                cand = None
            else:
                cand = self._grouped_candidate(pos, rows)
            if cand is not None:
                candidates.append(cand)
        if not candidates:
            return Leaf(label=label, counts=tuple(counts))
        mean_gain = sum(c.evaluation.gain for c in candidates) / len(candidates)
        chosen: _Candidate | None = None
        for cand in candidates:
            if cand.evaluation.gain <= _EPS:
                continue
            if self.params.gain_guard and cand.evaluation.gain < mean_gain - _EPS:
                continue
            if chosen is None or cand.evaluation.gain_ratio > chosen.evaluation.gain_ratio:
                chosen = cand
        if chosen is None:
            return Leaf(label=label, counts=tuple(counts))
        attr = self.schema.attributes[chosen.position]
        child_used = used if attr.is_continuous else used | {attr.name}
        children = tuple(self.grow(branch, child_used) for branch in chosen.branch_rows)
        return Internal(
            test=chosen.test, children=children, counts=tuple(counts), majority=label
        )

    def _grouped_candidate(self, pos: int, rows: list[int]) -> _Candidate | None:
        column = self.columns[pos]
        tally: dict[str, list[int]] = {}
        missing = []
        for r in rows:
            v = column[r]
            if v is None:
                missing.append(r)
            else:
                tally.setdefault(v, [0] * self.n_classes)[self.labels[r]] += 1
        declared = self.schema.attributes[pos].values
        entries = [(v, tally[v]) for v in declared if v in tally]
        if len(entries) < 2:
            return None
        groups = _attach_unobserved(
            _greedy_merge(entries, merge=self.params.grouping), tally, declared
        )
        test = GroupedTest(attribute=self.schema.attributes[pos].name, groups=groups)
        branch_of = {v: i for i, group in enumerate(groups) for v in group}
        branch_rows: list[list[int]] = [[] for _ in groups]
        for r in rows:
            v = column[r]
            if v is not None:
                branch_rows[branch_of[v]].append(r)
        return self._finish_candidate(pos, test, branch_rows, missing)

    def _threshold_candidate(self, pos: int, rows: list[int]) -> _Candidate | None:
        column = self.columns[pos]
        pairs = []
        missing = []
        for r in rows:
            v = column[r]
            if v is None:
                missing.append(r)
            else:
                pairs.append((v, self.labels[r]))
        found = _scan_thresholds(pairs, self.n_classes)
        if found is None:
            return None
        threshold, _ = found
        test = ThresholdTest(
            attribute=self.schema.attributes[pos].name, threshold=threshold
        )
        branch_rows: list[list[int]] = [[], []]
        for r in rows:
            v = column[r]
            if v is not None:
                branch_rows[0 if v <= threshold else 1].append(r)
        return self._finish_candidate(pos, test, branch_rows, missing)

    def _finish_candidate(
        self,
        pos: int,
        test: SplitTest,
        branch_rows: list[list[int]],
        missing: list[int],
    ) -> _Candidate | None:
        # rows without the value are dropped from the evaluation but still
        # travel down the largest branch
        evaluation = _partition_evaluation(
            [self.counts_of(branch) for branch in branch_rows]
        )
        if missing:
            target = max(
                range(len(branch_rows)), key=lambda i: (len(branch_rows[i]), -i)
            )
            branch_rows[target].extend(missing)
        if any(len(branch) < self.params.min_branch_instances for branch in branch_rows):
            return None
        return _Candidate(pos, test, evaluation, branch_rows)


def _majority_index(counts: Sequence[int]) -> int:
    return max(range(len(counts)), key=lambda i: (counts[i], -i))


# --- pessimistic error and pruning ---------------------------------------------


@lru_cache(maxsize=None)
def _ucf_cached(e: int, n: int, cf: float) -> float:
    if e >= n:
        return 1.0
    if e == 0:
        # closed form: (1 - p)^n = cf
        return 1.0 - cf ** (1.0 / n)
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-9:
        mid = (lo + hi) / 2
        if _binom_cdf(e, n, mid) > cf:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _binom_cdf(e: int, n: int, p: float) -> float:
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    log_p, log_q = math.log(p), math.log(1.0 - p)
    total = 0.0
    for i in range(e + 1):
        log_choose = (
            math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)
        )
        total += math.exp(log_choose + i * log_p + (n - i) * log_q)
    return total


def ucf(e: int, n: int, cf: float = 0.25) -> float:
    """Binomial upper confidence limit on the true error rate.

    The largest p such that observing at most e errors in n trials still
    has probability >= cf: the closed form for e = 0, otherwise bisection
    to 1e-9.  ucf(n, n, cf) is 1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= e <= n:
        raise ValueError("e must lie in [0, n]")
    if not 0.0 < cf < 1.0:
        raise ValueError("cf must lie strictly between 0 and 1")
    return _ucf_cached(int(e), int(n), float(cf))


def _pessimistic_errors(node: TreeNode, cf: float, label_index: dict) -> float:
    """Sum of n * ucf(e, n, cf) over the leaves under node; empty leaves add 0."""
    if isinstance(node, Leaf):
        n = sum(node.counts)
        if n == 0:
            return 0.0
        e = n - node.counts[label_index[node.label]]
        return n * ucf(e, n, cf)
    return sum(_pessimistic_errors(child, cf, label_index) for child in node.children)


def prune(tree: DecisionTree, dataset: Dataset, cf: float | None = None) -> DecisionTree:
    """Prune bottom-up by pessimistic error comparison.

    At every internal node the subtree's pessimistic error is compared to
    replacing it with a leaf and to promoting its largest branch (the
    branch is refitted to all the node's rows and re-pruned).  The smallest
    estimate wins; ties prefer the simpler form (leaf, then branch).
    """
    if dataset.schema != tree.schema:
        raise ValueError("pruning dataset schema differs from the tree's")
    eff_cf = tree.params.cf if cf is None else cf
    if not 0.0 < eff_cf < 1.0:
        raise ValueError("cf must lie strictly between 0 and 1")
    schema = tree.schema
    ctx = _PruneContext(
        positions={attr.name: i for i, attr in enumerate(schema.attributes)},
        label_index={label: k for k, label in enumerate(schema.class_values)},
        class_values=schema.class_values,
        cf=eff_cf,
    )
    root = _prune_node(tree.root, list(dataset.rows), ctx)
    return DecisionTree(root=root, params=tree.params, schema=schema)


class _PruneContext(NamedTuple):
    positions: dict
    label_index: dict
    class_values: tuple[str, ...]
    cf: float


def _prune_node(node: TreeNode, rows: list, ctx: _PruneContext) -> TreeNode:
    counts = [0] * len(ctx.class_values)
    for _, label in rows:
        counts[ctx.label_index[label]] += 1
    if isinstance(node, Leaf):
        return Leaf(label=node.label, counts=tuple(counts))
    pos = ctx.positions[node.test.attribute]
    branch_rows: list[list] = [[] for _ in node.children]
    fallback = _largest_child_index(node.children)
    for row in rows:
        branch = node.test.branch_of(row[0][pos])
        branch_rows[branch if branch is not None else fallback].append(row)
    children = tuple(
        _prune_node(child, child_rows, ctx)
        for child, child_rows in zip(node.children, branch_rows)
    )
    majority_label = (
        ctx.class_values[_majority_index(counts)] if rows else node.majority
    )
    refit = Internal(
        test=node.test, children=children, counts=tuple(counts), majority=majority_label
    )
    leaf_alt = Leaf(label=majority_label, counts=tuple(counts))
    subtree_err = _pessimistic_errors(refit, ctx.cf, ctx.label_index)
    leaf_err = _pessimistic_errors(leaf_alt, ctx.cf, ctx.label_index)
    largest = _largest_child_index(children)
    branch_alt = _prune_node(children[largest], rows, ctx)
    branch_err = _pessimistic_errors(branch_alt, ctx.cf, ctx.label_index)
    if leaf_err <= subtree_err and leaf_err <= branch_err:
        return leaf_alt
    if branch_err <= subtree_err:
        return branch_alt
    return refit


def _largest_child_index(children: Sequence[TreeNode]) -> int:
    return max(range(len(children)), key=lambda i: (sum(children[i].counts), -i))


# --- use and inspection ---------------------------------------------------------


def classify(tree: DecisionTree, values: Sequence) -> tuple[str, tuple[int, ...]]:
    """Classify one value tuple; returns (label, leaf class distribution).

    Missing values and unseen discrete values route to the branch with the
    largest training count, so classification is total.
    """
    if len(values) != len(tree.schema.attributes):
        raise ValueError(
            f"expected {len(tree.schema.attributes)} values, got {len(values)}"
        )
    positions = {attr.name: i for i, attr in enumerate(tree.schema.attributes)}
    node = tree.root
    while isinstance(node, Internal):
        branch = node.test.branch_of(values[positions[node.test.attribute]])
        if branch is None:
            branch = _largest_child_index(node.children)
        node = node.children[branch]
    return node.label, node.counts


def summarize(tree: DecisionTree) -> TreeSummary:
    """Node count and up to six highest-placed attributes, breadth-first."""
    node_count = 0
    features: list[tuple[int, str]] = []
    seen: set[str] = set()
    queue = deque([(tree.root, 0)])
    while queue:
        node, level = queue.popleft()
        node_count += 1
        if isinstance(node, Internal):
            name = node.test.attribute
            if name not in seen and len(features) < 6:
                seen.add(name)
                features.append((level, name))
            for child in node.children:
                queue.append((child, level + 1))
    return TreeSummary(node_count=node_count, features=tuple(features))


def node_count(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 1
    return 1 + sum(node_count(child) for child in node.children)


# --- serialization ----------------------------------------------------------------


def tree_to_dict(tree: DecisionTree) -> dict:
    """A JSON-serializable view of a tree, stable across runs."""
    return {
        "version": 1,
        "params": {
            "grouping": tree.params.grouping,
            "min_branch_instances": tree.params.min_branch_instances,
            "cf": tree.params.cf,
            "gain_guard": tree.params.gain_guard,
        },
        "schema": {
            "attributes": [
                {"name": attr.name, "values": list(attr.values) if attr.values else None}
                for attr in tree.schema.attributes
            ],
            "class_name": tree.schema.class_name,
            "class_values": list(tree.schema.class_values),
        },
        "root": _node_to_dict(tree.root),
    }


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.label, "counts": list(node.counts)}
    if isinstance(node.test, GroupedTest):
        test = {
            "attribute": node.test.attribute,
            "groups": [list(group) for group in node.test.groups],
        }
    else:
        test = {"attribute": node.test.attribute, "threshold": node.test.threshold}
    return {
        "test": test,
        "counts": list(node.counts),
        "majority": node.majority,
        "children": [_node_to_dict(child) for child in node.children],
    }


def tree_from_dict(obj: dict) -> DecisionTree:
    if obj.get("version") != 1:
        raise ValueError(f"unsupported tree file version {obj.get('version')!r}")
    from .corpus import Attribute  # local import to keep module load light

    params = LearnerParams(**obj["params"])
    schema = AttributeSchema(
        attributes=tuple(
            Attribute(
                name=a["name"],
                values=tuple(a["values"]) if a["values"] is not None else None,
            )
            for a in obj["schema"]["attributes"]
        ),
        class_name=obj["schema"]["class_name"],
        class_values=tuple(obj["schema"]["class_values"]),
    )
    return DecisionTree(root=_node_from_dict(obj["root"]), params=params, schema=schema)


def _node_from_dict(obj: dict) -> TreeNode:
    if "leaf" in obj:
        return Leaf(label=obj["leaf"], counts=tuple(obj["counts"]))
    test_obj = obj["test"]
    if "groups" in test_obj:
        test: SplitTest = GroupedTest(
            attribute=test_obj["attribute"],
            groups=tuple(tuple(group) for group in test_obj["groups"]),
        )
    else:
        test = ThresholdTest(
            attribute=test_obj["attribute"], threshold=test_obj["threshold"]
        )
    return Internal(
        test=test,
        children=tuple(_node_from_dict(child) for child in obj["children"]),
        counts=tuple(obj["counts"]),
        majority=obj["majority"],
    )
