"""End-to-end gate: one test per numbered criterion.

Each test re-derives its expectation from an independent oracle or from
frozen reference values, asserts, and prints a single pass line.  Run
with ``pytest -v`` to get one verdict line per criterion.
"""

import math
import random
import statistics
import time

import pytest

from cuetree.cli import main
from cuetree.corpus import (
    Attribute,
    AttributeSchema,
    Dataset,
    INFO_RELATIONS,
    INTEN_RELATIONS,
    RelationFeatures,
    RelationRecord,
    SYN_RELATIONS,
    UNIT_TYPES,
    parse_trib_pos,
    partition_by_subset,
    placement_subset,
    to_learning_dataset,
    validate_corpus,
)
from cuetree.dataio import (
    read_corpus,
    read_names_data,
    write_corpus,
    write_names_data,
)
from cuetree.evaluation import (
    chi_square_2x2,
    ci95,
    cross_validate,
    error_reduction,
    majority_baseline,
    significantly_better,
    t_critical_95,
)
from cuetree.experiment import (
    PlantedRule,
    SubsetCounts,
    SynthSpec,
    default_core_spec,
    generate_corpus,
    run_occurrence_experiment,
)
from cuetree.induction import Leaf, LearnerParams, build_tree, ucf


def reference_records():
    return generate_corpus(default_core_spec())


def test_criterion_01_majority_baselines():
    started = time.perf_counter()
    parts = partition_by_subset(reference_records())
    core2 = majority_baseline(to_learning_dataset(parts["core2"]))
    core1 = majority_baseline(to_learning_dataset(parts["core1"]))
    implicit = majority_baseline(to_learning_dataset(parts["implicit_core"]))
    placement = majority_baseline(
        to_learning_dataset(placement_subset(parts["core2"]), "placement")
    )
    elapsed = time.perf_counter() - started
    assert core2 == pytest.approx(35.48, abs=0.1)
    assert placement == 43.0
    assert core1 == pytest.approx(40.94, abs=0.5)
    assert implicit == pytest.approx(23.39, abs=0.5)
    assert elapsed < 1.0
    print("criterion 1: PASS (majority baselines 35.48 / 43.0 / 40.94 / 23.39)")


def test_criterion_02_error_reductions():
    # reference intervals: best pruned tree per dataset, upper-bound basis
    core2 = error_reduction(35.4, (27.4, 1.28))
    implicit = error_reduction(23.5, (22.1, 0.57))
    placement = error_reduction(43.0, (20.6, 0.97))
    core1 = error_reduction(41.1, (25.6, 1.24))
    assert core2 == pytest.approx(19.0, abs=1.0)
    assert implicit == pytest.approx(3.0, abs=1.0)
    assert placement == pytest.approx(50.0, abs=1.0)
    # the quoted 32% for this dataset is not what the interval arithmetic
    # gives; the derived value is pinned instead
    assert core1 == pytest.approx(34.7, abs=0.1)
    print("criterion 2: PASS (error reductions 19 / 3 / 50 / 34.7)")


def test_criterion_03_significance_rule():
    best, single = (27.4, 1.28), (33.4, 0.94)
    assert significantly_better(best, single)
    assert not significantly_better(single, best)
    rng = random.Random(3)
    for _ in range(1000):
        a = (rng.uniform(0, 100), rng.uniform(0, 10))
        b = (rng.uniform(0, 100), rng.uniform(0, 10))
        assert not (significantly_better(a, b) and significantly_better(b, a))
        assert not significantly_better(a, a)
    print("criterion 3: PASS (significance rule, asymmetric and irreflexive)")


def oracle_entropy(counts):
    total = sum(counts)
    return -sum(c / total * math.log2(c / total) for c in counts if c)


def oracle_ratio(branch_counts):
    parent = [sum(col) for col in zip(*branch_counts)]
    sizes = [sum(vec) for vec in branch_counts]
    total = sum(sizes)
    child = sum(
        s / total * oracle_entropy(vec) for s, vec in zip(sizes, branch_counts) if s
    )
    gain = oracle_entropy(parent) - child
    if gain <= 1e-9:
        return None
    split_info = -sum(s / total * math.log2(s / total) for s in sizes if s)
    return gain / split_info


def set_partitions(items):
    if len(items) == 1:
        yield [items]
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def best_discrete_ratio(values, column, labels):
    tally = {}
    for v, y in zip(column, labels):
        tally.setdefault(v, [0, 0])[y] += 1
    observed = [v for v in values if v in tally]
    if len(observed) < 2:
        return None
    best = None
    for part in set_partitions(observed):
        if len(part) < 2:
            continue
        counts = [[sum(tally[v][k] for v in group) for k in (0, 1)] for group in part]
        ratio = oracle_ratio(counts)
        if ratio is not None and (best is None or ratio > best):
            best = ratio
    return best


def best_threshold_ratio(column, labels):
    # thresholds scored by gain, smallest cut wins ties; report its ratio
    cuts = sorted(set(column))
    best = None  # (gain, ratio)
    for lo, hi in zip(cuts, cuts[1:]):
        t = (lo + hi) / 2
        counts = [[0, 0], [0, 0]]
        for v, y in zip(column, labels):
            counts[0 if v <= t else 1][y] += 1
        parent = [counts[0][k] + counts[1][k] for k in (0, 1)]
        sizes = [sum(vec) for vec in counts]
        total = sum(sizes)
        gain = oracle_entropy(parent) - sum(
            s / total * oracle_entropy(vec) for s, vec in zip(sizes, counts) if s
        )
        if best is None or gain > best[0] + 1e-12:
            ratio = oracle_ratio(counts)
            best = (gain, ratio)
    if best is None or best[0] <= 1e-9 or best[1] is None:
        return None
    return best[1]


def root_ratio(tree, dataset):
    test = tree.root.test
    position = [a.name for a in dataset.schema.attributes].index(test.attribute)
    label_index = {label: k for k, label in enumerate(dataset.schema.class_values)}
    counts = {}
    for values, label in dataset.rows:
        branch = test.branch_of(values[position])
        counts.setdefault(branch, [0, 0])[label_index[label]] += 1
    return oracle_ratio([counts[b] for b in sorted(counts)])


def test_criterion_04_root_split_optimality():
    started = time.perf_counter()
    # the guard and branch minimum deliberately skip ratio-optimal splits,
    # so the optimality claim is checked with both turned off
    params = LearnerParams(gain_guard=False, min_branch_instances=1)
    cases = []
    four = tuple(f"v{i}" for i in range(4))
    schema_a = AttributeSchema((Attribute("a", four),), "cls", ("u", "v"))
    for mask in range(256):
        rows = tuple(
            ((four[i % 4],), "uv"[mask >> i & 1]) for i in range(8)
        )
        cases.append((Dataset(schema_a, rows), (("a", four),)))
    three = ("a0", "a1", "a2")
    schema_b = AttributeSchema(
        (Attribute("a", three), Attribute("b", ("p", "q"))), "cls", ("u", "v")
    )
    for mask in range(512):
        rows = tuple(
            ((three[i % 3], "pq"[i % 2]), "uv"[mask >> i & 1]) for i in range(9)
        )
        cases.append((Dataset(schema_b, rows), (("a", three), ("b", ("p", "q")))))
    schema_c = AttributeSchema(
        (Attribute("a", three), Attribute("x")), "cls", ("u", "v")
    )
    for mask in range(256):
        rows = tuple(
            ((three[i % 3], float(i)), "uv"[mask >> i & 1]) for i in range(8)
        )
        cases.append((Dataset(schema_c, rows), (("a", three), ("x", None))))

    checked = 0
    for dataset, attrs in cases:
        labels = [0 if label == "u" else 1 for _, label in dataset.rows]
        per_attr = []
        for pos, (name, values) in enumerate(attrs):
            column = [row[pos] for row, _ in dataset.rows]
            if values is None:
                per_attr.append(best_threshold_ratio(column, labels))
            else:
                per_attr.append(best_discrete_ratio(values, column, labels))
        feasible = [r for r in per_attr if r is not None]
        tree = build_tree(dataset, params)
        if not feasible:
            assert isinstance(tree.root, Leaf)
            continue
        assert root_ratio(tree, dataset) == pytest.approx(max(feasible), abs=1e-9)
        checked += 1
    elapsed = time.perf_counter() - started
    assert checked >= 500
    assert elapsed < 60.0
    print(f"criterion 4: PASS (root ratio optimal on {checked} exhaustive cases)")


def oracle_binom_cdf(e, n, p):
    return sum(
        math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(e + 1)
    )


def oracle_ucf(e, n, cf):
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-12:
        mid = (lo + hi) / 2
        if oracle_binom_cdf(e, n, mid) > cf:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def test_criterion_05_confidence_limit_bound():
    assert ucf(0, 1, 0.25) == 0.75
    assert ucf(0, 6, 0.25) == pytest.approx(1 - 0.25 ** (1 / 6), abs=1e-9)
    assert ucf(0, 6, 0.25) == pytest.approx(0.2063, abs=1e-3)
    grid = [(e, n) for n in range(2, 22) for e in range(n)][:200]
    assert len(grid) == 200
    for e, n in grid:
        assert ucf(e, n, 0.25) == pytest.approx(oracle_ucf(e, n, 0.25), abs=1e-6)
    for e, n in grid:
        assert ucf(e + 1, n, 0.25) > ucf(e, n, 0.25)
        assert ucf(e, n + 1, 0.25) < ucf(e, n, 0.25)
    print("criterion 5: PASS (confidence limit matches bisection oracle on 200 points)")


def test_criterion_06_planted_rule_recovery():
    positions = (
        "B0A1-1after", "B1A0-1before", "B0A2-1after", "B0A2-2after",
        "B1A1-1before", "B1A1-1after", "B2A0-1before", "B2A0-2before",
    )
    rule = PlantedRule(
        target="occurrence",
        attributes=("trib_pos", "inten_rel"),
        true_combos=tuple((tp, "convince") for tp in positions)
        + (("B0A1-1after", "enable"), ("B1A1-1before", "enable")),
        noise=0.05,
        subsets=("core2",),
    )
    spec = SynthSpec(subsets={"core2": SubsetCounts(size=155)}, rules=(rule,), seed=2)
    started = time.perf_counter()
    records = generate_corpus(spec)
    cv = cross_validate(to_learning_dataset(records))
    report = run_occurrence_experiment(records, "core2")
    elapsed = time.perf_counter() - started
    assert cv.mean_observed <= 10.0
    assert report.selected.root_attribute in {"trib_pos", "inten_rel"}
    assert elapsed < 10.0
    print(
        f"criterion 6: PASS (planted rule recovered, "
        f"{cv.mean_observed:.2f}% error, root {report.selected.root_attribute})"
    )


def test_criterion_07_interval_and_chi_square_oracles():
    assert ci95([7.5] * 10) == (7.5, 0.0)
    rng = random.Random(7)
    for _ in range(100):
        k = rng.randint(2, 25)
        samples = [rng.uniform(0, 100) for _ in range(k)]
        mean, halfwidth = ci95(samples)
        spread = math.sqrt(
            sum((x - sum(samples) / k) ** 2 for x in samples) / (k - 1)
        )
        assert mean == pytest.approx(sum(samples) / k, abs=1e-6)
        assert halfwidth == pytest.approx(
            t_critical_95(k - 1) * spread / math.sqrt(k), abs=1e-6
        )
    for _ in range(100):
        a0, b0 = rng.randint(1, 9), rng.randint(1, 9)
        m1, m2 = rng.randint(1, 9), rng.randint(1, 9)
        assert chi_square_2x2(a0 * m1, b0 * m1, a0 * m2, b0 * m2).chi2 == 0.0
    for _ in range(100):
        a, b, c, d = (rng.randint(1, 60) for _ in range(4))
        n = a + b + c + d
        direct = (
            n * (a * d - b * c) ** 2 / ((a + b) * (c + d) * (a + c) * (b + d))
        )
        assert chi_square_2x2(a, b, c, d).chi2 == pytest.approx(direct, abs=1e-3)
    # only this value follows from the reference table's margins
    result = chi_square_2x2(181, 225, 276, 34)
    assert result.chi2 == pytest.approx(150.5, abs=0.1)
    assert result.significant_at_001
    print("criterion 7: PASS (interval and chi-square match direct formulas)")


def make_features(**overrides):
    base = dict(
        trib_pos=parse_trib_pos("B0A1-1after"),
        inten_structure="s1",
        infor_structure="t1",
        inten_rel="enable",
        info_rel="causality",
        syn_rel="independent",
        adjacency=True,
        core_type="segment",
        trib_type="action",
        above=0,
        below=0,
    )
    base.update(overrides)
    return RelationFeatures(**base)


def test_criterion_08_corpus_constraint_fixtures():
    cued_core1_on_core = RelationRecord(
        "r1", "core1", True, "on_core", make_features()
    )
    temporal_in_core = RelationRecord(
        "r2", "core2", True, "on_trib", make_features(info_rel="temporal")
    )
    cued_without_position = RelationRecord(
        "r3", "core2", True, "none", make_features()
    )
    for record, rule in (
        (cued_core1_on_core, "core_first_cue_on_trib"),
        (temporal_in_core, "temporal_outside_core"),
        (cued_without_position, "cue_position_consistency"),
    ):
        violations = validate_corpus([record])
        assert rule in {v.rule for v in violations}
    print("criterion 8: PASS (three coding-rule fixtures rejected)")


def test_criterion_09_experiment_determinism(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    write_corpus(reference_records(), corpus)
    reports = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        code = main(
            [
                "experiment", str(corpus),
                "--target", "occurrence",
                "--subset", "core2",
                "--format", "structured",
                "--out", str(out),
            ]
        )
        assert code == 0
        reports.append(out.read_bytes())
    assert reports[0] == reports[1]
    print("criterion 9: PASS (repeated experiment runs are byte-identical)")


def random_corpus(rng, size):
    records = []
    for i in range(size):
        subset = rng.choice(("core1", "core2", "implicit_core", "cluster", "joint"))
        if subset in ("cluster", "joint"):
            records.append(RelationRecord(f"r{i}", subset, rng.random() < 0.5, "none", None))
            continue
        before = rng.randint(0, 2)
        after = rng.randint(0 if before else 1, 2)
        side = "before" if before and (not after or rng.random() < 0.5) else "after"
        index = rng.randint(1, before if side == "before" else after)
        features = make_features(
            trib_pos=parse_trib_pos(f"B{before}A{after}-{index}{side}"),
            inten_structure=rng.choice(("s1", "s2", "s3")),
            infor_structure=rng.choice(("t1", "t2")),
            inten_rel=rng.choice(INTEN_RELATIONS),
            info_rel=rng.choice(INFO_RELATIONS),
            syn_rel=rng.choice(SYN_RELATIONS),
            adjacency=rng.random() < 0.5,
            core_type=rng.choice(UNIT_TYPES),
            trib_type=rng.choice(UNIT_TYPES),
            above=rng.randint(0, 4),
            below=rng.randint(0, 4),
        )
        cued = rng.random() < 0.5
        position = rng.choice(("on_core", "on_trib")) if cued else "none"
        records.append(RelationRecord(f"r{i}", subset, cued, position, features))
    return records


def random_dataset(rng):
    attributes = []
    for j in range(rng.randint(1, 4)):
        if rng.random() < 0.3:
            attributes.append(Attribute(f"num{j}"))
        else:
            values = tuple(f"k{j}{m}" for m in range(rng.randint(2, 4)))
            attributes.append(Attribute(f"attr{j}", values))
    classes = tuple(f"c{m}" for m in range(rng.randint(2, 3)))
    # the names format does not store a class name; the reader fixes "class"
    schema = AttributeSchema(tuple(attributes), "class", classes)
    rows = []
    for _ in range(rng.randint(1, 25)):
        values = []
        for attribute in attributes:
            if rng.random() < 0.1:
                values.append(None)
            elif attribute.is_continuous:
                values.append(round(rng.uniform(-5, 5), 3))
            else:
                values.append(rng.choice(attribute.values))
        rows.append((tuple(values), rng.choice(classes)))
    return Dataset(schema, tuple(rows))


def test_criterion_10_format_round_trips(tmp_path):
    rng = random.Random(10)
    for i in range(100):
        records = random_corpus(rng, rng.randint(1, 30))
        path = tmp_path / f"corpus{i}.jsonl"
        write_corpus(records, path)
        assert read_corpus(path) == records
    for i in range(100):
        dataset = random_dataset(rng)
        names = tmp_path / f"set{i}.names"
        data = tmp_path / f"set{i}.data"
        write_names_data(dataset, names, data)
        assert read_names_data(names, data) == dataset
    print("criterion 10: PASS (200 randomized file round trips are lossless)")
