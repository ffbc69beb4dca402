"""Replication protocol: feature search, best-tree selection, synthesis.

The protocol for one learning problem is: measure the majority baseline,
cross-validate every feature alone, cross-validate a family of feature
subsets (everything; all subsets of size >= 2 of the four highest-placed
features of the all-features tree; the eight non-segment-structure
features plus one segment-structure feature at a time), then select the
best candidate.  For cue placement the paired combination of the two best
single features joins the candidate list.

Selection picks the candidate with the lowest interval upper bound, widens
to every candidate not significantly worse, and inside that equivalence
set prefers the smallest tree rooted at trib_pos, then the smallest tree.

The module also generates synthetic corpora with exact subset counts,
configurable feature marginals, and optional planted rules, so the whole
pipeline can be exercised without the original annotated corpus.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .corpus import (
    CORE_SUBSETS,
    FEATURE_NAMES,
    NON_SEGMENT_STRUCTURE_FEATURES,
    SEGMENT_STRUCTURE_FEATURES,
    SUBSETS,
    SYN_RELATIONS,
    UNIT_TYPES,
    Dataset,
    RelationFeatures,
    RelationRecord,
    parse_trib_pos,
    partition_by_subset,
    placement_subset,
    to_learning_dataset,
)
from .evaluation import (
    CvResult,
    cross_validate,
    error_reduction,
    majority_baseline,
    significantly_better,
)
from .induction import LearnerParams, build_tree, prune, summarize


class FeatureSet(NamedTuple):
    name: str
    attributes: tuple[str, ...]


@dataclass(frozen=True)
class ExperimentPlan:
    """What to run: the target, evaluation knobs, and optional explicit sets.

    With feature_sets left at None the candidate family is enumerated from
    the all-features tree; an explicit tuple replaces the enumeration.
    """

    target: str
    subset: str | None = None
    feature_sets: tuple[FeatureSet, ...] | None = None
    k: int = 10
    seed: int = 0
    stratify: bool = True
    params: LearnerParams = field(default_factory=LearnerParams)

    def __post_init__(self) -> None:
        if self.target not in ("occurrence", "placement"):
            raise ValueError(f"unknown experiment target {self.target!r}")
        if self.target == "placement" and self.subset not in (None, "core2"):
            raise ValueError("placement experiments always use core2 records")
        if self.target == "occurrence" and self.subset is not None:
            if self.subset not in CORE_SUBSETS:
                raise ValueError(f"unknown occurrence subset {self.subset!r}")
        if self.feature_sets is not None:
            for fs in self.feature_sets:
                if not fs.attributes:
                    raise ValueError(f"feature set {fs.name!r} is empty")
                unknown = set(fs.attributes) - set(FEATURE_NAMES)
                if unknown:
                    raise ValueError(
                        f"feature set {fs.name!r} names unknown features {sorted(unknown)}"
                    )


@dataclass(frozen=True)
class SingleFeatureResult:
    attribute: str
    cv: CvResult


@dataclass(frozen=True)
class CandidateTreeResult:
    """A cross-validated feature set plus its full-data tree summary."""

    name: str
    attributes: tuple[str, ...]
    cv: CvResult
    node_count: int
    features: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        for _, name in self.features:
            if name not in self.attributes:
                raise ValueError(
                    f"summary feature {name!r} outside candidate {self.name!r}"
                )

    @property
    def root_attribute(self) -> str | None:
        if self.features and self.features[0][0] == 0:
            return self.features[0][1]
        return None


@dataclass(frozen=True)
class ReplicationReport:
    target: str
    subset: str
    k: int
    seed: int
    stratify: bool
    params: LearnerParams
    baseline: float
    single_features: tuple[SingleFeatureResult, ...]
    candidates: tuple[CandidateTreeResult, ...]
    selected: CandidateTreeResult
    error_reduction: float | None

    def __post_init__(self) -> None:
        if self.selected not in self.candidates:
            raise ValueError("selected result must be one of the candidates")


def _canonical(attributes: Sequence[str]) -> tuple[str, ...]:
    wanted = set(attributes)
    return tuple(name for name in FEATURE_NAMES if name in wanted)


def enumerate_feature_sets(summary) -> tuple[FeatureSet, ...]:
    """Candidate feature sets from an all-features tree summary.

    Yields the full feature set, all subsets of size >= 2 of the (up to)
    four highest-placed summary features, and the eight non-segment-
    structure features joined with each segment-structure feature in turn.
    """
    tops = [name for _, name in summary.features][:4]
    if len(tops) < 2:
        raise ValueError("tree summary exposes fewer than two features")
    sets: list[FeatureSet] = [FeatureSet("all", FEATURE_NAMES)]
    tops = list(_canonical(tops))
    for size in range(2, len(tops) + 1):
        for combo in itertools.combinations(tops, size):
            sets.append(FeatureSet("+".join(combo), combo))
    for special in SEGMENT_STRUCTURE_FEATURES:
        sets.append(
            FeatureSet(
                f"nonseg+{special}",
                _canonical(NON_SEGMENT_STRUCTURE_FEATURES + (special,)),
            )
        )
    return tuple(sets)


def select_best(candidates: Sequence[CandidateTreeResult]) -> CandidateTreeResult:
    """Pick the winning candidate.

    The candidate with the lowest mean + halfwidth anchors an equivalence
    set of candidates not significantly worse than it; within the set the
    smallest tree rooted at trib_pos wins if one exists, otherwise the
    smallest tree.  All ties resolve to the earliest candidate.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    anchor = min(candidates, key=lambda c: c.cv.upper_bound)
    equivalent = [
        c
        for c in candidates
        if not significantly_better(anchor.cv.interval, c.cv.interval)
    ]
    rooted = [c for c in equivalent if c.root_attribute == "trib_pos"]
    pool = rooted or equivalent
    return min(pool, key=lambda c: c.node_count)


def run_occurrence_experiment(
    records: Sequence[RelationRecord],
    subset: str,
    plan: ExperimentPlan | None = None,
) -> ReplicationReport:
    """Full cue-occurrence protocol over one core subset."""
    if subset not in CORE_SUBSETS:
        raise ValueError(f"occurrence experiments run on core subsets, not {subset!r}")
    if plan is None:
        plan = ExperimentPlan(target="occurrence", subset=subset)
    if plan.target != "occurrence":
        raise ValueError("plan target is not occurrence")
    if plan.subset is not None and plan.subset != subset:
        raise ValueError(f"plan names subset {plan.subset!r}, asked to run {subset!r}")
    part = partition_by_subset(records)[subset]
    if not part:
        raise ValueError(f"corpus has no {subset} records")
    dataset = to_learning_dataset(part, "occurrence")
    return _run_protocol(dataset, plan, subset, include_pair=False)


def run_placement_experiment(
    records: Sequence[RelationRecord],
    plan: ExperimentPlan | None = None,
) -> ReplicationReport:
    """Full cue-placement protocol over the cued core2 records."""
    if plan is None:
        plan = ExperimentPlan(target="placement")
    if plan.target != "placement":
        raise ValueError("plan target is not placement")
    eligible = placement_subset(partition_by_subset(records)["core2"])
    if not eligible:
        raise ValueError("corpus has no cued core2 records")
    dataset = to_learning_dataset(eligible, "placement")
    return _run_protocol(dataset, plan, "core2", include_pair=True)


def _run_protocol(
    dataset: Dataset, plan: ExperimentPlan, subset: str, include_pair: bool
) -> ReplicationReport:
    params = plan.params
    baseline = majority_baseline(dataset)

    singles = []
    for name in FEATURE_NAMES:
        cv = cross_validate(
            dataset.restrict([name]),
            params,
            k=plan.k,
            seed=plan.seed,
            stratify=plan.stratify,
        )
        singles.append(SingleFeatureResult(attribute=name, cv=cv))
    better = tuple(s for s in singles if s.cv.upper_bound < baseline)

    full_tree = prune(build_tree(dataset, params), dataset, params.cf)
    summary = summarize(full_tree)
    if plan.feature_sets is not None:
        sets = list(plan.feature_sets)
    else:
        try:
            sets = list(enumerate_feature_sets(summary))
        except ValueError:
            # all-features tree too shallow to rank features: keep the full
            # set and the segment-structure family only
            sets = [FeatureSet("all", FEATURE_NAMES)]
            for special in SEGMENT_STRUCTURE_FEATURES:
                sets.append(
                    FeatureSet(
                        f"nonseg+{special}",
                        _canonical(NON_SEGMENT_STRUCTURE_FEATURES + (special,)),
                    )
                )
    if include_pair:
        ranked = sorted(
            range(len(singles)), key=lambda i: (singles[i].cv.upper_bound, i)
        )
        pair = _canonical(
            (singles[ranked[0]].attribute, singles[ranked[1]].attribute)
        )
        sets.append(FeatureSet("pair:" + "+".join(pair), pair))

    candidates: list[CandidateTreeResult] = []
    seen: set[frozenset] = set()
    for fs in sets:
        attributes = _canonical(fs.attributes)
        key = frozenset(attributes)
        if key in seen:
            continue
        seen.add(key)
        restricted = dataset.restrict(attributes)
        cv = cross_validate(
            restricted, params, k=plan.k, seed=plan.seed, stratify=plan.stratify
        )
        tree = prune(build_tree(restricted, params), restricted, params.cf)
        tree_summary = summarize(tree)
        candidates.append(
            CandidateTreeResult(
                name=fs.name,
                attributes=attributes,
                cv=cv,
                node_count=tree_summary.node_count,
                features=tree_summary.features,
            )
        )

    selected = select_best(candidates)
    reduction = (
        error_reduction(baseline, selected.cv.interval) if baseline > 0 else None
    )
    return ReplicationReport(
        target=plan.target,
        subset=subset,
        k=plan.k,
        seed=plan.seed,
        stratify=plan.stratify,
        params=params,
        baseline=baseline,
        single_features=better,
        candidates=tuple(candidates),
        selected=selected,
        error_reduction=reduction,
    )


# --- report serialization ------------------------------------------------------


def _cv_to_dict(cv: CvResult) -> dict:
    return {
        "fold_observed": list(cv.fold_observed),
        "fold_estimated": list(cv.fold_estimated),
        "mean_observed": cv.mean_observed,
        "mean_estimated": cv.mean_estimated,
        "halfwidth95": cv.halfwidth95,
        "mean_nodes": cv.mean_nodes,
    }


def _cv_from_dict(obj: dict) -> CvResult:
    return CvResult(
        fold_observed=tuple(obj["fold_observed"]),
        fold_estimated=tuple(obj["fold_estimated"]),
        mean_observed=obj["mean_observed"],
        mean_estimated=obj["mean_estimated"],
        halfwidth95=obj["halfwidth95"],
        mean_nodes=obj["mean_nodes"],
    )


def report_to_dict(report: ReplicationReport) -> dict:
    """JSON-serializable report; identical runs serialize identically."""
    return {
        "version": 1,
        "target": report.target,
        "subset": report.subset,
        "k": report.k,
        "seed": report.seed,
        "stratify": report.stratify,
        "params": {
            "grouping": report.params.grouping,
            "min_branch_instances": report.params.min_branch_instances,
            "cf": report.params.cf,
            "gain_guard": report.params.gain_guard,
        },
        "baseline": report.baseline,
        "single_features": [
            {"attribute": s.attribute, "cv": _cv_to_dict(s.cv)}
            for s in report.single_features
        ],
        "candidates": [
            {
                "name": c.name,
                "attributes": list(c.attributes),
                "cv": _cv_to_dict(c.cv),
                "node_count": c.node_count,
                "features": [[level, name] for level, name in c.features],
            }
            for c in report.candidates
        ],
        "selected": report.selected.name,
        "error_reduction": report.error_reduction,
    }


def report_from_dict(obj: dict) -> ReplicationReport:
    if obj.get("version") != 1:
        raise ValueError(f"unsupported report version {obj.get('version')!r}")
    candidates = tuple(
        CandidateTreeResult(
            name=c["name"],
            attributes=tuple(c["attributes"]),
            cv=_cv_from_dict(c["cv"]),
            node_count=c["node_count"],
            features=tuple((level, name) for level, name in c["features"]),
        )
        for c in obj["candidates"]
    )
    by_name = {c.name: c for c in candidates}
    if obj["selected"] not in by_name:
        raise ValueError(f"selected candidate {obj['selected']!r} not in report")
    return ReplicationReport(
        target=obj["target"],
        subset=obj["subset"],
        k=obj["k"],
        seed=obj["seed"],
        stratify=obj["stratify"],
        params=LearnerParams(**obj["params"]),
        baseline=obj["baseline"],
        single_features=tuple(
            SingleFeatureResult(attribute=s["attribute"], cv=_cv_from_dict(s["cv"]))
            for s in obj["single_features"]
        ),
        candidates=candidates,
        selected=by_name[obj["selected"]],
        error_reduction=obj["error_reduction"],
    )


# --- synthetic corpora -----------------------------------------------------------


#: Sampling weights per feature value.  Keys are the serialized dataset
#: values (composite labels for trib_pos, yes/no for adjacency, digit
#: strings for the embedding counts).  concede is rare by design.
DEFAULT_MARGINALS: dict[str, dict[str, float]] = {
    "trib_pos": {
        "B0A1-1after": 22,
        "B0A2-1after": 12,
        "B0A2-2after": 12,
        "B1A0-1before": 16,
        "B1A1-1before": 10,
        "B1A1-1after": 12,
        "B2A0-1before": 8,
        "B2A0-2before": 8,
    },
    "inten_structure": {"s1": 4, "s2": 3, "s3": 2, "s4": 1},
    "infor_structure": {"t1": 4, "t2": 3, "t3": 2, "t4": 1},
    "inten_rel": {"enable": 47, "convince": 47, "concede": 6},
    "info_rel": {"causality": 40, "similarity": 15, "elaboration": 35, "temporal": 10},
    "syn_rel": {name: 1 for name in SYN_RELATIONS},
    "adjacency": {"yes": 3, "no": 1},
    "core_type": {name: 1 for name in UNIT_TYPES},
    "trib_type": {name: 1 for name in UNIT_TYPES},
    "above": {"0": 40, "1": 30, "2": 20, "3": 10},
    "below": {"0": 50, "1": 30, "2": 15, "3": 5},
}


@dataclass(frozen=True)
class SubsetCounts:
    """Exact record counts for one subset of a synthetic corpus."""

    size: int
    cued: int | None = None
    on_trib: int | None = None

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ValueError("subset size cannot be negative")
        if self.cued is not None and not 0 <= self.cued <= self.size:
            raise ValueError(f"cued count {self.cued} outside 0..{self.size}")
        if self.on_trib is not None:
            if self.cued is None or not 0 <= self.on_trib <= self.cued:
                raise ValueError("on_trib count must lie within the cued count")


@dataclass(frozen=True)
class PlantedRule:
    """A deterministic class rule over at most two discrete features.

    A record is positive (cued, or cue on the contributor for placement)
    exactly when its value combination over ``attributes`` appears in
    ``true_combos``; each label then flips with probability ``noise``.
    """

    target: str
    attributes: tuple[str, ...]
    true_combos: tuple[tuple[str, ...], ...]
    noise: float = 0.0
    subsets: tuple[str, ...] = CORE_SUBSETS

    def __post_init__(self) -> None:
        if self.target not in ("occurrence", "placement"):
            raise ValueError(f"unknown rule target {self.target!r}")
        if not 1 <= len(self.attributes) <= 2:
            raise ValueError("planted rules use one or two attributes")
        for name in self.attributes:
            if name not in FEATURE_NAMES or name in ("above", "below"):
                raise ValueError(f"rules need discrete features, got {name!r}")
        for combo in self.true_combos:
            if len(combo) != len(self.attributes):
                raise ValueError("combo arity differs from rule attributes")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError("noise must lie in [0, 1)")
        if self.target == "placement" and tuple(self.subsets) != ("core2",):
            raise ValueError("placement rules apply to core2 only")
        for subset in self.subsets:
            if subset not in CORE_SUBSETS:
                raise ValueError(f"rules cover core subsets, not {subset!r}")

    def truth(self, serialized: Mapping[str, str]) -> bool:
        combo = tuple(serialized[name] for name in self.attributes)
        return combo in set(self.true_combos)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic corpus."""

    subsets: Mapping[str, SubsetCounts]
    rules: tuple[PlantedRule, ...] = ()
    marginals: Mapping[str, Mapping[str, float]] | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        for name in self.subsets:
            if name not in SUBSETS:
                raise ValueError(f"unknown subset {name!r}")
        for rule in self.rules:
            for subset in rule.subsets:
                covered = [
                    r
                    for r in self.rules
                    if r.target == rule.target and subset in r.subsets
                ]
                if len(covered) > 1:
                    raise ValueError(
                        f"multiple {rule.target} rules cover subset {subset!r}"
                    )
        for name, counts in self.subsets.items():
            occurrence_ruled = any(
                r.target == "occurrence" and name in r.subsets for r in self.rules
            )
            if counts.cued is None and not occurrence_ruled:
                raise ValueError(f"subset {name!r} needs a cued count or a rule")
            if name == "core2" and counts.size and not occurrence_ruled:
                placement_ruled = any(r.target == "placement" for r in self.rules)
                if counts.cued and counts.on_trib is None and not placement_ruled:
                    raise ValueError(
                        "core2 needs an on_trib count or a placement rule"
                    )

    def marginal(self, attribute: str) -> Mapping[str, float]:
        if self.marginals is not None and attribute in self.marginals:
            return self.marginals[attribute]
        return DEFAULT_MARGINALS[attribute]


def default_core_spec(seed: int = 0) -> SynthSpec:
    """Core-subset sizes and cue counts shaped like the annotated corpus."""
    return SynthSpec(
        subsets={
            "core1": SubsetCounts(size=127, cued=52),
            "core2": SubsetCounts(size=155, cued=100, on_trib=43),
            "implicit_core": SubsetCounts(size=124, cued=29),
        },
        seed=seed,
    )


def default_full_spec(seed: int = 0) -> SynthSpec:
    """Like default_core_spec plus the cluster and joint strata."""
    base = default_core_spec(seed=seed)
    subsets = dict(base.subsets)
    subsets["cluster"] = SubsetCounts(size=310, cued=276)
    subsets["joint"] = SubsetCounts(size=64, cued=19)
    return SynthSpec(subsets=subsets, seed=seed)


def generate_corpus(spec: SynthSpec) -> list[RelationRecord]:
    """Generate records per spec; the same spec always yields the same corpus."""
    rng = random.Random(spec.seed)
    records: list[RelationRecord] = []
    for subset in SUBSETS:
        counts = spec.subsets.get(subset)
        if counts is None or counts.size == 0:
            continue
        if subset in ("cluster", "joint"):
            records.extend(_generate_bare(rng, subset, counts))
        else:
            records.extend(_generate_core(rng, spec, subset, counts))
    return records


def _generate_bare(
    rng: random.Random, subset: str, counts: SubsetCounts
) -> list[RelationRecord]:
    cued_rows = set(rng.sample(range(counts.size), counts.cued))
    return [
        RelationRecord(id=f"{subset}-{i:04d}", subset=subset, cued=i in cued_rows)
        for i in range(counts.size)
    ]


def _generate_core(
    rng: random.Random, spec: SynthSpec, subset: str, counts: SubsetCounts
) -> list[RelationRecord]:
    occurrence_rule = next(
        (
            r
            for r in spec.rules
            if r.target == "occurrence" and subset in r.subsets
        ),
        None,
    )
    placement_rule = (
        next((r for r in spec.rules if r.target == "placement"), None)
        if subset == "core2"
        else None
    )
    serialized_rows: list[dict[str, str]] = []
    cued_flags: list[bool] = []
    for _ in range(counts.size):
        serialized = _sample_features(rng, spec)
        serialized_rows.append(serialized)
        if occurrence_rule is not None:
            value = occurrence_rule.truth(serialized)
            if occurrence_rule.noise and rng.random() < occurrence_rule.noise:
                value = not value
            cued_flags.append(value)
    if occurrence_rule is None:
        chosen = set(rng.sample(range(counts.size), counts.cued))
        cued_flags = [i in chosen for i in range(counts.size)]

    positions = ["none"] * counts.size
    if subset == "core2":
        cued_rows = [i for i, cued in enumerate(cued_flags) if cued]
        if placement_rule is not None:
            for i in cued_rows:
                value = placement_rule.truth(serialized_rows[i])
                if placement_rule.noise and rng.random() < placement_rule.noise:
                    value = not value
                positions[i] = "on_trib" if value else "on_core"
        elif cued_rows:
            want = counts.on_trib if counts.on_trib is not None else len(cued_rows) // 2
            want = min(want, len(cued_rows))
            on_trib_rows = set(rng.sample(cued_rows, want))
            for i in cued_rows:
                positions[i] = "on_trib" if i in on_trib_rows else "on_core"
    else:
        # core1 cues sit on the contributor; an implicit core cannot carry one
        for i, cued in enumerate(cued_flags):
            if cued:
                positions[i] = "on_trib"

    records = []
    for i in range(counts.size):
        records.append(
            RelationRecord(
                id=f"{subset}-{i:04d}",
                subset=subset,
                cued=cued_flags[i],
                cue_position=positions[i],
                features=_deserialize_features(serialized_rows[i]),
            )
        )
    return records


def _sample_features(rng: random.Random, spec: SynthSpec) -> dict[str, str]:
    serialized: dict[str, str] = {}
    for name in FEATURE_NAMES:
        table = spec.marginal(name)
        items = list(table.items())
        if name == "info_rel":
            # temporal relations never occur inside the core subsets
            items = [(v, w) for v, w in items if v != "temporal"]
        if not items:
            raise ValueError(f"marginal for {name!r} has no usable values")
        values = [v for v, _ in items]
        weights = [w for _, w in items]
        serialized[name] = rng.choices(values, weights=weights)[0]
    return serialized


def _deserialize_features(serialized: Mapping[str, str]) -> RelationFeatures:
    return RelationFeatures(
        trib_pos=parse_trib_pos(serialized["trib_pos"]),
        inten_structure=serialized["inten_structure"],
        infor_structure=serialized["infor_structure"],
        inten_rel=serialized["inten_rel"],
        info_rel=serialized["info_rel"],
        syn_rel=serialized["syn_rel"],
        adjacency=serialized["adjacency"] == "yes",
        core_type=serialized["core_type"],
        trib_type=serialized["trib_type"],
        above=int(serialized["above"]),
        below=int(serialized["below"]),
    )


# --- synth spec serialization ----------------------------------------------------


def spec_to_dict(spec: SynthSpec) -> dict:
    return {
        "version": 1,
        "seed": spec.seed,
        "subsets": {
            name: {
                "size": counts.size,
                "cued": counts.cued,
                "on_trib": counts.on_trib,
            }
            for name, counts in spec.subsets.items()
        },
        "marginals": (
            {k: dict(v) for k, v in spec.marginals.items()}
            if spec.marginals is not None
            else None
        ),
        "rules": [
            {
                "target": rule.target,
                "attributes": list(rule.attributes),
                "true_combos": [list(combo) for combo in rule.true_combos],
                "noise": rule.noise,
                "subsets": list(rule.subsets),
            }
            for rule in spec.rules
        ],
    }


def spec_from_dict(obj: dict) -> SynthSpec:
    if obj.get("version") != 1:
        raise ValueError(f"unsupported synth spec version {obj.get('version')!r}")
    return SynthSpec(
        subsets={
            name: SubsetCounts(
                size=sub["size"],
                cued=sub.get("cued"),
                on_trib=sub.get("on_trib"),
            )
            for name, sub in obj["subsets"].items()
        },
        rules=tuple(
            PlantedRule(
                target=rule["target"],
                attributes=tuple(rule["attributes"]),
                true_combos=tuple(tuple(combo) for combo in rule["true_combos"]),
                noise=rule.get("noise", 0.0),
                subsets=tuple(rule.get("subsets", CORE_SUBSETS)),
            )
            for rule in obj.get("rules", [])
        ),
        marginals=obj.get("marginals"),
        seed=obj.get("seed", 0),
    )
