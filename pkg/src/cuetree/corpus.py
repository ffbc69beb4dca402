"""Domain model for coded core:contributor relations.

A coded relation links a core unit to a contributor unit and records
whether a discourse cue occurs and where it is placed.  Relations in the
three core subsets carry eleven features describing segment structure,
intentional/informational/syntactic relations, and embedding; cluster and
joint relations carry only identity, subset, and the cue flag.

This module owns the record and feature types, the contributor-position
label grammar, corpus-level validation, subset partitioning, and the
conversion to a generic attribute/class learning dataset.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

SUBSETS = ("core1", "core2", "implicit_core", "cluster", "joint")
CORE_SUBSETS = ("core1", "core2", "implicit_core")

INTEN_RELATIONS = ("enable", "convince", "concede")
INFO_RELATIONS = ("causality", "similarity", "elaboration", "temporal")
SYN_RELATIONS = (
    "independent",
    "coordinated",
    "trib_subordinate_to_core",
    "core_subordinate_to_trib",
)
UNIT_TYPES = ("segment", "action", "state", "matrix")
CUE_POSITIONS = ("on_core", "on_trib", "none")

FEATURE_NAMES = (
    "trib_pos",
    "inten_structure",
    "infor_structure",
    "inten_rel",
    "info_rel",
    "syn_rel",
    "adjacency",
    "core_type",
    "trib_type",
    "above",
    "below",
)
SEGMENT_STRUCTURE_FEATURES = ("trib_pos", "inten_structure", "infor_structure")
NON_SEGMENT_STRUCTURE_FEATURES = tuple(
    name for name in FEATURE_NAMES if name not in SEGMENT_STRUCTURE_FEATURES
)
CONTINUOUS_FEATURES = ("above", "below")

OCCURRENCE_CLASSES = ("cued", "not_cued")
PLACEMENT_CLASSES = ("on_trib", "on_core")

#: Identity mapping over the four informational relation classes.  Corpora
#: coded with a finer relation inventory supply their own table (see
#: dataio.read_info_relation_mapping).
DEFAULT_INFO_RELATION_MAPPING = {name: name for name in INFO_RELATIONS}

_TRIB_POS_RE = re.compile(r"^B(\d+)A(\d+)-(\d+)(before|after)$")


@dataclass(frozen=True)
class TribPos:
    """Position of the contributor relative to its core.

    ``before`` and ``after`` count contributors on each side of the core;
    ``index`` is this contributor's 1-based rank on its ``side``.  The
    composite label reads e.g. ``B1A3-2after``: one contributor before,
    three after, and this is the second one after the core.
    """

    before: int
    after: int
    index: int
    side: str

    def __post_init__(self) -> None:
        if self.before < 0 or self.after < 0:
            raise ValueError("trib_pos counts must be non-negative")
        if self.before + self.after < 1:
            raise ValueError("trib_pos must place at least one contributor")
        if self.side not in ("before", "after"):
            raise ValueError(f"trib_pos side must be before/after, got {self.side!r}")
        side_count = self.before if self.side == "before" else self.after
        if not 1 <= self.index <= side_count:
            raise ValueError(
                f"trib_pos index {self.index} out of range for {side_count} "
                f"contributor(s) {self.side} the core"
            )


def parse_trib_pos(label: str) -> TribPos:
    """Parse a composite position label such as ``B1A3-2after``."""
    match = _TRIB_POS_RE.match(label)
    if match is None:
        raise ValueError(f"malformed trib_pos label {label!r}")
    before, after, index = int(match.group(1)), int(match.group(2)), int(match.group(3))
    return TribPos(before=before, after=after, index=index, side=match.group(4))


def format_trib_pos(pos: TribPos) -> str:
    """Render a position back to its composite label."""
    return f"B{pos.before}A{pos.after}-{pos.index}{pos.side}"


@dataclass(frozen=True)
class RelationFeatures:
    """The eleven coded features of a core-subset relation.

    ``inten_structure`` and ``infor_structure`` are opaque configuration
    tokens: they are compared only for equality, never interpreted.
    ``above`` and ``below`` count relations the current one is embedded in
    and embeds, and are the only numeric features.
    """

    trib_pos: TribPos
    inten_structure: str
    infor_structure: str
    inten_rel: str
    info_rel: str
    syn_rel: str
    adjacency: bool
    core_type: str
    trib_type: str
    above: int
    below: int

    def __post_init__(self) -> None:
        if not isinstance(self.trib_pos, TribPos):
            raise ValueError("trib_pos must be a TribPos")
        for name in ("inten_structure", "infor_structure"):
            token = getattr(self, name)
            if not isinstance(token, str) or not token:
                raise ValueError(f"{name} must be a non-empty token")
        _require_member("inten_rel", self.inten_rel, INTEN_RELATIONS)
        _require_member("info_rel", self.info_rel, INFO_RELATIONS)
        _require_member("syn_rel", self.syn_rel, SYN_RELATIONS)
        _require_member("core_type", self.core_type, UNIT_TYPES)
        _require_member("trib_type", self.trib_type, UNIT_TYPES)
        if not isinstance(self.adjacency, bool):
            raise ValueError("adjacency must be a bool")
        for name in ("above", "below"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be a non-negative int")


def _require_member(name: str, value: object, allowed: Sequence[str]) -> None:
    if value not in allowed:
        raise ValueError(f"unknown {name} value {value!r}")


@dataclass(frozen=True)
class RelationRecord:
    """One coded relation.

    Core-subset records (core1, core2, implicit_core) carry features and a
    cue position; cluster and joint records carry only the cue flag, with
    ``cue_position`` fixed at ``"none"`` and ``features`` at ``None``.
    Cross-field coding rules are checked by :func:`validate_corpus`, not at
    construction, so that miscoded records can be loaded and reported.
    """

    id: str
    subset: str
    cued: bool
    cue_position: str = "none"
    features: RelationFeatures | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("record id must be a non-empty string")
        _require_member("subset", self.subset, SUBSETS)
        if not isinstance(self.cued, bool):
            raise ValueError("cued must be a bool")
        _require_member("cue_position", self.cue_position, CUE_POSITIONS)
        if self.features is not None and not isinstance(self.features, RelationFeatures):
            raise ValueError("features must be RelationFeatures or None")

    @property
    def is_core_subset(self) -> bool:
        return self.subset in CORE_SUBSETS


@dataclass(frozen=True)
class Violation:
    """A coding-rule violation found by validate_corpus."""

    record_id: str
    rule: str
    message: str


def validate_corpus(records: Iterable[RelationRecord]) -> list[Violation]:
    """Check corpus-level coding rules and return all violations found.

    An empty report means: ids are unique, core-subset records carry
    features and a cue position consistent with the cue flag, core1 cues
    sit on the contributor, implicit-core cues never sit on the core,
    temporal relations occur only outside the core subsets, and cluster or
    joint records carry neither features nor a cue position.
    """
    violations: list[Violation] = []
    seen: set[str] = set()
    for record in records:
        if record.id in seen:
            violations.append(
                Violation(record.id, "duplicate_id", f"id {record.id!r} occurs more than once")
            )
        seen.add(record.id)
        if record.is_core_subset:
            violations.extend(_check_core_record(record))
        else:
            violations.extend(_check_cluster_joint_record(record))
    return violations


def _check_core_record(record: RelationRecord) -> list[Violation]:
    out: list[Violation] = []
    if record.features is None:
        out.append(
            Violation(
                record.id,
                "features_required",
                f"{record.subset} record is missing its feature vector",
            )
        )
    if record.cued and record.cue_position == "none":
        out.append(
            Violation(
                record.id,
                "cue_position_consistency",
                "cued relation has no cue position",
            )
        )
    if not record.cued and record.cue_position != "none":
        out.append(
            Violation(
                record.id,
                "cue_position_consistency",
                f"uncued relation has cue position {record.cue_position!r}",
            )
        )
    if record.subset == "core1" and record.cued and record.cue_position == "on_core":
        out.append(
            Violation(
                record.id,
                "core_first_cue_on_trib",
                "in core-first relations the cue never occurs on the core",
            )
        )
    if record.subset == "implicit_core" and record.cue_position == "on_core":
        out.append(
            Violation(
                record.id,
                "implicit_core_cue_on_core",
                "an implicit core cannot carry the cue",
            )
        )
    if record.features is not None and record.features.info_rel == "temporal":
        out.append(
            Violation(
                record.id,
                "temporal_outside_core",
                "temporal relations occur only between clustered units",
            )
        )
    return out


def _check_cluster_joint_record(record: RelationRecord) -> list[Violation]:
    out: list[Violation] = []
    if record.cue_position != "none":
        out.append(
            Violation(
                record.id,
                "cluster_joint_cue_position",
                f"{record.subset} records do not code cue position",
            )
        )
    if record.features is not None:
        out.append(
            Violation(
                record.id,
                "features_forbidden",
                f"{record.subset} records do not carry features",
            )
        )
    return out


def partition_by_subset(
    records: Iterable[RelationRecord],
) -> dict[str, list[RelationRecord]]:
    """Split records by subset; the result has a (possibly empty) list per subset."""
    parts: dict[str, list[RelationRecord]] = {name: [] for name in SUBSETS}
    for record in records:
        parts[record.subset].append(record)
    return parts


def placement_subset(records: Sequence[RelationRecord]) -> list[RelationRecord]:
    """Select the records eligible for cue-placement learning.

    Placement is only defined for core2 relations (explicit core, either
    unit may carry the cue), and only cued ones carry a position to learn.
    """
    for record in records:
        if record.subset != "core2":
            raise ValueError(
                f"placement subset requires core2 records, got {record.subset!r} "
                f"for id {record.id!r}"
            )
    return [record for record in records if record.cued]


def map_info_relation(raw_label: str, mapping: Mapping[str, str] | None = None) -> str:
    """Map a raw informational relation label to one of the four classes."""
    table = DEFAULT_INFO_RELATION_MAPPING if mapping is None else mapping
    try:
        mapped = table[raw_label]
    except KeyError:
        raise ValueError(f"unmapped info relation label {raw_label!r}") from None
    if mapped not in INFO_RELATIONS:
        raise ValueError(
            f"mapping sends {raw_label!r} to {mapped!r}, not an info relation class"
        )
    return mapped


# --- generic learning view -------------------------------------------------


@dataclass(frozen=True)
class Attribute:
    """A named dataset attribute; ``values`` is None for continuous ones."""

    name: str
    values: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("attribute name must be non-empty")
        if self.values is not None:
            if len(self.values) == 0:
                raise ValueError(f"attribute {self.name!r} has an empty value list")
            if len(set(self.values)) != len(self.values):
                raise ValueError(f"attribute {self.name!r} has duplicate values")

    @property
    def is_continuous(self) -> bool:
        return self.values is None


@dataclass(frozen=True)
class AttributeSchema:
    """Attribute declarations plus the class attribute.

    Declaration order is significant: it is the tie-break order for split
    selection, and class declaration order breaks majority ties.
    """

    attributes: tuple[Attribute, ...]
    class_name: str
    class_values: tuple[str, ...]

    def __post_init__(self) -> None:
        names = [attr.name for attr in self.attributes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate attribute names in schema")
        if self.class_name in names:
            raise ValueError("class name collides with an attribute name")
        if not self.class_values:
            raise ValueError("schema declares no class values")
        if len(set(self.class_values)) != len(self.class_values):
            raise ValueError("duplicate class values in schema")

    def attribute_index(self, name: str) -> int:
        for i, attr in enumerate(self.attributes):
            if attr.name == name:
                return i
        raise KeyError(f"no attribute named {name!r}")


Row = tuple[tuple, str]


@dataclass(frozen=True)
class Dataset:
    """Rows of attribute values plus a class label, conforming to a schema.

    Row values are positional (schema attribute order); ``None`` marks a
    missing value.  Continuous values are floats.
    """

    schema: AttributeSchema
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        n_attrs = len(self.schema.attributes)
        for values, label in self.rows:
            if len(values) != n_attrs:
                raise ValueError(
                    f"row has {len(values)} values, schema declares {n_attrs}"
                )
            if label not in self.schema.class_values:
                raise ValueError(f"row label {label!r} not in declared class values")
            for attr, value in zip(self.schema.attributes, values):
                if value is None:
                    continue
                if attr.is_continuous:
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise ValueError(
                            f"attribute {attr.name!r} is continuous, got {value!r}"
                        )
                elif value not in attr.values:
                    raise ValueError(
                        f"value {value!r} not declared for attribute {attr.name!r}"
                    )

    def __len__(self) -> int:
        return len(self.rows)

    def class_counts(self) -> tuple[int, ...]:
        counts = [0] * len(self.schema.class_values)
        index = {label: i for i, label in enumerate(self.schema.class_values)}
        for _, label in self.rows:
            counts[index[label]] += 1
        return tuple(counts)

    def restrict(self, names: Sequence[str]) -> "Dataset":
        """Project onto a subset of attributes, keeping schema order."""
        wanted = set(names)
        unknown = wanted - {attr.name for attr in self.schema.attributes}
        if unknown:
            raise KeyError(f"unknown attributes: {sorted(unknown)}")
        keep = [
            i for i, attr in enumerate(self.schema.attributes) if attr.name in wanted
        ]
        schema = AttributeSchema(
            attributes=tuple(self.schema.attributes[i] for i in keep),
            class_name=self.schema.class_name,
            class_values=self.schema.class_values,
        )
        rows = tuple(
            (tuple(values[i] for i in keep), label) for values, label in self.rows
        )
        return Dataset(schema=schema, rows=rows)

    def take(self, indices: Sequence[int]) -> "Dataset":
        """Select rows by index, keeping the schema."""
        return Dataset(schema=self.schema, rows=tuple(self.rows[i] for i in indices))


def to_learning_dataset(
    records: Sequence[RelationRecord], target: str = "occurrence"
) -> Dataset:
    """Convert core-subset records into a learnable dataset.

    The eleven features become attributes in declaration order; discrete
    value lists are the union of values observed in ``records``.  For the
    occurrence target the class is cued/not_cued over all records; for the
    placement target every record must be cued and the class is its cue
    position.
    """
    if target not in ("occurrence", "placement"):
        raise ValueError(f"unknown learning target {target!r}")
    if not records:
        raise ValueError("cannot build a dataset from zero records")
    for record in records:
        if record.features is None:
            raise ValueError(f"record {record.id!r} carries no features")
        if target == "placement" and not record.cued:
            raise ValueError(f"placement target requires cued records, {record.id!r} is not")

    feature_rows = [_feature_values(record.features) for record in records]
    attributes = []
    for i, name in enumerate(FEATURE_NAMES):
        if name in CONTINUOUS_FEATURES:
            attributes.append(Attribute(name=name))
        else:
            attributes.append(
                Attribute(name=name, values=_observed_values(name, feature_rows, i))
            )
    if target == "occurrence":
        class_values = OCCURRENCE_CLASSES
        labels = ["cued" if record.cued else "not_cued" for record in records]
    else:
        class_values = PLACEMENT_CLASSES
        labels = [record.cue_position for record in records]
    schema = AttributeSchema(
        attributes=tuple(attributes), class_name=target, class_values=class_values
    )
    rows = tuple(
        (values, label) for values, label in zip(feature_rows, labels)
    )
    return Dataset(schema=schema, rows=rows)


def _feature_values(features: RelationFeatures) -> tuple:
    return (
        format_trib_pos(features.trib_pos),
        features.inten_structure,
        features.infor_structure,
        features.inten_rel,
        features.info_rel,
        features.syn_rel,
        "yes" if features.adjacency else "no",
        features.core_type,
        features.trib_type,
        float(features.above),
        float(features.below),
    )


_CLOSED_VALUE_ORDER = {
    "inten_rel": INTEN_RELATIONS,
    "info_rel": INFO_RELATIONS,
    "syn_rel": SYN_RELATIONS,
    "adjacency": ("yes", "no"),
    "core_type": UNIT_TYPES,
    "trib_type": UNIT_TYPES,
}


def _observed_values(name: str, rows: list[tuple], column: int) -> tuple[str, ...]:
    observed = {values[column] for values in rows}
    closed = _CLOSED_VALUE_ORDER.get(name)
    if closed is not None:
        return tuple(v for v in closed if v in observed)
    # open vocabularies (trib_pos labels, structure tokens): sort for a
    # record-order-independent declaration order
    return tuple(sorted(observed))
