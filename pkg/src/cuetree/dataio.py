"""File formats: JSON-lines corpora and names/data dataset pairs.

Corpus files hold one relation record per line as a JSON object with a
fixed key order, so rewriting an unchanged corpus is byte-identical.
Dataset files use the classic two-file convention: a names file declaring
the class line first and then one attribute per line, and a data file with
one comma-separated row per line.  ``|`` starts a comment, ``?`` is a
missing value, and a trailing period on a line is optional.
"""

from __future__ import annotations

import json
from os import PathLike
from typing import Mapping, Sequence

from .corpus import (
    Attribute,
    AttributeSchema,
    CORE_SUBSETS,
    Dataset,
    FEATURE_NAMES,
    INFO_RELATIONS,
    RelationFeatures,
    RelationRecord,
    format_trib_pos,
    map_info_relation,
    parse_trib_pos,
)

Path = str | PathLike


class FileFormatError(ValueError):
    """A parse error carrying the file name and 1-based line number."""

    def __init__(self, path: Path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line
        self.reason = message


# --- corpus files ------------------------------------------------------------

_RECORD_KEYS = ("id", "subset", "cued", "cue_position", "features")


def read_corpus(
    path: Path, info_mapping: Mapping[str, str] | None = None
) -> list[RelationRecord]:
    """Read a JSON-lines corpus file.

    ``info_mapping`` translates raw informational relation labels to the
    four relation classes; by default only the class names themselves are
    accepted.
    """
    records: list[RelationRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise FileFormatError(path, lineno, f"invalid JSON: {err.msg}") from None
            if not isinstance(obj, dict):
                raise FileFormatError(path, lineno, "record line is not an object")
            try:
                record = _record_from_object(obj, info_mapping)
            except ValueError as err:
                raise FileFormatError(path, lineno, str(err)) from None
            if record.id in seen:
                raise FileFormatError(path, lineno, f"duplicate record id {record.id!r}")
            seen.add(record.id)
            records.append(record)
    return records


def _record_from_object(
    obj: dict, info_mapping: Mapping[str, str] | None
) -> RelationRecord:
    unknown = set(obj) - set(_RECORD_KEYS)
    if unknown:
        raise ValueError(f"unknown record keys: {sorted(unknown)}")
    for key in ("id", "subset", "cued"):
        if key not in obj:
            raise ValueError(f"missing record key {key!r}")
    if not isinstance(obj["cued"], bool):
        raise ValueError("cued must be a JSON boolean")
    subset = obj["subset"]
    if subset in CORE_SUBSETS:
        for key in ("cue_position", "features"):
            if key not in obj:
                raise ValueError(f"missing record key {key!r} for subset {subset!r}")
        features = _features_from_object(obj["features"], info_mapping)
        cue_position = obj["cue_position"]
    else:
        features = None
        if obj.get("features") is not None:
            raise ValueError(f"subset {subset!r} records do not carry features")
        cue_position = obj.get("cue_position", "none")
    return RelationRecord(
        id=obj["id"],
        subset=subset,
        cued=obj["cued"],
        cue_position=cue_position,
        features=features,
    )


def _features_from_object(
    obj: object, info_mapping: Mapping[str, str] | None
) -> RelationFeatures:
    if not isinstance(obj, dict):
        raise ValueError("features must be an object")
    unknown = set(obj) - set(FEATURE_NAMES)
    if unknown:
        raise ValueError(f"unknown feature keys: {sorted(unknown)}")
    missing = set(FEATURE_NAMES) - set(obj)
    if missing:
        raise ValueError(f"missing feature keys: {sorted(missing)}")
    if not isinstance(obj["trib_pos"], str):
        raise ValueError("trib_pos must be a composite label string")
    if not isinstance(obj["adjacency"], bool):
        raise ValueError("adjacency must be a JSON boolean")
    for key in ("above", "below"):
        if isinstance(obj[key], bool) or not isinstance(obj[key], int):
            raise ValueError(f"{key} must be a JSON integer")
    return RelationFeatures(
        trib_pos=parse_trib_pos(obj["trib_pos"]),
        inten_structure=obj["inten_structure"],
        infor_structure=obj["infor_structure"],
        inten_rel=obj["inten_rel"],
        info_rel=map_info_relation(obj["info_rel"], info_mapping),
        syn_rel=obj["syn_rel"],
        adjacency=obj["adjacency"],
        core_type=obj["core_type"],
        trib_type=obj["trib_type"],
        above=obj["above"],
        below=obj["below"],
    )


def write_corpus(records: Sequence[RelationRecord], path: Path) -> None:
    """Write records as JSON lines with a stable key order."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(_record_to_object(record), separators=(",", ":")))
            handle.write("\n")


def _record_to_object(record: RelationRecord) -> dict:
    obj: dict = {"id": record.id, "subset": record.subset, "cued": record.cued}
    if record.subset in CORE_SUBSETS:
        obj["cue_position"] = record.cue_position
        f = record.features
        if f is None:
            raise ValueError(f"record {record.id!r} has no features to write")
        obj["features"] = {
            "trib_pos": format_trib_pos(f.trib_pos),
            "inten_structure": f.inten_structure,
            "infor_structure": f.infor_structure,
            "inten_rel": f.inten_rel,
            "info_rel": f.info_rel,
            "syn_rel": f.syn_rel,
            "adjacency": f.adjacency,
            "core_type": f.core_type,
            "trib_type": f.trib_type,
            "above": f.above,
            "below": f.below,
        }
    return obj


def read_info_relation_mapping(path: Path) -> dict[str, str]:
    """Read a raw-label -> relation-class table from a JSON object file."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as err:
            raise FileFormatError(path, err.lineno, f"invalid JSON: {err.msg}") from None
    if not isinstance(obj, dict):
        raise FileFormatError(path, 1, "mapping file must hold a JSON object")
    for raw, mapped in obj.items():
        if not isinstance(raw, str) or not isinstance(mapped, str):
            raise FileFormatError(path, 1, "mapping entries must be string to string")
        if mapped not in INFO_RELATIONS:
            raise FileFormatError(
                path, 1, f"label {raw!r} maps to {mapped!r}, not an info relation class"
            )
    return obj


# --- names/data files ---------------------------------------------------------

_FORBIDDEN_IN_TOKEN = (",", "|", "\n", ":")


def read_names_data(names_path: Path, data_path: Path) -> Dataset:
    """Read a names/data file pair into a dataset."""
    schema = _read_names(names_path)
    rows = _read_data(data_path, schema)
    return Dataset(schema=schema, rows=tuple(rows))


def _content_lines(path: Path) -> list[tuple[int, str]]:
    out = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            text = raw.split("|", 1)[0].strip()
            if text:
                out.append((lineno, text))
    return out


def _strip_period(text: str) -> str:
    return text[:-1].rstrip() if text.endswith(".") else text


def _split_tokens(path: Path, lineno: int, text: str) -> list[str]:
    tokens = [token.strip() for token in _strip_period(text).split(",")]
    if any(not token for token in tokens):
        raise FileFormatError(path, lineno, "empty value token")
    return tokens


def _read_names(path: Path) -> AttributeSchema:
    lines = _content_lines(path)
    if not lines:
        raise FileFormatError(path, 1, "names file declares no class values")
    class_lineno, class_text = lines[0]
    class_values = _split_tokens(path, class_lineno, class_text)
    attributes = []
    for lineno, text in lines[1:]:
        if ":" not in text:
            raise FileFormatError(path, lineno, "attribute line has no ':'")
        name, _, rest = text.partition(":")
        name = name.strip()
        if not name:
            raise FileFormatError(path, lineno, "attribute line has an empty name")
        rest = rest.strip()
        if _strip_period(rest) == "continuous":
            attributes.append(Attribute(name=name))
        else:
            values = _split_tokens(path, lineno, rest)
            try:
                attributes.append(Attribute(name=name, values=tuple(values)))
            except ValueError as err:
                raise FileFormatError(path, lineno, str(err)) from None
    try:
        return AttributeSchema(
            attributes=tuple(attributes),
            class_name="class",
            class_values=tuple(class_values),
        )
    except ValueError as err:
        raise FileFormatError(path, class_lineno, str(err)) from None


def _read_data(path: Path, schema: AttributeSchema) -> list:
    rows = []
    n_attrs = len(schema.attributes)
    for lineno, text in _content_lines(path):
        tokens = [token.strip() for token in _strip_period(text).split(",")]
        if len(tokens) != n_attrs + 1:
            raise FileFormatError(
                path,
                lineno,
                f"row has {len(tokens)} fields, expected {n_attrs + 1}",
            )
        values: list = []
        for attr, token in zip(schema.attributes, tokens):
            if token == "?":
                values.append(None)
            elif attr.is_continuous:
                try:
                    values.append(float(token))
                except ValueError:
                    raise FileFormatError(
                        path, lineno, f"bad numeric value {token!r} for {attr.name!r}"
                    ) from None
            elif token in attr.values:
                values.append(token)
            else:
                raise FileFormatError(
                    path, lineno, f"value {token!r} not declared for {attr.name!r}"
                )
        label = tokens[-1]
        if label not in schema.class_values:
            raise FileFormatError(path, lineno, f"unknown class label {label!r}")
        rows.append((tuple(values), label))
    return rows


def _check_token(token: str, where: str) -> str:
    if token != token.strip() or not token:
        raise ValueError(f"{where}: token {token!r} has surrounding whitespace or is empty")
    if any(ch in token for ch in _FORBIDDEN_IN_TOKEN) or token == "?":
        raise ValueError(f"{where}: token {token!r} clashes with format metacharacters")
    return token


def write_names_data(dataset: Dataset, names_path: Path, data_path: Path) -> None:
    """Write a dataset as a names/data pair that read_names_data can reload."""
    schema = dataset.schema
    with open(names_path, "w", encoding="utf-8") as handle:
        handle.write(", ".join(_check_token(v, "class") for v in schema.class_values))
        handle.write(".\n")
        for attr in schema.attributes:
            _check_token(attr.name, "attribute name")
            if attr.is_continuous:
                handle.write(f"{attr.name}: continuous.\n")
            else:
                values = ", ".join(_check_token(v, attr.name) for v in attr.values)
                handle.write(f"{attr.name}: {values}.\n")
    with open(data_path, "w", encoding="utf-8") as handle:
        for values, label in dataset.rows:
            tokens = []
            for attr, value in zip(schema.attributes, values):
                if value is None:
                    tokens.append("?")
                elif attr.is_continuous:
                    tokens.append(repr(float(value)))
                else:
                    tokens.append(value)
            tokens.append(label)
            handle.write(",".join(tokens))
            handle.write("\n")
