"""File formats: corpus JSON lines and names/data pairs."""

import json
import random

import pytest

from conftest import random_core_record
from cuetree.corpus import (
    Attribute,
    AttributeSchema,
    Dataset,
    RelationRecord,
)
from cuetree.dataio import (
    FileFormatError,
    read_corpus,
    read_info_relation_mapping,
    read_names_data,
    write_corpus,
    write_names_data,
)


def random_corpus(rng, n):
    records = []
    for i in range(n):
        subset = rng.choice(["core1", "core2", "implicit_core", "cluster", "joint"])
        if subset in ("cluster", "joint"):
            records.append(
                RelationRecord(id=f"r{i}", subset=subset, cued=rng.random() < 0.5)
            )
        else:
            records.append(random_core_record(rng, f"r{i}", subset))
    return records


def test_corpus_round_trip_randomized(tmp_path):
    rng = random.Random(17)
    for trial in range(20):
        records = random_corpus(rng, rng.randint(1, 60))
        path = tmp_path / f"corpus{trial}.jsonl"
        write_corpus(records, path)
        assert read_corpus(path) == records


def test_corpus_rewrite_is_byte_identical(tmp_path):
    rng = random.Random(23)
    records = random_corpus(rng, 50)
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    write_corpus(records, first)
    write_corpus(read_corpus(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_corpus_line_layout_is_stable(tmp_path):
    records = [
        random_core_record(random.Random(1), "r0", "core2"),
        RelationRecord(id="c0", subset="cluster", cued=False),
    ]
    path = tmp_path / "c.jsonl"
    write_corpus(records, path)
    lines = path.read_text().splitlines()
    assert lines[1] == '{"id":"c0","subset":"cluster","cued":false}'
    obj = json.loads(lines[0])
    assert list(obj) == ["id", "subset", "cued", "cue_position", "features"]
    assert list(obj["features"]) == [
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
    ]


def test_corpus_skips_blank_lines(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('\n{"id":"a","subset":"cluster","cued":true}\n\n')
    records = read_corpus(path)
    assert [r.id for r in records] == ["a"]


def write_lines(tmp_path, *lines):
    path = tmp_path / "bad.jsonl"
    path.write_text("".join(line + "\n" for line in lines))
    return path


GOOD_CORE = (
    '{"id":"g","subset":"core2","cued":true,"cue_position":"on_trib","features":'
    '{"trib_pos":"B0A1-1after","inten_structure":"s1","infor_structure":"t1",'
    '"inten_rel":"enable","info_rel":"causality","syn_rel":"independent",'
    '"adjacency":true,"core_type":"segment","trib_type":"action","above":0,"below":1}}'
)


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("{not json", "invalid JSON"),
        ('["id"]', "not an object"),
        ('{"id":"a","subset":"cluster","cued":true,"color":"red"}', "unknown record keys"),
        ('{"subset":"cluster","cued":true}', "missing record key 'id'"),
        ('{"id":"a","subset":"cluster","cued":"yes"}', "JSON boolean"),
        ('{"id":"a","subset":"core1","cued":true}', "missing record key"),
        ('{"id":"a","subset":"cluster","cued":true,"features":{}}', "do not carry features"),
        (GOOD_CORE.replace('"above":0', '"above":0.5'), "JSON integer"),
        (GOOD_CORE.replace('"trib_pos":"B0A1-1after"', '"trib_pos":"B9"'), "malformed trib_pos"),
        (GOOD_CORE.replace('"inten_rel":"enable"', '"inten_rel":"nudge"'), "inten_rel"),
    ],
)
def test_read_corpus_rejects_malformed_records(tmp_path, line, fragment):
    path = write_lines(tmp_path, GOOD_CORE, line)
    with pytest.raises(FileFormatError) as err:
        read_corpus(path)
    assert err.value.line == 2
    assert err.value.path == str(path)
    assert fragment in err.value.reason
    assert str(err.value).startswith(f"{path}:2: ")


def test_read_corpus_rejects_duplicate_ids(tmp_path):
    path = write_lines(
        tmp_path,
        '{"id":"a","subset":"cluster","cued":true}',
        '{"id":"a","subset":"joint","cued":false}',
    )
    with pytest.raises(FileFormatError) as err:
        read_corpus(path)
    assert err.value.line == 2
    assert "duplicate" in err.value.reason


def test_read_corpus_applies_info_mapping(tmp_path):
    line = GOOD_CORE.replace('"info_rel":"causality"', '"info_rel":"volitional-cause"')
    path = write_lines(tmp_path, line)
    with pytest.raises(FileFormatError):
        read_corpus(path)  # unmapped without a table
    records = read_corpus(path, {"volitional-cause": "causality"})
    assert records[0].features.info_rel == "causality"


def test_read_info_relation_mapping(tmp_path):
    path = tmp_path / "map.json"
    path.write_text('{"volitional-cause": "causality", "restatement": "elaboration"}')
    assert read_info_relation_mapping(path) == {
        "volitional-cause": "causality",
        "restatement": "elaboration",
    }
    path.write_text('["causality"]')
    with pytest.raises(FileFormatError):
        read_info_relation_mapping(path)
    path.write_text('{"x": "unknown-class"}')
    with pytest.raises(FileFormatError):
        read_info_relation_mapping(path)
    path.write_text("{bad json")
    with pytest.raises(FileFormatError):
        read_info_relation_mapping(path)


# --- names/data ---------------------------------------------------------------


def random_schema(rng):
    n_attrs = rng.randint(1, 6)
    attributes = []
    for i in range(n_attrs):
        if rng.random() < 0.4:
            attributes.append(Attribute(name=f"a{i}"))
        else:
            n_values = rng.randint(1, 5)
            attributes.append(
                Attribute(name=f"a{i}", values=tuple(f"v{i}_{j}" for j in range(n_values)))
            )
    n_classes = rng.randint(2, 4)
    return AttributeSchema(
        attributes=tuple(attributes),
        class_name="class",
        class_values=tuple(f"c{j}" for j in range(n_classes)),
    )


def random_dataset(rng):
    schema = random_schema(rng)
    rows = []
    for _ in range(rng.randint(0, 40)):
        values = []
        for attr in schema.attributes:
            if rng.random() < 0.1:
                values.append(None)
            elif attr.is_continuous:
                values.append(round(rng.uniform(-50, 50), 3))
            else:
                values.append(rng.choice(attr.values))
        rows.append((tuple(values), rng.choice(schema.class_values)))
    return Dataset(schema=schema, rows=tuple(rows))


def test_names_data_round_trip_randomized(tmp_path):
    rng = random.Random(31)
    for trial in range(30):
        dataset = random_dataset(rng)
        names = tmp_path / f"{trial}.names"
        data = tmp_path / f"{trial}.data"
        write_names_data(dataset, names, data)
        back = read_names_data(names, data)
        assert back.schema == dataset.schema
        assert back.rows == dataset.rows


def test_names_data_rewrite_is_byte_identical(tmp_path):
    dataset = random_dataset(random.Random(37))
    write_names_data(dataset, tmp_path / "a.names", tmp_path / "a.data")
    back = read_names_data(tmp_path / "a.names", tmp_path / "a.data")
    write_names_data(back, tmp_path / "b.names", tmp_path / "b.data")
    assert (tmp_path / "a.names").read_bytes() == (tmp_path / "b.names").read_bytes()
    assert (tmp_path / "a.data").read_bytes() == (tmp_path / "b.data").read_bytes()


def test_names_data_accepts_comments_periods_and_missing(tmp_path):
    names = tmp_path / "t.names"
    data = tmp_path / "t.data"
    names.write_text(
        "| class line comes first\n"
        "yes, no.\n"
        "color: red, green, blue.  | trailing comment\n"
        "size: continuous.\n"
    )
    data.write_text(
        "red, 1.5, yes.\n"
        "| full comment line\n"
        "?, -2, no\n"
        "green, ?, yes.\n"
    )
    dataset = read_names_data(names, data)
    assert dataset.schema.class_values == ("yes", "no")
    assert [a.name for a in dataset.schema.attributes] == ["color", "size"]
    assert dataset.rows == (
        (("red", 1.5), "yes"),
        ((None, -2.0), "no"),
        (("green", None), "yes"),
    )


@pytest.mark.parametrize(
    "names_text, fragment",
    [
        ("", "no class values"),
        ("yes, no.\ncolor red, green.\n", "no ':'"),
        ("yes, no.\n: red, green.\n", "empty name"),
        ("yes, no.\ncolor: red, red.\n", "duplicate values"),
        ("yes, no.\ncolor: red,, green.\n", "empty value token"),
        ("yes, yes.\n", "duplicate class values"),
    ],
)
def test_read_names_rejects_malformed_files(tmp_path, names_text, fragment):
    names = tmp_path / "t.names"
    names.write_text(names_text)
    data = tmp_path / "t.data"
    data.write_text("")
    with pytest.raises(FileFormatError) as err:
        read_names_data(names, data)
    assert fragment in err.value.reason


@pytest.mark.parametrize(
    "row, fragment",
    [
        ("red, yes", "expected 3"),
        ("red, 1.5, maybe", "unknown class label"),
        ("purple, 1.5, yes", "not declared"),
        ("red, tall, yes", "bad numeric value"),
    ],
)
def test_read_data_rejects_malformed_rows(tmp_path, row, fragment):
    names = tmp_path / "t.names"
    names.write_text("yes, no.\ncolor: red, green.\nsize: continuous.\n")
    data = tmp_path / "t.data"
    data.write_text("red, 1.5, yes\n" + row + "\n")
    with pytest.raises(FileFormatError) as err:
        read_names_data(names, data)
    assert err.value.line == 2
    assert fragment in err.value.reason


def test_write_names_data_rejects_metacharacter_tokens(tmp_path):
    schema = AttributeSchema(
        (Attribute("a", ("x,y",)),), "class", ("u", "v")
    )
    dataset = Dataset(schema, ())
    with pytest.raises(ValueError):
        write_names_data(dataset, tmp_path / "t.names", tmp_path / "t.data")
    schema = AttributeSchema((Attribute("a", ("?",)),), "class", ("u", "v"))
    with pytest.raises(ValueError):
        write_names_data(Dataset(schema, ()), tmp_path / "t.names", tmp_path / "t.data")
    schema = AttributeSchema((Attribute("a", ("x",)),), "class", ("u ", "v"))
    with pytest.raises(ValueError):
        write_names_data(Dataset(schema, ()), tmp_path / "t.names", tmp_path / "t.data")
