"""Shared factories for randomized test data.

Everything is driven by a caller-supplied random.Random so each test
controls its own seed and stays reproducible.
"""

from __future__ import annotations

import random

from cuetree.corpus import (
    INFO_RELATIONS,
    INTEN_RELATIONS,
    SYN_RELATIONS,
    UNIT_TYPES,
    RelationFeatures,
    RelationRecord,
    TribPos,
)


def random_trib_pos(rng: random.Random) -> TribPos:
    while True:
        before = rng.randint(0, 3)
        after = rng.randint(0, 3)
        if before + after >= 1:
            break
    side = rng.choice([s for s, n in (("before", before), ("after", after)) if n > 0])
    count = before if side == "before" else after
    return TribPos(before=before, after=after, index=rng.randint(1, count), side=side)


def random_features(rng: random.Random, core: bool = True) -> RelationFeatures:
    """A random feature vector; core=True avoids temporal info relations."""
    info_choices = [r for r in INFO_RELATIONS if not (core and r == "temporal")]
    return RelationFeatures(
        trib_pos=random_trib_pos(rng),
        inten_structure=rng.choice(["s1", "s2", "s3", "s4"]),
        infor_structure=rng.choice(["t1", "t2", "t3", "t4"]),
        inten_rel=rng.choice(INTEN_RELATIONS),
        info_rel=rng.choice(info_choices),
        syn_rel=rng.choice(SYN_RELATIONS),
        adjacency=rng.random() < 0.5,
        core_type=rng.choice(UNIT_TYPES),
        trib_type=rng.choice(UNIT_TYPES),
        above=rng.randint(0, 3),
        below=rng.randint(0, 3),
    )


def random_core_record(
    rng: random.Random, record_id: str, subset: str = "core2"
) -> RelationRecord:
    cued = rng.random() < 0.5
    if not cued:
        position = "none"
    elif subset == "core2":
        position = rng.choice(["on_core", "on_trib"])
    else:
        position = "on_trib"
    return RelationRecord(
        id=record_id,
        subset=subset,
        cued=cued,
        cue_position=position,
        features=random_features(rng),
    )
