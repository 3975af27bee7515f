"""Multimodal concept learning: spike conversion, sliding coordination, prototype classification."""

from .fusion import (
    SOURCES,
    FixtureConfig,
    FusedConcept,
    ModalityRepr,
    classify_concept,
    coincidence_profile,
    evaluate_fixture,
    fixture_json,
    fuse_many,
    make_fixture,
    sliding_coordinate,
    to_spike_train,
)

__all__ = [
    "SOURCES",
    "FixtureConfig",
    "FusedConcept",
    "ModalityRepr",
    "classify_concept",
    "coincidence_profile",
    "evaluate_fixture",
    "fixture_json",
    "fuse_many",
    "make_fixture",
    "sliding_coordinate",
    "to_spike_train",
]
