"""Abstract type inventory and lexicons shared by every rule operation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

ABSTRACT_OBJECTS = (
    "Person", "Animal", "Plant", "Food", "Alcohol", "Disease", "Drug",
    "Natural Phenomenon", "Condition", "Material", "Substance", "Furniture",
    "Publication", "Organization", "Authorization", "Facility", "Natural Place",
    "Event", "Show", "Artwork", "Job", "Game", "Vehicle", "Tool", "Technology",
    "Electronic Device", "Platform", "Financial Product", "Skill", "Legislation",
    "Region", "Time Period",
)

COMMON_PROPERTIES = (
    "Age", "Price", "Money", "Height", "Length", "Weight", "Strength", "Size",
    "Density", "Volume", "Temperature", "Hardness", "Speed", "BoilingPoint",
    "MeltingPoint", "Frequency", "Decibel", "Space",
)

COMPARISON_PREDICATES = ("BiggerThan", "SmallerThan", "EqualTo")
NEGATION_SEGMENTS = ("Not", "No", "Never", "Un")
MODAL_PREFIXES = ("Can", "Need", "Must", "Should")

# Verb phrases placed between the two arguments. A phrase containing "{0}"
# and "{1}" is used as a full format string instead.
VERBALIZATION_LEXICON: dict[str, str] = {
    "CanNotEat": "cannot eat",
    "CanEat": "can eat",
    "AllergicTo": "is allergic to",
    "Contains": "contains",
    "CanNotAccess": "cannot access",
    "CanAccess": "can access",
    "CanUse": "can use",
    "UsedForCook": "is used for cooking",
    "Master": "has mastered",
    "RequiredForCooking": "is required for cooking",
    "CanCook": "can cook",
    "Obtain": "has obtained",
    "RequiredForDriving": "is required for driving",
    "LocatedIn": "is located in",
    "BroadcastIn": "is broadcast in",
    "MadeOf": "is made of",
    "MadeFrom": "is made from",
    "DensityOf": "has a density of",
    "CanSubmergeIn": "can submerge in",
    "ProcessedIn": "is processed in",
    "OriginatedFrom": "originated from",
    "Has": "has",
    "CanTreat": "can treat",
    "NeedToConsume": "needs to consume",
    "BornIn": "was born in",
    "BloomsIn": "blooms in",
    "CanDrive": "can drive",
    "Have": "has",
    "RequireMinimumAge": "requires a minimum age of",
    "Learned": "learned",
    "Inherit": "inherits",
    "Acquire": "acquires",
    "BiggerThan": "is bigger than",
    "SmallerThan": "is smaller than",
    "EqualTo": "is equal to",
}


@dataclass(frozen=True)
class Vocabulary:
    abstract_objects: frozenset[str] = frozenset(ABSTRACT_OBJECTS)
    common_properties: frozenset[str] = frozenset(COMMON_PROPERTIES)
    comparison_predicates: frozenset[str] = frozenset(COMPARISON_PREDICATES)
    negation_segments: tuple[str, ...] = NEGATION_SEGMENTS
    modal_prefixes: tuple[str, ...] = MODAL_PREFIXES
    verbalization_lexicon: Mapping[str, str] = field(
        default_factory=lambda: dict(VERBALIZATION_LEXICON)
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "abstract_objects", frozenset(self.abstract_objects))
        object.__setattr__(self, "common_properties", frozenset(self.common_properties))
        object.__setattr__(self, "comparison_predicates", frozenset(self.comparison_predicates))
        object.__setattr__(self, "negation_segments", tuple(self.negation_segments))
        object.__setattr__(self, "modal_prefixes", tuple(self.modal_prefixes))
        if not self.abstract_objects or not self.common_properties:
            raise ValueError("abstract_objects and common_properties must be non-empty")
        if not self.negation_segments:
            raise ValueError("negation_segments must be non-empty")
        overlap = self.abstract_objects & self.common_properties
        if overlap:
            raise ValueError(f"objects and properties overlap: {sorted(overlap)}")

    def __hash__(self) -> int:
        return hash((self.abstract_objects, self.common_properties, self.comparison_predicates,
                     self.negation_segments, self.modal_prefixes))

    @property
    def primitive_types(self) -> frozenset[str]:
        return self.abstract_objects | self.common_properties


DEFAULT_VOCAB = Vocabulary()
