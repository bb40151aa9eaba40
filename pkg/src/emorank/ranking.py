"""Per-reader item ranking by profile affinity."""

from __future__ import annotations

from dataclasses import dataclass

from .core import EmotionVector, profile_affinity
from .errors import EmptyItemSet, UnknownItem, ValidationError


@dataclass(frozen=True)
class RankedItem:
    item_id: str
    score: float
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValidationError("rank must be >= 1")


def rank_items(
    reader: EmotionVector,
    items: list[tuple[str, EmotionVector]],
) -> list[RankedItem]:
    """Items sorted by descending affinity with the reader; rank 1 is best.

    Ties sort by item id, so identical inputs always produce identical
    orderings.
    """
    if not items:
        raise EmptyItemSet("cannot rank an empty item set")
    scored = [
        (item_id, profile_affinity(reader, profile)) for item_id, profile in items
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return [
        RankedItem(item_id=item_id, score=score, rank=position)
        for position, (item_id, score) in enumerate(scored, start=1)
    ]


def expected_rank(recommended_item_id: str, ranking: list[RankedItem]) -> int:
    """Rank the recommended item actually achieved in a ranking."""
    for entry in ranking:
        if entry.item_id == recommended_item_id:
            return entry.rank
    raise UnknownItem(f"item {recommended_item_id!r} not present in ranking")
