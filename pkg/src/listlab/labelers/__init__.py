"""Rank-addressed labeling structures."""

from __future__ import annotations

from ..core import ConfigInvalid
from .base import Labeler, log2_squared_bound
from .bounded import BoundedPMA
from .naive import NaiveCompactor
from .pma import AdaptivePMA, ClassicPMA, DensityTable, PmaBase

FLAT_LABELERS = {
    "naive": NaiveCompactor,
    "classic": ClassicPMA,
    "bounded": BoundedPMA,
    "adaptive": AdaptivePMA,
}


def make_flat(name: str, capacity: int, slot_count: int | None = None, seed: int = 0) -> Labeler:
    try:
        cls = FLAT_LABELERS[name]
    except KeyError:
        raise ConfigInvalid(f"unknown labeler {name!r}") from None
    return cls(capacity, slot_count, seed)


__all__ = [
    "AdaptivePMA",
    "BoundedPMA",
    "ClassicPMA",
    "DensityTable",
    "FLAT_LABELERS",
    "Labeler",
    "NaiveCompactor",
    "PmaBase",
    "log2_squared_bound",
    "make_flat",
]
