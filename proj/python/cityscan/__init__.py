"""Proximity compliance analysis for city safety infrastructure."""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional

from . import _core
from ._core import (
    EARTH_RADIUS_M,
    HYDRANT_THRESHOLD_M,
    SHELTER_THRESHOLD_M,
    ArgumentError,
    InputError,
    haversine_distance,
    point_in_polygon,
)

__all__ = [
    "EARTH_RADIUS_M",
    "HYDRANT_THRESHOLD_M",
    "SHELTER_THRESHOLD_M",
    "ArgumentError",
    "InputError",
    "Dataset",
    "generate_fixture",
    "haversine_distance",
    "point_in_polygon",
]


def _query(kind: str, threshold: Optional[float], neighborhoods: Iterable[str],
           facility_types: Iterable[str], excluded_types: Iterable[str]) -> Any:
    return _core._query(kind, threshold, list(neighborhoods), list(facility_types), list(excluded_types))


class Dataset:
    """An immutable city snapshot: facilities, hydrants, shelters, neighborhoods."""

    def __init__(self, core: Any) -> None:
        self._core = core

    @classmethod
    def from_files(cls, facilities: str, hydrants: str, shelters: str, boundaries: str) -> "Dataset":
        return cls(_core._Dataset.from_files(str(facilities), str(hydrants), str(shelters), str(boundaries)))

    @classmethod
    def from_text(cls, facilities: str, hydrants: str, shelters: str, boundaries: str,
                  source: str = "memory") -> "Dataset":
        return cls(_core._Dataset.from_text(facilities, hydrants, shelters, boundaries, source))

    def meta(self) -> dict:
        return json.loads(self._core.meta())

    def neighborhoods(self) -> dict:
        return json.loads(self._core.neighborhoods())

    def violations(self, kind: str = "hydrant", threshold: Optional[float] = None, *,
                   neighborhoods: Iterable[str] = (), facility_types: Iterable[str] = (),
                   excluded_types: Iterable[str] = ()) -> dict:
        q = _query(kind, threshold, neighborhoods, facility_types, excluded_types)
        return json.loads(self._core.violations(q))

    def violations_csv(self, kind: str = "hydrant", threshold: Optional[float] = None, **filters: Any) -> str:
        return self._core.violations_csv(_query(kind, threshold, filters.get("neighborhoods", ()),
                                                filters.get("facility_types", ()),
                                                filters.get("excluded_types", ())))

    def heatmap(self, kind: str = "hydrant", threshold: Optional[float] = None, **filters: Any) -> dict:
        return json.loads(self._core.heatmap(_query(kind, threshold, filters.get("neighborhoods", ()),
                                                    filters.get("facility_types", ()),
                                                    filters.get("excluded_types", ()))))

    def bars(self, kind: str = "hydrant", threshold: Optional[float] = None, **filters: Any) -> str:
        return self._core.bars(_query(kind, threshold, filters.get("neighborhoods", ()),
                                      filters.get("facility_types", ()), filters.get("excluded_types", ())))

    def suggestions(self, k: int, kind: str = "hydrant", threshold: Optional[float] = None, **filters: Any) -> dict:
        q = _query(kind, threshold, filters.get("neighborhoods", ()), filters.get("facility_types", ()),
                   filters.get("excluded_types", ()))
        return json.loads(self._core.suggestions(q, k))

    def centrality(self, top: int = 20, kind: str = "hydrant", threshold: Optional[float] = None,
                   **filters: Any) -> dict:
        q = _query(kind, threshold, filters.get("neighborhoods", ()), filters.get("facility_types", ()),
                   filters.get("excluded_types", ()))
        return json.loads(self._core.centrality(q, top))

    def object_graph(self, kind: str, threshold: float) -> dict:
        return json.loads(self._core.object_graph(kind, threshold))


def generate_fixture(out_dir: str, *, seed: int = 1, facilities: int = 1000, hydrants: int = 2596,
                     shelters: int = 265, neighborhoods: int = 15) -> dict:
    """Writes a synthetic city to out_dir and returns its ground truth."""
    return json.loads(_core.generate_fixture(seed, facilities, hydrants, shelters, neighborhoods, str(out_dir)))
