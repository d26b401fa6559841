"""
Self-maps of the carrier

Value object for f: X -> X plus the shipped test corpus (linear, affine,
constant, identity, doubling, piecewise Kannan-style) and tabulated maps
with nearest-neighbour lookup.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .ametric_core import Point, as_point
from .exceptions import InputShapeError, InvalidParameterError, MapDomainError

logger = logging.getLogger(__name__)

MapFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SelfMap:
    """
    Self-mapping f on R^dim

    ``func`` must accept arrays of shape (..., dim) and return the same
    shape. ``known_fixed_point`` is oracle metadata for tests and bounds.
    """

    name: str
    dim: int
    func: MapFunction
    known_fixed_point: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.known_fixed_point is not None and len(self.known_fixed_point) != self.dim:
            raise InputShapeError(
                f"fixed point of dimension {self.dim}", f"{self.known_fixed_point}"
            )

    @property
    def fixed_point(self) -> Optional[Point]:
        if self.known_fixed_point is None:
            return None
        return np.asarray(self.known_fixed_point, dtype=float)

    def apply(self, x) -> Point:
        point = as_point(x, self.dim)
        return np.asarray(self.func(point), dtype=float).reshape(self.dim)

    def apply_batch(self, xs: np.ndarray) -> np.ndarray:
        if xs.ndim != 2 or xs.shape[1] != self.dim:
            raise InputShapeError(f"batch of shape (n, {self.dim})", f"shape {xs.shape}")
        return np.asarray(self.func(xs), dtype=float).reshape(xs.shape)


def _vector(value, dim: int, name: str) -> np.ndarray:
    array = np.broadcast_to(np.asarray(value, dtype=float), (dim,)).copy()
    if not np.all(np.isfinite(array)):
        raise InvalidParameterError(name, value, "must be finite")
    return array


def linear_map(lam: float, dim: int = 1) -> SelfMap:
    """f(x) = lam * x"""
    return SelfMap(f"linear({lam})", dim, lambda x: lam * x, known_fixed_point=(0.0,) * dim)


def affine_map(lam: float, c, dim: int = 1) -> SelfMap:
    """f(x) = lam * x + c; fixed point c / (1 - lam) when lam != 1"""
    shift = _vector(c, dim, "c")
    fixed = None if lam == 1.0 else tuple(float(v) for v in shift / (1.0 - lam))
    return SelfMap(f"affine({lam})", dim, lambda x: lam * x + shift, known_fixed_point=fixed)


def constant_map(c, dim: int = 1) -> SelfMap:
    value = _vector(c, dim, "c")
    return SelfMap(
        "constant",
        dim,
        lambda x: np.broadcast_to(value, np.shape(x)).copy(),
        known_fixed_point=tuple(float(v) for v in value),
    )


def identity_map(dim: int = 1) -> SelfMap:
    # Every point is fixed, so no single oracle point
    return SelfMap("identity", dim, lambda x: np.array(x, dtype=float, copy=True))


def doubling_map(dim: int = 1) -> SelfMap:
    return SelfMap("doubling", dim, lambda x: 2.0 * x, known_fixed_point=(0.0,) * dim)


def kannan_map(dim: int = 1) -> SelfMap:
    """Coordinatewise x/4 below 1/2 and x/5 from 1/2 on; discontinuous at 1/2"""
    return SelfMap(
        "kannan",
        dim,
        lambda x: np.where(np.asarray(x) < 0.5, np.asarray(x) / 4.0, np.asarray(x) / 5.0),
        known_fixed_point=(0.0,) * dim,
    )


def table_map(
    inputs: Sequence, outputs: Sequence, dim: int = 1, name: str = "custom-table"
) -> SelfMap:
    """
    Tabulated map with nearest-neighbour lookup

    Points outside the axis-aligned hull of the table inputs are rejected
    with MapDomainError.
    """
    xs = np.asarray(inputs, dtype=float).reshape(-1, dim)
    ys = np.asarray(outputs, dtype=float).reshape(-1, dim)
    if len(xs) == 0 or xs.shape != ys.shape:
        raise InvalidParameterError("table", f"{xs.shape} -> {ys.shape}", "need matching rows")
    low, high = xs.min(axis=0), xs.max(axis=0)

    def lookup(x: np.ndarray) -> np.ndarray:
        points = np.asarray(x, dtype=float).reshape(-1, dim)
        outside = np.any((points < low) | (points > high), axis=1)
        if np.any(outside):
            raise MapDomainError(name, points[np.argmax(outside)].tolist())
        # Nearest row by L1 distance; ties go to the first row
        nearest = np.abs(points[:, None, :] - xs[None, :, :]).sum(axis=2).argmin(axis=1)
        return ys[nearest].reshape(np.shape(x))

    fixed_rows = np.flatnonzero(np.all(xs == ys, axis=1))
    fixed = tuple(float(v) for v in xs[fixed_rows[0]]) if len(fixed_rows) == 1 else None
    return SelfMap(name, dim, lookup, known_fixed_point=fixed)


def _require(params: Dict[str, Any], key: str, kind: str) -> Any:
    if key not in params:
        raise InvalidParameterError(key, None, f"required by map kind '{kind}'")
    return params[key]


MAP_BUILDERS: Dict[str, Callable[[Dict[str, Any], int], SelfMap]] = {
    "linear": lambda p, d: linear_map(float(_require(p, "lam", "linear")), d),
    "affine": lambda p, d: affine_map(
        float(_require(p, "lam", "affine")), _require(p, "c", "affine"), d
    ),
    "constant": lambda p, d: constant_map(_require(p, "c", "constant"), d),
    "identity": lambda p, d: identity_map(d),
    "doubling": lambda p, d: doubling_map(d),
    "kannan": lambda p, d: kannan_map(d),
    "custom-table": lambda p, d: table_map(
        [row[0] for row in _require(p, "table", "custom-table")],
        [row[1] for row in _require(p, "table", "custom-table")],
        d,
    ),
}


def build_map(kind: str, params: Dict[str, Any], dim: int) -> SelfMap:
    """Build a corpus map from its config kind and parameters"""
    if kind not in MAP_BUILDERS:
        raise InvalidParameterError("map.kind", kind, f"expected one of {sorted(MAP_BUILDERS)}")
    self_map = MAP_BUILDERS[kind](params, dim)
    logger.debug(f"Built map '{self_map.name}' on R^{dim}")
    return self_map


def shipped_az_maps(dim: int = 1) -> Tuple[SelfMap, ...]:
    """Corpus maps expected to be AZ mappings on lifted norm spaces"""
    return (
        linear_map(0.5, dim),
        affine_map(0.5, 1.0, dim),
        constant_map(3.0, dim),
        kannan_map(dim),
    )
