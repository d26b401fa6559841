"""
Seeded point and weight samplers

Every draw is a pure function of (seed, stream, index): asking for more
samples only appends rows, so a witness reported at index i can always be
regenerated.
"""

from dataclasses import dataclass, field
from itertools import islice, product
from typing import Iterator, Protocol, Tuple

import numpy as np

from .constants import SAMPLING
from .exceptions import InvalidParameterError
from .settings import CHUNK_SIZE


class Sampler(Protocol):
    """Interface shared by all samplers"""

    dim: int

    def tuples(self, n: int, k: int, stream: int = SAMPLING.STREAM_TUPLES) -> np.ndarray:
        """Return an array of shape (n, k, dim)"""

    def points(self, n: int, stream: int) -> np.ndarray:
        """Return n independent points as an array of shape (n, dim)"""

    def weights(self, n: int, k: int, stream: int = SAMPLING.STREAM_WEIGHTS) -> np.ndarray:
        """Return an array of shape (n, k) whose rows lie on the probability simplex"""


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def _simplex_rows(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    # Uniform on the simplex
    return rng.dirichlet(np.ones(k), size=n)


@dataclass(frozen=True)
class PointSampler:
    """
    Uniform sampler over the box [low, high]^dim

    Anchors are injected into slot 0 of the first rows of every draw, so
    points such as the origin are always part of the sample.
    """

    dim: int
    low: float = SAMPLING.LOW
    high: float = SAMPLING.HIGH
    seed: int = SAMPLING.SEED
    anchors: Tuple[Tuple[float, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameterError("dim", self.dim, "must be >= 1")
        if not self.low < self.high:
            raise InvalidParameterError("low/high", (self.low, self.high), "empty box")
        for anchor in self.anchors:
            if len(anchor) != self.dim:
                raise InvalidParameterError("anchors", anchor, f"expected {self.dim} coordinates")

    def tuples(self, n: int, k: int, stream: int = SAMPLING.STREAM_TUPLES) -> np.ndarray:
        rng = _rng(self.seed, stream)
        draws = rng.uniform(self.low, self.high, size=(n, k, self.dim))
        for row, anchor in enumerate(self.anchors[:n]):
            draws[row, 0] = anchor
        return draws

    def points(self, n: int, stream: int) -> np.ndarray:
        return self.tuples(n, 1, stream)[:, 0, :]

    def weights(self, n: int, k: int, stream: int = SAMPLING.STREAM_WEIGHTS) -> np.ndarray:
        return _simplex_rows(_rng(self.seed, stream), n, k)


@dataclass(frozen=True)
class GridSampler:
    """
    Deterministic sampler enumerating k-tuples of a tensor grid

    Tuples are produced in lexicographic order of grid indices; draws are
    truncated to the grid size, so callers must use ``len(result)`` as the
    number of samples actually checked. Single points come from seeded
    picks of grid nodes instead.
    """

    dim: int
    values: Tuple[float, ...]
    seed: int = SAMPLING.SEED

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameterError("dim", self.dim, "must be >= 1")
        if len(self.values) == 0:
            raise InvalidParameterError("values", self.values, "grid is empty")

    @property
    def grid(self) -> np.ndarray:
        return np.array(list(product(self.values, repeat=self.dim)), dtype=float)

    def tuples(self, n: int, k: int, stream: int = SAMPLING.STREAM_TUPLES) -> np.ndarray:
        points = self.grid
        indices = list(islice(product(range(len(points)), repeat=k), n))
        return points[np.array(indices, dtype=int)].reshape(len(indices), k, self.dim)

    def points(self, n: int, stream: int) -> np.ndarray:
        # Seeded picks from the grid, one row per requested point
        grid = self.grid
        return grid[_rng(self.seed, stream).integers(len(grid), size=n)]

    def weights(self, n: int, k: int, stream: int = SAMPLING.STREAM_WEIGHTS) -> np.ndarray:
        return _simplex_rows(_rng(self.seed, stream), n, k)


def iter_chunks(n: int, chunk_size: int = CHUNK_SIZE) -> Iterator[slice]:
    """Yield consecutive index slices covering range(n)"""
    for start in range(0, n, chunk_size):
        yield slice(start, min(start + chunk_size, n))
