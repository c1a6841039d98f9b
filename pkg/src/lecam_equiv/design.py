"""Design point sets on the unit cube.

Three regimes are supported: the equidistant grid ``{k/m : k in {1..m}^d}``
(right endpoint included, zero excluded), one-dimensional perturbations of
``i/n``, and i.i.d. uniform random points.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lecam_equiv.errors import DesignSizeError, InvalidDesignError
from lecam_equiv.rng import STREAM_DESIGN, child_rng

# refuse grids whose point array would not fit comfortably in memory
MAX_POINTS = 2**28

EQUIDISTANT = "equidistant"
PERTURBED = "perturbed"
UNIFORM_RANDOM = "uniform_random"
LOADED = "loaded"


@dataclass(frozen=True)
class Design:
    """An ordered list of ``n`` points in ``[0,1]^d`` with its provenance.

    ``points`` is stored as a read-only ``(n, d)`` float array. ``m`` is set
    for equidistant grids and ``seed`` for random designs.
    """

    points: np.ndarray
    kind: str
    m: int | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidDesignError(f"points must be an (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)) or pts.min() < 0.0 or pts.max() > 1.0:
            raise InvalidDesignError("all design coordinates must lie in [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Design):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.m == other.m
            and self.seed == other.seed
            and np.array_equal(self.points, other.points)
        )

    def __hash__(self):
        return hash((self.kind, self.m, self.seed, self.points.tobytes()))

    def perturbation_sum(self, alpha: float) -> float:
        """``sum_i |x_i - i/n|^{2 alpha}`` for a one-dimensional design."""
        if self.d != 1:
            raise InvalidDesignError("perturbation_sum needs a one-dimensional design")
        i = np.arange(1, self.n + 1)
        return float(np.sum(np.abs(self.points[:, 0] - i / self.n) ** (2 * alpha)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"x{r + 1}" for r in range(self.d)])
            for row in self.points:
                writer.writerow([format(float(v), ".17g") for v in row])

    @classmethod
    def from_csv(cls, path, kind: str = LOADED) -> "Design":
        with open(Path(path), newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(v) for v in row] for row in reader if row]
        if any(len(r) != len(header) for r in rows):
            raise InvalidDesignError("ragged design CSV")
        return cls(np.array(rows, dtype=float).reshape(len(rows), len(header)), kind=kind)


def equidistant_grid(m: int, d: int = 1) -> Design:
    """Grid ``{k/m : k in {1..m}^d}`` in lexicographic order of ``k``."""
    if m < 1 or d < 1:
        raise InvalidDesignError(f"need m >= 1 and d >= 1, got m={m}, d={d}")
    if m**d > MAX_POINTS:
        raise DesignSizeError(f"m^d = {m}^{d} exceeds the supported size {MAX_POINTS}")
    axis = np.arange(1, m + 1) / m
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    return Design(pts, kind=EQUIDISTANT, m=m)


def perturbed_design(n: int, deviations) -> Design:
    """One-dimensional design ``x_i = i/n + deviations[i]``.

    The result must be strictly increasing and stay inside ``[0, 1]``.
    """
    dev = np.asarray(deviations, dtype=float)
    if n < 1 or dev.shape != (n,):
        raise InvalidDesignError(f"need {n} deviations, got shape {dev.shape}")
    x = np.arange(1, n + 1) / n + dev
    if np.any(np.diff(x) <= 0):
        i = int(np.argmax(np.diff(x) <= 0))
        raise InvalidDesignError(f"design not strictly increasing at i={i + 1}: {x[i]!r} >= {x[i + 1]!r}")
    if x.min() < 0.0 or x.max() > 1.0:
        raise InvalidDesignError("perturbed design leaves [0, 1]")
    return Design(x[:, None], kind=PERTURBED)


def uniform_random_design(n: int, d: int, seed: int) -> Design:
    """``n`` i.i.d. points from ``U([0,1]^d)``; a pure function of ``(n, d, seed)``."""
    if n < 1 or d < 1:
        raise InvalidDesignError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if n * d > MAX_POINTS:
        raise DesignSizeError(f"n*d = {n * d} exceeds the supported size")
    pts = child_rng(seed, STREAM_DESIGN, n, d).random((n, d))
    return Design(pts, kind=UNIFORM_RANDOM, seed=int(seed))


def grid_size(n: int, d: int) -> int:
    """Points per axis ``m`` with ``m**d == n``; raises if ``n`` is no perfect power."""
    m = int(round(n ** (1.0 / d)))
    for cand in (m - 1, m, m + 1):
        if cand >= 1 and cand**d == n:
            return cand
    raise InvalidDesignError(f"n={n} is not a perfect {d}-th power")


__all__ = [
    "Design",
    "equidistant_grid",
    "perturbed_design",
    "uniform_random_design",
    "grid_size",
    "EQUIDISTANT",
    "PERTURBED",
    "UNIFORM_RANDOM",
]
