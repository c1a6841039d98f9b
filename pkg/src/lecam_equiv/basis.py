"""Function systems spanning the approximation spaces.

Four families are provided, each with pointwise evaluation (1-based index
``j`` as in the text, 0-based columns in matrices), its exact L2 Gram matrix
and, where available, exact Fourier coefficients:

* :class:`FourierBasis` -- ``exp(2 pi i <x, l>)`` on an odd grid block or on the
  first ``count`` frequencies of the magnitude enumeration,
* :class:`PiecewiseConstantBasis` -- ``sqrt(n) 1_{((i-1)/n, i/n]}``,
* :class:`SplineBasis` -- periodised tensor hat functions on the ``k/m`` grid,
* :class:`ScalingBasis` -- periodised tensor scaling functions of a compactly
  supported orthonormal multiresolution analysis.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from lecam_equiv.errors import DegenerateFilterError, PreconditionError

# ---------------------------------------------------------------------------
# Fourier system


def _tie_key(l) -> tuple:
    # |l|_2 first, then coordinatewise (|l_r|, l_r): negative before positive
    return (sum(v * v for v in l),) + tuple(x for v in l for x in (abs(v), v))


def sort_frequencies(freqs) -> list[tuple[int, ...]]:
    return sorted((tuple(int(v) for v in l) for l in freqs), key=_tie_key)


def enumerate_frequencies(d: int, count: int) -> list[tuple[int, ...]]:
    """First ``count`` frequencies of ``Z^d`` in non-decreasing ``|l|_2``.

    Ties are broken lexicographically on ``(|l_1|, l_1, |l_2|, l_2, ...)``;
    the first entry is always ``0``.
    """
    if count < 1 or d < 1:
        raise ValueError("need count >= 1 and d >= 1")
    r = 0
    while True:
        cube = itertools.product(range(-r, r + 1), repeat=d)
        inside = [l for l in cube if sum(v * v for v in l) <= r * r]
        # the cube of radius r holds every frequency with |l|_2 <= r
        if len(inside) >= count:
            return sort_frequencies(inside)[:count]
        r += 1


class FourierBasis:
    kind = "fourier"
    orthonormal = True
    real = False

    def __init__(self, d: int, freqs, m: int | None = None):
        self.d = int(d)
        self.freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, self.d)
        self.freqs.setflags(write=False)
        self.m = m
        self._index = {tuple(int(v) for v in l): j for j, l in enumerate(self.freqs)}

    @classmethod
    def grid(cls, m: int, d: int = 1) -> "FourierBasis":
        """Frequencies ``|l|_inf <= (m-1)/2`` matching the odd ``m``-grid."""
        if m < 1 or m % 2 == 0:
            raise PreconditionError(f"the symmetric frequency block needs odd m, got m={m}")
        h = (m - 1) // 2
        block = itertools.product(range(-h, h + 1), repeat=d)
        return cls(d, sort_frequencies(block), m=m)

    @classmethod
    def leading(cls, d: int, count: int) -> "FourierBasis":
        return cls(d, enumerate_frequencies(d, count))

    @property
    def size(self) -> int:
        return self.freqs.shape[0]

    def index_of(self, l) -> int:
        """0-based column of frequency ``l``."""
        return self._index[tuple(int(v) for v in np.atleast_1d(l))]

    def evaluate(self, j: int, x) -> complex:
        if not 1 <= j <= self.size:
            raise IndexError(f"basis index {j} out of range 1..{self.size}")
        x = np.asarray(x, dtype=float).reshape(self.d)
        return complex(np.exp(2j * np.pi * float(x @ self.freqs[j - 1])))

    def matrix(self, points, columns: slice | None = None) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.d)
        freqs = self.freqs if columns is None else self.freqs[columns]
        return np.exp(2j * np.pi * (pts @ freqs.T.astype(float)))

    def l2_gram(self) -> np.ndarray:
        return np.eye(self.size)

    def fourier_coefficients(self, ls) -> np.ndarray:
        """Matrix ``F[q, j] = <phi_{l_q}, b_j>_{L2}`` for test frequencies ``ls``."""
        ls = np.asarray(ls, dtype=np.int64).reshape(-1, self.d)
        out = np.zeros((ls.shape[0], self.size), dtype=complex)
        for q, l in enumerate(ls):
            j = self._index.get(tuple(int(v) for v in l))
            if j is not None:
                out[q, j] = 1.0
        return out


# ---------------------------------------------------------------------------
# piecewise constants


def _cell_index(x: np.ndarray, n: int) -> np.ndarray:
    """Cell ``i`` with ``x in ((i-1)/n, i/n]``; 0 for ``x = 0``."""
    t = x * n
    near = np.round(t)
    # grid points i/n computed in floating point must land in cell i
    return np.where(np.abs(t - near) <= 1e-9 * max(n, 1), near, np.ceil(t)).astype(np.int64)


class PiecewiseConstantBasis:
    kind = "piecewise_constant"
    orthonormal = True
    real = True
    d = 1

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = int(n)

    @property
    def size(self) -> int:
        return self.n

    def evaluate(self, j: int, x) -> float:
        if not 1 <= j <= self.n:
            raise IndexError(f"basis index {j} out of range 1..{self.n}")
        return float(math.sqrt(self.n) * (_cell_index(np.array([float(np.ravel(x)[0])]), self.n)[0] == j))

    def matrix(self, points, columns: slice | None = None) -> np.ndarray:
        x = np.asarray(points, dtype=float).reshape(-1)
        cells = _cell_index(x, self.n)
        E = np.zeros((x.size, self.n))
        ok = (cells >= 1) & (cells <= self.n)
        E[np.nonzero(ok)[0], cells[ok] - 1] = math.sqrt(self.n)
        return E if columns is None else E[:, columns]

    def l2_gram(self) -> np.ndarray:
        return np.eye(self.n)

    def fourier_coefficients(self, ls) -> np.ndarray:
        ls = np.asarray(ls, dtype=float).reshape(-1)
        right = np.arange(1, self.n + 1) / self.n
        left = right - 1.0 / self.n
        out = np.empty((ls.size, self.n), dtype=complex)
        for q, l in enumerate(ls):
            if l == 0:
                out[q] = 1.0 / self.n
            else:
                out[q] = (np.exp(2j * np.pi * l * right) - np.exp(2j * np.pi * l * left)) / (2j * np.pi * l)
        return math.sqrt(self.n) * out


# ---------------------------------------------------------------------------
# periodic linear splines


def hat(t):
    """``1_[-1/2,1/2] * 1_[-1/2,1/2]``: the hat function with peak 1 at 0."""
    return np.maximum(0.0, 1.0 - np.abs(t))


def _wrap(t, period: float):
    return t - period * np.floor(t / period + 0.5)


class SplineBasis:
    """Periodised tensor hats ``b_k(x) = prod_r hat(m x_r - k_r)`` (period 1 in x).

    Indices ``k in {1..m}^d`` are ordered lexicographically, matching
    :func:`lecam_equiv.design.equidistant_grid`, so ``b_k(l/m) = delta_{kl}``.
    """

    kind = "spline"
    orthonormal = False
    real = True

    def __init__(self, m: int, d: int = 1):
        if m < 3:
            raise PreconditionError(f"periodic spline system needs m >= 3, got m={m}")
        self.m = int(m)
        self.d = int(d)
        axis = np.arange(1, m + 1)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        self.knots = np.stack([g.ravel() for g in mesh], axis=1)

    @property
    def size(self) -> int:
        return self.m**self.d

    def evaluate(self, j: int, x) -> float:
        if not 1 <= j <= self.size:
            raise IndexError(f"basis index {j} out of range 1..{self.size}")
        x = np.asarray(x, dtype=float).reshape(self.d)
        t = _wrap(self.m * x - self.knots[j - 1], self.m)
        return float(np.prod(hat(t)))

    def matrix(self, points, columns: slice | None = None) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.d)
        knots = self.knots if columns is None else self.knots[columns]
        E = np.ones((pts.shape[0], knots.shape[0]))
        for r in range(self.d):
            E *= hat(_wrap(self.m * pts[:, r : r + 1] - knots[None, :, r], self.m))
        return E

    def l2_gram(self) -> np.ndarray:
        return spline_l2_gram(self.m, self.d)

    def fourier_coefficients(self, ls) -> np.ndarray:
        ls = np.asarray(ls, dtype=float).reshape(-1, self.d)
        out = np.ones((ls.shape[0], self.size), dtype=complex)
        for r in range(self.d):
            lr = ls[:, r : r + 1]
            out *= np.exp(2j * np.pi * lr * self.knots[None, :, r] / self.m) * np.sinc(lr / self.m) ** 2 / self.m
        return out


def spline_l2_gram(m: int, d: int = 1) -> np.ndarray:
    """``<b_k, b_l>_{L2} = 4^{#{r: k_r = l_r}} / (6^d n)`` for periodic
    ``|k - l|_inf <= 1``, zero otherwise (dense ``n x n``, ``n = m^d``)."""
    if m < 3:
        raise PreconditionError(f"spline Gram needs m >= 3, got m={m}")
    n = m**d
    axis = np.arange(m)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    k = np.stack([g.ravel() for g in mesh], axis=1)
    diff = np.abs(k[:, None, :] - k[None, :, :])
    dist = np.minimum(diff, m - diff)
    same = np.sum(dist == 0, axis=2)
    near = np.all(dist <= 1, axis=2)
    return np.where(near, 4.0**same / (6.0**d * n), 0.0)


# ---------------------------------------------------------------------------
# scaling functions of a multiresolution analysis

_S3 = math.sqrt(3.0)
_S10 = math.sqrt(10.0)
_B10 = math.sqrt(5.0 + 2.0 * _S10)

FILTERS: dict[str, tuple[float, ...]] = {
    "haar": (0.70710678118654752, 0.70710678118654752),
    # Daubechies, two vanishing moments
    "db2": (
        0.48296291314453414,
        0.83651630373780772,
        0.22414386804201339,
        -0.12940952255126038,
    ),
    # Daubechies, three vanishing moments
    "db3": (
        0.33267055295008263,
        0.80689150931109258,
        0.45987750211849154,
        -0.13501102001025458,
        -0.085441273882026658,
        0.035226291885709538,
    ),
}


def get_filter(spec) -> np.ndarray:
    """Refinement filter from a built-in name, a JSON array string or a sequence."""
    if isinstance(spec, str):
        if spec in FILTERS:
            h = np.array(FILTERS[spec])
        else:
            h = np.array(json.loads(spec), dtype=float)
    else:
        h = np.asarray(spec, dtype=float)
    if h.ndim != 1 or h.size < 1:
        raise DegenerateFilterError("filter must be a non-empty 1-d array")
    if not np.isclose(h.sum(), math.sqrt(2.0), rtol=0, atol=1e-12):
        raise DegenerateFilterError(f"filter must sum to sqrt(2), sums to {h.sum()!r}")
    return h


@lru_cache(maxsize=64)
def _integer_values(h: tuple) -> np.ndarray:
    c = math.sqrt(2.0) * np.array(h)
    N = c.size
    # support [0, N-1), right-open, so integers 0..N-2
    size = max(N - 1, 1)
    M = np.zeros((size, size))
    for a in range(size):
        for b in range(size):
            if 0 <= 2 * a - b < N:
                M[a, b] = c[2 * a - b]
    w, V = np.linalg.eig(M)
    ones = np.nonzero(np.abs(w - 1.0) < 1e-8)[0]
    if ones.size != 1:
        raise DegenerateFilterError(f"eigenvalue 1 of the refinement matrix has multiplicity {ones.size}")
    v = np.real(V[:, ones[0]])
    if abs(v.sum()) < 1e-12:
        raise DegenerateFilterError("eigenvector for eigenvalue 1 sums to zero")
    v = v / v.sum()
    v[np.abs(v) < 1e-15] = 0.0
    return v


def scaling_values_dyadic(filt, levels: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact values of the scaling function on the grid ``i / 2^levels``.

    Returns ``(x, values)`` covering the support ``[0, N-1)``. Values at
    integers come from the refinement eigenproblem; each finer level follows
    from ``phi(y) = sum_k c_k phi(2y - k)`` without iteration error.
    """
    if not 0 <= levels <= 12:
        raise PreconditionError("dyadic evaluation is limited to 12 refinement levels")
    h = get_filter(filt)
    c = math.sqrt(2.0) * h
    N = c.size
    span = max(N - 1, 1)
    vals = _integer_values(tuple(h))
    for j in range(levels):
        step = 2**j
        fine = np.zeros(2 * vals.size)
        fine[::2] = vals
        odd = np.arange(1, 2 * vals.size, 2)
        acc = np.zeros(odd.size)
        for k in range(N):
            # phi(i / 2^{j+1}) = sum_k c_k phi(i / 2^j - k), read off the level-j table
            src = odd - k * step
            ok = (src >= 0) & (src < vals.size)
            acc[ok] += c[k] * vals[src[ok]]
        fine[odd] = acc
        vals = fine
    x = np.arange(vals.size) / 2**levels
    assert x[-1] < span
    return x, vals


def scaling_values_at_integers(filt, shift: float = 0.0) -> dict[int, float]:
    """``{k: phi(k - shift)}`` over the integers meeting the support.

    With ``shift = 0`` this is the normalised eigenvector for eigenvalue 1 of
    the integer refinement matrix; values sum to 1. A dyadic ``shift`` in
    ``[0, 1)`` with at most 12 binary digits evaluates the shifted function.
    """
    h = get_filter(filt)
    if shift == 0.0:
        vals = _integer_values(tuple(h))
        return {k: float(v) for k, v in enumerate(vals)}
    if not 0.0 < shift < 1.0:
        raise PreconditionError("shift must lie in [0, 1)")
    levels = next((J for J in range(13) if abs(shift * 2**J - round(shift * 2**J)) < 1e-12), None)
    if levels is None:
        raise PreconditionError("shift must be a dyadic rational with at most 12 binary digits")
    x, vals = scaling_values_dyadic(h, levels)
    step = 2**levels
    out = {}
    for k in range(1, int(math.ceil(x[-1] + shift)) + 1):
        i = int(round((k - shift) * step))
        if 0 <= i < vals.size:
            out[k] = float(vals[i])
    return out


def scaling_moment(filt, q: int) -> float:
    """``int x^q phi(x) dx`` from the refinement relation."""
    c = math.sqrt(2.0) * get_filter(filt)
    k = np.arange(c.size)
    mu = [1.0]
    for p in range(1, q + 1):
        acc = sum(math.comb(p, i) * float(np.sum(c * k ** (p - i))) * mu[i] for i in range(p))
        mu.append(acc * 2.0 ** (-p - 1) / (1.0 - 2.0 ** (-p)))
    return mu[q]


def moment_identity_residual(filt, q: int, x) -> np.ndarray:
    """``sum_m (x+m)^q phi(x+m) - int t^q phi(t) dt`` at dyadic points ``x``.

    Vanishes for ``q`` below the polynomial exactness order of the filter;
    this is the quadrature identity behind the equality of L2 and scaled
    empirical inner products on locally polynomial functions.
    """
    xs, vals = scaling_values_dyadic(filt, 12)
    step = 2**12
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.size)
    for a, x0 in enumerate(x):
        i0 = int(round((x0 % 1.0) * step))
        idx = np.arange(i0, vals.size, step)
        t = xs[idx] + (x0 - (x0 % 1.0))
        out[a] = float(np.sum(t**q * vals[idx]))
    return out - scaling_moment(filt, q)


@dataclass(frozen=True)
class InterpolationConstant:
    """Infimum of ``|sum_k phi(k) e^{iku}|^d`` with a certified bracket."""

    value: float
    lower: float
    upper: float
    lipschitz: float
    grid_points: int


def interpolation_constant_A(filt, d: int = 1, grid_points: int = 2**14, shift: float = 0.0) -> InterpolationConstant:
    """``A = inf_u |sum_k phi(k) e^{iku}|^d``.

    The trigonometric polynomial is sampled on ``grid_points`` equispaced
    nodes and the minimum refined by golden-section search; every sample
    bounds the infimum from above, and the sampled minimum minus the
    Lipschitz constant ``sum_k |k phi(k)|`` times half the spacing bounds it
    from below.
    """
    from scipy.optimize import minimize_scalar

    vals = scaling_values_at_integers(filt, shift)
    ks = np.array(list(vals.keys()), dtype=float)
    cs = np.array(list(vals.values()))

    def modulus(u):
        return np.abs(np.exp(1j * np.outer(np.atleast_1d(u), ks)) @ cs)

    u = 2 * np.pi * np.arange(grid_points) / grid_points
    mod = modulus(u)
    i = int(np.argmin(mod))
    h = 2 * np.pi / grid_points
    res = minimize_scalar(lambda t: float(modulus(t)[0]), bounds=(u[i] - h, u[i] + h), method="bounded",
                          options={"xatol": 1e-13})
    best = min(float(mod[i]), float(res.fun))
    lip = float(np.sum(np.abs(ks * cs)))
    lower = max(0.0, float(mod.min()) - lip * h / 2) ** d
    return InterpolationConstant(value=best**d, lower=lower, upper=best**d, lipschitz=lip,
                                 grid_points=grid_points)


class ScalingBasis:
    """Periodised tensor scaling functions ``phi_{jk}``, ``k in {1..2^j}^d``.

    Orthonormal in ``L2([0,1]^d)`` once ``2^j >= N - 1`` for a filter of
    length ``N``. Evaluation is exact at dyadic points with at most
    ``j + 12`` binary digits.
    """

    kind = "scaling"
    orthonormal = True
    real = True

    def __init__(self, filt, level: int, d: int = 1):
        self.h = get_filter(filt)
        self.level = int(level)
        self.d = int(d)
        self.m = 2**self.level
        if self.m < max(self.h.size - 1, 1):
            raise PreconditionError("level too coarse: 2^j must be at least the support length")
        axis = np.arange(1, self.m + 1)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        self.shifts = np.stack([g.ravel() for g in mesh], axis=1)
        self._x, self._vals = scaling_values_dyadic(self.h, 12)

    @property
    def size(self) -> int:
        return self.m**self.d

    def _phi_bar(self, t: np.ndarray) -> np.ndarray:
        step = 2**12
        idx = np.round(t * step)
        if np.any(np.abs(t * step - idx) > 1e-6):
            raise PreconditionError("scaling functions are evaluated at dyadic points only")
        idx = idx.astype(np.int64)
        ok = (idx >= 0) & (idx < self._vals.size)
        out = np.zeros(t.shape)
        out[ok] = self._vals[idx[ok]]
        return out

    def _periodic_1d(self, x: np.ndarray, k: np.ndarray) -> np.ndarray:
        t = self.m * x[:, None] - k[None, :]
        t = np.mod(t, self.m)
        # support length <= m, so one periodic copy is nonzero at most
        return self._phi_bar(t)

    def matrix(self, points, columns: slice | None = None) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.d)
        shifts = self.shifts if columns is None else self.shifts[columns]
        E = np.full((pts.shape[0], shifts.shape[0]), 2.0 ** (self.level * self.d / 2))
        for r in range(self.d):
            E *= self._periodic_1d(pts[:, r], shifts[:, r].astype(float))
        return E

    def evaluate(self, j: int, x) -> float:
        if not 1 <= j <= self.size:
            raise IndexError(f"basis index {j} out of range 1..{self.size}")
        return float(self.matrix(np.asarray(x, dtype=float).reshape(1, self.d), slice(j - 1, j))[0, 0])

    def l2_gram(self) -> np.ndarray:
        return np.eye(self.size)

    def toeplitz_gram(self) -> np.ndarray:
        """``<Pi_n phi_jk, phi_jl> = prod_a sum_b phi(b - k_a) phi(b - l_a)`` on the
        dyadic grid ``nu 2^{-j}``, assembled from integer values only."""
        vals = _integer_values(tuple(self.h))
        m = self.m
        row = np.zeros(m)
        # autocorrelation of integer values, wrapped modulo 2^j
        for a, va in enumerate(vals):
            for b, vb in enumerate(vals):
                row[(b - a) % m] += va * vb
        circ = np.array([[row[(l - k) % m] for l in range(m)] for k in range(m)])
        G = circ
        for _ in range(1, self.d):
            G = np.kron(G, circ)
        return G
