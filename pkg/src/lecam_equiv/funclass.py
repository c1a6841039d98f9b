"""Periodic Sobolev and Hoelder classes.

Functions in the Sobolev class are represented by finitely many Fourier
coefficients ``<f, phi_l>`` with ``phi_l(x) = exp(2 pi i <x, l>)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from lecam_equiv.rng import STREAM_SIGNAL, child_rng

# decay exponent slack of the sampler
SAMPLER_EPS = 0.01


class FourierFunction:
    """Finitely supported Fourier series on ``[0,1]^d``.

    ``freqs`` is an ``(K, d)`` integer array of distinct frequencies and
    ``coeffs`` the matching complex coefficients. ``real`` flags functions
    whose coefficients are conjugate symmetric.
    """

    def __init__(self, d: int, freqs, coeffs, real: bool = False):
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, d)
        coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        if freqs.shape[0] != coeffs.shape[0]:
            raise ValueError("one coefficient per frequency required")
        if len({tuple(r) for r in freqs}) != freqs.shape[0]:
            raise ValueError("duplicate frequencies")
        self.d = int(d)
        self.freqs = freqs
        self.coeffs = coeffs
        self.real = bool(real)
        self.freqs.setflags(write=False)
        self.coeffs.setflags(write=False)
        if self.real:
            lookup = self.as_dict()
            for l, c in lookup.items():
                neg = tuple(-v for v in l)
                if not np.isclose(lookup.get(neg, 0.0), np.conj(c), rtol=0, atol=1e-14 * (1 + abs(c))):
                    raise ValueError(f"coefficients not conjugate symmetric at {l}")

    @classmethod
    def from_dict(cls, d: int, mapping: dict, real: bool = False) -> "FourierFunction":
        if not mapping:
            return cls(d, np.zeros((0, d), dtype=np.int64), np.zeros(0), real=real)
        keys = [tuple(int(v) for v in np.atleast_1d(k)) for k in mapping]
        return cls(d, keys, list(mapping.values()), real=real)

    @classmethod
    def mode(cls, l, coeff: complex = 1.0) -> "FourierFunction":
        l = tuple(int(v) for v in np.atleast_1d(l))
        return cls(len(l), [l], [coeff])

    def as_dict(self) -> dict:
        return {tuple(int(v) for v in r): complex(c) for r, c in zip(self.freqs, self.coeffs)}

    def coefficient(self, l) -> complex:
        return self.as_dict().get(tuple(int(v) for v in np.atleast_1d(l)), 0j)

    def __add__(self, other: "FourierFunction") -> "FourierFunction":
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        out = self.as_dict()
        for l, c in other.as_dict().items():
            out[l] = out.get(l, 0j) + c
        return FourierFunction.from_dict(self.d, out, real=self.real and other.real)

    def scaled(self, factor: complex) -> "FourierFunction":
        real = self.real and np.isreal(factor)
        return FourierFunction(self.d, self.freqs, self.coeffs * factor, real=real)

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(N, d)`` (or ``(N,)`` when d=1)."""
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        if self.coeffs.size == 0:
            return np.zeros(x.shape[0], dtype=complex)
        return np.exp(2j * np.pi * (x @ self.freqs.T)) @ self.coeffs

    def l2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def max_frequency(self) -> int:
        """Largest ``|l|_inf`` in the support (0 for the empty function)."""
        return int(np.abs(self.freqs).max()) if self.freqs.size else 0

    def to_json(self) -> str:
        records = [
            {"l": [int(v) for v in r], "re": float(c.real), "im": float(c.imag)}
            for r, c in zip(self.freqs, self.coeffs)
        ]
        return json.dumps(records)

    @classmethod
    def from_json(cls, text: str, d: int | None = None, real: bool = False) -> "FourierFunction":
        records = json.loads(text)
        if not records:
            if d is None:
                raise ValueError("dimension needed for an empty record list")
            return cls(d, np.zeros((0, d)), np.zeros(0), real=real)
        d = len(records[0]["l"]) if d is None else d
        return cls(
            d,
            [r["l"] for r in records],
            [complex(r["re"], r["im"]) for r in records],
            real=real,
        )


@dataclass(frozen=True)
class SobolevBall:
    d: int
    s: float
    R: float

    def __post_init__(self):
        if self.d < 1 or not self.s > 0 or not self.R >= 0:
            raise ValueError(f"invalid Sobolev ball (d={self.d}, s={self.s}, R={self.R})")

    def contains(self, f: FourierFunction, rtol: float = 1e-12) -> bool:
        return sobolev_seminorm_sq(f, self.s) <= self.R**2 * (1 + rtol)


@dataclass(frozen=True)
class HoelderBall:
    alpha: float
    R: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1 or not self.R >= 0:
            raise ValueError(f"invalid Hoelder ball (alpha={self.alpha}, R={self.R})")


def sobolev_seminorm_sq(f: FourierFunction, s: float) -> float:
    """``sum_l |l|_inf^{2s} |<f, phi_l>|^2``; the constant mode carries weight 0."""
    if f.coeffs.size == 0:
        return 0.0
    linf = np.abs(f.freqs).max(axis=1).astype(float)
    w = np.where(linf > 0, linf ** (2 * s), 0.0)
    return float(np.sum(w * np.abs(f.coeffs) ** 2))


def _half_lattice(d: int, cutoff: int) -> list[tuple[int, ...]]:
    """Frequencies in the cube whose first nonzero entry is positive."""
    out = []
    for l in itertools.product(range(-cutoff, cutoff + 1), repeat=d):
        nz = [v for v in l if v != 0]
        if nz and nz[0] > 0:
            out.append(l)
    return out


def sample_from_sobolev_ball(
    ball: SobolevBall, cutoff: int, seed: int, boundary: bool = True
) -> FourierFunction:
    """Random real-valued element of ``ball`` supported on ``|l|_inf <= cutoff``.

    Non-constant coefficients are complex Gaussians with standard deviation
    ``|l|_inf^{-s-d/2-0.01}``, mirrored to conjugate symmetry and rescaled so
    the seminorm equals ``R`` (``boundary=True``) or ``U * R`` with
    ``U ~ U(0,1)``. The constant coefficient is drawn from ``U(-R, R)``.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    rng = child_rng(seed, STREAM_SIGNAL, ball.d, cutoff)
    d = ball.d
    c0 = ball.R * rng.uniform(-1.0, 1.0)
    mapping = {(0,) * d: complex(c0)}
    half = _half_lattice(d, cutoff)
    if half:
        linf = np.array([max(abs(v) for v in l) for l in half], dtype=float)
        sd = linf ** (-ball.s - d / 2 - SAMPLER_EPS)
        z = (rng.standard_normal(len(half)) + 1j * rng.standard_normal(len(half))) * sd / np.sqrt(2)
        # each half-lattice coefficient appears twice in the seminorm
        semi = 2 * np.sum(linf ** (2 * ball.s) * np.abs(z) ** 2)
        radius = ball.R if boundary else ball.R * rng.uniform()
        # shrink by a few ulps so rounding never leaves the ball
        z = z * (radius / np.sqrt(semi) * (1 - 4 * np.finfo(float).eps))
        for l, c in zip(half, z):
            mapping[l] = complex(c)
            mapping[tuple(-v for v in l)] = complex(np.conj(c))
    return FourierFunction.from_dict(d, mapping, real=True)


def holder_worst_bias_bound(ball: HoelderBall, n: int) -> float:
    """``R^2 (2 alpha + 1)^{-1} n^{-2 alpha}``: worst squared L2 error of the
    piecewise constant interpolant on the grid ``i/n``."""
    if n < 1:
        raise ValueError("n must be positive")
    return ball.R**2 / (2 * ball.alpha + 1) * float(n) ** (-2 * ball.alpha)
