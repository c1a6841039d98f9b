"""Constructive maps from regression data to Gaussian shift observations.

Coefficients are returned in the L2-orthonormal coordinates of the
geometry (identical to basis coefficients for orthonormal families).
Every output carries a noise descriptor whose covariance, multiplied by
``sigma^2 / n``, is the covariance of the coefficient noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import solve_triangular

from lecam_equiv.design import Design
from lecam_equiv.emp import EmpiricalGeometry, hermitian_function
from lecam_equiv.errors import (
    EmptyBinError,
    OrderingViolationError,
    PreconditionError,
    RankDeficiencyError,
)
from lecam_equiv.rng import STREAM_NOISE, STREAM_RANDOMIZATION, child_rng

RANK_TOL = 1e-10
# above this size the Gram-Schmidt factor comes from LAPACK QR
QR_THRESHOLD = 256


@dataclass(frozen=True)
class RegressionSample:
    design: Design
    y: np.ndarray
    sigma: float
    f: object = None

    def __post_init__(self):
        y = np.asarray(self.y).reshape(-1)
        if y.size != self.design.n:
            raise ValueError(f"need {self.design.n} observations, got {y.size}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        object.__setattr__(self, "y", y)


def simulate_sample(design: Design, f, sigma: float, seed: int | None) -> RegressionSample:
    """``Y_i = f(x_i) + sigma eps_i``; ``f=None`` means the zero function and
    ``seed=None`` gives noiseless data."""
    n = design.n
    signal = np.zeros(n) if f is None else np.asarray(f(design.points)).reshape(-1)
    if np.iscomplexobj(signal) and getattr(f, "real", False) is True:
        # real-valued Fourier series: drop the roundoff imaginary part
        signal = signal.real
    if seed is None:
        return RegressionSample(design, signal, sigma, f)
    eps = child_rng(seed, STREAM_NOISE, n).standard_normal(n)
    return RegressionSample(design, signal + sigma * eps, sigma, f)


@dataclass
class NoiseDescriptor:
    """Noise covariance ``scale * cov`` with ``scale = sigma^2 / n``."""

    kind: str
    scale: float
    cov: np.ndarray = field(repr=False)
    n0: int | None = None

    def covariance(self) -> np.ndarray:
        return self.scale * self.cov

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "scale": self.scale}
        if self.n0 is not None:
            out["n0"] = self.n0
        return out


@dataclass
class TransformOutput:
    transform: str
    coeffs: np.ndarray
    noise: NoiseDescriptor
    n: int
    n0: int | None = None
    seed: int | None = None

    def to_json(self) -> str:
        rec = {
            "transform": self.transform,
            "n": self.n,
            "coeffs": [[float(np.real(c)), float(np.imag(c))] for c in self.coeffs],
            "noise": self.noise.as_dict(),
        }
        if self.n0 is not None:
            rec["n0"] = self.n0
        if self.seed is not None:
            rec["seed"] = self.seed
        return json.dumps(rec)


def _scale(sample: RegressionSample) -> float:
    return sample.sigma**2 / sample.design.n


def _check(sample: RegressionSample, geom: EmpiricalGeometry):
    if sample.design is not geom.design and sample.design != geom.design:
        raise PreconditionError("sample and geometry use different designs")


def isometric_shift(sample: RegressionSample, geom: EmpiricalGeometry) -> TransformOutput:
    """``Z = (D_n|S_n)^{-1} Y``: interpolation of the data, white noise."""
    _check(sample, geom)
    if not geom.is_isometric(1e-8):
        raise PreconditionError("geometry is not isometric; use z1/z2/z3")
    c = geom.to_orthonormal(geom.interpolate(sample.y))
    p = geom.size
    return TransformOutput("Z", c, NoiseDescriptor("identity", _scale(sample), np.eye(p)), sample.design.n)


def z1(sample: RegressionSample, geom: EmpiricalGeometry) -> TransformOutput:
    """``(1/n) E^* Y``: expansion of the observations, noise covariance ``G``."""
    _check(sample, geom)
    c = geom.E.conj().T @ sample.y / sample.design.n
    return TransformOutput("Z1", c, NoiseDescriptor("gram", _scale(sample), geom.G), sample.design.n)


def z2(sample: RegressionSample, geom: EmpiricalGeometry) -> TransformOutput:
    """``G^{-1/2} Z1``: white noise, signal ``G^{1/2} I_n f``."""
    c = geom.gram_power(-0.5) @ z1(sample, geom).coeffs
    return TransformOutput("Z2", c, NoiseDescriptor("identity", _scale(sample), np.eye(geom.size)), sample.design.n)


def z3(sample: RegressionSample, geom: EmpiricalGeometry) -> TransformOutput:
    """``G^{-1} Z1 = I_n Y``: interpolation, noise covariance ``G^{-1}``."""
    Ginv = geom.gram_power(-1.0)
    c = Ginv @ z1(sample, geom).coeffs
    return TransformOutput("Z3", c, NoiseDescriptor("gram_inverse", _scale(sample), Ginv), sample.design.n)


def z5_randomize(z3_out: TransformOutput, geom: EmpiricalGeometry, seed: int) -> TransformOutput:
    """Add ``eta ~ N(0, (sigma^2/n)(Id - G^{-1}))`` to ``Z3``, making its noise white.

    For complex geometries ``eta`` is circular complex Gaussian.
    """
    if z3_out.transform != "Z3":
        raise PreconditionError("z5_randomize expects a Z3 output")
    p = geom.size
    try:
        root = hermitian_function(np.eye(p) - z3_out.noise.cov, np.sqrt, "Id - G^{-1}")
    except PreconditionError as exc:
        raise OrderingViolationError(f"(Pi_n|S_n)^{{-1}} <= Id fails: {exc}") from None
    rng = child_rng(seed, STREAM_RANDOMIZATION, z3_out.n, p)
    if geom.complex:
        z = (rng.standard_normal(p) + 1j * rng.standard_normal(p)) / np.sqrt(2.0)
    else:
        z = rng.standard_normal(p)
    eta = np.sqrt(z3_out.noise.scale) * (root @ z)
    noise = NoiseDescriptor("identity", z3_out.noise.scale, np.eye(p))
    return TransformOutput("Z5", z3_out.coeffs + eta, noise, z3_out.n, seed=int(seed))


# ---------------------------------------------------------------------------
# empirical Gram-Schmidt


@dataclass(frozen=True)
class GramSchmidtFactor:
    """``T`` upper triangular with ``T[:, j]`` the coefficients of ``phi_j^n``.

    ``R = T^{-1}`` is the triangular factor of ``E / sqrt(n) = Q R`` and
    ``r[j] = ||phi_j - P^n_{j-1} phi_j||_n`` its diagonal.
    """

    T: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    r: np.ndarray


def _cgs2(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n, p = A.shape
    Q = np.zeros_like(A)
    R = np.zeros((p, p), dtype=A.dtype)
    for j in range(p):
        v = A[:, j].copy()
        norm0 = np.linalg.norm(v)
        # classical Gram-Schmidt with one reorthogonalisation pass
        for _ in range(2):
            h = Q[:, :j].conj().T @ v
            v -= Q[:, :j] @ h
            R[:j, j] += h
        rj = np.linalg.norm(v)
        if not rj > RANK_TOL * max(norm0, np.finfo(float).tiny):
            raise RankDeficiencyError(j + 1, float(rj))
        Q[:, j] = v / rj
        R[j, j] = rj
    return Q, R


def _qr(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    Q, R = np.linalg.qr(A)
    d = np.diagonal(R).copy()
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    # rotate so the diagonal is real positive, as Gram-Schmidt produces
    Q = Q * phase[None, :]
    R = np.triu(phase.conj()[:, None] * R)
    col = np.linalg.norm(A, axis=0)
    diag = np.real(np.diagonal(R))
    bad = np.nonzero(~(diag > RANK_TOL * np.maximum(col, np.finfo(float).tiny)))[0]
    if bad.size:
        raise RankDeficiencyError(int(bad[0]) + 1, float(diag[bad[0]]))
    return Q, R


def empirical_gram_schmidt(geom: EmpiricalGeometry, method: str = "auto") -> GramSchmidtFactor:
    """Orthonormalise ``phi_1, phi_2, ...`` in ``||.||_n`` in this order."""
    A = geom.E / np.sqrt(geom.n)
    if method == "auto":
        method = "cgs2" if geom.size <= QR_THRESHOLD else "qr"
    if method == "cgs2":
        Q, R = _cgs2(A)
    elif method == "qr":
        Q, R = _qr(A)
    else:
        raise ValueError(f"unknown method {method!r}")
    p = R.shape[0]
    T = np.triu(solve_triangular(R, np.eye(p, dtype=R.dtype), lower=False))
    return GramSchmidtFactor(T=T, R=R, Q=Q, r=np.real(np.diagonal(R)).copy())


def two_level_transform(
    sample: RegressionSample, geom: EmpiricalGeometry, n0: int, factor: GramSchmidtFactor | None = None
) -> TransformOutput:
    """``Z_r``: empirical projection on the first ``n0`` functions, triangular
    whitening above.

    With ``w = (1/n) (E T)^* Y`` the output is ``T[:, :n0] w[:n0]`` plus
    ``w[n0:]`` placed on the high indices. Noise covariance is
    ``(sigma^2/n) diag((Pi_n|S_{n0})^{-1}, Id)``.
    """
    _check(sample, geom)
    p = geom.size
    if not 1 <= n0 <= p:
        raise PreconditionError(f"n0 must lie in 1..{p}, got {n0}")
    fac = empirical_gram_schmidt(geom) if factor is None else factor
    w = fac.Q.conj().T @ sample.y / np.sqrt(sample.design.n)
    c = np.zeros(p, dtype=np.result_type(fac.T, w))
    c[:n0] = fac.T[:n0, :n0] @ w[:n0]
    c[n0:] = w[n0:]
    cov = np.eye(p, dtype=fac.T.dtype)
    T11 = fac.T[:n0, :n0]
    cov[:n0, :n0] = T11 @ T11.conj().T
    return TransformOutput("Zr", c, NoiseDescriptor("two_level", _scale(sample), cov, n0=n0), sample.design.n, n0=n0)


# ---------------------------------------------------------------------------
# Haar two-level construction


@dataclass(frozen=True)
class HaarWavelet:
    """``psi_jk^n = C (N_a^{-1} 1_{I_a} - N_b^{-1} 1_{I_b})`` on the children
    ``I_a = I_{j+1,2k}``, ``I_b = I_{j+1,2k+1}`` of ``I_jk``."""

    j: int
    k: int
    n_left: int
    n_right: int
    c_squared: Fraction

    @property
    def weights(self) -> tuple[float, float]:
        c = float(self.c_squared) ** 0.5
        return c / self.n_left, -c / self.n_right


def haar_c_squared(n: int, n_left: int, n_right: int) -> Fraction:
    """``C^2 = n N_{j+1,2k} N_{j+1,2k+1} / N_jk`` in exact arithmetic."""
    if n_left <= 0 or n_right <= 0:
        raise EmptyBinError("Haar construction needs nonempty child intervals")
    return Fraction(n * n_left * n_right, n_left + n_right)


def dyadic_counts(design: Design, level: int) -> np.ndarray:
    """Occupation numbers of ``I_{level,k} = [k 2^-level, (k+1) 2^-level)``."""
    if design.d != 1:
        raise PreconditionError("Haar construction is one-dimensional")
    x = design.points[:, 0]
    # x = 1 belongs to no half-open interval of [0, 1); fold it onto the last
    idx = np.minimum(np.floor(x * 2**level).astype(np.int64), 2**level - 1)
    return np.bincount(idx, minlength=2**level)


def haar_two_level_basis(design: Design, levels: int) -> list[HaarWavelet]:
    """Empirically normalised Haar functions for ``j = 0..levels-1``."""
    out = []
    for j in range(levels):
        children = dyadic_counts(design, j + 1)
        for k in range(2**j):
            a, b = int(children[2 * k]), int(children[2 * k + 1])
            if a == 0 or b == 0:
                raise EmptyBinError(f"empty child interval at j={j}, k={k}")
            out.append(HaarWavelet(j, k, a, b, haar_c_squared(design.n, a, b)))
    return out


def haar_empirical_values(design: Design, wavelet: HaarWavelet) -> np.ndarray:
    """Values of ``psi_jk^n`` at the design points."""
    children = np.minimum(np.floor(design.points[:, 0] * 2 ** (wavelet.j + 1)).astype(np.int64),
                          2 ** (wavelet.j + 1) - 1)
    wa, wb = wavelet.weights
    return np.where(children == 2 * wavelet.k, wa, np.where(children == 2 * wavelet.k + 1, wb, 0.0))
