"""Empirical geometry of a basis evaluated on a design.

All operator statements live in L2-orthonormal coordinates: for orthonormal
families these are the basis coefficients themselves, for the spline family
the evaluation matrix is right-multiplied by ``G_L2^{-1/2}`` so that the
empirical Gram ``G`` represents ``Pi_n|S_n`` relative to the L2 geometry.
"""

from __future__ import annotations

import csv
import threading

import numpy as np

from lecam_equiv.basis import FourierBasis, PiecewiseConstantBasis
from lecam_equiv.design import Design
from lecam_equiv.errors import NonIsomorphicDesignError, PreconditionError
from lecam_equiv.funclass import FourierFunction

COND_LIMIT = 1e12
NEG_EIG_TOL = 1e-12


def empirical_inner(fvals, gvals) -> complex:
    """``(1/n) sum_i f(x_i) conj(g(x_i))``."""
    f = np.asarray(fvals).reshape(-1)
    g = np.asarray(gvals).reshape(-1)
    if f.shape != g.shape:
        raise ValueError(f"length mismatch: {f.size} vs {g.size}")
    return complex(np.vdot(g, f) / f.size)


def hermitian_function(M: np.ndarray, fn, name: str = "matrix") -> np.ndarray:
    """Apply ``fn`` to the spectrum of Hermitian ``M``.

    Eigenvalues in ``[-1e-12, 0)`` are treated as roundoff and clipped to 0;
    anything more negative is an error.
    """
    M = 0.5 * (M + M.conj().T)
    w, V = np.linalg.eigh(M)
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    if w.size and w.min() < -NEG_EIG_TOL * scale:
        raise PreconditionError(f"{name} is not positive semidefinite (eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    return (V * fn(w)) @ V.conj().T


def psd_sqrt(M: np.ndarray) -> np.ndarray:
    return hermitian_function(M, np.sqrt, "square-root argument")


def pd_inv_sqrt(M: np.ndarray) -> np.ndarray:
    return hermitian_function(M, lambda w: 1.0 / np.sqrt(w), "inverse square-root argument")


def hs_distance_identity(M: np.ndarray, inverted: bool = False) -> float:
    """Frobenius norm of ``M - Id`` or, with ``inverted``, of ``M^{-1} - Id``."""
    M = np.asarray(M)
    if inverted:
        w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
        if w.min() <= 0:
            raise PreconditionError("inverted HS distance needs a positive definite matrix")
        return float(np.sqrt(np.sum((1.0 / w - 1.0) ** 2)))
    return float(np.linalg.norm(M - np.eye(M.shape[0])))


class EmpiricalGeometry:
    """Evaluation matrix and empirical Gram of the first ``size`` basis
    functions on a design.

    ``E_raw[i, j] = phi_j(x_i)``; ``E`` is its L2-orthonormalised version and
    ``G = E^* E / n``. Spectral data are computed once and cached.
    """

    def __init__(self, basis, design: Design, size: int | None = None):
        p = basis.size if size is None else int(size)
        if not 1 <= p <= basis.size:
            raise PreconditionError(f"size must lie in 1..{basis.size}")
        if design.d != basis.d:
            raise PreconditionError(f"design dimension {design.d} differs from basis dimension {basis.d}")
        self.basis = basis
        self.design = design
        self.size = p
        self.E_raw = basis.matrix(design.points, slice(0, p))
        if basis.orthonormal:
            self.W = None
            self.E = self.E_raw
        else:
            self.W = pd_inv_sqrt(basis.l2_gram()[:p, :p])
            self.E = self.E_raw @ self.W
        G = self.E.conj().T @ self.E / design.n
        self.G = 0.5 * (G + G.conj().T)
        self._lock = threading.Lock()
        self._eig = None

    @property
    def n(self) -> int:
        return self.design.n

    @property
    def complex(self) -> bool:
        return np.iscomplexobj(self.E)

    def gram(self) -> np.ndarray:
        return self.G

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        with self._lock:
            if self._eig is None:
                self._eig = np.linalg.eigh(self.G)
            return self._eig

    def isomorphism_constants(self) -> tuple[float, float]:
        """``(A_n, B_n) = (sqrt(lambda_min G), sqrt(lambda_max G))``."""
        w, _ = self.eigh()
        return float(np.sqrt(max(w[0], 0.0))), float(np.sqrt(max(w[-1], 0.0)))

    def is_isometric(self, tol: float = 1e-8) -> bool:
        return float(np.abs(self.G - np.eye(self.size)).max()) <= tol

    def condition(self) -> float:
        w, _ = self.eigh()
        return float(np.inf) if w[0] <= 0 else float(np.sqrt(w[-1] / w[0]))

    def _require_invertible(self):
        if self.size != self.n:
            raise PreconditionError("interpolation needs as many basis functions as design points")
        if not self.condition() <= COND_LIMIT:
            raise NonIsomorphicDesignError(f"evaluation matrix numerically singular (condition {self.condition():.3e})")

    def gram_power(self, power: float) -> np.ndarray:
        """``G^power`` from the cached eigendecomposition (PD required for negative powers)."""
        w, V = self.eigh()
        if power < 0:
            if w[0] <= 0 or w[-1] / w[0] > COND_LIMIT**2:
                raise NonIsomorphicDesignError("empirical Gram is singular")
            fw = w**power
        else:
            if w[0] < -NEG_EIG_TOL * max(1.0, w[-1]):
                raise PreconditionError("empirical Gram has a negative eigenvalue")
            fw = np.clip(w, 0.0, None) ** power
        return (V * fw) @ V.conj().T

    def interpolate(self, fvals) -> np.ndarray:
        """Coefficients ``c`` (in the basis' own coordinates) with ``E_raw c = fvals``."""
        self._require_invertible()
        y = np.asarray(fvals).reshape(-1)
        if y.size != self.n:
            raise ValueError(f"expected {self.n} values, got {y.size}")
        if self.basis.orthonormal and self.is_isometric(1e-12):
            return self.E_raw.conj().T @ y / self.n
        return np.linalg.solve(self.E_raw, y.astype(np.result_type(self.E_raw, y)))

    def to_orthonormal(self, coeffs) -> np.ndarray:
        """Raw basis coefficients to L2-orthonormal coordinates."""
        c = np.asarray(coeffs)
        return c if self.W is None else np.linalg.solve(self.W, c)

    def from_orthonormal(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs)
        return c if self.W is None else self.W @ c

    def empirical_norm_sq(self, coeffs) -> float:
        """``||g||_n^2 = c^* G_raw c`` for raw coefficients ``c``."""
        c = self.to_orthonormal(coeffs)
        return float(np.real(np.vdot(c, self.G @ c)))

    def write_gram_csv(self, path) -> None:
        """Row-major Gram with one (re, im) column pair per entry."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"{p}{k + 1}" for k in range(self.size) for p in ("re", "im")])
            for row in self.G:
                w.writerow([format(float(v), ".17g") for z in row for v in (np.real(z), np.imag(z))])


# ---------------------------------------------------------------------------
# Fourier-specific helpers


def _require_odd(m: int):
    if m < 1 or m % 2 == 0:
        raise PreconditionError(f"Fourier grids need odd m (symmetric frequency block), got m={m}")


def fold_frequency(l, m: int) -> tuple[int, ...]:
    """Representative of ``l`` modulo ``m`` inside ``|l|_inf <= (m-1)/2``."""
    h = (m - 1) // 2
    return tuple(int((v + h) % m - h) for v in np.atleast_1d(l))


def alias_coefficients(f: FourierFunction, m: int) -> dict:
    """``{l: sum_k <f, phi_{l+km}>}`` over the block ``|l|_inf <= (m-1)/2``."""
    _require_odd(m)
    out: dict = {}
    for l, c in f.as_dict().items():
        key = fold_frequency(l, m)
        out[key] = out.get(key, 0j) + c
    return out


def l2_project_fourier(f: FourierFunction, m: int) -> np.ndarray:
    """Coefficients of ``P_n f`` in :meth:`FourierBasis.grid` order."""
    _require_odd(m)
    basis = FourierBasis.grid(m, f.d)
    c = np.zeros(basis.size, dtype=complex)
    h = (m - 1) // 2
    for l, v in f.as_dict().items():
        if max(abs(x) for x in l) <= h:
            c[basis.index_of(l)] += v
    return c


def interpolate_fourier(f: FourierFunction, m: int) -> np.ndarray:
    """Coefficients of ``I_n f`` on the odd ``m``-grid, computed numerically."""
    from lecam_equiv.design import equidistant_grid

    _require_odd(m)
    geom = EmpiricalGeometry(FourierBasis.grid(m, f.d), equidistant_grid(m, f.d))
    return geom.interpolate(f(geom.design.points))


def fourier_l2_distance_sq(f: FourierFunction, coeffs, basis: FourierBasis) -> float:
    """``||f - sum_j c_j phi_j||^2_{L2}`` by Parseval."""
    c = np.asarray(coeffs, dtype=complex).copy()
    outside = 0.0
    for l, v in f.as_dict().items():
        j = basis._index.get(l)
        if j is None:
            outside += abs(v) ** 2
        else:
            c[j] -= v
    return float(outside + np.sum(np.abs(c) ** 2))


# ---------------------------------------------------------------------------
# piecewise constants


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def piecewise_constant_l2_error_sq(f, coeffs, n: int) -> float:
    """``||f - sum_i c_i sqrt(n) 1_{((i-1)/n, i/n]}||^2_{L2}`` for a vectorised
    callable ``f``; Gauss-Legendre with 24 nodes per cell."""
    c = np.asarray(coeffs).reshape(-1)
    if c.size != n:
        raise ValueError("one coefficient per cell required")
    left = np.arange(n)[:, None] / n
    x = left + (_GL_NODES[None, :] + 1.0) / (2 * n)
    vals = np.asarray(f(x.ravel())).reshape(x.shape)
    diff = np.abs(vals - np.sqrt(n) * c[:, None]) ** 2
    return float(np.sum(diff * _GL_WEIGHTS[None, :]) / (2 * n))


def interpolate_piecewise_constant(f, design: Design) -> np.ndarray:
    """Coefficients of ``sum_i f(x_i) 1_{((i-1)/n, i/n]}``: the i-th ordered
    observation is attached to the i-th cell whatever the exact position of
    ``x_i`` (this is ``I_n f`` when ``x_i = i/n``)."""
    if design.d != 1:
        raise PreconditionError("piecewise constant interpolation is one-dimensional")
    x = design.points[:, 0]
    if np.any(np.diff(x) <= 0):
        raise PreconditionError("design must be strictly increasing")
    return np.asarray(f(x)) / np.sqrt(design.n)
