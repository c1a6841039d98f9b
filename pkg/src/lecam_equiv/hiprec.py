"""Extended-precision empirical Gram-Schmidt for small, badly conditioned systems.

A random design with as many Fourier functions as points typically has an
empirical Gram with condition number far beyond ``1/eps``; double precision
then cannot resolve ``T`` or ``G^{-1}`` at all. These helpers carry the same
classical Gram-Schmidt (with reorthogonalisation) out on numpy object
arrays of ``gmpy2.mpc`` numbers, treating the double-precision evaluation
matrix as exact input.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import numpy as np

from lecam_equiv.errors import RankDeficiencyError

DEFAULT_BITS = 192


def _ctx(bits: int):
    return gmpy2.context(gmpy2.get_context(), precision=bits)


def to_mp(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    out = np.empty(a.shape, dtype=object)
    flat = out.reshape(-1)
    for i, z in enumerate(a.reshape(-1)):
        flat[i] = gmpy2.mpc(complex(z))
    return out


def to_float(a: np.ndarray) -> np.ndarray:
    return np.vectorize(complex, otypes=[complex])(a)


def conj(a: np.ndarray) -> np.ndarray:
    return np.vectorize(lambda z: z.conjugate(), otypes=[object])(a)


def adjoint(a: np.ndarray) -> np.ndarray:
    return conj(a).T


def _abs2(v: np.ndarray):
    return sum((gmpy2.norm(z) for z in v), gmpy2.mpfr(0))


def frobenius(a: np.ndarray):
    return gmpy2.sqrt(_abs2(a.reshape(-1)))


@dataclass
class HPFactor:
    """Object-array factors with ``A = Q R`` and ``T = R^{-1}``."""

    Q: np.ndarray
    R: np.ndarray
    T: np.ndarray
    bits: int

    @property
    def r(self) -> np.ndarray:
        return np.array([float(self.R[j, j].real) for j in range(self.R.shape[0])])


def gram_schmidt_hp(A: np.ndarray, bits: int = DEFAULT_BITS, rank_tol: float = 1e-10) -> HPFactor:
    """Orthonormalise the columns of ``A`` (double input) in ``bits`` of precision."""
    with _ctx(bits):
        M = to_mp(A)
        n, p = M.shape
        Q = np.empty((n, p), dtype=object)
        Qc = np.empty((p, n), dtype=object)
        R = np.full((p, p), gmpy2.mpc(0), dtype=object)
        for j in range(p):
            v = M[:, j].copy()
            norm0 = gmpy2.sqrt(_abs2(v))
            for _ in range(2):
                if j:
                    h = Qc[:j] @ v
                    v = v - Q[:, :j] @ h
                    R[:j, j] = R[:j, j] + h
            rj = gmpy2.sqrt(_abs2(v))
            if not rj > rank_tol * norm0:
                raise RankDeficiencyError(j + 1, float(rj))
            Q[:, j] = v / rj
            Qc[j] = conj(Q[:, j])
            R[j, j] = gmpy2.mpc(rj)
        T = upper_inverse(R)
    return HPFactor(Q=Q, R=R, T=T, bits=bits)


def upper_inverse(R: np.ndarray) -> np.ndarray:
    """Inverse of an upper triangular object matrix by back substitution."""
    p = R.shape[0]
    T = np.full((p, p), gmpy2.mpc(0), dtype=object)
    for j in range(p):
        T[j, j] = 1 / R[j, j]
        for i in range(j - 1, -1, -1):
            T[i, j] = -(R[i, i + 1 : j + 1] @ T[i + 1 : j + 1, j]) / R[i, i]
    return T


def inverse(M: np.ndarray, bits: int = DEFAULT_BITS) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting."""
    with _ctx(bits):
        n = M.shape[0]
        aug = np.concatenate([M.copy(), to_mp(np.eye(n))], axis=1)
        for c in range(n):
            piv = c + max(range(n - c), key=lambda i: gmpy2.norm(aug[c + i, c]))
            if piv != c:
                aug[[c, piv]] = aug[[piv, c]]
            aug[c] = aug[c] / aug[c, c]
            col = aug[:, c].copy()
            col[c] = gmpy2.mpc(0)
            aug = aug - np.outer(col, aug[c])
        return aug[:, n:]


def factor_errors(A: np.ndarray, factor: HPFactor) -> dict:
    """Relative Frobenius errors of ``T T^* = G^{-1}`` and ``(A T)^* (A T) = Id``
    with ``G = A^* A``, all evaluated in the factor's precision."""
    with _ctx(factor.bits):
        M = to_mp(A)
        G = adjoint(M) @ M
        Ginv = inverse(G, factor.bits)
        TT = factor.T @ adjoint(factor.T)
        AT = M @ factor.T
        p = AT.shape[1]
        ortho = adjoint(AT) @ AT - to_mp(np.eye(p))
        return {
            "tt_vs_ginv": float(frobenius(TT - Ginv) / frobenius(Ginv)),
            "orthonormality": float(frobenius(ortho) / np.sqrt(p)),
            "lower_max": max((float(abs(factor.T[i, j])) for i in range(p) for j in range(i)), default=0.0),
        }
