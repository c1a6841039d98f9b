"""Finite-n Le Cam distance bounds between regression and white noise.

The central quantity is the worst-case interpolation bias
``sup_f ||f - I_n f||_{L2}`` over a smoothness class; a bias ``b`` turns into
the total variation bound ``1 - 2 Phi(-sqrt(n) b / (2 sigma))`` between the
two Gaussian shift experiments.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf, zeta

from lecam_equiv.basis import FourierBasis, PiecewiseConstantBasis
from lecam_equiv.design import Design, equidistant_grid, grid_size
from lecam_equiv.emp import EmpiricalGeometry
from lecam_equiv.errors import PreconditionError
from lecam_equiv.funclass import HoelderBall, SobolevBall, holder_worst_bias_bound

EXACT_PHI = "ExactPhiForm"
RATE = "RateForm"

DEFAULT_K = 64
# cap on alias terms per residue class, (2K+1)^d
MAX_ALIAS_TERMS = 20000
SCREEN_LEVELS = (2, 8)


@dataclass
class BoundReport:
    value: float
    form: str
    components: dict
    inputs: dict
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "form": self.form,
            "components": dict(self.components),
            "inputs": dict(self.inputs),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# Gaussian distances


def tv_gaussian_shift(bias_l2: float, n: int, sigma: float) -> float:
    """``1 - 2 Phi(-sqrt(n) b / (2 sigma))``, evaluated as ``erf`` to keep
    full relative precision for small arguments."""
    if bias_l2 < 0 or n < 1 or not sigma > 0:
        raise ValueError("need bias >= 0, n >= 1, sigma > 0")
    if math.isinf(bias_l2):
        return 1.0
    return float(erf(math.sqrt(n) * bias_l2 / (2.0 * math.sqrt(2.0) * sigma)))


def hellinger_gaussian_cov(Sigma, alpha: float = 1.0) -> tuple[float, float]:
    """Squared Hellinger distance between ``N(mu, alpha Sigma)`` and
    ``N(mu, alpha Id)`` together with the bound ``2 ||Sigma - Id||_HS^2``.

    Uses ``H^2 = 2 - 2 prod_i (2 sqrt(l_i) / (1 + l_i))^{1/2}`` over the
    eigenvalues ``l_i`` of ``Sigma``; ``alpha`` cancels.
    """
    S = np.asarray(Sigma)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("Sigma must be square")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    S = 0.5 * (S + S.conj().T)
    lam = np.linalg.eigvalsh(S)
    if lam.min() <= 0:
        raise PreconditionError("Sigma must be positive definite")
    log_aff = 0.5 * np.sum(np.log(2.0 * np.sqrt(lam)) - np.log1p(lam))
    exact = float(-2.0 * np.expm1(log_aff))
    bound = float(2.0 * np.sum(np.abs(S - np.eye(S.shape[0])) ** 2))
    return exact, bound


# ---------------------------------------------------------------------------
# lattice sums


def lattice_sum_linf(s: float, d: int) -> float:
    """``sum_{k in Z^d \\ 0} |k|_inf^{-2s}`` for ``2s > d``.

    Shell ``|k|_inf = j`` holds ``(2j+1)^d - (2j-1)^d = sum_{i: d-i odd}
    2 C(d,i) 2^i j^i`` points, so the sum is a finite combination of zeta values.
    """
    if not 2 * s > d:
        return math.inf
    return float(sum(2 * math.comb(d, i) * 2**i * zeta(2 * s - i) for i in range(d) if (d - i) % 2 == 1))


def lattice_tail_linf(s: float, d: int, K: int) -> float:
    """``sum_{|k|_inf > K} |k|_inf^{-2s}`` via Hurwitz zeta."""
    if not 2 * s > d:
        return math.inf
    return float(sum(2 * math.comb(d, i) * 2**i * zeta(2 * s - i, K + 1) for i in range(d) if (d - i) % 2 == 1))


def lattice_sum_shells(s: float, d: int, rel_tol: float = 1e-10) -> tuple[float, float]:
    """Shell summation with an integral tail: returns ``(partial + tail, tail)``.

    Independent route to :func:`lattice_sum_linf`.
    """
    if not 2 * s > d:
        return math.inf, math.inf
    p = 2 * s - d + 1
    total, start, block = 0.0, 1, 4096
    while True:
        j = np.arange(start, start + block, dtype=float)
        total += float(np.sum(((2 * j + 1) ** d - (2 * j - 1) ** d) * j ** (-2 * s)))
        last = float(j[-1])
        # shell count <= 2d (2j+1)^{d-1} <= 2d 3^{d-1} j^{d-1}; integrate from the last shell
        tail = 2 * d * 3.0 ** (d - 1) * last ** (1 - p) / (p - 1)
        if tail <= rel_tol * total or last >= 1e7:
            return total + tail, tail
        start += block
        block = min(2 * block, 2**20)


# ---------------------------------------------------------------------------
# exact Fourier x Sobolev supremum


def _secular_root(d: np.ndarray, extra_num: np.ndarray | None = None, extra_pole: np.ndarray | None = None):
    """Largest root of ``sum_k d_k / (x - d_k) + c / (x - p) = 1`` row-wise.

    ``d`` is ``(C, M)`` with nonnegative entries (zero-padded). The root is
    ``lambda_max(diag(d) + sqrt(d) sqrt(d)^T)`` when the extra term is absent.
    """
    d = np.asarray(d, dtype=float)
    C = d.shape[0]
    num = np.zeros(C) if extra_num is None else np.asarray(extra_num, dtype=float)
    pole = np.zeros(C) if extra_pole is None else np.asarray(extra_pole, dtype=float)
    dmax = np.maximum(d.max(axis=1), pole)
    lo = dmax.copy()
    hi = dmax + d.sum(axis=1) + num

    def h(x):
        return np.sum(d / (x[:, None] - d), axis=1) + num / (x - pole) - 1.0

    def dh(x):
        return -np.sum(d / (x[:, None] - d) ** 2, axis=1) - num / (x - pole) ** 2

    x = hi.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(200):
            hx = h(x)
            lo = np.where(hx > 0, x, lo)
            hi = np.where(hx <= 0, x, hi)
            step = x - hx / dh(x)
            inside = (step > lo) & (step < hi) & np.isfinite(step)
            x_new = np.where(inside, step, 0.5 * (lo + hi))
            if np.all(np.abs(x_new - x) <= 1e-15 * np.abs(x)):
                x = x_new
                break
            x = x_new
    return x


def _alias_offsets(d: int, K: int) -> np.ndarray:
    ks = np.array(list(itertools.product(range(-K, K + 1), repeat=d)), dtype=float)
    return ks[np.any(ks != 0, axis=1)]


def _class_bounds(classes: np.ndarray, m: int, s: float, K: int):
    """Truncated (lower) and certified (upper) top eigenvalues per residue class."""
    d = classes.shape[1]
    ks = _alias_offsets(d, K)
    out_lo = np.empty(classes.shape[0])
    out_hi = np.empty(classes.shape[0])
    p = 2 * s - d + 1
    c = 2.0 + 2.0 / (K + 0.5)
    tau = 2 * d * c ** (d - 1) * float(m) ** (-2 * s) * (K - 0.5) ** (1 - p) / (p - 1)
    d_tail = (m * (K + 0.5)) ** (-2 * s)
    chunk = max(1, 2_000_000 // ks.shape[0])
    for a in range(0, classes.shape[0], chunk):
        r = classes[a : a + chunk]
        linf = np.abs(r[:, None, :] + m * ks[None, :, :]).max(axis=2)
        dk = linf ** (-2 * s)
        out_lo[a : a + chunk] = _secular_root(dk)
        out_hi[a : a + chunk] = _secular_root(dk, np.full(r.shape[0], tau), np.full(r.shape[0], d_tail))
    return out_lo, out_hi, tau


def _reduced_classes(m: int, d: int) -> np.ndarray:
    h = (m - 1) // 2
    return np.array(list(itertools.combinations_with_replacement(range(h + 1), d)), dtype=float)


def default_alias_K(d: int) -> int:
    return int(min(DEFAULT_K, (MAX_ALIAS_TERMS ** (1.0 / d) - 1) // 2))


@dataclass
class BiasSup:
    """Squared worst-case interpolation bias ``sup ||f - I_n f||^2``."""

    sup_sq: float
    sup_sq_upper: float
    components: dict
    form: str
    warnings: list = field(default_factory=list)


def fourier_sobolev_sup(m: int, d: int, s: float, R: float, K: int | None = None) -> BiasSup:
    """Exact ``sup ||f - I_n f||^2`` over the periodic Sobolev ball on the odd
    ``m``-grid.

    ``Id - I_n`` acts separately on each residue class ``r + m Z^d``. Writing
    ``v_k = <f, phi_{r+km}>`` (``k != 0``) the error on the class is
    ``||v||^2 + |sum_k v_k|^2`` under ``sum_k |r+km|_inf^{2s} |v_k|^2 <= R^2``,
    whose maximum is ``R^2`` times the top eigenvalue of ``D + sqrt(D) 1 1^T sqrt(D)``.
    Offsets are truncated at ``|k|_inf <= K``; the discarded tail enters a
    certified upper value.
    """
    if m < 1 or m % 2 == 0:
        raise PreconditionError(f"Fourier grids need odd m, got m={m}")
    comps = {
        "classical_bias": R**2 * ((m + 1) / 2.0) ** (-2 * s),
        "aliasing_bound": R**2 * float(m) ** (-2 * s) * (2 ** (2 * s) * (2**d - 1) + lattice_sum_linf(s, d)),
    }
    if not 2 * s > d:
        comps.update(bias_sup=math.inf, tail_term=math.inf)
        return BiasSup(math.inf, math.inf, comps, EXACT_PHI, ["s <= d/2: supremum is infinite, no equivalence"])
    if R == 0:
        comps.update(bias_sup=0.0, tail_term=0.0, aliasing_cs=0.0)
        return BiasSup(0.0, 0.0, comps, EXACT_PHI)
    K = default_alias_K(d) if K is None else int(K)
    classes = _reduced_classes(m, d)
    cand = classes
    # branch and bound: cheap truncations discard classes whose certified
    # upper value falls below the best truncated value
    for k0 in SCREEN_LEVELS:
        if k0 >= K:
            break
        lo0, hi0, _ = _class_bounds(cand, m, s, k0)
        cand = cand[hi0 >= lo0.max() * (1 - 1e-12)]
    lo, hi, tau = _class_bounds(cand, m, s, K)
    best = int(np.argmax(lo))
    lam_lo = float(lo[best])
    lam_hi = float(hi.max())
    # Cauchy-Schwarz aliasing step: R^2 max_r sum_k |r+km|^{-2s} on the chosen class
    r = cand[best]
    ks = _alias_offsets(d, K)
    dk = np.abs(r[None, :] + m * ks).max(axis=1) ** (-2 * s)
    comps.update(
        bias_sup=R**2 * lam_hi,
        bias_sup_truncated=R**2 * lam_lo,
        tail_term=R**2 * (lam_hi - lam_lo),
        alias_tail_mass=tau,
        aliasing_cs_class=R**2 * (float(dk.sum()) + tau),
        worst_class=[int(v) for v in r],
        candidates=int(cand.shape[0]),
        K=K,
    )
    return BiasSup(R**2 * lam_lo, R**2 * lam_hi, comps, EXACT_PHI)


def generic_sobolev_sup(basis, design: Design, s: float, R: float, K: int = DEFAULT_K) -> BiasSup:
    """Truncated-operator estimate for a non-Fourier family.

    Computes ``R^2 lambda_max(W M W)`` where ``M`` is the Gram of
    ``(Id - I_n) phi_l`` over ``0 < |l|_inf <= K`` and ``W = diag(|l|_inf^{-s})``;
    frequencies above ``K`` contribute at most ``R tau^{1/2} (1 + A_n^{-1})`` to
    the bias, ``tau`` the lattice tail.
    """
    d = basis.d
    geom = EmpiricalGeometry(basis, design)
    ls = np.array([l for l in itertools.product(range(-K, K + 1), repeat=d) if any(l)], dtype=float)
    Phi = np.exp(2j * np.pi * design.points @ ls.T)
    const = geom.interpolate(np.ones(design.n))
    G_L2 = basis.l2_gram()
    F0 = basis.fourier_coefficients(np.zeros((1, d)))[0]
    # ||1 - I_n 1||^2 must vanish, otherwise the constant mode is unbounded
    err0 = 1 - 2 * np.real(F0.conj() @ const) + np.real(np.vdot(const, G_L2 @ const))
    if abs(err0) > 1e-9:
        raise PreconditionError("interpolation does not reproduce constants; Sobolev sup is infinite")
    C = np.linalg.solve(geom.E_raw.astype(complex), Phi)
    F = basis.fourier_coefficients(ls)
    # <I phi_l', phi_l> = sum_j C[j, l'] conj(<phi_l, b_j>)
    cross = F.conj() @ C
    H = np.eye(ls.shape[0]) - cross - cross.conj().T + C.conj().T @ G_L2.T @ C
    w = np.abs(ls).max(axis=1) ** (-s)
    WHW = w[:, None] * H * w[None, :]
    lam = float(np.linalg.eigvalsh(0.5 * (WHW + WHW.conj().T))[-1])
    tau = lattice_tail_linf(s, d, K)
    A, _ = geom.isomorphism_constants()
    tail = R * math.sqrt(tau) * (1 + 1 / A) if A > 0 else math.inf
    lo = R**2 * max(lam, 0.0)
    hi = (math.sqrt(lo) + tail) ** 2
    comps = {"bias_sup": hi, "bias_sup_truncated": lo, "tail_term": tail, "K": K, "A_n": A}
    return BiasSup(lo, hi, comps, RATE)


def sup_interpolation_bias(basis, ball, n: int | None = None, design: Design | None = None, K: int | None = None) -> BiasSup:
    """Dispatch on the (family, class) pair."""
    if isinstance(basis, FourierBasis) and isinstance(ball, SobolevBall):
        if basis.m is None:
            raise PreconditionError("exact Fourier supremum needs the odd grid block")
        return fourier_sobolev_sup(basis.m, basis.d, ball.s, ball.R, K)
    if isinstance(basis, PiecewiseConstantBasis) and isinstance(ball, HoelderBall):
        v = holder_worst_bias_bound(ball, basis.n)
        return BiasSup(v, v, {"bias_sup": v, "classical_bias": v}, EXACT_PHI)
    if isinstance(ball, SobolevBall) and hasattr(basis, "fourier_coefficients"):
        if design is None:
            design = equidistant_grid(getattr(basis, "m", basis.size), basis.d)
        if K is None:
            K = int(min(DEFAULT_K, (2000 ** (1.0 / basis.d) - 1) // 2))
        return generic_sobolev_sup(basis, design, ball.s, ball.R, K)
    raise PreconditionError(f"unsupported combination: {type(basis).__name__} x {type(ball).__name__}")


# ---------------------------------------------------------------------------
# theorem-level bounds


def holder_design_bound(design: Design, ball: HoelderBall, sigma: float) -> BoundReport:
    """Piecewise constant construction for an ordered one-dimensional design.

    ``||f - I_n f||^2 <= R^2 n^{-1} sum_i (1/n + |x_i - i/n|)^{2 alpha}
    <= 2 R^2 n^{-2 alpha} + 2 R^2 n^{-1} sum_i |x_i - i/n|^{2 alpha}``; the
    last expression is turned into a total variation bound.
    """
    if design.d != 1:
        raise PreconditionError("holder_design_bound needs a one-dimensional design")
    x = design.points[:, 0]
    if np.any(np.diff(x) <= 0):
        raise PreconditionError("design must be strictly increasing")
    n, a, R = design.n, ball.alpha, ball.R
    dev = np.abs(x - np.arange(1, n + 1) / n)
    pert = float(np.sum(dev ** (2 * a)))
    grid_term = 2 * R**2 * float(n) ** (-2 * a)
    pert_term = 2 * R**2 * pert / n
    chain = R**2 / n * float(np.sum((1.0 / n + dev) ** (2 * a)))
    bias_sq = grid_term + pert_term
    return BoundReport(
        value=tv_gaussian_shift(math.sqrt(bias_sq), n, sigma),
        form=EXACT_PHI,
        components={
            "bias_sup": bias_sq,
            "grid_term": grid_term,
            "perturbation_term": pert_term,
            "perturbation_sum": pert,
            "chain_intermediate": chain,
        },
        inputs={"n": n, "d": 1, "alpha": a, "R": R, "sigma": sigma, "design": design.kind},
    )


def multidim_bound(s: float, d: int, R: float, sigma: float, n: int, K: int | None = None) -> BoundReport:
    """Fourier system on the equidistant grid, ``n = m^d`` with odd ``m``."""
    m = grid_size(n, d)
    if m % 2 == 0:
        raise PreconditionError(f"n = {n} gives even m = {m}; the Fourier grid needs odd m")
    warn = []
    if not s > d / 2:
        warn.append("s <= d/2: regression and white noise are not asymptotically equivalent")
        warnings.warn(warn[0], stacklevel=2)
    sup = fourier_sobolev_sup(m, d, s, R, K)
    value = tv_gaussian_shift(math.sqrt(sup.sup_sq_upper), n, sigma)
    comps = dict(sup.components)
    comps["rate_reference"] = R / sigma * float(n) ** (0.5 - s / d)
    return BoundReport(
        value=value,
        form=EXACT_PHI,
        components=comps,
        inputs={"n": n, "d": d, "m": m, "s": s, "R": R, "sigma": sigma},
        warnings=warn + sup.warnings,
    )


def optimal_n0(n: int, s: float, d: int) -> int:
    """``round(n^{d/(2s+d)})`` clipped to ``1..n``."""
    return int(min(n, max(1, round(float(n) ** (d / (2 * s + d))))))


def random_design_bound(s: float, d: int, R: float, sigma: float, n: int, n0: int | None = None) -> BoundReport:
    """Rate form ``n^{-1/2} n0 + sigma^{-1} R n0^{1/2 - s/d}`` with unit constant."""
    if n0 is None:
        n0 = optimal_n0(n, s, d)
    if not 1 <= n0 <= n:
        raise PreconditionError(f"n0 must lie in 1..{n}, got {n0}")
    het = n0 / math.sqrt(n)
    bias = R / sigma * float(n0) ** (0.5 - s / d)
    warn = []
    if not s > d / 2:
        warn.append("s <= d/2: regression and white noise are not asymptotically equivalent")
    return BoundReport(
        value=het + bias,
        form=RATE,
        components={"hs_term": het, "bias_term": bias},
        inputs={"n": n, "d": d, "s": s, "R": R, "sigma": sigma, "n0": n0},
        warnings=warn,
    )


def fit_rate_slope(pairs) -> tuple[float, float, float]:
    """Least squares ``log v = slope log n + intercept``; returns the residual norm too."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise ValueError("need at least 3 (n, value) pairs")
    n = np.array([p[0] for p in pairs], dtype=float)
    v = np.array([p[1] for p in pairs], dtype=float)
    if np.any(v <= 0) or np.any(n <= 0):
        raise ValueError("rate fits need positive n and values")
    X = np.column_stack([np.log(n), np.ones_like(n)])
    coef, *_ = np.linalg.lstsq(X, np.log(v), rcond=None)
    resid = float(np.linalg.norm(X @ coef - np.log(v)))
    return float(coef[0]), float(coef[1]), resid
