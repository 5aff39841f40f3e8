"""Lifting slice critical points to matrix space.

For data ``Y = U diag(y) V^*`` with distinct nonzero singular values, the
Hermitian distance critical points of ``Y`` on the unitarily invariant set
``M = sigma^{-1}(S)`` are exactly ``U diag(x) V^*`` with ``x`` an ED critical
point of ``y`` on ``S``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._config import DEFAULT
from .cxmat import RealDiag, as_cmat, fro, matrix_to_dict, rect_diag, svd
from .errors import DegenerateSpectrum, NonGenericData, RankTooSmall, ShapeMismatch
from .slices import RankAtMost, ed_critical, tangent_basis
from .verify import is_hd_critical, tangent_frame

MAX_HDPOLY_M = 16


@dataclass
class HdCriticalPoint:
    X: np.ndarray
    source_x: np.ndarray | None
    distance_sq: float
    criticality_residual: float
    warning: str = ""

    def to_json(self) -> dict:
        out = {
            "x": None if self.source_x is None else np.asarray(self.source_x).tolist(),
            "X": matrix_to_dict(self.X),
            "distance_sq": float(self.distance_sq),
            "residual": float(self.criticality_residual),
        }
        if self.warning:
            out["warning"] = self.warning
        return out


@dataclass(frozen=True)
class HdPoly:
    """Monic polynomial in ``T = t^2``; ``coeffs_t2[i]`` multiplies ``T**i``."""

    coeffs_t2: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeffs_t2.size - 1

    def at_t2(self, T):
        return np.polynomial.polynomial.polyval(T, self.coeffs_t2)

    def __call__(self, t):
        return self.at_t2(np.square(t))

    def to_json(self) -> dict:
        return {"coeffs_t2": self.coeffs_t2.tolist()}


@dataclass(frozen=True)
class _Frame:
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    flipped: bool


def _wide_frame(Y: np.ndarray) -> _Frame:
    """SVD of ``Y`` or, for tall ``Y``, of ``Y^*`` so that rows <= cols."""
    flipped = Y.shape[0] > Y.shape[1]
    f = svd(Y.conj().T if flipped else Y)
    return _Frame(f.U, f.sigma, f.V, flipped)


def _spectrum_warning(sigma: np.ndarray, scale: float) -> str:
    """Reject repeated or zero singular values; warn when they are close."""
    floor = DEFAULT.degenerate_spectrum * max(scale, 1.0)
    if np.any(sigma <= floor):
        raise DegenerateSpectrum(f"zero singular value in {sigma.tolist()}")
    gaps = -np.diff(sigma)
    if gaps.size and gaps.min() <= floor:
        raise DegenerateSpectrum(f"repeated singular values in {sigma.tolist()}")
    if gaps.size and gaps.min() < DEFAULT.close_spectrum * max(scale, 1.0):
        return f"singular values closer than {DEFAULT.close_spectrum:g}; lifting is ill-conditioned"
    return ""


def _point(Y, fr: _Frame, x, slice_basis, tol) -> HdCriticalPoint:
    n, t = fr.U.shape[0], fr.V.shape[0]
    Xw = fr.U @ rect_diag(x, n, t) @ fr.V.conj().T
    frame = tangent_frame(fr.U, x, fr.V, slice_basis)
    Yw = Y.conj().T if fr.flipped else Y
    _, res = is_hd_critical(Yw, Xw, frame, tol)
    X = Xw.conj().T if fr.flipped else Xw
    return HdCriticalPoint(X=X, source_x=np.asarray(x, float), distance_sq=fro(Y - X) ** 2,
                           criticality_residual=res)


def lift_critical(Y, family, tol: float | None = None) -> list[HdCriticalPoint]:
    """HD critical points of ``Y`` on ``sigma^{-1}(S)`` for the slice ``family``.

    Raises
    ------
    DegenerateSpectrum
        If singular values repeat or vanish.
    NonGenericData
        If the family is not absolutely symmetric or ``sigma(Y)`` is not
        generic for it.
    """
    Y = as_cmat(Y)
    tol = DEFAULT.orthogonality if tol is None else tol
    if not family.absolutely_symmetric:
        raise NonGenericData("lifting needs an absolutely symmetric slice family")
    fr = _wide_frame(Y)
    if family.n != fr.sigma.size:
        raise NonGenericData(f"family lives in R^{family.n}, data has {fr.sigma.size} singular values")
    warning = _spectrum_warning(fr.sigma, fro(Y))
    y = fr.sigma
    crit = ed_critical(family, y)
    out = []
    for x, basis in zip(crit.points, crit.tangents):
        p = _point(Y, fr, x, basis, tol)
        p.warning = warning
        out.append(p)
    return out


def eckart_young(Y, k: int, tol: float | None = None) -> list[HdCriticalPoint]:
    """The ``binom(r, k)`` critical points of ``Y`` on matrices of rank <= k.

    Points are ordered by the lexicographic order of the kept index sets, so
    the first one is the truncated SVD.
    """
    Y = as_cmat(Y)
    tol = DEFAULT.orthogonality if tol is None else tol
    fr = _wide_frame(Y)
    s = fr.sigma
    r = int(np.count_nonzero(s > DEFAULT.rank_threshold * s[0])) if s[0] > 0 else 0
    if not 1 <= k <= r:
        raise RankTooSmall(f"need 1 <= k <= rank = {r}, got k = {k}")
    warning = _spectrum_warning(s[:r], fro(Y))
    fam = RankAtMost(s.size, k)
    out = []
    for keep in itertools.combinations(range(r), k):
        x = np.zeros(s.size)
        x[list(keep)] = s[list(keep)]
        p = _point(Y, fr, x, tangent_basis(fam, x), tol)
        # exact omitted-sum formula; the computed norm agrees to rounding
        p.distance_sq = float(np.sum(np.delete(s, keep) ** 2))
        p.warning = warning
        out.append(p)
    return out


def hd_poly(Y, r: int) -> HdPoly:
    """Monic polynomial in ``t^2`` whose roots are the Eckart-Young distances.

    Roots are ``sum_{j not in I} sigma_j^2`` over all ``r``-subsets ``I``.
    """
    Y = as_cmat(Y)
    s2 = _wide_frame(Y).sigma ** 2
    m = s2.size
    if not 1 <= r <= m:
        raise ValueError(f"need 1 <= r <= {m}, got {r}")
    if m > MAX_HDPOLY_M:
        raise ValueError(f"hd_poly expands binom(m, r) factors; m = {m} exceeds {MAX_HDPOLY_M}")
    total = s2.sum()
    roots = [total - s2[list(I)].sum() for I in itertools.combinations(range(m), r)]
    coeffs = np.array([1.0])
    for rho in roots:
        # multiply by (T - rho) in ascending order
        coeffs = np.concatenate([[0.0], coeffs]) - rho * np.concatenate([coeffs, [0.0]])
    assert coeffs.size == math.comb(m, r) + 1
    return HdPoly(coeffs)


@dataclass(frozen=True)
class SimCheck:
    ok: bool
    A: RealDiag
    off_diagonal: float
    imag_diagonal: float


def sim_decomposition_check(Y, X, tol: float = 1e-6) -> SimCheck:
    """Whether ``U^* X V`` is real diagonal in the SVD frame of ``Y``."""
    Y = as_cmat(Y)
    X = as_cmat(X)
    if X.shape != Y.shape:
        raise ShapeMismatch(f"shapes differ: {Y.shape} vs {X.shape}")
    fr = _wide_frame(Y)
    _spectrum_warning(fr.sigma, fro(Y))
    Xw = X.conj().T if fr.flipped else X
    A = fr.U.conj().T @ Xw @ fr.V
    n = A.shape[0]
    d = A[np.arange(n), np.arange(n)]
    off = A.copy()
    off[np.arange(n), np.arange(n)] = 0.0
    off_mag = float(np.max(np.abs(off))) if off.size else 0.0
    imag = float(np.max(np.abs(d.imag)))
    bound = tol * fro(X)
    return SimCheck(ok=off_mag <= bound and imag <= bound, A=RealDiag(n, A.shape[1], d.real.copy()),
                    off_diagonal=off_mag, imag_diagonal=imag)
