"""Dense complex matrices: Hermitian form, SVD, Haar unitaries, skew bases.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The real inner
product used throughout the package is ``q(A, B) = Re <A, B>`` with
``<A, B> = Tr(A B^*)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from ._config import DEFAULT
from .errors import ConvergenceFailure, NotSquare, ParseError, ShapeMismatch


def as_cmat(A) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.size == 0:
        raise ShapeMismatch(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ParseError("matrix has non-finite entries")
    return A


def fro(A) -> float:
    return float(np.linalg.norm(A))


def hermitian_inner(A, B) -> complex:
    """``Tr(A B^*)``; its real part is the real inner product ``q(A, B)``."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return complex(np.sum(A * B.conj()))


def q_inner(A, B) -> float:
    return hermitian_inner(A, B).real


def realify(A) -> np.ndarray:
    """Real coordinates (Re entries, then Im entries), row-major.

    The Euclidean dot product of two realified matrices equals ``q``.
    """
    A = np.asarray(A, dtype=np.complex128)
    return np.concatenate([A.real.ravel(), A.imag.ravel()])


def unrealify(z, rows: int, cols: int) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    k = rows * cols
    return (z[:k] + 1j * z[k:]).reshape(rows, cols)


def rect_diag(d, rows: int, cols: int) -> np.ndarray:
    """The ``rows x cols`` matrix with ``d`` on the main diagonal."""
    D = np.zeros((rows, cols), dtype=np.complex128)
    d = np.asarray(d)
    k = min(rows, cols, d.size)
    D[np.arange(k), np.arange(k)] = d[:k]
    return D


@dataclass(frozen=True)
class RealDiag:
    n: int
    t: int
    d: np.ndarray

    def matrix(self) -> np.ndarray:
        return rect_diag(self.d, self.n, self.t)


@dataclass(frozen=True)
class SvdFactors:
    """``A = U @ rect_diag(sigma) @ V^*`` with sigma descending."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        S = rect_diag(self.sigma, self.U.shape[0], self.V.shape[0])
        return self.U @ S @ self.V.conj().T

    def residuals(self, A) -> dict:
        n, t = self.U.shape[0], self.V.shape[0]
        return {
            "reconstruction": fro(self.reconstruct() - A),
            "U_orthonormality": fro(self.U.conj().T @ self.U - np.eye(n)),
            "V_orthonormality": fro(self.V.conj().T @ self.V - np.eye(t)),
        }


def _phase_anchor(v: np.ndarray) -> complex:
    """Unit phase of the largest-magnitude entry (lowest index on ties)."""
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        return 1.0
    # relative tie window keeps the choice stable under rounding noise
    k = int(np.flatnonzero(mags >= top * (1.0 - 1e-12))[0])
    return v[k] / mags[k]


def _svd_wide(A: np.ndarray, tol: float, max_sweeps: int) -> SvdFactors:
    n, t = A.shape
    R = np.ascontiguousarray(A.copy())
    Jt = np.ascontiguousarray(np.eye(n, dtype=np.complex128))
    sweeps = kernels.jacobi_rows(R, Jt, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceFailure(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")
    U = Jt.T.copy()
    norms = np.sqrt(np.sum(np.abs(R) ** 2, axis=1))
    order = np.argsort(-norms, kind="stable")
    sigma = norms[order]
    U = U[:, order]
    R = R[order]

    floor = sigma[0] * 1e-14 if sigma.size and sigma[0] > 0 else 0.0
    live = sigma > floor
    k = int(np.count_nonzero(live))
    V = np.zeros((t, t), dtype=np.complex128)
    V[:, :k] = (R[:k].conj() / sigma[:k, None]).T
    if k < t:
        basis = np.linalg.qr(V[:, :k], mode="complete")[0] if k else np.eye(t, dtype=np.complex128)
        V[:, k:] = basis[:, k:]
    if k < n:
        # the dropped rows carry at most 1e-14 of the mass; keep them honest
        sigma = sigma.copy()
        sigma[k:] = np.where(sigma[k:] > 0, sigma[k:], 0.0)

    for j in range(t):
        ph = _phase_anchor(V[:, j])
        V[:, j] = V[:, j] / ph
        if j < n:
            U[:, j] = U[:, j] / ph
    return SvdFactors(U=U, sigma=sigma, V=V, sweeps=sweeps)


def svd(A, tol: float | None = None, max_sweeps: int | None = None) -> SvdFactors:
    """Singular value decomposition by one-sided Jacobi rotations.

    Singular values come back descending; each right singular vector is
    rotated so that its largest-magnitude entry is real positive, which makes
    the factors reproducible. Tall inputs are handled through ``A^*``.

    Raises
    ------
    ConvergenceFailure
        If the sweep cap is exceeded.
    """
    A = as_cmat(A)
    max_sweeps = DEFAULT.svd_max_sweeps if max_sweeps is None else max_sweeps
    n, t = A.shape
    if tol is None:
        tol = DEFAULT.svd_offdiag * max(n, t, 2)
    if n <= t:
        return _svd_wide(A, tol, max_sweeps)
    f = _svd_wide(A.conj().T, tol, max_sweeps)
    # A^* = U' S V'^*  =>  A = V' S U'^*; re-anchor phases on the new right factor
    U, V = f.V.copy(), f.U.copy()
    m = f.sigma.size
    for j in range(m):
        ph = _phase_anchor(V[:, j])
        V[:, j] /= ph
        U[:, j] /= ph
    return SvdFactors(U=U, sigma=f.sigma, V=V, sweeps=f.sweeps)


def random_unitary(n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_ginibre(n: int, t: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, t)) + 1j * rng.standard_normal((n, t))


def herm_skew_split(A) -> tuple[np.ndarray, np.ndarray]:
    A = as_cmat(A)
    if A.shape[0] != A.shape[1]:
        raise NotSquare(f"expected a square matrix, got {A.shape}")
    Ah = A.conj().T
    return (A + Ah) / 2, (A - Ah) / 2


def skew_basis(n: int) -> list[np.ndarray]:
    """Real basis of the skew-Hermitian ``n x n`` matrices, q-orthogonal.

    Order: ``i e_k e_k^T``, then ``e_k e_l^T - e_l e_k^T`` and
    ``i (e_k e_l^T + e_l e_k^T)`` for ``k < l``.
    """
    out = []
    for k in range(n):
        Z = np.zeros((n, n), dtype=np.complex128)
        Z[k, k] = 1j
        out.append(Z)
    for k in range(n):
        for l in range(k + 1, n):
            Z = np.zeros((n, n), dtype=np.complex128)
            Z[k, l], Z[l, k] = 1.0, -1.0
            out.append(Z)
            Z = np.zeros((n, n), dtype=np.complex128)
            Z[k, l] = Z[l, k] = 1j
            out.append(Z)
    return out


def numerical_rank(M, rtol: float) -> int:
    s = np.linalg.svd(np.asarray(M), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


# --- JSON ------------------------------------------------------------------

def matrix_to_dict(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def matrix_from_dict(obj) -> np.ndarray:
    try:
        n, t = int(obj["rows"]), int(obj["cols"])
        rows = obj["entries"]
        if len(rows) != n or any(len(r) != t for r in rows):
            raise ParseError(f"entries do not match declared shape {n}x{t}")
        A = np.array([[complex(float(re), float(im)) for re, im in r] for r in rows],
                     dtype=np.complex128)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix object: {exc}") from exc
    if n < 1 or t < 1:
        raise ParseError("rows and cols must be positive")
    return as_cmat(A)


def dumps_matrix(A) -> str:
    # json emits floats with repr(), i.e. shortest round-trip decimals
    return json.dumps(matrix_to_dict(A))


def loads_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return matrix_from_dict(obj)


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return loads_matrix(fh.read())
