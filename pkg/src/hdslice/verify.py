"""Independent certification of HD critical points.

Nothing here relies on the slice reduction: tangent spaces are assembled
from unitary orbit generators or from constraint Jacobians, and the
brute-force oracle solves the real Lagrange system on 2 x 2 matrices
directly.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._config import DEFAULT
from .cxmat import (
    as_cmat,
    fro,
    herm_skew_split,
    hermitian_inner,
    numerical_rank,
    q_inner,
    random_ginibre,
    realify,
    rect_diag,
    skew_basis,
    unrealify,
)
from .errors import DegenerateY, ShapeMismatch, SolverFailure


# --- tangent frames and the criticality oracle ------------------------------

@dataclass
class TangentFrame:
    generators: list
    rank: int


def _frame_rank(generators) -> int:
    if not generators:
        return 0
    return numerical_rank(np.array([realify(G) for G in generators]), DEFAULT.frame_rank)


def tangent_frame(U, x, V, slice_tangent_basis) -> TangentFrame:
    """Real spanning set of the tangent space at ``U diag(x) V^*``.

    Orbit generators ``U Z diag(x) V^*`` and ``U diag(x) W^* V^*`` for skew
    ``Z``, ``W``, plus ``U diag(a) V^*`` for each slice tangent ``a``.
    """
    U = np.asarray(U, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    n, t = U.shape[0], V.shape[0]
    D = rect_diag(x, n, t)
    Vh = V.conj().T
    gens = [U @ Z @ D @ Vh for Z in skew_basis(n)]
    gens += [U @ D @ W.conj().T @ Vh for W in skew_basis(t)]
    gens += [U @ rect_diag(a, n, t) @ Vh for a in slice_tangent_basis]
    return TangentFrame(gens, _frame_rank(gens))


def is_hd_critical(Y, X, frame: TangentFrame, tol: float | None = None) -> tuple[bool, float]:
    """``max_G |q(Y - X, G)| / (|Y - X| |G| + delta)`` against ``tol``."""
    tol = DEFAULT.orthogonality if tol is None else tol
    Y = np.asarray(Y, dtype=np.complex128)
    X = np.asarray(X, dtype=np.complex128)
    if Y.shape != X.shape:
        raise ShapeMismatch(f"shapes differ: {Y.shape} vs {X.shape}")
    R = Y - X
    nr = fro(R)
    worst = 0.0
    for G in frame.generators:
        worst = max(worst, abs(q_inner(R, G)) / (nr * fro(G) + DEFAULT.residual_guard))
    return worst <= tol, worst


# --- orthogonal splitting ----------------------------------------------------

@dataclass
class SplittingReport:
    cross_gram_max: float
    orbit_rank: int
    expected_rank: int
    total_rank: int
    ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def check_splitting(y, n: int, t: int) -> SplittingReport:
    """Real diagonals are q-orthogonal to the orbit tangent at ``diag(y)``.

    Also checks that the orbit tangent has real dimension ``2nt - n`` so the
    two pieces fill the whole space.
    """
    y = np.asarray(y, dtype=float)
    if y.size != n or n > t:
        raise DegenerateY(f"need len(y) = n <= t, got len(y) = {y.size}, n = {n}, t = {t}")
    a = np.abs(y)
    scale = max(1.0, float(a.max()))
    gaps = np.abs(a[:, None] - a[None, :])[np.triu_indices(n, 1)]
    if np.any(a <= DEFAULT.genericity_eps * scale) or (gaps.size and gaps.min() <= DEFAULT.genericity_eps * scale):
        raise DegenerateY(f"y = {y.tolist()} needs nonzero entries with distinct squares")
    D = rect_diag(y, n, t)
    gens = [Z @ D for Z in skew_basis(n)] + [D @ W.conj().T for W in skew_basis(t)]
    gens = [G for G in gens if fro(G) > 0.0]
    diags = [rect_diag(np.eye(n)[k], n, t) for k in range(n)]
    cross = max(abs(q_inner(G, E)) / fro(G) for G in gens for E in diags)
    rank = _frame_rank(gens)
    total = _frame_rank(gens + diags)
    expected = 2 * n * t - n
    return SplittingReport(float(cross), rank, expected, total,
                           ok=cross <= 1e-10 and rank == expected and total == 2 * n * t)


# --- lemma suites ------------------------------------------------------------

@dataclass
class SuiteReport:
    name: str
    passed: bool
    trials: int
    failures: int
    worst: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "trials": self.trials,
                "failures": self.failures, "worst": self.worst, "notes": self.notes}


def _nullspace(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal rows spanning the real nullspace of ``M``."""
    _, s, vt = np.linalg.svd(M)
    top = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > rtol * top)) if top > 0 else 0
    return vt[rank:]


def rd_nullspace(d, n: int, t: int) -> tuple[int, float]:
    """Real solutions ``A`` of {A D^* Hermitian, D^* A Hermitian}.

    Returns the dimension and the worst off-diagonal or imaginary mass of a
    unit basis vector.
    """
    D = rect_diag(d, n, t)
    Dh = D.conj().T
    cols = []
    for k in range(2 * n * t):
        e = np.zeros(2 * n * t)
        e[k] = 1.0
        A = unrealify(e, n, t)
        _, K1 = herm_skew_split(A @ Dh)
        _, K2 = herm_skew_split(Dh @ A)
        cols.append(np.concatenate([realify(K1), realify(K2)]))
    null = _nullspace(np.array(cols).T)
    worst = 0.0
    for v in null:
        A = unrealify(v, n, t)
        off = A.copy()
        m = min(n, t)
        off[np.arange(m), np.arange(m)] = 1j * A[np.arange(m), np.arange(m)].imag
        worst = max(worst, fro(off))
    return len(null), worst


def lemma_rd_suite(seed: int = 0, trials: int = 100) -> SuiteReport:
    """Real diagonal ``D`` with distinct nonzero ``|d_i|``: only real diagonal solutions."""
    rng = np.random.default_rng(seed)
    fails, worst = 0, 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        t = int(rng.integers(n, 6))
        while True:
            d = rng.uniform(0.2, 3.0, n) * rng.choice([-1.0, 1.0], n)
            a = np.sort(np.abs(d))
            if n == 1 or np.min(np.diff(a)) > 0.05:
                break
        dim, mass = rd_nullspace(d, n, t)
        worst = max(worst, mass)
        fails += dim != n or mass > 1e-9
    dim_deg, _ = rd_nullspace([1.0, 1.0], 2, 2)
    notes = [f"repeated entries diag(1,1) give dimension {dim_deg} > 2 (hypothesis violated, expected)"]
    return SuiteReport("rd", fails == 0 and dim_deg > 2, trials, fails, {"offdiag_mass": worst}, notes)


def unit_trace_value() -> complex:
    """``Tr((A - U)(U diag(i, -2i, 3i))^*)`` for ``A = diag(i, 2, 3)``, ``U = diag(i, 1, 1)``."""
    A = np.diag([1j, 2.0, 3.0])
    U = np.diag([1j, 1.0, 1.0])
    return hermitian_inner(A - U, U @ np.diag([1j, -2j, 3j]))


def real_orthogonal_vector(W: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """A random ``v`` with ``Re <v, w> = Re <v, i w> = 0`` for every column ``w`` of ``W``."""
    rows = []
    for w in W.T:
        for u in (w, 1j * w):
            rows.append(np.concatenate([u.real, u.imag]))
    null = _nullspace(np.array(rows))
    z = rng.standard_normal(len(null)) @ null
    N = W.shape[0]
    return z[:N] + 1j * z[N:]


def lemma_complex_suite(seed: int = 0, trials: int = 100) -> SuiteReport:
    """Real orthogonality to ``W`` and ``iW`` forces full complex orthogonality."""
    rng = np.random.default_rng(seed)
    fails, worst = 0, 0.0
    for _ in range(trials):
        N = int(rng.integers(2, 6))
        k = int(rng.integers(1, N))
        W = random_ginibre(N, k, rng)
        v = real_orthogonal_vector(W, rng)
        r = max(abs(np.vdot(w, v)) / (np.linalg.norm(v) * np.linalg.norm(w)) for w in W.T)
        worst = max(worst, r)
        fails += r > 1e-10
    val = unit_trace_value()
    dev = abs(val - (-4j))
    notes = [f"unitary-group trace value {val.real:+.3g}{val.imag:+.3g}i"]
    return SuiteReport("complex", fails == 0 and dev <= 1e-12, trials, fails,
                       {"inner_product": worst, "trace_value_error": dev}, notes)


def skew_property_suite(seed: int = 0, trials: int = 100) -> SuiteReport:
    """Hermitian and skew-Hermitian parts are q-orthogonal, and the skew part
    of ``A`` is bounded by its q-pairings with the skew basis."""
    rng = np.random.default_rng(seed)
    fails, w_split, w_bound = 0, 0.0, 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 6))
        A = random_ginibre(n, n, rng)
        H, K = herm_skew_split(A)
        split = abs(q_inner(H, K)) / fro(A) ** 2
        exact = np.array_equal(H + K, A) or fro(H + K - A) <= 1e-15 * fro(A)
        Hdev = fro(H - H.conj().T) + fro(K + K.conj().T)
        basis = skew_basis(n)
        eps = max(abs(q_inner(A, Z)) / fro(Z) for Z in basis)
        ratio = fro(A - A.conj().T) / (2 * n * eps) if eps > 0 else 0.0
        herm_pair = max(abs(q_inner(H, Z)) for Z in basis) / fro(A)
        w_split, w_bound = max(w_split, split, herm_pair), max(w_bound, ratio)
        fails += not (split <= 1e-14 and exact and Hdev == 0.0 and ratio <= 1.0 + 1e-12 and herm_pair <= 1e-14)
    return SuiteReport("skew", fails == 0, trials, fails,
                       {"hermitian_skew_pairing": w_split, "skew_bound_ratio": w_bound})


def splitting_suite(seed: int = 0, trials: int = 100) -> SuiteReport:
    rng = np.random.default_rng(seed)
    fails, worst = 0, 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        t = int(rng.integers(n, 6))
        while True:
            y = rng.uniform(0.2, 3.0, n) * rng.choice([-1.0, 1.0], n)
            if np.min(np.diff(np.sort(np.abs(y)))) > 0.05:
                break
        rep = check_splitting(y, n, t)
        worst = max(worst, rep.cross_gram_max)
        fails += not rep.ok
    return SuiteReport("splitting", fails == 0, trials, fails, {"cross_gram": worst})


# --- brute-force Lagrange oracle on 2 x 2 matrices ---------------------------

def _det_forms() -> tuple[np.ndarray, np.ndarray]:
    """Symmetric ``H_P``, ``H_Q`` with ``det X = z^T H_P z / 2 + i z^T H_Q z / 2``.

    ``z = realify(X)``: Re x00, Re x01, Re x10, Re x11, then the imaginary parts.
    """
    r = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3}
    im = {k: v + 4 for k, v in r.items()}
    HP, HQ = np.zeros((8, 8)), np.zeros((8, 8))

    def put(H, a, b, c):
        H[a, b] += c
        H[b, a] += c

    # det = x00 x11 - x01 x10, Re(ab) = ra rb - ia ib, Im(ab) = ra ib + ia rb
    for (p, q), sgn in ((((0, 0), (1, 1)), 1.0), (((0, 1), (1, 0)), -1.0)):
        put(HP, r[p], r[q], sgn)
        put(HP, im[p], im[q], -sgn)
        put(HQ, r[p], im[q], sgn)
        put(HQ, im[p], r[q], sgn)
    return HP, HQ


_HP, _HQ = _det_forms()
_BATCHES = 4
VARIETIES = ("rank1", "detmag")


def _constraints(variety: str, Z: np.ndarray):
    """Values (S, m), Jacobians (S, m, 8) and Hessians (S, m, 8, 8)."""
    gP = Z @ _HP
    gQ = Z @ _HQ
    P = 0.5 * np.sum(gP * Z, axis=1)
    Q = 0.5 * np.sum(gQ * Z, axis=1)
    S = Z.shape[0]
    if variety == "rank1":
        g = np.stack([P, Q], axis=1)
        J = np.stack([gP, gQ], axis=1)
        H = np.tile(np.stack([_HP, _HQ]), (S, 1, 1, 1))
        return g, J, H
    g = (P * P + Q * Q - 1.0)[:, None]
    J = (2 * P[:, None] * gP + 2 * Q[:, None] * gQ)[:, None, :]
    H = 2 * (gP[:, :, None] * gP[:, None, :] + P[:, None, None] * _HP
             + gQ[:, :, None] * gQ[:, None, :] + Q[:, None, None] * _HQ)
    return g, J, H[:, None]


def _lagrange_residual(variety, Z, L, w):
    g, J, H = _constraints(variety, Z)
    stat = 2 * (Z - w) + np.einsum("smk,sm->sk", J, L)
    return np.concatenate([stat, g], axis=1), g, J, H


def _project(variety, Z, iters: int = 30):
    """Minimum-norm Gauss-Newton steps onto the constraint set."""
    for _ in range(iters):
        g, J, _ = _constraints(variety, Z)
        JJ = J @ J.transpose(0, 2, 1) + 1e-14 * np.eye(J.shape[1])
        step = np.einsum("smk,sm->sk", J, np.linalg.solve(JJ, g[..., None])[..., 0])
        Z = Z - step
    return Z


def _deflation(Z: np.ndarray, roots: np.ndarray, tau: np.ndarray | None = None):
    """Deflation factor ``prod(1/|z - r|^2 + 1)`` and the step correction.

    Newton on ``m F`` has step ``tau / (1 + grad(m) . tau / m)`` when
    ``tau`` is the Newton step on ``F``.
    """
    if roots.size == 0:
        return np.ones(len(Z)), None if tau is None else tau
    d = Z[:, None, :] - roots[None, :, :]
    d2 = np.maximum(np.sum(d * d, axis=2), 1e-300)
    mi = 1.0 / d2 + 1.0
    m = np.prod(mi, axis=1)
    if tau is None:
        return m, None
    dot = np.einsum("srk,sk->sr", d, tau[:, :8])
    ratio = np.sum(-2.0 * dot / d2**2 / mi, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = 1.0 / (1.0 + ratio)
    scale = np.where(np.isfinite(scale), scale, 1.0)
    return m, tau * scale[:, None]


def _lagrange_newton(variety, Z, w, max_iter: int, tol: float, roots=None, halvings: int = 4):
    """Damped, deflated Newton on the Lagrange system for a stack of starts.

    The step is halved while the deflated residual grows; when the halvings
    run out the full step is taken, which lets runs leave shallow basins of
    the residual that hold no solution.
    """
    m = 2 if variety == "rank1" else 1
    roots = np.zeros((0, 8)) if roots is None else np.asarray(roots).reshape(-1, 8)
    g, J, _ = _constraints(variety, Z)
    JJ = J @ J.transpose(0, 2, 1) + 1e-14 * np.eye(m)
    L = -np.linalg.solve(JJ, (J @ (2 * (Z - w))[..., None]))[..., 0]
    F, _, J, H = _lagrange_residual(variety, Z, L, w)
    norm = np.linalg.norm(F, axis=1)
    live = np.isfinite(norm)
    for _ in range(max_iter):
        act = live & (norm > tol)
        if not act.any():
            break
        idx = np.flatnonzero(act)
        K = np.zeros((idx.size, 8 + m, 8 + m))
        K[:, :8, :8] = 2 * np.eye(8) + np.einsum("sm,smij->sij", L[idx], H[idx])
        K[:, :8, 8:] = J[idx].transpose(0, 2, 1)
        K[:, 8:, :8] = J[idx]
        try:
            step = np.linalg.solve(K, F[idx][..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.stack([np.linalg.lstsq(k, f, rcond=None)[0] for k, f in zip(K, F[idx])])
        m0, step = _deflation(Z[idx], roots, step)
        merit = m0 * norm[idx]
        alpha = np.ones(idx.size)
        for h in range(halvings + 1):
            last = h == halvings
            a = np.ones_like(alpha) if last else alpha
            Zt = Z[idx] - a[:, None] * step[:, :8]
            Lt = L[idx] - a[:, None] * step[:, 8:]
            Ft, _, Jt, Ht = _lagrange_residual(variety, Zt, Lt, w)
            nt = np.linalg.norm(Ft, axis=1)
            mt, _ = _deflation(Zt, roots)
            good = np.isfinite(nt) & (last | (mt * nt < merit))
            q = idx[good]
            Z[q], L[q], F[q], norm[q], J[q], H[q] = Zt[good], Lt[good], Ft[good], nt[good], Jt[good], Ht[good]
            keep = ~good
            idx, step, merit, alpha = idx[keep], step[keep], merit[keep], alpha[keep] * 0.5
            if not idx.size:
                break
        live[idx] = False
    return Z, L, norm


def constraint_frame(variety: str, X) -> TangentFrame:
    """Tangent frame from the nullspace of the constraint Jacobian at ``X``."""
    z = realify(as_cmat(X))[None, :]
    _, J, _ = _constraints(variety, z)
    gens = [unrealify(v, 2, 2) for v in _nullspace(J[0])]
    return TangentFrame(gens, _frame_rank(gens))


def brute_force_hd(Y, variety: str, starts: int | None = None, seed: int = 0,
                   expected: int | None = None, tol: float | None = None) -> list:
    """HD critical points of a 2 x 2 ``Y`` by multistart Newton on the Lagrange system.

    ``variety`` is ``"rank1"`` (Re det = Im det = 0) or ``"detmag"``
    (``|det|^2 = 1``). Solutions are clustered at the configured radius and
    certified against a tangent frame from the constraint Jacobian. With
    ``expected`` set, fewer certified solutions raise ``SolverFailure``.
    """
    from .lift import HdCriticalPoint, _spectrum_warning, _wide_frame

    Y = as_cmat(Y)
    if Y.shape != (2, 2):
        raise ShapeMismatch(f"brute force runs on 2 x 2 matrices, got {Y.shape}")
    if variety not in VARIETIES:
        raise ValueError(f"variety must be one of {VARIETIES}")
    _spectrum_warning(_wide_frame(Y).sigma, fro(Y))
    starts = DEFAULT.newton_starts if starts is None else starts
    tol = DEFAULT.orthogonality if tol is None else tol
    rng = np.random.default_rng(seed)
    w = realify(Y)
    scale = max(1.0, float(np.linalg.norm(w)))
    # half the starts sit around Y, the rest around 0, at several scales so
    # that saddles and far critical points get basins too
    spread = rng.choice([0.05, 0.25, 0.75, 1.5, 3.0], size=starts)[:, None] * scale / math.sqrt(8)
    centre = np.where((np.arange(starts) % 2 == 0)[:, None], w, 0.0)
    Z0 = _project(variety, centre + spread * rng.standard_normal((starts, 8)))
    # batches run in sequence; each deflates the solutions found so far
    found = np.zeros((0, 8))
    Zs, Rs = [], []
    for batch in np.array_split(np.arange(starts), _BATCHES):
        Z, _, res = _lagrange_newton(variety, Z0[batch], w, DEFAULT.newton_max_iter,
                                     1e-12 * scale, roots=found)
        for z in Z[np.isfinite(res) & (res <= 1e-9 * scale)]:
            if not len(found) or np.min(np.max(np.abs(found - z), axis=1)) > DEFAULT.cluster_radius:
                found = np.vstack([found, z])
        Zs.append(Z)
        Rs.append(res)
    Z, res = np.concatenate(Zs), np.concatenate(Rs)

    ok = np.isfinite(res) & (res <= 1e-9 * scale)
    _, J, _ = _constraints(variety, Z)
    sv = np.linalg.svd(J, compute_uv=False)
    ok &= sv[:, -1] > 1e-8 * np.maximum(sv[:, 0], 1e-300)
    cand = [(float(r), z) for r, z, good in zip(res, Z, ok) if good]
    cand.sort(key=lambda c: c[0])
    reps = []
    for r, z in cand:
        if all(np.max(np.abs(z - q)) > DEFAULT.cluster_radius for _, q in reps):
            reps.append((r, z))
    reps.sort(key=lambda c: tuple(c[1]))

    out = []
    for _, z in reps:
        X = unrealify(z, 2, 2)
        flag, resid = is_hd_critical(Y, X, constraint_frame(variety, X), tol)
        if flag:
            out.append(HdCriticalPoint(X=X, source_x=None, distance_sq=fro(Y - X) ** 2,
                                       criticality_residual=resid))
    if expected is not None and len(out) < expected:
        raise SolverFailure(f"brute force found {len(out)} certified solutions, expected {expected}")
    return out


def hausdorff(As, Bs) -> float:
    """Hausdorff distance between two finite sets of matrices (Frobenius norm)."""
    As, Bs = list(As), list(Bs)
    if not As and not Bs:
        return 0.0
    if not As or not Bs:
        return math.inf
    D = np.array([[fro(np.asarray(a) - np.asarray(b)) for b in Bs] for a in As])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


@dataclass
class OracleComparison:
    variety: str
    lifted: int
    brute: int
    hausdorff: float
    sim_ok: bool
    worst_sim: float

    @property
    def ok(self) -> bool:
        return self.lifted == self.brute and self.hausdorff <= 1e-6 and self.sim_ok


def oracle_agreement(Y, variety: str, starts: int | None = None, seed: int = 0) -> OracleComparison:
    """Compare the lifted critical set with the brute-force one."""
    from .lift import lift_critical, sim_decomposition_check
    from .slices import DetMagOne, RankAtMost

    family = RankAtMost(2, 1) if variety == "rank1" else DetMagOne()
    lifted = lift_critical(Y, family)
    brute = brute_force_hd(Y, variety, starts, seed)
    checks = [sim_decomposition_check(Y, p.X, 1e-6) for p in brute]
    worst = max((max(c.off_diagonal, c.imag_diagonal) / max(fro(p.X), 1e-300)
                 for c, p in zip(checks, brute)), default=0.0)
    return OracleComparison(variety, len(lifted), len(brute),
                            hausdorff([p.X for p in lifted], [p.X for p in brute]),
                            all(c.ok for c in checks), float(worst))


def oracle_suite(seed: int = 0, trials: int = 5) -> SuiteReport:
    rng = np.random.default_rng(seed)
    fails, worst_h = 0, 0.0
    for k in range(trials):
        Y = random_ginibre(2, 2, rng)
        for variety in VARIETIES:
            cmp = oracle_agreement(Y, variety, seed=seed + k)
            worst_h = max(worst_h, cmp.hausdorff)
            fails += not cmp.ok
    return SuiteReport("oracle", fails == 0, trials * len(VARIETIES), fails, {"hausdorff": worst_h})


SUITES = {
    "rd": lemma_rd_suite,
    "complex": lemma_complex_suite,
    "skew": skew_property_suite,
    "splitting": splitting_suite,
    "oracle": oracle_suite,
}


def run_suites(names, seed: int = 0, threads: int = 0) -> list[SuiteReport]:
    """Run the named suites (``"all"`` for every one); reports keep the given order."""
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)} or 'all'")
    if threads == 1:
        return [SUITES[n](seed) for n in names]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(lambda n: SUITES[n](seed), names))
