"""Singular-value slices S in R^n and their real ED critical points.

A slice family knows its defining equations, how to produce a tangent basis
at a smooth point, and how to solve the critical equations for a data vector
``y``. Plane curves without a structured solver go through resultant
elimination.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from ._config import DEFAULT
from .errors import NonGenericData, ParseError, SolverFailure
from numpy.polynomial import chebyshev as cheb

from .rpoly import BiPoly, RPoly, _resultant_cheb, cubic_discriminant, real_roots

x1_, x2_ = BiPoly.x1(), BiPoly.x2()


# --- family descriptors ----------------------------------------------------

@dataclass(frozen=True)
class RankAtMost:
    n: int
    r: int
    absolutely_symmetric = True

    def to_json(self):
        return {"family": "rank", "n": self.n, "r": self.r}


@dataclass(frozen=True)
class AllOnes:
    n: int
    absolutely_symmetric = True

    def to_json(self):
        return {"family": "allones", "n": self.n}


@dataclass(frozen=True)
class DetMagOne:
    n = 2
    absolutely_symmetric = True

    def to_json(self):
        return {"family": "detmag"}


@dataclass(frozen=True)
class ParabolaPair:
    """The union {x2 = x1^2} u {x1 = x2^2}; symmetric under the swap only."""

    n = 2
    absolutely_symmetric = False

    def to_json(self):
        return {"family": "parabola"}


@dataclass(frozen=True)
class FermatSphere:
    n: int
    d: int
    absolutely_symmetric = True

    def __post_init__(self):
        if self.d < 2 or self.d % 2:
            raise ValueError("Fermat exponent must be even and >= 2")

    def to_json(self):
        return {"family": "fermat", "n": self.n, "d": self.d}


@dataclass(frozen=True)
class AxisUnion:
    n: int
    absolutely_symmetric = True

    def to_json(self):
        return {"family": "axes", "n": self.n}


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    f: BiPoly
    n = 2

    @property
    def absolutely_symmetric(self) -> bool:
        c = self.f.c
        i, j = np.indices(c.shape)
        flips = [c * (-1.0) ** i, c * (-1.0) ** j]
        ok = all(np.allclose(m, c) or np.allclose(m, -c) for m in flips)
        sq = np.zeros((max(c.shape),) * 2)
        sq[: c.shape[0], : c.shape[1]] = c
        return ok and (np.allclose(sq, sq.T) or np.allclose(sq, -sq.T))

    def to_json(self):
        return {"family": "curve", "coeffs": self.f.c.tolist()}

    def __eq__(self, other):
        return isinstance(other, PlaneCurve) and np.array_equal(self.f.c, other.f.c)

    def __hash__(self):
        return hash(self.f.c.tobytes())


SliceFamily = RankAtMost | AllOnes | DetMagOne | ParabolaPair | FermatSphere | AxisUnion | PlaneCurve


def family_from_json(obj) -> SliceFamily:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid family JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        kind = obj["family"]
        if kind == "detmag":
            return DetMagOne()
        if kind == "parabola":
            return ParabolaPair()
        if kind == "fermat":
            return FermatSphere(int(obj.get("n", 2)), int(obj["d"]))
        if kind == "rank":
            return RankAtMost(int(obj["n"]), int(obj["r"]))
        if kind == "allones":
            return AllOnes(int(obj["n"]))
        if kind == "axes":
            return AxisUnion(int(obj["n"]))
        if kind == "curve":
            return PlaneCurve(BiPoly(obj["coeffs"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed family descriptor: {exc}") from exc
    raise ParseError(f"unknown family {obj.get('family')!r}")


def family_dim(family) -> int:
    return family.n


def fermat_poly(d: int) -> BiPoly:
    c = np.zeros((d + 1, d + 1))
    c[d, 0] = c[0, d] = 1.0
    c[0, 0] = -1.0
    return BiPoly(c)


def detmag_poly() -> BiPoly:
    return BiPoly.from_terms({(2, 2): 1.0, (0, 0): -1.0})


def parabola_poly() -> BiPoly:
    return (x2_ - x1_ * x1_) * (x1_ - x2_ * x2_)


def defining_poly(family) -> BiPoly | None:
    """The plane-curve equation of a 2-D family, if it has one."""
    if isinstance(family, DetMagOne):
        return detmag_poly()
    if isinstance(family, ParabolaPair):
        return parabola_poly()
    if isinstance(family, FermatSphere) and family.n == 2:
        return fermat_poly(family.d)
    if isinstance(family, PlaneCurve):
        return family.f
    return None


# --- local geometry --------------------------------------------------------

def _branch_poly(family, x, y=None) -> BiPoly | None:
    """Smooth local equation through ``x`` (a single branch for unions).

    At the two points where the parabolas cross, the branch whose normal best
    matches ``x - y`` is taken when ``y`` is given.
    """
    if isinstance(family, DetMagOne):
        s = 1.0 if x[0] * x[1] > 0 else -1.0
        return x1_ * x2_ - BiPoly.const(s)
    if isinstance(family, ParabolaPair):
        a = x2_ - x1_ * x1_
        b = x1_ - x2_ * x2_
        ra = abs(a(*x)) / max(a.scale_at(*x), 1.0)
        rb = abs(b(*x)) / max(b.scale_at(*x), 1.0)
        if y is not None and max(ra, rb) <= DEFAULT.membership:
            def fit(h):
                t = np.array([-h.d2()(*x), h.d1()(*x)])
                return orthogonality_residual(y, x, [t])
            return a if fit(a) <= fit(b) else b
        return a if ra <= rb else b
    return defining_poly(family)


def membership_residual(family, x) -> float:
    """Relative violation of the defining equation(s) at ``x``."""
    x = np.asarray(x, dtype=float)
    if isinstance(family, RankAtMost):
        nz = np.sort(np.abs(x))[::-1]
        return float(nz[family.r:].max() / max(1.0, nz[0])) if family.r < family.n else 0.0
    if isinstance(family, AllOnes):
        return float(np.max(np.abs(np.abs(x) - 1.0)))
    if isinstance(family, AxisUnion):
        a = np.sort(np.abs(x))[::-1]
        return float(a[1:].max() / max(1.0, a[0])) if a.size > 1 else 0.0
    if isinstance(family, FermatSphere) and family.n != 2:
        s = np.sum(x ** family.d)
        return float(abs(s - 1.0) / (np.sum(np.abs(x) ** family.d) + 1.0))
    f = _branch_poly(family, x)
    return float(abs(f(*x)) / max(f.scale_at(*x), 1e-300))


def tangent_basis(family, x, y=None) -> list[np.ndarray]:
    """Tangent vectors of S at a smooth point ``x`` (``y`` picks a branch at crossings)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if isinstance(family, AllOnes):
        return []
    if isinstance(family, (RankAtMost, AxisUnion)):
        a = np.abs(x)
        k = family.r if isinstance(family, RankAtMost) else 1
        support = np.argsort(-a, kind="stable")[:k]
        return [np.eye(n)[i] for i in sorted(support)]
    if isinstance(family, FermatSphere) and family.n != 2:
        grad = family.d * x ** (family.d - 1)
        _, _, vt = np.linalg.svd(grad[None, :])
        return [vt[i] for i in range(1, n)]
    f = _branch_poly(family, x, y)
    g = np.array([f.d1()(*x), f.d2()(*x)])
    return [np.array([-g[1], g[0]])]


def orthogonality_residual(y, x, basis) -> float:
    d = np.asarray(x, float) - np.asarray(y, float)
    nd = np.linalg.norm(d)
    if nd == 0.0 or not basis:
        return 0.0
    return max(abs(d @ a) / (nd * np.linalg.norm(a)) for a in basis)


# --- orbits ------------------------------------------------------------------

def signed_permutations(n: int):
    """Yield (perm, signs) pairs for every element of the signed permutation group."""
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1.0, -1.0), repeat=n):
            yield np.array(perm), np.array(signs)


def apply_signed_perm(perm, signs, x) -> np.ndarray:
    return signs * np.asarray(x, float)[perm]


def symmetrize_orbit(x) -> np.ndarray:
    """Distinct points of the orbit of ``x`` under signed permutations."""
    x = np.asarray(x, dtype=float)
    seen = {}
    for perm, signs in signed_permutations(x.size):
        p = apply_signed_perm(perm, signs, x) + 0.0  # drop signed zeros
        seen.setdefault(tuple(p), p)
    return np.array(sorted(seen.values(), key=tuple))


# --- results -----------------------------------------------------------------

@dataclass
class GenericityReport:
    ok: bool
    reasons: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def to_json(self):
        return {"ok": self.ok, "reasons": list(self.reasons), "values": dict(self.values)}


@dataclass
class EdCriticalSet:
    points: np.ndarray
    residuals: np.ndarray
    genericity_ok: bool
    tangents: list = field(default_factory=list, repr=False)
    diagnostics: GenericityReport | None = None
    excluded_singular: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def to_json(self):
        return {
            "count": len(self.points),
            "points": np.asarray(self.points).tolist(),
            "residuals": np.asarray(self.residuals).tolist(),
            "genericity_ok": self.genericity_ok,
            "diagnostics": self.diagnostics.to_json() if self.diagnostics else None,
        }


def dedupe(points, radius: float | None = None) -> np.ndarray:
    radius = DEFAULT.cluster_radius if radius is None else radius
    out = []
    for p in points:
        if all(np.max(np.abs(p - q)) > radius for q in out):
            out.append(np.asarray(p, float))
    if not out:
        return np.zeros((0, len(points[0]) if len(points) else 0))
    out = np.array(out)
    return out[np.lexsort(out.T[::-1])]


# --- solvers -----------------------------------------------------------------

def _eval_many(polys, x1, x2) -> list[np.ndarray]:
    """Evaluate several BiPolys at the same points with shared power tables."""
    d1 = max(p.c.shape[0] for p in polys)
    d2 = max(p.c.shape[1] for p in polys)
    P1 = x1[:, None] ** np.arange(d1)
    P2 = x2[:, None] ** np.arange(d2)
    return [np.sum((P1[:, : p.c.shape[0]] @ p.c) * P2[:, : p.c.shape[1]], axis=1) for p in polys]


def _newton2(f: BiPoly, g: BiPoly, P: np.ndarray, iters: int = 30) -> np.ndarray:
    """Newton on ``f = g = 0`` for a stack of starting points (rows of ``P``)."""
    polys = [f, g, f.d1(), f.d2(), g.d1(), g.d2()]
    X = np.array(P, dtype=float).reshape(-1, 2)
    live = np.ones(len(X), dtype=bool)
    for _ in range(iters):
        if not live.any():
            break
        x = X[live]
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            F, G, a, b, c, d = _eval_many(polys, x[:, 0], x[:, 1])
            det = a * d - b * c
            step = np.stack([(d * F - b * G) / det, (a * G - c * F) / det], axis=1)
        ok = np.all(np.isfinite(step), axis=1)
        x[ok] -= step[ok]
        X[live] = x
        small = np.max(np.abs(step), axis=1) <= 1e-15 * np.maximum(1.0, np.max(np.abs(x), axis=1))
        idx = np.flatnonzero(live)
        live[idx[~ok | small]] = False
    return X


def normal_system(f: BiPoly, y) -> BiPoly:
    """``(x1 - y1) df/dx2 - (x2 - y2) df/dx1``: zero where x - y is normal."""
    y1, y2 = float(y[0]), float(y[1])
    return (x1_ - BiPoly.const(y1)) * f.d2() - (x2_ - BiPoly.const(y2)) * f.d1()


_CAND_IMAG = 0.05
_NEAR_SINGULAR = 1e-4
_CAND_MERGE = 1e-9


def _project_solve(f: BiPoly, g: BiPoly, radius: float) -> list[np.ndarray]:
    """Candidates from the resultant in ``x1``, back-substituted into ``f``."""
    if f.deg2() == 0 or g.deg2() == 0:
        return []
    coef = _resultant_cheb(f, g, radius)
    top = np.max(np.abs(coef))
    if top == 0.0:
        raise SolverFailure("resultant vanishes identically (common component)")
    coef = cheb.chebtrim(coef / top, 1e-14)
    if coef.size < 2:
        return []
    # clustered roots scatter into the complex plane, so the net is wide;
    # every candidate is certified by Newton afterwards
    z = cheb.chebroots(coef)
    roots = sorted({float(w.real) for w in z if abs(w.imag) <= _CAND_IMAG and abs(w.real) <= 1.0 + _CAND_IMAG})
    out = []
    for s in roots:
        a = radius * s
        fa = f.in_x2(a)
        branch = fa if not fa.is_zero() else g.in_x2(a)
        if branch.is_zero() or branch.degree == 0:
            continue
        for b in real_roots(branch, tol=np.inf):
            out.append((a, b))
    return out


def plane_curve_critical(f: BiPoly, y, radius: float | None = None, both_projections: bool = True):
    """Smooth real critical points of the squared distance from ``y`` on ``{f = 0}``.

    Only solutions with both coordinates inside ``radius`` are searched.
    Returns ``(points, singular)``: the deduplicated smooth critical points
    and any solutions of the critical system that sit on the singular locus.
    """
    y = np.asarray(y, dtype=float)
    g = normal_system(f, y)
    radius = radius or 1.0 + float(np.max(np.abs(y)))
    cands = _project_solve(f, g, radius)
    if both_projections:
        cands += [(b, a) for a, b in _project_solve(f.swapped(), g.swapped(), radius)]
    empty = np.zeros((0, 2))
    if not cands:
        return empty, empty
    C = np.array(cands)
    # both projections usually find the same point; Newton it once
    C = C[np.unique(np.round(C / _CAND_MERGE), axis=0, return_index=True)[1]]
    P = _newton2(f, g, C)
    x1, x2 = P[:, 0], P[:, 1]
    # scales use |x| floored at 1 so that they do not vanish with the residuals at 0
    ax1, ax2 = np.maximum(np.abs(x1), 1.0), np.maximum(np.abs(x2), 1.0)
    keep = np.all(np.isfinite(P), axis=1)
    keep &= np.max(np.abs(P - C), axis=1) <= 0.25 * np.maximum(1.0, np.max(np.abs(C), axis=1))
    with np.errstate(invalid="ignore", over="ignore"):
        fs = BiPoly(np.abs(f.c))
        gs = BiPoly(np.abs(g.c))
        keep &= np.abs(f.at(x1, x2)) <= DEFAULT.membership * np.maximum(fs.at(ax1, ax2), 1e-300)
        keep &= np.abs(g.at(x1, x2)) <= DEFAULT.backsub_residual * np.maximum(gs.at(ax1, ax2), 1e-300)
        f1, f2 = f.d1(), f.d2()
        grad = np.hypot(f1.at(x1, x2), f2.at(x1, x2))
        gscale = np.hypot(BiPoly(np.abs(f1.c)).at(ax1, ax2), BiPoly(np.abs(f2.c)).at(ax1, ax2))
    sing = grad <= DEFAULT.singular_grad * np.maximum(gscale, 1e-300)
    # Newton converges only linearly into a singular point; snap near-singular
    # survivors onto the locus grad f = 0 and reclassify them there
    near = keep & ~sing & (grad <= _NEAR_SINGULAR * np.maximum(gscale, 1e-300))
    if near.any():
        Q = _newton2(f1, f2, P[near])
        q1, q2 = Q[:, 0], Q[:, 1]
        with np.errstate(invalid="ignore", over="ignore"):
            on = np.all(np.isfinite(Q), axis=1)
            on &= np.max(np.abs(Q - P[near]), axis=1) <= 1e3 * DEFAULT.cluster_radius
            qs = fs.at(np.maximum(np.abs(q1), 1.0), np.maximum(np.abs(q2), 1.0))
            on &= np.abs(f.at(q1, q2)) <= DEFAULT.membership * qs
            on &= np.hypot(f1.at(q1, q2), f2.at(q1, q2)) <= DEFAULT.singular_grad * qs
        idx = np.flatnonzero(near)[on]
        P[idx] = Q[on]
        sing[idx] = True
    smooth, singular = P[keep & ~sing], P[keep & sing]
    return (dedupe(smooth) if len(smooth) else empty), (dedupe(singular) if len(singular) else empty)


def _transversality(f: BiPoly, g: BiPoly, p) -> float:
    a = np.array([f.d1()(*p), f.d2()(*p)])
    b = np.array([g.d1()(*p), g.d2()(*p)])
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(abs(a[0] * b[1] - a[1] * b[0]) / (na * nb))


def detmag_quartics(y) -> tuple[RPoly, RPoly]:
    """q_y^+ and q_y^-: t^4 - y1 t^3 +- y2 t - 1."""
    y1, y2 = float(y[0]), float(y[1])
    return RPoly([-1.0, y2, 0.0, -y1, 1.0]), RPoly([-1.0, -y2, 0.0, -y1, 1.0])


def parabola_cubics(y) -> tuple[RPoly, RPoly]:
    """Critical cubics of (t, t^2) and of (s^2, s) for data ``y``."""
    y1, y2 = float(y[0]), float(y[1])
    return RPoly([-y1, 1.0 - 2.0 * y2, 0.0, 2.0]), RPoly([-y2, 1.0 - 2.0 * y1, 0.0, 2.0])


def _solve(family, y):
    """Raw critical points plus any excluded singular solutions."""
    y = np.asarray(y, dtype=float)
    if isinstance(family, DetMagOne):
        qp, qm = detmag_quartics(y)
        pts = [np.array([t, 1.0 / t]) for t in real_roots(qp)]
        pts += [np.array([t, -1.0 / t]) for t in real_roots(qm)]
        return pts, []
    if isinstance(family, ParabolaPair):
        c1, c2 = parabola_cubics(y)
        pts = [np.array([t, t * t]) for t in real_roots(c1)]
        pts += [np.array([s * s, s]) for s in real_roots(c2)]
        return pts, []
    if isinstance(family, FermatSphere):
        if family.d == 2:
            ny = np.linalg.norm(y)
            if ny == 0.0:
                raise NonGenericData("y = 0 is equidistant from the whole sphere")
            return [y / ny, -y / ny], []
        if family.n != 2:
            raise SolverFailure("Fermat hypersurfaces with d > 2 are only solved for n = 2")
        pts, sing = plane_curve_critical(fermat_poly(family.d), y, radius=1.0)
        return list(pts), list(sing)
    if isinstance(family, RankAtMost):
        pts = []
        for I in itertools.combinations(range(family.n), family.r):
            if np.all(y[list(I)] != 0.0):
                x = np.zeros(family.n)
                x[list(I)] = y[list(I)]
                pts.append(x)
        return pts, []
    if isinstance(family, AllOnes):
        return [np.array(s) for s in itertools.product((1.0, -1.0), repeat=family.n)], []
    if isinstance(family, AxisUnion):
        return [y[i] * np.eye(family.n)[i] for i in range(family.n) if y[i] != 0.0], []
    if isinstance(family, PlaneCurve):
        pts, sing = plane_curve_critical(family.f, y)
        return list(pts), list(sing)
    raise TypeError(f"unknown family {family!r}")


def genericity_check(family, y, eps: float | None = None, require_distinct: bool = True,
                     _points=None) -> GenericityReport:
    """Decide whether ``y`` is far enough from every degeneracy.

    ``require_distinct`` adds the lifting condition: all ``|y_i|`` nonzero and
    pairwise separated. The family-specific part certifies that ``y`` is off
    the ED discriminant of the slice.
    """
    eps = DEFAULT.genericity_eps if eps is None else eps
    y = np.asarray(y, dtype=float)
    rep = GenericityReport(ok=True)
    if y.size != family.n:
        rep.ok = False
        rep.reasons.append(f"y has length {y.size}, family needs {family.n}")
        return rep
    scale = max(1.0, float(np.max(np.abs(y))))
    a = np.abs(y)
    if require_distinct:
        if np.any(a <= eps * scale):
            rep.reasons.append("zero entry in y")
        gaps = np.abs(a[:, None] - a[None, :])[np.triu_indices(y.size, 1)]
        if gaps.size and gaps.min() <= eps * scale:
            rep.reasons.append("repeated |y_i|")
        rep.values["min_gap"] = float(gaps.min()) if gaps.size else None

    if isinstance(family, DetMagOne):
        from .chambers import detmag_discriminants, _detmag_scale
        dp, dm = detmag_discriminants(y)
        rep.values.update(Dplus=dp, Dminus=dm)
        s = _detmag_scale(y)
        if abs(dp) <= eps * s or abs(dm) <= eps * s:
            rep.reasons.append("on the discriminant D+ D- = 0")
    elif isinstance(family, ParabolaPair):
        from .chambers import parabola_evolute_margin
        m1, m2 = parabola_evolute_margin(y)
        rep.values.update(m1=m1, m2=m2)
        c1, c2 = parabola_cubics(y)
        for name, c in (("m1", c1), ("m2", c2)):
            disc = cubic_discriminant(c)
            cs = 8 * abs(c.coeffs[1]) ** 3 + 108 * c.coeffs[0] ** 2 + 1.0
            if abs(disc) <= eps * cs:
                rep.reasons.append(f"on evolute ({name} = 0)")
        pts, _ = _solve(family, y) if _points is None else _points
        if len(dedupe(pts)) < len(pts):
            rep.reasons.append("both parabolas share a critical point")
    elif isinstance(family, (RankAtMost, AxisUnion)):
        if np.any(a <= eps * scale):
            if "zero entry in y" not in rep.reasons:
                rep.reasons.append("zero entry in y")
    elif isinstance(family, FermatSphere) and family.d == 2:
        if np.linalg.norm(y) <= eps * scale:
            rep.reasons.append("y at the centre of the sphere")
    elif defining_poly(family) is not None:
        f = defining_poly(family)
        g = normal_system(f, y)
        try:
            pts, sing = _solve(family, y) if _points is None else _points
        except NonGenericData as exc:
            rep.reasons.append(str(exc))
            pts, sing = [], []
        worst = min((_transversality(f, g, p) for p in pts), default=1.0)
        rep.values["min_transversality"] = worst
        if worst <= eps:
            rep.reasons.append("critical points nearly colliding")
        pd = dedupe(pts) if pts else []
        if len(pts) and len(sing):
            gap = min(np.max(np.abs(p - s)) for p in pd for s in sing)
            rep.values["singular_gap"] = float(gap)
            if gap <= 1e3 * DEFAULT.cluster_radius:
                rep.reasons.append("critical point near a singular point of S")
    rep.ok = not rep.reasons
    return rep


def ed_critical(family, y, tol: float | None = None, strict: bool = True) -> EdCriticalSet:
    """All real ED critical points of ``y`` on the smooth part of ``family``.

    Slice-level genericity is checked (not the lifting condition on distinct
    ``|y_i|``). With ``strict`` a non-generic ``y`` raises ``NonGenericData``;
    otherwise the result is returned with ``genericity_ok = False``.
    """
    y = np.asarray(y, dtype=float)
    if y.size != family.n:
        raise NonGenericData(f"y has length {y.size}, family needs {family.n}")
    raw, singular = _solve(family, y)
    rep = genericity_check(family, y, require_distinct=False, _points=(raw, singular))
    if strict and not rep.ok:
        raise NonGenericData("; ".join(rep.reasons))
    pts = dedupe(raw) if len(raw) else np.zeros((0, family.n))
    tangents, resid = [], []
    for x in pts:
        basis = tangent_basis(family, x, y)
        tangents.append(basis)
        resid.append(max(membership_residual(family, x), orthogonality_residual(y, x, basis)))
    tol = DEFAULT.orthogonality if tol is None else tol
    bad = [r for r in resid if r > tol]
    if bad and strict:
        raise SolverFailure(f"{len(bad)} critical points failed certification (worst {max(bad):.2e})")
    return EdCriticalSet(points=pts, residuals=np.array(resid), genericity_ok=rep.ok,
                         tangents=tangents, diagnostics=rep, excluded_singular=list(singular))
