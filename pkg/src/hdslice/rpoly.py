"""Real polynomials: Sturm counting, real roots, resultants, quartic discriminant.

Univariate coefficients are stored in ascending order. Arithmetic is plain
float64; Sturm chains use scaled remainders (each remainder divided by its
max-norm), which keeps every sign intact while preventing under/overflow.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from numpy.polynomial import chebyshev as cheb

from ._backend import kernels
from ._config import DEFAULT
from .errors import (
    DegenerateAtEndpoint,
    DegreeOverflow,
    IllConditioned,
    WrongDegree,
)


def _trim(c: np.ndarray, rel: float) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return np.zeros(1)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1)
    last = c.size - 1
    while last > 0 and abs(c[last]) <= rel * scale:
        last -= 1
    return c[: last + 1].copy()


@dataclass(frozen=True)
class RPoly:
    """Univariate real polynomial, ``coeffs[i]`` multiplies ``t**i``."""

    coeffs: np.ndarray

    def __init__(self, coeffs, rel: float | None = None):
        rel = DEFAULT.degeneracy if rel is None else rel
        c = _trim(coeffs, rel)
        if not np.all(np.isfinite(c)):
            raise IllConditioned("polynomial has non-finite coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return 0 if self.is_zero() else self.coeffs.size - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, x):
        if np.ndim(x) == 0:
            return kernels.polyval(np.ascontiguousarray(self.coeffs), float(x))
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def derivative(self) -> "RPoly":
        if self.coeffs.size == 1:
            return RPoly([0.0])
        return RPoly(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def scale_at(self, x: float) -> float:
        """Sum of |c_i| |x|^i, the natural size of p(x) for residual tests."""
        return float(np.polynomial.polynomial.polyval(abs(x), np.abs(self.coeffs)))

    def normalized(self) -> "RPoly":
        m = np.max(np.abs(self.coeffs))
        return self if m == 0 else RPoly(self.coeffs / m)

    def cauchy_bound(self) -> float:
        c = self.coeffs
        return 1.0 + float(np.max(np.abs(c[:-1] / c[-1]))) if c.size > 1 else 1.0

    def __repr__(self) -> str:
        return f"RPoly({self.coeffs.tolist()})"


def _rem(a: np.ndarray, b: np.ndarray, rel: float) -> np.ndarray:
    """Remainder of a / b (ascending coefficients), trimmed relative to ``a``."""
    r = a.astype(float).copy()
    db = b.size - 1
    lead = b[-1]
    scale = np.max(np.abs(a))
    while r.size - 1 >= db and r.size > 0:
        if db == 0:
            return np.zeros(1)
        f = r[-1] / lead
        r[-db - 1:] -= f * b
        r = r[:-1]
        while r.size > 1 and abs(r[-1]) <= rel * scale:
            r = r[:-1]
    return r


@dataclass
class SturmChain:
    polys: list
    seq: np.ndarray = field(repr=False)
    degs: np.ndarray = field(repr=False)

    @property
    def gcd(self) -> RPoly:
        return RPoly(self.polys[-1])

    def variations(self, x: float) -> int:
        return kernels.sign_variations(self.seq, self.degs, float(x))


# A remainder this small relative to its dividend came out of heavy
# cancellation, so its float sign is not trustworthy.
_CANCEL = 1e-7
_MP_DPS = 60


def _pack(polys) -> tuple[np.ndarray, np.ndarray]:
    width = max(c.size for c in polys)
    seq = np.zeros((len(polys), width))
    for i, c in enumerate(polys):
        seq[i, : c.size] = c
    degs = np.array([c.size - 1 for c in polys], dtype=np.int64)
    return np.ascontiguousarray(seq), degs


def _float_chain(p: RPoly, rel: float) -> tuple[list, bool]:
    polys = [p.coeffs / np.max(np.abs(p.coeffs))]
    if p.degree == 0:
        return polys, True
    d = p.derivative().coeffs
    polys.append(d / np.max(np.abs(d)))
    trusted = True
    while polys[-1].size > 1:
        r = -_rem(polys[-2], polys[-1], rel)
        if not np.all(np.isfinite(r)):
            raise IllConditioned("Sturm remainder overflowed")
        m = np.max(np.abs(r))
        if m == 0.0 or (r.size == 1 and abs(r[0]) <= rel):
            # a common factor with p' is rare for float data; usually the
            # last remainder cancelled away, so let extended precision decide
            trusted = False
            break
        if m < _CANCEL or abs(r[-1]) < _CANCEL * m:
            trusted = False
        polys.append(r / m)
    return polys, trusted


def _mp_chain(p: RPoly) -> list:
    """The same chain carried out with 60 significant digits."""
    import mpmath

    with mpmath.workdps(_MP_DPS):
        zero_rel = mpmath.mpf(10) ** (-(_MP_DPS * 2 // 3))

        def norm(c):
            m = max(abs(v) for v in c)
            return [v / m for v in c] if m else c

        def trim(c):
            m = max(abs(v) for v in c)
            while len(c) > 1 and abs(c[-1]) <= zero_rel * m:
                c = c[:-1]
            return c

        def rem(a, b):
            r = list(a)
            db = len(b) - 1
            while len(r) - 1 >= db:
                f = r[-1] / b[-1]
                for i in range(db + 1):
                    r[len(r) - 1 - db + i] -= f * b[i]
                r = r[:-1]
                if not r:
                    return [mpmath.mpf(0)]
            return r

        c = [mpmath.mpf(float(v)) for v in p.coeffs]
        polys = [norm(c)]
        polys.append(norm([i * c[i] for i in range(1, len(c))]))
        while len(polys[-1]) > 1:
            r = [-v for v in rem(polys[-2], polys[-1])]
            if max(abs(v) for v in r) <= zero_rel:
                break
            polys.append(norm(trim(r)))
        return [np.array([float(v) for v in q]) for q in polys]


def sturm_chain(p: RPoly, rel: float | None = None, exact: bool = False) -> SturmChain:
    """Scaled Sturm chain p0 = p, p1 = p', p_{k+1} = -rem(p_{k-1}, p_k).

    The chain is built in float64; when a remainder loses most of its digits
    to cancellation it is rebuilt in extended precision. ``exact=True``
    forces the extended-precision path.
    """
    rel = DEFAULT.degeneracy if rel is None else rel
    if p.is_zero():
        raise ValueError("zero polynomial has no Sturm chain")
    polys, trusted = (None, False) if exact else _float_chain(p, rel)
    if not trusted and p.degree > 0:
        polys = _mp_chain(p)
    seq, degs = _pack(polys)
    return SturmChain(polys, seq, degs)


def _nudge(p: RPoly, x: float, direction: float, tol: float) -> float:
    step = max(abs(x), 1.0) * 1e-12
    for _ in range(8):
        if abs(p(x)) > tol * p.scale_at(x):
            return x
        x += direction * step
        step *= 16
    raise DegenerateAtEndpoint(f"endpoint {x!r} is numerically a root")


def sturm_count(p: RPoly, a: float, b: float, tol: float | None = None) -> int:
    """Number of distinct real roots of ``p`` in ``(a, b]``.

    An endpoint that is numerically a root is moved outward (for ``b``) or
    inward (for ``a``) so that the half-open convention is kept.
    """
    tol = DEFAULT.degeneracy if tol is None else tol
    if not a < b:
        raise ValueError("need a < b")
    if p.is_zero():
        raise ValueError("zero polynomial")
    a = _nudge(p, a, +1.0, tol)
    b = _nudge(p, b, +1.0, tol)
    ch = sturm_chain(p)
    n = ch.variations(a) - ch.variations(b)
    if n < 0:
        raise IllConditioned("negative Sturm count; chain lost sign consistency")
    return n


@dataclass(frozen=True)
class Root:
    value: float
    multiple: bool = False


def _polish(p: RPoly, dp: RPoly, x: float, lo: float, hi: float) -> float:
    for _ in range(8):
        d = dp(x)
        if d == 0.0:
            break
        x_new = x - p(x) / d
        if not lo <= x_new <= hi or x_new == x:
            break
        if abs(p(x_new)) >= abs(p(x)):
            break
        x = x_new
    return x


def real_roots_detail(p: RPoly, tol: float | None = None) -> list[Root]:
    """Distinct real roots in ascending order with a multiplicity flag."""
    tol = DEFAULT.root_residual if tol is None else tol
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return []
    ch = sturm_chain(p)
    B = p.cauchy_bound()
    lo = _nudge(p, -B, -1.0, DEFAULT.degeneracy)
    hi = _nudge(p, B, +1.0, DEFAULT.degeneracy)
    total = ch.variations(lo) - ch.variations(hi)
    if ch.gcd.degree == 0 and (total - p.degree) % 2:
        # a squarefree real polynomial has real roots of the degree's parity
        ch = sturm_chain(p, exact=True)
        total = ch.variations(lo) - ch.variations(hi)
    if total < 0:
        raise IllConditioned("negative Sturm count over the Cauchy interval")
    intervals = kernels.isolate_roots(ch.seq, ch.degs, lo, hi, 1e-15 * B)
    dp = p.derivative()
    gcd = ch.gcd
    roots = []
    for a, b, cnt in intervals:
        a, b = kernels.bisect_single(ch.seq, ch.degs, a, b, 200)
        x = 0.5 * (a + b)
        if gcd.degree == 0:
            x = _polish(p, dp, x, a - abs(b - a), b + abs(b - a))
        multiple = cnt > 1 or (gcd.degree > 0 and abs(gcd(x)) <= 1e-6 * gcd.scale_at(x))
        if not multiple and abs(p(x)) > tol * max(p.scale_at(x), 1e-300):
            raise IllConditioned(f"root near {x} has residual {abs(p(x)):.3e}")
        roots.append(Root(float(x), bool(multiple)))
    if sum(c for _, _, c in intervals) != total:
        raise IllConditioned("root isolation lost roots")
    return roots


def real_roots(p: RPoly, tol: float | None = None) -> list[float]:
    """All distinct real roots of ``p``, ascending."""
    return [r.value for r in real_roots_detail(p, tol)]


def quartic_discriminant(p: RPoly) -> float:
    """Classical discriminant of ``a t^4 + b t^3 + c t^2 + d t + e``."""
    if p.degree != 4:
        raise WrongDegree(f"expected degree 4, got {p.degree}")
    e, d, c, b, a = (float(v) for v in p.coeffs)
    return (
        256 * a**3 * e**3 - 192 * a**2 * b * d * e**2 - 128 * a**2 * c**2 * e**2
        + 144 * a**2 * c * d**2 * e - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
        - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e + 18 * a * b * c * d**3
        + 16 * a * c**4 * e - 4 * a * c**3 * d**2 - 27 * b**4 * e**2
        + 18 * b**3 * c * d * e - 4 * b**3 * d**3 - 4 * b**2 * c**3 * e
        + b**2 * c**2 * d**2
    )


def cubic_discriminant(p: RPoly) -> float:
    if p.degree != 3:
        raise WrongDegree(f"expected degree 3, got {p.degree}")
    d, c, b, a = (float(v) for v in p.coeffs)
    return 18 * a * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * a * c**3 - 27 * a**2 * d**2


# --- bivariate -------------------------------------------------------------

@dataclass(frozen=True)
class BiPoly:
    """``sum c[i, j] x1**i x2**j``."""

    c: np.ndarray

    def __init__(self, c):
        c = np.atleast_2d(np.asarray(c, dtype=float))
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_terms(cls, terms: dict) -> "BiPoly":
        """Build from ``{(i, j): coefficient}``."""
        di = max(i for i, _ in terms) + 1
        dj = max(j for _, j in terms) + 1
        c = np.zeros((di, dj))
        for (i, j), v in terms.items():
            c[i, j] += v
        return cls(c)

    def deg1(self) -> int:
        rows = np.flatnonzero(np.any(self.c != 0, axis=1))
        return int(rows[-1]) if rows.size else 0

    def deg2(self) -> int:
        cols = np.flatnonzero(np.any(self.c != 0, axis=0))
        return int(cols[-1]) if cols.size else 0

    def total_degree(self) -> int:
        i, j = np.nonzero(self.c)
        return int((i + j).max()) if i.size else 0

    def is_zero(self) -> bool:
        return not np.any(self.c)

    def __call__(self, x1, x2):
        return np.polynomial.polynomial.polyval2d(x1, x2, self.c)

    def at(self, x1, x2) -> np.ndarray:
        """Vectorised evaluation at paired coordinate arrays."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        P1 = x1[..., None] ** np.arange(self.c.shape[0])
        P2 = x2[..., None] ** np.arange(self.c.shape[1])
        return np.einsum("...i,ij,...j->...", P1, self.c, P2)

    def d1(self) -> "BiPoly":
        if self.c.shape[0] == 1:
            return BiPoly(np.zeros((1, 1)))
        return BiPoly(self.c[1:] * np.arange(1, self.c.shape[0])[:, None])

    def d2(self) -> "BiPoly":
        if self.c.shape[1] == 1:
            return BiPoly(np.zeros((1, 1)))
        return BiPoly(self.c[:, 1:] * np.arange(1, self.c.shape[1])[None, :])

    def __add__(self, other: "BiPoly") -> "BiPoly":
        s0 = max(self.c.shape[0], other.c.shape[0])
        s1 = max(self.c.shape[1], other.c.shape[1])
        out = np.zeros((s0, s1))
        out[: self.c.shape[0], : self.c.shape[1]] += self.c
        out[: other.c.shape[0], : other.c.shape[1]] += other.c
        return BiPoly(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly(-self.c)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        if np.isscalar(other):
            return BiPoly(self.c * other)
        a, b = self.c, other.c
        out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
        for i, j in zip(*np.nonzero(a)):
            out[i: i + b.shape[0], j: j + b.shape[1]] += a[i, j] * b
        return BiPoly(out)

    __rmul__ = __mul__

    def in_x2(self, x1: float) -> RPoly:
        """Specialise ``x1`` and return the polynomial in ``x2``."""
        powers = x1 ** np.arange(self.c.shape[0])
        return RPoly(powers @ self.c)

    def coeffs_in_x2(self, x1: float, deg: int) -> np.ndarray:
        powers = x1 ** np.arange(self.c.shape[0])
        col = powers @ self.c
        out = np.zeros(deg + 1)
        out[: min(col.size, deg + 1)] = col[: deg + 1]
        return out

    def swapped(self) -> "BiPoly":
        return BiPoly(self.c.T.copy())

    def scale_at(self, x1: float, x2: float) -> float:
        return float(np.polynomial.polynomial.polyval2d(abs(x1), abs(x2), np.abs(self.c)))

    @staticmethod
    def x1() -> "BiPoly":
        return BiPoly([[0.0], [1.0]])

    @staticmethod
    def x2() -> "BiPoly":
        return BiPoly([[0.0, 1.0]])

    @staticmethod
    def const(v: float) -> "BiPoly":
        return BiPoly([[float(v)]])


def sylvester(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Sylvester matrix of two ascending coefficient vectors."""
    m, k = a.size - 1, b.size - 1
    S = np.zeros((m + k, m + k))
    for r in range(k):
        S[r, r: r + m + 1] = a[::-1]
    for r in range(m):
        S[k + r, r: r + k + 1] = b[::-1]
    return S


MAX_RESULTANT_DEGREE = 64


def _sylvester_at(f: BiPoly, g: BiPoly, x1: np.ndarray, m: int, k: int) -> np.ndarray:
    """Stacked Sylvester matrices of ``f(x1, .)`` and ``g(x1, .)``."""
    F = (x1[:, None] ** np.arange(f.c.shape[0])) @ f.c
    G = (x1[:, None] ** np.arange(g.c.shape[0])) @ g.c
    S = np.zeros((x1.size, m + k, m + k))
    for r in range(k):
        S[:, r, r: r + m + 1] = F[:, m::-1]
    for r in range(m):
        S[:, k + r, r: r + k + 1] = G[:, k::-1]
    return S


def _resultant_cheb(f: BiPoly, g: BiPoly, radius: float) -> np.ndarray:
    """Chebyshev coefficients (in s = x1 / radius) of the resultant."""
    m, k = f.deg2(), g.deg2()
    if m == 0 or k == 0:
        raise ValueError("both polynomials need positive degree in x2")
    D = f.deg1() * k + g.deg1() * m
    if D > MAX_RESULTANT_DEGREE:
        raise DegreeOverflow(f"resultant degree bound {D} exceeds {MAX_RESULTANT_DEGREE}")
    if D == 0:
        return np.array([np.linalg.det(_sylvester_at(f, g, np.zeros(1), m, k))[0]])
    j = np.arange(D + 1)
    s = np.cos((2 * j + 1) * np.pi / (2 * (D + 1)))
    vals = np.linalg.det(_sylvester_at(f, g, radius * s, m, k))
    for idx in np.flatnonzero(~np.isfinite(vals)):
        for attempt in range(4):
            # resample a hair off the node; interpolation stays exact in theory
            s[idx] *= 1 - 1e-9 * (attempt + 1)
            vals[idx] = np.linalg.det(_sylvester_at(f, g, radius * s[idx: idx + 1], m, k))[0]
            if np.isfinite(vals[idx]):
                break
        else:
            raise IllConditioned(f"Sylvester determinant not finite near x1={radius * s[idx]}")
    return cheb.chebfit(s, vals, D)


def _resultant_scaled(f: BiPoly, g: BiPoly, radius: float) -> RPoly:
    mono = cheb.cheb2poly(_resultant_cheb(f, g, radius))
    m_abs = np.max(np.abs(mono))
    if m_abs == 0.0:
        return RPoly([0.0])
    return RPoly(mono / m_abs)


def resultant_x2(f: BiPoly, g: BiPoly, radius: float = 1.0) -> RPoly:
    """``Res_{x2}(f, g)`` as a polynomial in ``x1``, up to a positive scale.

    Evaluates the Sylvester determinant at ``D + 1`` Chebyshev nodes on
    ``[-radius, radius]`` (``D`` the degree bound) and interpolates.
    """
    p = _resultant_scaled(f, g, radius)
    c = p.coeffs / radius ** np.arange(p.coeffs.size)
    return RPoly(c / np.max(np.abs(c)))
