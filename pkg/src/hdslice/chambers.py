"""Chamber classification of data points in the plane.

Predicted critical counts come from closed-form invariants (quartic
discriminants for the determinant-magnitude slice, evolute margins for the
parabola pair); observed counts come from :func:`hdslice.slices.ed_critical`.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._config import DEFAULT
from .errors import NonGenericData, OnDiscriminant, SolverFailure
from .slices import DetMagOne, FermatSphere, ParabolaPair, ed_critical


def detmag_discriminants(y) -> tuple[float, float]:
    """Discriminants of t^4 - y1 t^3 +- y2 t - 1 in closed form."""
    a, b = float(y[0]), float(y[1])
    common = -256.0 + 6 * a**2 * b**2 - 27 * a**4 - 27 * b**4
    odd = 192 * a * b + 4 * a**3 * b**3
    return common + odd, common - odd


def _detmag_scale(y) -> float:
    a, b = abs(float(y[0])), abs(float(y[1]))
    return 256.0 + 192 * a * b + 6 * a**2 * b**2 + 4 * a**3 * b**3 + 27 * a**4 + 27 * b**4


def detmag_predicted_count(y, eps: float | None = None) -> int:
    eps = DEFAULT.chamber_eps if eps is None else eps
    dp, dm = detmag_discriminants(y)
    if abs(dp) <= eps or abs(dm) <= eps:
        raise OnDiscriminant(f"y={tuple(y)} lies on D+ D- = 0 (D+={dp:.3g}, D-={dm:.3g})")
    return 6 if dp > 0 or dm > 0 else 4


def parabola_evolute_margin(y) -> tuple[float, float]:
    """Signed margins to the evolutes of x2 = x1^2 and x1 = x2^2 (positive inside)."""
    a, b = float(y[0]), float(y[1])
    return 16 * (b - 0.5) ** 3 - 27 * a**2, 16 * (a - 0.5) ** 3 - 27 * b**2


def parabola_predicted_count(y, eps: float | None = None) -> int:
    eps = DEFAULT.chamber_eps if eps is None else eps
    m1, m2 = parabola_evolute_margin(y)
    if abs(m1) <= eps or abs(m2) <= eps:
        raise OnDiscriminant(f"y={tuple(y)} lies on an evolute (m1={m1:.3g}, m2={m2:.3g})")
    return 2 + 2 * ((m1 > 0) + (m2 > 0))


def predicted_count(family, y, eps: float | None = None):
    """Closed-form count for ``y``, or ``None`` where no formula exists."""
    if isinstance(family, DetMagOne):
        return detmag_predicted_count(y, eps)
    if isinstance(family, ParabolaPair):
        return parabola_predicted_count(y, eps)
    if isinstance(family, FermatSphere) and family.d == 2:
        return 2
    return None


@dataclass
class ChamberReport:
    y: tuple
    invariant_values: dict = field(default_factory=dict)
    predicted_count: int | None = None
    observed_count: int | None = None
    agree: bool | None = None
    skipped_reason: str = ""

    @property
    def skipped(self) -> bool:
        return bool(self.skipped_reason)


@dataclass(frozen=True)
class Grid:
    x_range: tuple
    y_range: tuple
    step: float

    def points(self) -> list[tuple[float, float]]:
        def axis(lo, hi):
            k = int(round((hi - lo) / self.step))
            return np.linspace(lo, hi, k + 1)
        return [(float(a), float(b)) for b in axis(*self.y_range) for a in axis(*self.x_range)]


def classify_point(family, y, eps: float | None = None) -> ChamberReport:
    eps = DEFAULT.chamber_eps if eps is None else eps
    y = np.asarray(y, dtype=float)
    rep = ChamberReport(y=tuple(float(v) for v in y))
    if isinstance(family, DetMagOne):
        dp, dm = detmag_discriminants(y)
        rep.invariant_values.update(Dplus=dp, Dminus=dm)
    elif isinstance(family, ParabolaPair):
        m1, m2 = parabola_evolute_margin(y)
        rep.invariant_values.update(m1=m1, m2=m2)
    try:
        rep.predicted_count = predicted_count(family, y, eps)
    except OnDiscriminant as exc:
        rep.skipped_reason = f"on discriminant: {exc}"
        return rep
    try:
        # one solve; genericity is judged from the same critical points
        crit = ed_critical(family, y, strict=False)
    except (NonGenericData, SolverFailure) as exc:
        rep.skipped_reason = f"{type(exc).__name__}: {exc}"
        return rep
    if not crit.genericity_ok:
        rep.skipped_reason = "non-generic: " + "; ".join(crit.diagnostics.reasons)
        return rep
    bad = crit.residuals[crit.residuals > DEFAULT.orthogonality]
    if bad.size:
        rep.skipped_reason = f"SolverFailure: {bad.size} critical points failed certification (worst {bad.max():.2e})"
        return rep
    rep.observed_count = len(crit)
    if rep.predicted_count is not None:
        rep.agree = rep.predicted_count == rep.observed_count
    return rep


def chamber_scan(family, grid: Grid, eps: float | None = None, threads: int = 0) -> list[ChamberReport]:
    """Classify every grid point; output order is grid order for any ``threads``."""
    if not isinstance(family, (DetMagOne, ParabolaPair, FermatSphere)):
        raise ValueError("chamber scans are defined for detmag, parabola and fermat families")
    if isinstance(family, FermatSphere) and family.n != 2:
        raise ValueError("chamber scans need a planar Fermat curve (n = 2)")
    pts = grid.points()
    if threads == 1:
        return [classify_point(family, p, eps) for p in pts]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(lambda p: classify_point(family, p, eps), pts))


CSV_HEADER = ["y1", "y2", "Dplus", "Dminus", "m1", "m2", "predicted", "observed", "agree", "skipped_reason"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def reports_to_csv(reports, fh=None) -> str:
    buf = fh or io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        iv = r.invariant_values
        w.writerow([
            _fmt(r.y[0]), _fmt(r.y[1]),
            _fmt(iv.get("Dplus")), _fmt(iv.get("Dminus")), _fmt(iv.get("m1")), _fmt(iv.get("m2")),
            _fmt(r.predicted_count), _fmt(r.observed_count), _fmt(r.agree), r.skipped_reason,
        ])
    return buf.getvalue() if fh is None else ""
