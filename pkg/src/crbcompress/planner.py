"""Design guidance from the compression loss laws.

Answers the forward question (given m, how confident are we that the
per-parameter CRB inflation stays below a factor kappa?) and the
inverse one (how many compressed measurements buy a target confidence?),
plus ratio tables over grids and concentration-ellipse loci for
two-parameter problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import betalaw, cxla
from .errors import BadShape, DomainError, Infeasible, NotPositiveDefinite

DEFAULT_CONFIDENCES = (0.90, 0.99)


@dataclass(frozen=True)
class PlanQuery:
    """Target for the inverse design problem."""

    n: int
    p: int
    kappa: float
    confidence: float

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.p, int)):
            raise DomainError("n and p must be ints")
        if self.p < 1:
            raise DomainError(f"need p >= 1, got p={self.p}")
        if self.n <= self.p + 1:
            raise DomainError(f"need n > p + 1, got n={self.n}, p={self.p}")
        if not (self.kappa > 1.0 and math.isfinite(self.kappa)):
            raise DomainError(f"need kappa > 1, got {self.kappa}")
        if not 0.0 < self.confidence < 1.0:
            raise DomainError(f"confidence must lie in (0, 1), got {self.confidence}")


@dataclass(frozen=True)
class PlanRow:
    """One grid point of a planning table."""

    kappa: float
    confidence: float
    m: int | None
    ratio: float | None
    feasible: bool


def confidence_at(n: int, m: int, p: int, kappa: float) -> float:
    """P[CRB after <= kappa * CRB before] under random compression.

    The before/after ratio follows Beta(m - p + 1, n - m), so the value
    is one minus its cdf at 1/kappa.  Requires p < m <= n - p.
    """
    if not (isinstance(n, int) and isinstance(m, int) and isinstance(p, int)):
        raise DomainError("n, m, p must be ints")
    if p < 1:
        raise DomainError(f"need p >= 1, got p={p}")
    if not p < m <= n - p:
        raise DomainError(f"need p < m <= n - p, got p={p}, m={m}, n={n}")
    if not (kappa > 0.0 and math.isfinite(kappa)):
        raise DomainError(f"kappa must be positive and finite, got {kappa}")
    if kappa <= 1.0:
        return 0.0
    law = betalaw.crb_ratio_law(n, m, p)
    return 1.0 - float(betalaw.beta_cdf(law, 1.0 / kappa))


def min_measurements(query: PlanQuery) -> int:
    """Smallest m with confidence_at(n, m, p, kappa) >= confidence.

    Searches p + 2 <= m <= n - p by bisection; the confidence is
    nondecreasing in m.  Raises Infeasible (carrying the best
    achievable confidence) when even m = n - p falls short.
    """
    n, p, kappa, confidence = query.n, query.p, query.kappa, query.confidence
    floor = p + 2
    lo = floor
    hi = n - p
    if hi < lo:
        raise Infeasible(
            f"no admissible m exists for n={n}, p={p} (need p + 2 <= m <= n - p)",
            max_confidence=0.0,
        )
    best = confidence_at(n, hi, p, kappa)
    if best < confidence:
        raise Infeasible(
            f"confidence {confidence} at kappa={kappa} is unreachable for n={n}, p={p}; "
            f"the best achievable is {best:.6f} at m={hi}",
            max_confidence=best,
        )
    while lo < hi:
        mid = (lo + hi) // 2
        if confidence_at(n, mid, p, kappa) >= confidence:
            hi = mid
        else:
            lo = mid + 1
    m_star = lo
    # Boundary property: m_star reaches the target and, above the search
    # floor, m_star - 1 does not.
    assert confidence_at(n, m_star, p, kappa) >= confidence
    assert m_star == floor or confidence_at(n, m_star - 1, p, kappa) < confidence
    return m_star


def curve(
    n: int,
    p: int,
    kappas: Sequence[float],
    confidences: Sequence[float] = DEFAULT_CONFIDENCES,
) -> list[PlanRow]:
    """Planning table over a grid of inflation factors and confidences.

    Infeasible grid points come back as rows with ``feasible=False``
    instead of raising.
    """
    if len(kappas) == 0:
        raise DomainError("kappa grid is empty")
    if len(confidences) == 0:
        raise DomainError("confidence grid is empty")
    rows: list[PlanRow] = []
    for confidence in confidences:
        for kappa in kappas:
            query = PlanQuery(n=n, p=p, kappa=float(kappa), confidence=float(confidence))
            try:
                m = min_measurements(query)
                rows.append(
                    PlanRow(
                        kappa=float(kappa),
                        confidence=float(confidence),
                        m=m,
                        ratio=m / n,
                        feasible=True,
                    )
                )
            except Infeasible:
                rows.append(
                    PlanRow(
                        kappa=float(kappa),
                        confidence=float(confidence),
                        m=None,
                        ratio=None,
                        feasible=False,
                    )
                )
    return rows


def ellipse_locus(J, r2: float, points: int = 256) -> np.ndarray:
    """Locus {e in R^2 : e^T Re(J) e = r2}, sampled uniformly in angle.

    ``J`` is a 2x2 Hermitian positive definite information matrix; the
    real part governs real-valued error vectors.  Returns an array of
    shape (points, 2); the curve is closed but the first point is not
    repeated.
    """
    J = cxla.as_hermitian(J, "J")
    if J.shape != (2, 2):
        raise BadShape(f"ellipse loci are defined for 2x2 matrices, got {J.shape}")
    if not (r2 > 0.0 and math.isfinite(r2)):
        raise DomainError(f"level r2 must be positive and finite, got {r2}")
    if not (isinstance(points, int) and points >= 3):
        raise DomainError(f"need at least 3 points, got {points!r}")
    a = np.real(J)
    a = 0.5 * (a + a.T)
    w = np.linalg.eigvalsh(a)
    if w[0] <= 0.0:
        raise NotPositiveDefinite(
            f"Re(J) must be positive definite (eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}])"
        )
    L = np.linalg.cholesky(a)
    angles = np.linspace(0.0, 2.0 * math.pi, points, endpoint=False)
    circle = np.vstack([np.cos(angles), np.sin(angles)])
    locus = math.sqrt(r2) * np.linalg.solve(L.T, circle)
    return locus.T
