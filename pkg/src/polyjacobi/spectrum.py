"""Discrete spectra of compactly perturbed operators from finite sections.

Eigenvalues outside the essential interval are computed on a window of
half-width ``M`` and again at ``2M``; the window keeps doubling until the
outside eigenvalues stop moving.  By Cauchy interlacing, finite-section
eigenvalues never overshoot the true ones, so the reported distances to the
essential edges are lower estimates that increase with the window.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig_banded

from .operators import (
    BandedSymmetricMatrix,
    PolyJacobiCoefficients,
    assemble_w_sigma,
    essential_spectrum,
    laplacian_power_section,
)

log = logging.getLogger(__name__)

OPERATORS = ("h_sigma", "shifted_h_sigma", "w_sigma")
DEFAULT_TOLERANCE = 1e-9
MAX_DOUBLINGS = 4


class ClassificationError(ValueError):
    """An eigenvalue was passed on the wrong side of an essential edge."""


def _check_finite(m: BandedSymmetricMatrix) -> np.ndarray:
    ab = m.to_upper_band()
    if not np.all(np.isfinite(ab)):
        raise ValueError("matrix has non-finite entries")
    return ab


def eigenvalues_symmetric(m: BandedSymmetricMatrix) -> np.ndarray:
    """All eigenvalues of ``m`` in ascending order."""
    ab = _check_finite(m)
    return eig_banded(ab, eigvals_only=True, check_finite=False)


def eigenvalues_outside(m: BandedSymmetricMatrix, lower: float, upper: float) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues strictly below ``lower`` and strictly above ``upper``, ascending."""
    ab = _check_finite(m)
    bound = m.norm_bound() + 1.0
    out = []
    for rng in ((-bound, np.nextafter(lower, -np.inf)), (upper, bound)):
        if rng[0] >= rng[1]:
            out.append(np.zeros(0))
            continue
        w = eig_banded(ab, eigvals_only=True, select="v", select_range=rng, check_finite=False)
        out.append(np.sort(w))
    below, above = out
    return below[below < lower], above[above > upper]


def extreme_eigenvalues(m: BandedSymmetricMatrix, n_low: int, n_high: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``n_low`` smallest and ``n_high`` largest eigenvalues, ascending."""
    ab = _check_finite(m)
    dim = m.dim
    low = high = np.zeros(0)
    if n_low:
        low = eig_banded(ab, eigvals_only=True, select="i",
                         select_range=(0, min(n_low, dim) - 1), check_finite=False)
    if n_high:
        high = eig_banded(ab, eigvals_only=True, select="i",
                          select_range=(max(dim - n_high, 0), dim - 1), check_finite=False)
    return np.sort(low), np.sort(high)


@dataclass(frozen=True)
class SpectralReport:
    """Outside eigenvalues of one operator instance.

    ``eigenvalues_below`` is ascending (most distant first) and
    ``eigenvalues_above`` descending, so index ``j`` in either list is the
    ``j``-th eigenvalue counted from outside.
    """

    sigma: int
    operator: str
    window: tuple[int, int]
    essential: tuple[float, float]
    eigenvalues_below: tuple[float, ...]
    eigenvalues_above: tuple[float, ...]
    edge_margin: float
    tolerance: float
    converged: bool
    window_pair: tuple[int, int]
    max_shift: float

    @property
    def count(self) -> int:
        return len(self.eigenvalues_below) + len(self.eigenvalues_above)

    def as_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "operator": self.operator,
            "window": list(self.window),
            "essential": list(self.essential),
            "eigenvalues_below": list(self.eigenvalues_below),
            "eigenvalues_above": list(self.eigenvalues_above),
            "edge_margin": self.edge_margin,
            "tolerance": self.tolerance,
            "converged": self.converged,
            "window_pair": list(self.window_pair),
            "max_shift": self.max_shift,
        }


def default_edge_margin(sigma: int) -> float:
    return max(1e-6, 1e-6 * 4.0 ** sigma)


def _section_builder(coeffs: PolyJacobiCoefficients, operator: str):
    sigma = coeffs.sigma
    if operator == "w_sigma":
        return essential_spectrum("w_sigma", sigma), lambda w: assemble_w_sigma(coeffs, w)
    if coeffs.has_deviations:
        raise ValueError(f"operator {operator!r} takes only a diagonal potential; deviations must be zero")
    if operator == "h_sigma":
        # L**sigma - b
        return (essential_spectrum("laplacian_power", sigma),
                lambda w: laplacian_power_section(sigma, w, coeffs.b, sign=-1))
    if operator == "shifted_h_sigma":
        # L**sigma - 4**sigma + b
        return (essential_spectrum("shifted_laplacian_power", sigma),
                lambda w: laplacian_power_section(sigma, w, coeffs.b, sign=1, shift=-(4.0 ** sigma)))
    raise ValueError(f"unknown operator {operator!r}; expected one of {OPERATORS}")


def initial_half_width(coeffs: PolyJacobiCoefficients) -> tuple[int, int]:
    """``(center, M0)`` with ``M0 = support radius + 8 sigma + 40``."""
    sup = coeffs.support()
    lo, hi = (0, 0) if sup is None else sup
    center = (lo + hi) // 2
    radius = max(hi - center, center - lo)
    return center, radius + 8 * coeffs.sigma + 40


def discrete_spectrum(coeffs: PolyJacobiCoefficients, operator: str = "w_sigma",
                      tolerance: float = DEFAULT_TOLERANCE, edge_margin: float | None = None,
                      half_width: int | None = None, max_doublings: int = MAX_DOUBLINGS) -> SpectralReport:
    """Eigenvalues of ``operator`` outside its essential interval.

    ``operator`` is one of ``"h_sigma"`` (``L**sigma - b``),
    ``"shifted_h_sigma"`` (``L**sigma - 4**sigma + b``) or ``"w_sigma"``
    (the polydiagonal matrix).  Values closer than ``edge_margin`` to an
    essential edge are discarded.  ``converged`` is set once the kept
    eigenvalues move by less than ``tolerance`` when the window doubles; if
    that never happens within ``max_doublings`` the last values are returned
    with ``converged=False``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    sigma = coeffs.sigma
    (ess_lo, ess_hi), build = _section_builder(coeffs, operator)
    margin = default_edge_margin(sigma) if edge_margin is None else float(edge_margin)
    center, m0 = initial_half_width(coeffs)
    if half_width is not None:
        m0 = int(half_width)

    def window(m):
        return center - m, center + m

    m = m0
    small = build(window(m))
    converged = False
    shift = np.inf
    for _ in range(max(max_doublings, 1)):
        large = build(window(2 * m))
        below, above = eigenvalues_outside(large, ess_lo - margin, ess_hi + margin)
        ref_low, ref_high = extreme_eigenvalues(small, below.size, above.size)
        diffs = np.concatenate([np.abs(below - ref_low), np.abs(above - ref_high)])
        shift = float(diffs.max()) if diffs.size else 0.0
        if shift < tolerance:
            converged = True
            break
        log.debug("sigma=%d %s: shift %.3g at half-width %d, doubling", sigma, operator, shift, 2 * m)
        m, small = 2 * m, large
    if not converged:
        log.warning("sigma=%d %s: finite sections not converged (shift %.3g)", sigma, operator, shift)
    return SpectralReport(
        sigma=sigma,
        operator=operator,
        window=window(2 * m),
        essential=(float(ess_lo), float(ess_hi)),
        eigenvalues_below=tuple(float(v) for v in below),
        eigenvalues_above=tuple(float(v) for v in above[::-1]),
        edge_margin=margin,
        tolerance=float(tolerance),
        converged=converged,
        window_pair=(2 * m + 1, 4 * m + 1),
        max_shift=shift,
    )


def riesz_mean(eigenvalues, edge: float, gamma: float, side: str) -> float:
    """``sum_j |E_j - edge|**gamma`` for eigenvalues on one side of ``edge``."""
    if gamma < 1:
        raise ValueError(f"gamma={gamma} must be >= 1")
    e = np.asarray(eigenvalues, dtype=float)
    if side == "below":
        bad = e >= edge
    elif side == "above":
        bad = e <= edge
    else:
        raise ValueError(f"side must be 'below' or 'above', got {side!r}")
    if np.any(bad):
        raise ClassificationError(f"eigenvalue {e[bad][0]!r} is not strictly {side} edge {edge}")
    return float(np.sum(np.abs(e - edge) ** gamma))
