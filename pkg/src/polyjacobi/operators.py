"""Difference operators, the higher-order discrete Laplacian and polydiagonal
Jacobi-type matrices.

The free operator of order ``sigma`` is the power ``L**sigma`` of the
second difference ``L = D* D``.  Its stencil has ``2*sigma + 1`` exact
integer coefficients ``C(2 sigma, k) (-1)**(k + sigma)``.  Removing the
central coefficient leaves the free polydiagonal matrix whose ``i``-th
off-diagonal is ``omega_i = C(2 sigma, sigma + i) (-1)**i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence as Seq

import numpy as np

from .sequence import Sequence

SIGMA_CAP = 14
# Pascal rows needed by the stencils and the combinatorial identities.
BINOMIAL_ROW_CAP = 2 * SIGMA_CAP + 2


class SigmaRangeError(ValueError):
    """Raised when an order ``sigma`` falls outside ``1..SIGMA_CAP``."""


def check_sigma(sigma: int) -> int:
    if isinstance(sigma, bool) or not isinstance(sigma, (int, np.integer)):
        raise SigmaRangeError(f"sigma must be an integer, got {sigma!r}")
    if not 1 <= sigma <= SIGMA_CAP:
        raise SigmaRangeError(f"sigma={sigma} outside 1..{SIGMA_CAP} (sigma cap)")
    return int(sigma)


@lru_cache(maxsize=None)
def _pascal() -> tuple[tuple[int, ...], ...]:
    rows = [(1,)]
    for _ in range(BINOMIAL_ROW_CAP):
        prev = rows[-1]
        rows.append((1,) + tuple(prev[j] + prev[j + 1] for j in range(len(prev) - 1)) + (1,))
    return tuple(rows)


def binomial(a: int, b: int) -> int:
    """Exact ``C(a, b)`` from a cached Pascal triangle.

    ``b`` outside ``0..a`` gives 0.  Rows beyond ``2*SIGMA_CAP + 2`` are
    refused; nothing in the library needs them.
    """
    if a < 0:
        raise ValueError(f"binomial row a={a} must be nonnegative")
    if a > BINOMIAL_ROW_CAP:
        raise OverflowError(
            f"binomial row a={a} exceeds {BINOMIAL_ROW_CAP} = 2*sigma_cap + 2 (sigma cap {SIGMA_CAP})"
        )
    if b < 0 or b > a:
        return 0
    return _pascal()[a][b]


@dataclass(frozen=True)
class StencilCoefficients:
    sigma: int
    coeffs: tuple[int, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)


@lru_cache(maxsize=None)
def laplacian_stencil(sigma: int) -> StencilCoefficients:
    """Coefficients of ``L**sigma`` at offsets ``-sigma..sigma``.

    >>> laplacian_stencil(2).coeffs
    (1, -4, 6, -4, 1)
    """
    sigma = check_sigma(sigma)
    coeffs = tuple(binomial(2 * sigma, k) * (-1) ** (k + sigma) for k in range(2 * sigma + 1))
    return StencilCoefficients(sigma, coeffs)


def omegas(sigma: int) -> tuple[int, ...]:
    """Off-diagonals ``omega_1..omega_sigma`` of the free polydiagonal matrix."""
    sigma = check_sigma(sigma)
    return tuple(binomial(2 * sigma, sigma + i) * (-1) ** i for i in range(1, sigma + 1))


def central_coefficient(sigma: int) -> int:
    return binomial(2 * check_sigma(sigma), sigma)


# ---------------------------------------------------------------------------
# difference operators


def difference(phi: Sequence) -> Sequence:
    """Forward difference ``(D phi)(n) = phi(n+1) - phi(n)``."""
    if phi.is_zero:
        return phi
    lo, hi = phi.support
    return Sequence(lo - 1, phi.window(lo, hi + 1) - phi.window(lo - 1, hi))


def difference_adjoint(phi: Sequence) -> Sequence:
    """Adjoint ``(D* phi)(n) = phi(n-1) - phi(n)``."""
    if phi.is_zero:
        return phi
    lo, hi = phi.support
    return Sequence(lo, phi.window(lo - 1, hi) - phi.window(lo, hi + 1))


def difference_power(phi: Sequence, k: int) -> Sequence:
    for _ in range(k):
        phi = difference(phi)
    return phi


def apply_laplacian_power(sigma: int, phi: Sequence, mode: str = "closed_form") -> Sequence:
    """Apply ``L**sigma`` to a finitely supported sequence.

    ``mode="closed_form"`` convolves with the binomial stencil,
    ``mode="recursive"`` applies ``D* D`` ``sigma`` times.  On integer
    input both are exact and agree bitwise.
    """
    sigma = check_sigma(sigma)
    if mode == "closed_form":
        if phi.is_zero:
            return phi
        stencil = laplacian_stencil(sigma).as_array()
        vals = phi.values
        if vals.dtype.kind == "f":
            stencil = stencil.astype(np.float64)
        # stencil is symmetric, so convolution and correlation coincide
        return Sequence(phi.offset - sigma, np.convolve(vals, stencil))
    if mode == "recursive":
        for _ in range(sigma):
            phi = difference_adjoint(difference(phi))
        return phi
    raise ValueError(f"unknown mode {mode!r}; expected 'closed_form' or 'recursive'")


def symbol(sigma: int, x):
    """Fourier multiplier of ``L**sigma`` as a cosine sum.

    Accepts a scalar or array ``x`` (radians).  Equals
    ``(4 sin(x/2)**2)**sigma``.
    """
    sigma = check_sigma(sigma)
    x = np.asarray(x, dtype=float)
    c = laplacian_stencil(sigma).coeffs
    out = np.full(x.shape, float(c[sigma]))
    for k in range(sigma):
        out = out + 2.0 * c[k] * np.cos((sigma - k) * x)
    return out if out.ndim else float(out)


def symbol_closed_form(sigma: int, x):
    x = np.asarray(x, dtype=float)
    out = (4.0 * np.sin(x / 2.0) ** 2) ** sigma
    return out if out.ndim else float(out)


def essential_spectrum(kind: str, sigma: int) -> tuple[int, int]:
    """Essential spectrum as an integer interval ``(lo, hi)``.

    ``kind`` is ``"laplacian_power"`` for ``L**sigma``, ``"w_sigma"`` for the
    polydiagonal matrix, or ``"shifted_laplacian_power"`` for
    ``L**sigma - 4**sigma``.
    """
    sigma = check_sigma(sigma)
    top = 4 ** sigma
    if kind == "laplacian_power":
        return 0, top
    if kind == "w_sigma":
        c = central_coefficient(sigma)
        return -c, top - c
    if kind == "shifted_laplacian_power":
        return -top, 0
    raise ValueError(f"unknown operator kind {kind!r}")


# ---------------------------------------------------------------------------
# polydiagonal matrices


@dataclass(frozen=True)
class PolyJacobiCoefficients:
    """Data of a polydiagonal matrix as a compact perturbation of the free one.

    ``deviations[i-1]`` holds ``a^i_n - omega_i``; ``b`` is the diagonal.
    """

    sigma: int
    b: Sequence = field(default_factory=Sequence)
    deviations: tuple[Sequence, ...] = ()

    def __post_init__(self):
        check_sigma(self.sigma)
        devs = tuple(self.deviations)
        if len(devs) > self.sigma:
            raise ValueError(f"got {len(devs)} deviation bands for sigma={self.sigma}")
        devs = devs + (Sequence(),) * (self.sigma - len(devs))
        object.__setattr__(self, "deviations", devs)

    @classmethod
    def from_entries(cls, sigma: int, b=(), deviations=()) -> "PolyJacobiCoefficients":
        """``b`` as ``(n, value)`` pairs, ``deviations`` as ``(band, n, value)``."""
        sigma = check_sigma(sigma)
        bands: list[list[tuple[int, float]]] = [[] for _ in range(sigma)]
        for band, n, value in deviations:
            if not 1 <= band <= sigma:
                raise ValueError(f"deviation band {band} outside 1..{sigma}")
            bands[band - 1].append((n, value))
        return cls(sigma, Sequence.from_entries(b), tuple(Sequence.from_entries(e) for e in bands))

    @property
    def omegas(self) -> tuple[int, ...]:
        return omegas(self.sigma)

    @property
    def has_deviations(self) -> bool:
        return any(not d.is_zero for d in self.deviations)

    @property
    def is_free(self) -> bool:
        return self.b.is_zero and not self.has_deviations

    def support(self) -> tuple[int, int] | None:
        """Smallest index window touching every perturbed matrix entry."""
        lo, hi = None, None
        if not self.b.is_zero:
            lo, hi = self.b.support
        for i, d in enumerate(self.deviations, start=1):
            if d.is_zero:
                continue
            d_lo, d_hi = d.support
            d_hi += i
            lo = d_lo if lo is None else min(lo, d_lo)
            hi = d_hi if hi is None else max(hi, d_hi)
        return None if lo is None else (lo, hi)

    def scaled(self, factor: float) -> "PolyJacobiCoefficients":
        return PolyJacobiCoefficients(
            self.sigma, self.b * factor, tuple(d * factor for d in self.deviations)
        )

    def with_b(self, b: Sequence) -> "PolyJacobiCoefficients":
        return PolyJacobiCoefficients(self.sigma, b, self.deviations)


@dataclass(frozen=True, eq=False)
class BandedSymmetricMatrix:
    """Real symmetric banded matrix; ``bands[d]`` is the ``d``-th superdiagonal."""

    bands: tuple[np.ndarray, ...]

    def __post_init__(self):
        bands = tuple(np.array(b, dtype=float) for b in self.bands)
        if not bands or bands[0].size == 0:
            raise ValueError("matrix dimension must be positive")
        dim = bands[0].size
        for d, band in enumerate(bands):
            if band.size != max(dim - d, 0):
                raise ValueError(f"band {d} has length {band.size}, expected {max(dim - d, 0)}")
            band.flags.writeable = False
        object.__setattr__(self, "bands", bands)

    @property
    def dim(self) -> int:
        return self.bands[0].size

    @property
    def bandwidth(self) -> int:
        return len(self.bands) - 1

    @property
    def diagonal(self) -> np.ndarray:
        return self.bands[0]

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.bands[0])
        for d in range(1, len(self.bands)):
            if self.bands[d].size:
                out += np.diag(self.bands[d], d) + np.diag(self.bands[d], -d)
        return out

    def to_upper_band(self) -> np.ndarray:
        """LAPACK upper band storage: ``ab[u + i - j, j] = A[i, j]``."""
        u, n = self.bandwidth, self.dim
        ab = np.zeros((u + 1, n))
        for d, band in enumerate(self.bands):
            ab[u - d, d:] = band
        return ab

    def add_diagonal(self, shift) -> "BandedSymmetricMatrix":
        return BandedSymmetricMatrix((self.bands[0] + shift,) + self.bands[1:])

    def __sub__(self, other: "BandedSymmetricMatrix") -> "BandedSymmetricMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        width = max(self.bandwidth, other.bandwidth)
        out = []
        for d in range(width + 1):
            a = self.bands[d] if d <= self.bandwidth else np.zeros(max(self.dim - d, 0))
            b = other.bands[d] if d <= other.bandwidth else np.zeros(max(self.dim - d, 0))
            out.append(a - b)
        return BandedSymmetricMatrix(tuple(out))

    def norm_bound(self) -> float:
        """Max absolute row sum; bounds the spectral norm from above."""
        rows = np.abs(self.bands[0]).copy()
        for d in range(1, len(self.bands)):
            band = np.abs(self.bands[d])
            rows[:-d or None] += band
            rows[d:] += band
        return float(rows.max())


class WindowTooSmallError(ValueError):
    pass


def minimal_window(coeffs: PolyJacobiCoefficients) -> tuple[int, int]:
    """Smallest admissible truncation window for ``coeffs``."""
    sigma = coeffs.sigma
    sup = coeffs.support()
    lo, hi = (0, 0) if sup is None else sup
    width = hi - lo + 1
    if width < 2 * sigma + 1:
        hi = lo + 2 * sigma
    return lo, hi


def assemble_w_sigma(coeffs: PolyJacobiCoefficients, window: Seq[int]) -> BandedSymmetricMatrix:
    """Finite section of the polydiagonal matrix on indices ``lo..hi``.

    Entry ``(n, n+i)`` is ``omega_i + deviation``, the diagonal is ``b``;
    everything reaching outside the window is dropped.
    """
    lo, hi = int(window[0]), int(window[1])
    sigma = coeffs.sigma
    need_lo, need_hi = minimal_window(coeffs)
    covered = coeffs.support() is None or (lo <= need_lo and hi >= need_hi)
    if hi - lo + 1 < 2 * sigma + 1 or not covered:
        raise WindowTooSmallError(
            f"window [{lo}, {hi}] does not cover the perturbation; minimal window is "
            f"[{need_lo}, {need_hi}] (at least {2 * sigma + 1} sites)"
        )
    dim = hi - lo + 1
    bands = [coeffs.b.window(lo, hi).astype(float)]
    for i, (w, dev) in enumerate(zip(coeffs.omegas, coeffs.deviations), start=1):
        if dim - i <= 0:
            bands.append(np.zeros(0))
            continue
        bands.append(w + dev.window(lo, hi - i).astype(float))
    return BandedSymmetricMatrix(tuple(bands))


def laplacian_power_section(sigma: int, window: Seq[int], potential: Sequence | None = None,
                            sign: int = 1, shift: float = 0.0) -> BandedSymmetricMatrix:
    """Finite section of ``L**sigma + sign*potential + shift`` on ``lo..hi``."""
    sigma = check_sigma(sigma)
    lo, hi = int(window[0]), int(window[1])
    dim = hi - lo + 1
    if dim < 1:
        raise WindowTooSmallError(f"empty window [{lo}, {hi}]")
    c = laplacian_stencil(sigma).coeffs
    diag = np.full(dim, float(c[sigma]) + shift)
    if potential is not None and not potential.is_zero:
        p_lo, p_hi = potential.support
        if p_lo < lo or p_hi > hi:
            raise WindowTooSmallError(
                f"window [{lo}, {hi}] does not cover potential support [{p_lo}, {p_hi}]"
            )
        diag = diag + sign * potential.window(lo, hi).astype(float)
    bands = [diag] + [np.full(max(dim - i, 0), float(c[sigma + i])) for i in range(1, sigma + 1)]
    return BandedSymmetricMatrix(tuple(bands))


def sandwich_potentials(coeffs: PolyJacobiCoefficients) -> tuple[Sequence, Sequence]:
    """Diagonals ``b -/+ s`` trapping the matrix between two free-offdiagonal ones.

    ``s_n = sum_k |a^k_{n-k} - omega_k| + |a^k_n - omega_k|``.
    """
    s = Sequence()
    for k, dev in enumerate(coeffs.deviations, start=1):
        mag = dev.map(np.abs)
        s = s + mag + mag.shift(k)
    return coeffs.b - s, coeffs.b + s


def sandwich_bounds(coeffs: PolyJacobiCoefficients) -> tuple[PolyJacobiCoefficients, PolyJacobiCoefficients]:
    """Free-offdiagonal coefficient sets with diagonals ``b^(-)`` and ``b^(+)``."""
    b_minus, b_plus = sandwich_potentials(coeffs)
    return (PolyJacobiCoefficients(coeffs.sigma, b_minus),
            PolyJacobiCoefficients(coeffs.sigma, b_plus))
