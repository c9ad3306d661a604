"""Seeded randomized checks of the auxiliary inequalities and the bounds.

Every check returns a *margin* (right-hand side minus left-hand side, or
the analogous slack) together with the threshold it has to clear.
:func:`run_suite` draws instances from independent per-check random
streams, so the report for a given seed is reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .operators import (
    PolyJacobiCoefficients,
    assemble_w_sigma,
    difference_power,
    minimal_window,
    sandwich_bounds,
)
from .sequence import Sequence
from .spectrum import eigenvalues_symmetric

KOLMOGOROV_PAIRS = ((1, 2), (1, 3), (2, 3), (2, 5))
INEQUALITY_SLACK = 1e-12
SOLVER_SLACK = 1e-10
GRAM_TOLERANCE = 1e-12
REJECTION_THRESHOLD = 1e-8
BOUND_GAMMAS = (1.0, 1.5, 2.0)
LIFT_GAMMAS = (1.5, 2.0, 3.0)


@dataclass(frozen=True)
class RandomInstanceSpec:
    seed: int = 42
    support_radius: int = 15
    amplitude: float = 1.0
    sigma_range: tuple[int, int] = (1, 3)
    count: int = 100

    def rng(self, stream: str) -> np.random.Generator:
        """Generator for one named stream; streams do not share state."""
        key = zlib.crc32(stream.encode())
        return np.random.default_rng(np.random.SeedSequence([self.seed & (2**64 - 1), key]))

    @property
    def sigmas(self) -> list[int]:
        lo, hi = self.sigma_range
        return list(range(lo, hi + 1))


# ---------------------------------------------------------------------------
# random instances


def random_sequence(rng: np.random.Generator, radius: int, amplitude: float = 1.0,
                    nonnegative: bool = False) -> Sequence:
    """Uniform entries on ``[-r, r]`` with ``r`` drawn from ``0..radius``; never zero."""
    while True:
        r = int(rng.integers(0, radius + 1))
        lo = 0.0 if nonnegative else -amplitude
        seq = Sequence(-r, rng.uniform(lo, amplitude, 2 * r + 1))
        if not seq.is_zero:
            return seq


def wave_packet(rng: np.random.Generator, radius: int, amplitude: float = 1.0) -> Sequence:
    """Gaussian-enveloped cosine; nearly saturates the Kolmogorov inequality."""
    r = max(int(radius), 4)
    n = np.arange(-r, r + 1)
    width = rng.uniform(r / 4, r / 2)
    freq = rng.uniform(0.2, np.pi - 0.2)
    phase = rng.uniform(0, 2 * np.pi)
    vals = amplitude * np.cos(freq * n + phase) * np.exp(-(n / width) ** 2)
    return Sequence(-r, vals)


def random_test_sequence(rng: np.random.Generator, index: int, radius: int, amplitude: float) -> Sequence:
    # alternate rough and near-extremal inputs so the margins are non-vacuous
    if index % 2:
        return wave_packet(rng, radius, amplitude)
    return random_sequence(rng, radius, amplitude)


def random_coefficients(rng: np.random.Generator, sigma: int, radius: int,
                        amplitude: float = 1.0) -> PolyJacobiCoefficients:
    b = random_sequence(rng, radius, amplitude)
    devs = tuple(random_sequence(rng, radius, amplitude) for _ in range(sigma))
    return PolyJacobiCoefficients(sigma, b, devs)


def random_potential(rng: np.random.Generator, sigma: int, radius: int,
                     amplitude: float = 1.0) -> PolyJacobiCoefficients:
    return PolyJacobiCoefficients(sigma, random_sequence(rng, radius, amplitude, nonnegative=True))


# ---------------------------------------------------------------------------
# inequalities


def _require_nonzero(phi: Sequence) -> None:
    if phi.is_zero:
        raise ValueError("inequality is degenerate for the zero sequence")


def kolmogorov_sides(phi: Sequence, k: int, n: int) -> tuple[float, float]:
    """``(||D^k phi||, ||phi||**(1-k/n) ||D^n phi||**(k/n))``."""
    if not n > k >= 1:
        raise ValueError(f"need n > k >= 1, got k={k}, n={n}")
    _require_nonzero(phi)
    lhs = difference_power(phi, k).norm()
    rhs = phi.norm() ** (1 - k / n) * difference_power(phi, n).norm() ** (k / n)
    return lhs, rhs


def check_kolmogorov(phi: Sequence, k: int, n: int) -> float:
    lhs, rhs = kolmogorov_sides(phi, k, n)
    return rhs - lhs


def agmon_sides(phi: Sequence, sigma: int) -> tuple[float, float]:
    _require_nonzero(phi)
    s2 = 2 * sigma
    lhs = phi.norm(np.inf)
    rhs = phi.norm() ** (1 - 1 / s2) * difference_power(phi, sigma).norm() ** (1 / s2)
    return lhs, rhs


def check_agmon(phi: Sequence, sigma: int) -> float:
    lhs, rhs = agmon_sides(phi, sigma)
    return rhs - lhs


@dataclass(frozen=True, eq=False)
class OrthonormalSystem:
    sequences: tuple[Sequence, ...]
    gram_tolerance: float = GRAM_TOLERANCE

    def __post_init__(self):
        if not self.sequences:
            raise ValueError("an orthonormal system needs at least one sequence")

    @property
    def size(self) -> int:
        return len(self.sequences)

    def span(self) -> tuple[int, int]:
        sups = [s.support for s in self.sequences if not s.is_zero]
        return min(s[0] for s in sups), max(s[1] for s in sups)

    def gram(self) -> np.ndarray:
        return np.array([[a.dot(b) for b in self.sequences] for a in self.sequences])

    def gram_deviation(self) -> float:
        return float(np.abs(self.gram() - np.eye(self.size)).max())

    def validate(self) -> None:
        dev = self.gram_deviation()
        if not dev <= self.gram_tolerance:
            raise ValueError(f"Gram matrix deviates from identity by {dev:.3g} > {self.gram_tolerance:.3g}")

    def density(self) -> Sequence:
        """``rho(n) = sum_j |psi_j(n)|**2``."""
        lo, hi = self.span()
        return Sequence(lo, sum(s.window(lo, hi).astype(float) ** 2 for s in self.sequences))


def orthonormalize(seqs, gram_tolerance: float = GRAM_TOLERANCE) -> OrthonormalSystem:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Raises ``ValueError`` when a vector is numerically dependent on the
    previous ones (residual below ``REJECTION_THRESHOLD`` after unit scaling).
    """
    seqs = list(seqs)
    sups = [s.support for s in seqs if not s.is_zero]
    if len(sups) != len(seqs):
        raise ValueError("cannot orthonormalize the zero sequence")
    lo, hi = min(s[0] for s in sups), max(s[1] for s in sups)
    basis: list[np.ndarray] = []
    for s in seqs:
        v = s.window(lo, hi).astype(float)
        v = v / np.linalg.norm(v)
        for _ in range(2):
            for q in basis:
                v = v - np.dot(q, v) * q
        norm = np.linalg.norm(v)
        if norm < REJECTION_THRESHOLD:
            raise ValueError(f"near-dependent vector (residual {norm:.3g})")
        basis.append(v / norm)
    system = OrthonormalSystem(tuple(Sequence(lo, q) for q in basis), gram_tolerance)
    system.validate()
    return system


def make_orthonormal_system(rng: np.random.Generator, n: int, radius: int = 20,
                            amplitude: float = 1.0, retries: int = 10) -> OrthonormalSystem:
    """``n`` orthonormalized random sequences supported on a common window."""
    if n < 1:
        raise ValueError("need n >= 1")
    radius = max(radius, (n + 1) // 2)
    for _ in range(retries):
        raw = [Sequence(-radius, rng.uniform(-amplitude, amplitude, 2 * radius + 1)) for _ in range(n)]
        try:
            return orthonormalize(raw)
        except ValueError:
            continue
    raise RuntimeError(f"no orthonormal system of size {n} after {retries} attempts")


def dgsi_sides(system: OrthonormalSystem, sigma: int) -> tuple[float, float]:
    """``(sum_n rho**(2 sigma + 1), sum_j ||D^sigma psi_j||**2)``."""
    system.validate()
    lhs = system.density().power_sum(2 * sigma + 1)
    rhs = sum(difference_power(psi, sigma).power_sum(2) for psi in system.sequences)
    return lhs, rhs


def check_dgsi(system: OrthonormalSystem, sigma: int) -> float:
    lhs, rhs = dgsi_sides(system, sigma)
    return rhs - lhs


def check_sandwich(coeffs: PolyJacobiCoefficients, window=None) -> tuple[float, float]:
    """Smallest eigenvalues of ``W(b+) - W`` and ``W - W(b-)`` on ``window``."""
    if window is None:
        lo, hi = minimal_window(coeffs)
        window = (lo - coeffs.sigma, hi + coeffs.sigma)
    lower, upper = sandwich_bounds(coeffs)
    w = assemble_w_sigma(coeffs, window)
    w_plus = assemble_w_sigma(upper, window)
    w_minus = assemble_w_sigma(lower, window)
    return (float(eigenvalues_symmetric(w_plus - w)[0]),
            float(eigenvalues_symmetric(w - w_minus)[0]))


# ---------------------------------------------------------------------------
# suite


@dataclass(frozen=True)
class CheckResult:
    check: str
    index: int
    margin: float
    threshold: float
    scale: float
    status: str
    digest: str

    @property
    def relative_margin(self) -> float:
        return self.margin / self.scale if self.scale > 0 else self.margin


def _digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        if isinstance(a, Sequence):
            h.update(str(a.offset).encode())
            a = a.values
        h.update(np.ascontiguousarray(np.asarray(a, dtype=float)).tobytes())
    return h.hexdigest()[:16]


def _coeff_digest(c: PolyJacobiCoefficients) -> str:
    return _digest(c.b, *c.deviations)


def _result(check, index, margin, threshold, scale, digest) -> CheckResult:
    return CheckResult(check, index, float(margin), float(threshold), float(scale),
                       "pass" if margin >= threshold else "fail", digest)


def _kolmogorov_items(spec: RandomInstanceSpec):
    rng = spec.rng("kolmogorov")
    for i in range(spec.count):
        k, n = KOLMOGOROV_PAIRS[i % len(KOLMOGOROV_PAIRS)]
        phi = random_test_sequence(rng, i, spec.support_radius, spec.amplitude)
        lhs, rhs = kolmogorov_sides(phi, k, n)
        yield _result("kolmogorov", i, rhs - lhs, -INEQUALITY_SLACK * rhs, rhs, _digest(phi))


def _agmon_items(spec: RandomInstanceSpec):
    rng = spec.rng("agmon")
    sigmas = spec.sigmas
    for i in range(spec.count):
        sigma = sigmas[i % len(sigmas)]
        phi = random_test_sequence(rng, i, spec.support_radius, spec.amplitude)
        lhs, rhs = agmon_sides(phi, sigma)
        yield _result("agmon", i, rhs - lhs, -INEQUALITY_SLACK * rhs, rhs, _digest(phi))


def _dgsi_items(spec: RandomInstanceSpec):
    rng = spec.rng("dgsi")
    sigmas = spec.sigmas
    for i in range(spec.count):
        sigma = sigmas[i % len(sigmas)]
        system = make_orthonormal_system(rng, 1 + i % 6, max(spec.support_radius, 3), spec.amplitude)
        lhs, rhs = dgsi_sides(system, sigma)
        yield _result("dgsi", i, rhs - lhs, -SOLVER_SLACK * rhs, rhs, _digest(*system.sequences))


def _sandwich_items(spec: RandomInstanceSpec):
    rng = spec.rng("sandwich")
    sigmas = spec.sigmas
    for i in range(spec.count):
        sigma = sigmas[i % len(sigmas)]
        c = random_coefficients(rng, sigma, min(spec.support_radius, 10), spec.amplitude)
        lo, hi = minimal_window(c)
        window = (lo - sigma, hi + sigma)
        norm = assemble_w_sigma(c, window).norm_bound()
        plus, minus = check_sandwich(c, window)
        yield _result("sandwich", i, min(plus, minus), -SOLVER_SLACK * norm, norm, _coeff_digest(c))


def _jensen_items(spec: RandomInstanceSpec):
    rng = spec.rng("jensen")
    sigmas = spec.sigmas
    for i in range(spec.count):
        sigma = sigmas[i % len(sigmas)]
        alphas = rng.uniform(0, spec.amplitude, 2 * sigma + 1)
        q = float(rng.uniform(1, 3))
        scale = alphas.size ** (q - 1) * float(np.sum(alphas ** q))
        yield _result("jensen", i, bounds.jensen_gap(alphas, q), -INEQUALITY_SLACK * scale,
                      scale, _digest(alphas, [q]))


def _constant_items(spec: RandomInstanceSpec):
    sigmas = spec.sigmas
    gammas = (1.0, 1.5, 2.0, 3.0)
    for i in range(spec.count):
        sigma = sigmas[i % len(sigmas)]
        gamma = gammas[(i // len(sigmas)) % len(gammas)]
        ratio = bounds.nu(sigma, gamma) / bounds.eta(sigma, gamma)
        expected = (2 * sigma + 1) ** (gamma - (2 * sigma - 1) / (2 * sigma))
        err = abs(ratio / expected - 1)
        if gamma == 1.0:
            err = max(err, abs(bounds.eta(sigma, 1.0) / bounds.first_moment_constant(sigma) - 1))
        yield _result("constants", i, -err, -1e-12, 1.0, _digest([sigma, gamma]))


def _lift_items(spec: RandomInstanceSpec):
    rng = spec.rng("lift")
    for i in range(spec.count):
        gamma = LIFT_GAMMAS[i % len(LIFT_GAMMAS)]
        e = float(rng.uniform(0.1, 10 * spec.amplitude))
        exact = e ** gamma
        err = abs(bounds.moment_from_layer_cake(e, gamma) - exact)
        yield _result("lift", i, -err, -1e-6 * exact, exact, _digest([e, gamma]))


def _bound_items(spec: RandomInstanceSpec, theorem: str):
    rng = spec.rng(theorem)
    sigmas = spec.sigmas if theorem != "thm4" else [s for s in spec.sigmas if s <= 2] or spec.sigmas[:1]
    for i in range(spec.count):
        sigma = sigmas[i % len(sigmas)]
        gamma = BOUND_GAMMAS[(i // len(sigmas)) % len(BOUND_GAMMAS)]
        if theorem == "thm4":
            c = random_coefficients(rng, sigma, min(spec.support_radius, 10), spec.amplitude)
        else:
            c = random_potential(rng, sigma, spec.support_radius, 5 * spec.amplitude)
        (rep,) = bounds.verify_bounds(theorem, c, [gamma])
        margin = 1 + bounds.RATIO_SLACK - rep.ratio
        res = _result(f"bound_{theorem}", i, margin, 0.0, 1.0, rep.instance_digest)
        if not rep.converged:
            res = CheckResult(res.check, i, res.margin, 0.0, 1.0, "indeterminate", res.digest)
        yield res


CHECKS = {
    "agmon": _agmon_items,
    "bound_cor3": lambda s: _bound_items(s, "cor3"),
    "bound_thm2": lambda s: _bound_items(s, "thm2"),
    "bound_thm4": lambda s: _bound_items(s, "thm4"),
    "constants": _constant_items,
    "dgsi": _dgsi_items,
    "jensen": _jensen_items,
    "kolmogorov": _kolmogorov_items,
    "lift": _lift_items,
    "sandwich": _sandwich_items,
}


@dataclass(frozen=True)
class SuiteReport:
    spec: RandomInstanceSpec
    results: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.status == "fail"]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def digest(self) -> str:
        h = hashlib.sha256(f"{self.spec.seed}:{self.spec.count}".encode())
        for r in self.results:
            h.update(f"{r.check}:{r.index}:{r.digest};".encode())
        return h.hexdigest()[:16]

    def by_check(self) -> dict[str, list[CheckResult]]:
        out: dict[str, list[CheckResult]] = {}
        for r in self.results:
            out.setdefault(r.check, []).append(r)
        return out

    def summary(self) -> str:
        lines = [f"selftest seed={self.spec.seed} count={self.spec.count}"]
        groups = self.by_check()
        if groups:
            lines.append(f"{'check':<12} {'cases':>6} {'failed':>6} {'indet':>6}  worst_relative_margin")
        for name, rs in groups.items():
            worst = min(r.relative_margin for r in rs)
            n_fail = sum(r.status == "fail" for r in rs)
            n_ind = sum(r.status == "indeterminate" for r in rs)
            lines.append(f"{name:<12} {len(rs):>6} {n_fail:>6} {n_ind:>6}  {worst:.17g}")
        lines.append(f"instances {self.digest}")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"{verdict}: {len(self.results)} checks, {len(self.failures)} failed")
        return "\n".join(lines) + "\n"


def run_suite(spec: RandomInstanceSpec, inject_fault: bool = False) -> SuiteReport:
    """Run every check ``spec.count`` times; results ordered by (check, index)."""
    results: list[CheckResult] = []
    for name in sorted(CHECKS):
        results.extend(CHECKS[name](spec))
    if inject_fault and results:
        r = results[0]
        results[0] = CheckResult(r.check, r.index, r.threshold - abs(r.scale) - 1.0,
                                 r.threshold, r.scale, "fail", r.digest)
    return SuiteReport(spec, tuple(results))
