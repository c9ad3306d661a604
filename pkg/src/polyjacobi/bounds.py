"""Lieb-Thirring-type constants and the bound checks built on them.

Three inequalities are checked:

``thm2``
    negative eigenvalues ``e_j`` of ``L**sigma - b`` (``b >= 0``):
    ``sum |e_j|**gamma <= eta * sum b_n**(gamma + 1/(2 sigma))``.
``cor3``
    positive eigenvalues of ``L**sigma - 4**sigma + b`` (``b >= 0``),
    same right-hand side.
``thm4``
    eigenvalues of the polydiagonal matrix outside its essential interval,
    measured from the nearer edge, against
    ``nu * (sum |b_n|**q + 4 sum_n sum_k |a^k_n - omega_k|**q)``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .operators import PolyJacobiCoefficients, check_sigma
from .sequence import Sequence
from .spectrum import DEFAULT_TOLERANCE, SpectralReport, discrete_spectrum, riesz_mean

THEOREMS = ("thm2", "cor3", "thm4")
RATIO_SLACK = 1e-9


class DomainError(ValueError):
    """Input violates a hypothesis of the inequality being evaluated."""


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not gamma >= 1:
        raise DomainError(f"gamma={gamma} must be >= 1")
    return gamma


def _log_gamma_factor(sigma: int, gamma: float) -> float:
    s2 = 2 * sigma
    return (math.lgamma((2 * s2 + 1) / s2) + math.lgamma(gamma + 1)
            - math.lgamma(gamma + (s2 + 1) / s2))


def eta(sigma: int, gamma: float) -> float:
    """Constant for the attractive higher-order Schroedinger operator."""
    sigma = check_sigma(sigma)
    gamma = _check_gamma(gamma)
    s2 = 2 * sigma
    return math.exp(math.log(s2) - (s2 + 1) / s2 * math.log(s2 + 1) + _log_gamma_factor(sigma, gamma))


def nu(sigma: int, gamma: float) -> float:
    """Constant for the polydiagonal matrix bound."""
    sigma = check_sigma(sigma)
    gamma = _check_gamma(gamma)
    s2 = 2 * sigma
    return math.exp(math.log(s2) + (gamma - 2) * math.log(s2 + 1) + _log_gamma_factor(sigma, gamma))


def first_moment_constant(sigma: int) -> float:
    """``2 sigma / (2 sigma + 1)**((2 sigma + 1) / (2 sigma))``, the ``gamma = 1`` constant."""
    s2 = 2 * check_sigma(sigma)
    return s2 / (s2 + 1) ** ((s2 + 1) / s2)


def exponent(sigma: int, gamma: float) -> float:
    return gamma + 1.0 / (2 * sigma)


def rhs_thm2(sigma: int, gamma: float, b: Sequence) -> float:
    """``eta * sum_n b_n**(gamma + 1/(2 sigma))``; ``b`` must be nonnegative."""
    if not b.is_zero and np.any(b.values < 0):
        raise DomainError("potential must be nonnegative")
    return eta(sigma, gamma) * b.power_sum(exponent(sigma, gamma))


def rhs_thm4(sigma: int, gamma: float, coeffs: PolyJacobiCoefficients) -> float:
    q = exponent(sigma, gamma)
    total = coeffs.b.power_sum(q) + 4.0 * sum(d.power_sum(q) for d in coeffs.deviations)
    return nu(sigma, gamma) * total


def instance_digest(coeffs: PolyJacobiCoefficients) -> str:
    """Short stable hash of the coefficient data."""
    payload = {
        "sigma": coeffs.sigma,
        "b": [[n, repr(float(v))] for n, v in coeffs.b.items()],
        "deviations": [[[n, repr(float(v))] for n, v in d.items()] for d in coeffs.deviations],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    sigma: int
    gamma: float
    lhs: float
    rhs: float
    ratio: float
    constant: float
    instance_digest: str
    converged: bool = True
    status: str = "pass"
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return asdict(self)


def bound_ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


def _status(ratio: float, converged: bool) -> str:
    if not converged:
        return "indeterminate"
    return "pass" if ratio <= 1 + RATIO_SLACK else "fail"


OPERATOR_FOR = {"thm2": "h_sigma", "cor3": "shifted_h_sigma", "thm4": "w_sigma"}


def operator_for(theorem: str) -> str:
    try:
        return OPERATOR_FOR[theorem]
    except KeyError:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}") from None


def check_hypotheses(theorem: str, coeffs: PolyJacobiCoefficients) -> None:
    if theorem in ("thm2", "cor3"):
        if coeffs.has_deviations:
            raise DomainError(f"{theorem} applies to a diagonal potential only; off-diagonal deviations given")
        if not coeffs.b.is_zero and np.any(coeffs.b.values < 0):
            raise DomainError(f"{theorem} requires b_n >= 0")


def lhs_from_spectrum(theorem: str, report: SpectralReport, gamma: float) -> float:
    if theorem == "thm2":
        return riesz_mean(report.eigenvalues_below, 0.0, gamma, "below")
    if theorem == "cor3":
        return riesz_mean(report.eigenvalues_above, 0.0, gamma, "above")
    lo, hi = report.essential
    return (riesz_mean(report.eigenvalues_below, lo, gamma, "below")
            + riesz_mean(report.eigenvalues_above, hi, gamma, "above"))


def rhs_for(theorem: str, sigma: int, gamma: float, coeffs: PolyJacobiCoefficients) -> tuple[float, float]:
    """``(rhs, constant)`` for ``theorem``."""
    if theorem == "thm4":
        return rhs_thm4(sigma, gamma, coeffs), nu(sigma, gamma)
    return rhs_thm2(sigma, gamma, coeffs.b), eta(sigma, gamma)


def verify_bounds(theorem: str, coeffs: PolyJacobiCoefficients, gammas,
                  tolerance: float = DEFAULT_TOLERANCE, edge_margin: float | None = None,
                  spectrum: SpectralReport | None = None) -> list[BoundReport]:
    """One :class:`BoundReport` per ``gamma``, sharing a single spectrum computation.

    Hypothesis violations produce ``status="domain_error"`` rows instead of
    raising, so that batch runs keep going.
    """
    sigma = coeffs.sigma
    digest = instance_digest(coeffs)
    operator = operator_for(theorem)
    try:
        check_hypotheses(theorem, coeffs)
    except DomainError as exc:
        return [BoundReport(theorem, sigma, float(g), math.nan, math.nan, math.nan, math.nan,
                            digest, False, "domain_error", str(exc)) for g in gammas]
    if spectrum is None:
        spectrum = discrete_spectrum(coeffs, operator, tolerance=tolerance, edge_margin=edge_margin)
    reports = []
    for g in gammas:
        try:
            g = _check_gamma(g)
        except DomainError as exc:
            reports.append(BoundReport(theorem, sigma, float(g), math.nan, math.nan, math.nan,
                                       math.nan, digest, spectrum.converged, "domain_error", str(exc)))
            continue
        lhs = lhs_from_spectrum(theorem, spectrum, g)
        rhs, const = rhs_for(theorem, sigma, g, coeffs)
        ratio = bound_ratio(lhs, rhs)
        reports.append(BoundReport(theorem, sigma, g, lhs, rhs, ratio, const, digest,
                                   spectrum.converged, _status(ratio, spectrum.converged)))
    return reports


def verify_bound(theorem: str, sigma: int, gamma: float, coeffs: PolyJacobiCoefficients,
                 tolerance: float = DEFAULT_TOLERANCE) -> BoundReport:
    """Check a single inequality; raises :class:`DomainError` on bad hypotheses."""
    if coeffs.sigma != sigma:
        raise ValueError(f"coefficients are for sigma={coeffs.sigma}, not {sigma}")
    _check_gamma(gamma)
    check_hypotheses(theorem, coeffs)
    return verify_bounds(theorem, coeffs, [gamma], tolerance=tolerance)[0]


# ---------------------------------------------------------------------------
# identities behind the constants


def beta_lift(sigma: int, gamma: float, b: float = 1.0) -> float:
    """``eta(sigma, 1) / B(gamma-1, 2) * int_0^b t**(gamma-2) (b-t)**p dt`` by quadrature.

    For ``gamma > 1`` this equals ``eta(sigma, gamma) * b**(gamma + 1/(2 sigma))``.
    """
    from scipy.integrate import quad

    if gamma <= 1:
        raise DomainError("the moment lift needs gamma > 1")
    p = (2 * sigma + 1) / (2 * sigma)
    integral, _ = quad(lambda t: t ** (gamma - 2) * (b - t) ** p, 0.0, b, epsabs=0, epsrel=1e-12, limit=200)
    return first_moment_constant(sigma) * integral / beta(gamma - 1, 2)


def beta(x: float, y: float) -> float:
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def moment_from_layer_cake(e: float, gamma: float) -> float:
    """``(1/B(gamma-1, 2)) int_0^e t**(gamma-2) (e - t) dt`` by quadrature; equals ``e**gamma``."""
    from scipy.integrate import quad

    integral, _ = quad(lambda t: t ** (gamma - 2) * (e - t), 0.0, e, epsabs=0, epsrel=1e-12, limit=200)
    return integral / beta(gamma - 1, 2)


def jensen_gap(alphas, q: float) -> float:
    """``(2s+1)**(q-1) sum a_i**q - (sum a_i)**q`` for ``2s+1 = len(alphas)``; nonnegative."""
    a = np.asarray(alphas, dtype=float)
    return float(a.size ** (q - 1) * np.sum(a ** q) - np.sum(a) ** q)
