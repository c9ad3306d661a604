"""Higher-order discrete Schroedinger operators, polydiagonal Jacobi-type
matrices, and numerical checks of Lieb-Thirring-type bounds on their
discrete spectra."""

from .bounds import BoundReport, DomainError, eta, nu, rhs_thm2, rhs_thm4, verify_bound, verify_bounds
from .operators import (
    SIGMA_CAP,
    BandedSymmetricMatrix,
    PolyJacobiCoefficients,
    StencilCoefficients,
    apply_laplacian_power,
    assemble_w_sigma,
    binomial,
    difference,
    difference_adjoint,
    essential_spectrum,
    laplacian_stencil,
    omegas,
    sandwich_potentials,
    symbol,
)
from .sequence import Sequence
from .spectrum import SpectralReport, discrete_spectrum, eigenvalues_symmetric, riesz_mean

__version__ = "0.1.0"

__all__ = [
    "SIGMA_CAP",
    "BandedSymmetricMatrix",
    "BoundReport",
    "DomainError",
    "PolyJacobiCoefficients",
    "Sequence",
    "SpectralReport",
    "StencilCoefficients",
    "apply_laplacian_power",
    "assemble_w_sigma",
    "binomial",
    "difference",
    "difference_adjoint",
    "discrete_spectrum",
    "eigenvalues_symmetric",
    "essential_spectrum",
    "eta",
    "laplacian_stencil",
    "nu",
    "omegas",
    "rhs_thm2",
    "rhs_thm4",
    "riesz_mean",
    "sandwich_potentials",
    "symbol",
    "verify_bound",
    "verify_bounds",
]
