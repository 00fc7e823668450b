"""Exact q-series, eta quotients and Eisenstein series, with searches for
forms whose t-expansions satisfy Atkin-Swinnerton-Dyer type congruences."""

from .series_core import QSeries, PrecisionExhausted, compose, revert, is_prime, padic_val
from .qconstructors import EtaQuotient, eta_quotient_series, jacobi_theta_sq, cusp_orders, is_holomorphic
from .char_eis import (
    DirichletChar,
    EisensteinElement,
    EisensteinCombo,
    PrimePredicate,
    eisenstein_series,
    eisenstein_basis,
    classical_eisenstein,
)
from .spaces import SpaceSpec, dim_M, dim_E, dim_S, condition_star, sturm_bound, build_basis
from .engine import (
    dlog,
    phi,
    expand_in_t,
    expand_in_t_mod,
    find_theorem1,
    find_theorem1_all,
    find_corollary,
    find_theorem2,
    verify_asd,
    verify_twisted,
    verify_threeterm,
    congruence_suite,
    transfer_check,
    SearchCertificate,
    CongruenceReport,
    ExpansionResult,
)

__version__ = "0.1.0"
