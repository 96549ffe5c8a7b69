"""Exact-arithmetic construction and verification of self-dual normal
integral bases in wildly-and-weakly ramified cyclic degree-p extensions of
unramified p-adic fields, via the overconvergent exponential
exp(gam*X - gam*X^p), together with the two-route computation of
norm-resolvents and modified twisted Gauss sums and the certification that
their product is 1.
"""

from .cyclotomic import CycInt, zeta_orthogonality
from .dwork import (
    DworkSeries,
    dwork_coeffs,
    dwork_eval,
    exp_series,
    kummer_unit,
    primitive_mu,
    teichmuller_int,
    unity_root,
)
from .extensions import (
    EpsilonClass,
    WeakExtension,
    build_extension,
    eps_lift,
    unit_classes,
)
from .gauss import (
    CharacterPinning,
    CharacterUnitError,
    WeakCharacter,
    character_unit,
    chi_eval,
    conductor_checks,
    crosscheck_kernel,
    gauss_sum,
    gauss_sum_closed_form,
    modified_gauss_sum,
    modified_twisted_gauss_sum,
)
from .resolvents import (
    RootOfUnityExponent,
    fourier_inversion_check,
    kummer_norm_check,
    norm_resolvent,
    resolvent,
    resolvent_pair,
    twist_exponent,
)
from .tower import (
    K,
    KPRIME,
    KummerTower,
    L,
    QP,
    PadicElem,
    PrecisionError,
    Tower,
    agrees,
    build_unramified,
    divide,
    embed,
    frobenius,
    gamma_elem,
    pow_padic,
    teichmuller,
    trace_norm,
)
from .verify import (
    ALL_CHECK_FAMILIES,
    CheckReport,
    RunConfig,
    emit_report,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CHECK_FAMILIES",
    "CharacterPinning",
    "CharacterUnitError",
    "CheckReport",
    "CycInt",
    "DworkSeries",
    "EpsilonClass",
    "K",
    "KPRIME",
    "KummerTower",
    "L",
    "PadicElem",
    "PrecisionError",
    "QP",
    "RootOfUnityExponent",
    "RunConfig",
    "Tower",
    "WeakCharacter",
    "WeakExtension",
    "agrees",
    "build_extension",
    "build_unramified",
    "character_unit",
    "chi_eval",
    "conductor_checks",
    "crosscheck_kernel",
    "divide",
    "dwork_coeffs",
    "dwork_eval",
    "emit_report",
    "eps_lift",
    "exp_series",
    "fourier_inversion_check",
    "frobenius",
    "gamma_elem",
    "gauss_sum",
    "gauss_sum_closed_form",
    "kummer_norm_check",
    "kummer_unit",
    "modified_gauss_sum",
    "modified_twisted_gauss_sum",
    "norm_resolvent",
    "pow_padic",
    "primitive_mu",
    "resolvent",
    "resolvent_pair",
    "run_suite",
    "teichmuller",
    "teichmuller_int",
    "trace_norm",
    "twist_exponent",
    "unit_classes",
    "unity_root",
    "zeta_orthogonality",
]
