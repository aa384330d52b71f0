"""chowmat: exact Chow rings of matroids in the simplicial presentation."""

from .matroid import (
    FlatLattice,
    Matroid,
    closure,
    contract,
    direct_sum,
    flat_lattice,
    graphic,
    h_matroid,
    is_loopless,
    mask_of,
    matroid_from_bases,
    moebius,
    rank,
    restrict,
    set_of,
    uniform,
)
from .quotients import (
    HiggsChain,
    QuotientWitness,
    enumerate_relative_nested,
    f_cyclic_flats,
    higgs_factorization,
    is_quotient,
    is_relative_nested,
    matroid_intersection,
    principal_truncation,
)
from .bergman import (
    MinkowskiWeight,
    bergman_class,
    cap_with_h,
    check_balanced,
    degree_of_point,
)
from .chow import (
    AmpleDivisor,
    ChowElement,
    ChowRing,
    alpha_beta,
    convert,
    degree,
    hilbert_function,
    nested_basis,
    normal_form,
    poincare_pairing,
    ring_for,
    sample_ample,
)
from .hodge import (
    CharPoly,
    KahlerReport,
    LorentzianReport,
    SymmetricFormReport,
    VolumePolynomial,
    char_poly,
    dhr_check,
    dhr_degree,
    dhr_triple_report,
    hr_form,
    kahler_check,
    log_concavity_report,
    lorentzian_check,
    mconvex_support,
    mu_via_degrees,
    star_factorization_check,
    volume_polynomial,
)

__all__ = [name for name in dir() if not name.startswith("_")]
