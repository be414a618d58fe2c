"""Exact invariants for the Segre stratification of moduli of coherent systems on curves."""
from .numerics import (
    CSType,
    CurveContext,
    Rational,
    SubTriple,
    SubtypeSequence,
    alpha_slope,
    brill_noether_number,
    c21,
    cotype_dual_sequence,
    diophantine_unit_value,
    ext_positivity,
    extended_gcd,
    format_rational,
    margin_quantum,
    parse_rational,
    rank1_exists,
    slope_margin,
)
from .split import (
    SplitModel,
    coordinate_subtypes,
    equal_slope_alphas,
    split_segre,
    split_semistable,
    total_type,
)
from .strata import (
    SplittingCertificate,
    StratumLabel,
    classical_stratum_dims,
    enumerate_stratum_labels,
    extension_stability_check,
    nonemptiness_certificate,
    rank1_moduli_dim,
    segre_upper_bound,
    segre_value,
    stability_transfer_check,
    stratum_dim_bound,
    validate_certificate,
)
from .walls import (
    AlphaWindow,
    ChamberPartition,
    CriticalValue,
    alpha_of_subtype,
    chamber_partition,
    enumerate_virtual_criticals,
    margin_sign_profile,
    prune_by_brill_noether,
)

__version__ = "0.1.0"
