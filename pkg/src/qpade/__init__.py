"""Exact rational engine for q-Pade approximants and discrete Painlevé flows.

Everything is computed over :class:`fractions.Fraction`; every identity the
package claims is checked by exact equality, never numerically.
"""

from __future__ import annotations

from .qcore import Q, ExactScalar, qpoch, qpoch_multi, QHGFSpec, qhgf_terminating
from .series import (
    SURFACES,
    FACTOR_COUNTS,
    TruncSeries,
    Poly,
    lin,
    ParamSet,
    FactorSpec,
    factor_spec,
    tshift,
    tshift_inverse,
    paramset_to_text,
    paramset_from_text,
    random_paramset,
    generating_series,
    tsuda_series,
    p_list,
    pk_closed_form,
)
from .pade import (
    PadePair,
    PadeReport,
    build_PQ,
    build_PQ_single_det,
    pade_linear_solve,
    verify_pade,
    schur,
    tau_value,
)
from .contiguity import (
    CasoratiSet,
    FactorData,
    casorati,
    casorati_bracket,
    extract_factors,
    special_fg,
    assemble_L2_L3,
    ContigOperator,
    contig_apply,
)
from .painleve import (
    State,
    random_state,
    step_forward,
    step_backward,
    eq1_residual,
    eq2_residual,
    c0c1,
    BasePoint,
    base_points,
    certify_base_point,
    certify_all,
    LaxOperator,
    lax_operator,
    lax_apply_poly,
    lax_apply_series,
    compatibility_residual,
)
from .acceptance import CriterionResult, run_all

__version__ = "0.1.0"
