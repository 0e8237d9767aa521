"""Rigorous Lasso toolkit: theory-driven penalties, orthogonal inference,
instrumental variables, and treatment effects for high-dimensional data."""

from .dataio import (
    DataError,
    Dataset,
    DesignMatrix,
    DesignSpec,
    expand_design,
    filter_columns_by_mean,
    load_csv,
)
from .inference import (
    ConfidenceBand,
    EffectEstimate,
    EffectsSet,
    confidence_band,
    double_selection_effect,
    effects_batch,
    partialling_out_effect,
)
from .iv import IvFit, rlasso_iv_select_x, rlasso_iv_select_xz, rlasso_iv_select_z, tsls
from .rlasso import (
    PenaltyConfig,
    RlassoFit,
    SupScoreResult,
    compute_loadings,
    lambda_heteroscedastic_xdep,
    lambda_heteroscedastic_xindep,
    lambda_homoscedastic_xdep,
    lambda_homoscedastic_xindep,
    predict,
    rlasso_fit,
    sup_score_test,
)
from .rlassologit import predict_proba, rlassologit_fit
from .shooting import ShootingWarning, shooting_lasso
from .simkit import (
    RngStream,
    SparseDgpConfig,
    draw_multipliers,
    gen_approx_sparse_linear,
    gen_causes_controls,
    gen_sparse_linear,
)
from .treatment import (
    TreatmentFit,
    bootstrap_se,
    rlasso_ate,
    rlasso_atet,
    rlasso_late,
    rlasso_latet,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # dataio
    "DataError",
    "Dataset",
    "DesignMatrix",
    "DesignSpec",
    "expand_design",
    "filter_columns_by_mean",
    "load_csv",
    # rlasso
    "PenaltyConfig",
    "RlassoFit",
    "SupScoreResult",
    "compute_loadings",
    "lambda_heteroscedastic_xdep",
    "lambda_heteroscedastic_xindep",
    "lambda_homoscedastic_xdep",
    "lambda_homoscedastic_xindep",
    "predict",
    "rlasso_fit",
    "sup_score_test",
    "predict_proba",
    "rlassologit_fit",
    "ShootingWarning",
    "shooting_lasso",
    # inference
    "ConfidenceBand",
    "EffectEstimate",
    "EffectsSet",
    "confidence_band",
    "double_selection_effect",
    "effects_batch",
    "partialling_out_effect",
    # iv
    "IvFit",
    "tsls",
    "rlasso_iv_select_x",
    "rlasso_iv_select_xz",
    "rlasso_iv_select_z",
    # treatment
    "TreatmentFit",
    "bootstrap_se",
    "rlasso_ate",
    "rlasso_atet",
    "rlasso_late",
    "rlasso_latet",
    # simkit
    "RngStream",
    "SparseDgpConfig",
    "draw_multipliers",
    "gen_approx_sparse_linear",
    "gen_causes_controls",
    "gen_sparse_linear",
]
