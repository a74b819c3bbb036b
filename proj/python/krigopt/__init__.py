"""Kriging surrogates with expected-improvement campaign management."""

from ._core import (  # noqa: F401
    AcquisitionMaximum,
    BatchProposal,
    BoxDomain,
    CampaignResult,
    DesignMatrix,
    EgoConfig,
    EiDistribution,
    FlowCurve,
    GpModel,
    Incumbent,
    KernelFamily,
    KernelSpec,
    KrigoptDegenerateDesign,
    KrigoptError,
    KrigoptNotPositiveDefinite,
    KrigoptProtocolError,
    LiarKind,
    LinearFit,
    LooVectors,
    MetricsReport,
    OptimizationState,
    Phase,
    PredictiveDistribution,
    QeiEstimate,
    TrainingSet,
    Trend,
    branin,
    conditional_correlation,
    efficiency_from,
    ei_posterior_distribution,
    estimate_params,
    evaluate_curve,
    expected_improvement,
    fit,
    fit_linear_baseline,
    fit_quadratic,
    hartmann6,
    lhs,
    loo_metrics,
    maximin_improve,
    maximize_acquisition,
    min_pairwise_distance,
    neg_log_likelihood,
    propose_batch_cl,
    qei_mc,
    run_closed_loop,
    synthetic_gp_objective,
)

__all__ = [name for name in dir() if not name.startswith("_")]
