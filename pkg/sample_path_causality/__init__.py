# 导出主要类和功能
__version__ = "0.1.0"

from sample_path_causality.core.prob import (
    FinitePmf,
    INFINITE,
    is_infinite,
    make_pmf,
    bernoulli,
    uniform,
    kl_divergence,
    self_information_loss,
    total_variation,
    log_ratio_bound,
    expectation,
    mix,
)
from sample_path_causality.core.predictors import (
    ContextSpec,
    SequentialPredictor,
    AddHalfPredictor,
    GridPredictor,
    OraclePredictor,
    make_predictor,
    worst_case_regret_bound,
)
from sample_path_causality.core.estimator import (
    CausalEstimator,
    build_estimator,
    run_trace,
    run_bidirectional,
)
from sample_path_causality.core.ground_truth import (
    simulate,
    complete_pmf,
    restricted_filter_step,
    brute_force_restricted,
    true_causal_trace,
    example1_params,
    figure1_params,
)
from sample_path_causality.core.regret import (
    ReferenceClass,
    instantaneous_regret,
    best_reference,
    project_onto_class,
    reference_trace,
    causality_regret,
    empirical_L,
    theorem1_envelope,
    lemma1_check,
    lemma2_check,
    assumption2_check,
    evaluate_run,
)
from sample_path_causality.core.experiment import ExperimentRunner
from sample_path_causality.config import load_experiment_config
from sample_path_causality.models.config import ExperimentConfig, PredictorSettings, PredictorPair
from sample_path_causality.models.process import ProcessParams, RegimeCoefficients
from sample_path_causality.models.trace import CausalTrace
from sample_path_causality.models.report import InequalityCheck, RegretReport, ChangePointSummary
from sample_path_causality.utils.exceptions import (
    CausalMeasureException,
    PmfError,
    AlphabetMismatchError,
    ContextError,
    PredictorError,
    GroundTruthError,
    EnumerationLimitError,
    FilterDegeneracyError,
    TraceError,
    LengthMismatchError,
    RegretError,
    ExperimentConfigError,
    InputFormatError,
    CheckFailure,
)

__all__ = [
    # 概率原语
    "FinitePmf",
    "INFINITE",
    "is_infinite",
    "make_pmf",
    "bernoulli",
    "uniform",
    "kl_divergence",
    "self_information_loss",
    "total_variation",
    "log_ratio_bound",
    "expectation",
    "mix",

    # 序贯预测器
    "ContextSpec",
    "SequentialPredictor",
    "AddHalfPredictor",
    "GridPredictor",
    "OraclePredictor",
    "make_predictor",
    "worst_case_regret_bound",

    # 因果度量估计
    "CausalEstimator",
    "build_estimator",
    "run_trace",
    "run_bidirectional",

    # 真值
    "simulate",
    "complete_pmf",
    "restricted_filter_step",
    "brute_force_restricted",
    "true_causal_trace",
    "example1_params",
    "figure1_params",

    # 遗憾计算
    "ReferenceClass",
    "instantaneous_regret",
    "best_reference",
    "project_onto_class",
    "reference_trace",
    "causality_regret",
    "empirical_L",
    "theorem1_envelope",
    "lemma1_check",
    "lemma2_check",
    "assumption2_check",
    "evaluate_run",

    # 实验
    "ExperimentRunner",
    "load_experiment_config",

    # 数据模型
    "ExperimentConfig",
    "PredictorSettings",
    "PredictorPair",
    "ProcessParams",
    "RegimeCoefficients",
    "CausalTrace",
    "InequalityCheck",
    "RegretReport",
    "ChangePointSummary",

    # 异常类
    "CausalMeasureException",
    "PmfError",
    "AlphabetMismatchError",
    "ContextError",
    "PredictorError",
    "GroundTruthError",
    "EnumerationLimitError",
    "FilterDegeneracyError",
    "TraceError",
    "LengthMismatchError",
    "RegretError",
    "ExperimentConfigError",
    "InputFormatError",
    "CheckFailure",
]
