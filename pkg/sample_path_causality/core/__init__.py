from sample_path_causality.core.prob import (
  FinitePmf,
  make_pmf,
  bernoulli,
  kl_divergence,
  self_information_loss,
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
from sample_path_causality.core.estimator import CausalEstimator, build_estimator, run_trace, run_bidirectional
from sample_path_causality.core.ground_truth import simulate, true_causal_trace, brute_force_restricted
from sample_path_causality.core.regret import ReferenceClass, causality_regret, evaluate_run, reference_trace
from sample_path_causality.core.experiment import ExperimentRunner
