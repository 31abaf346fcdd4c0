"""
实验管理器：模拟、估计、评估、复现与批量运行
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from sample_path_causality.core.diagnostics import adaptation_window, spike_match_rate, window_error
from sample_path_causality.core.estimator import build_estimator, check_sequences, run_trace
from sample_path_causality.core.ground_truth import (
    example1_closed_form, example1_expected_measure, example1_params,
    example1_restricted_probability, simulate, true_causal_trace
)
from sample_path_causality.core.prob import bernoulli, kl_divergence
from sample_path_causality.core.regret import ReferenceClass, evaluate_run, reference_trace
from sample_path_causality.models.config import ExperimentConfig
from sample_path_causality.models.process import ProcessParams
from sample_path_causality.models.report import (
    ChangePointSummary, Example1Report, RegretReport, RunManifest
)
from sample_path_causality.models.trace import CausalTrace
from sample_path_causality.utils.exceptions import CheckFailure, ExperimentConfigError
from sample_path_causality.utils.io_utils import (
    output_path, read_sequences, read_trace, sequence_frame, trace_frame, write_frame, write_model
)
from sample_path_causality.utils.log_utils import log

# 复现检查的容差
CLOSED_FORM_TOLERANCE = 1e-6
MONTE_CARLO_TOLERANCE = 0.02


@dataclass
class DirectionResult:
    """单个方向的完整分析结果"""
    estimate: CausalTrace
    reference: CausalTrace
    report: RegretReport


@dataclass
class AnalysisResult:
    x: np.ndarray
    y: np.ndarray
    directions: Dict[str, DirectionResult] = field(default_factory=dict)
    files: List[str] = field(default_factory=list)


class ExperimentRunner:
    """实验管理器，命令行各子命令的入口"""

    def __init__(self, config: ExperimentConfig):
        self.config = config

    @property
    def params(self) -> ProcessParams:
        return self.config.process_params()

    @property
    def directions(self) -> Tuple[str, ...]:
        direction = self.config.experiment.direction
        return ("yx", "xy") if direction == "both" else (direction,)

    @property
    def out_dir(self) -> str:
        return self.config.output.out_dir

    def reference_class(self) -> ReferenceClass:
        """参考类，网格点默认与完整预测器的网格一致"""
        settings = self.config.reference
        if settings.family == "continuum":
            return ReferenceClass(family="continuum")
        points = settings.grid_points
        if points is None:
            complete = self.config.predictors.complete
            points = complete.grid_points or np.linspace(complete.grid_low, complete.grid_high,
                                                         complete.grid_size).tolist()
        return ReferenceClass(family="grid", grid_points=tuple(points))

    def regret_bounds(self, n: int, direction: str, with_side: bool = False) -> Tuple[float, float]:
        """(M^(c)(n), M^(r)(n))"""
        estimator = build_estimator(self.config.predictors, direction, with_side)
        return estimator.complete.regret_bound(n), estimator.restricted.regret_bound(n)

    def _manifest(self, command: str, files: List[str]) -> RunManifest:
        from sample_path_causality import __version__
        return RunManifest(
            command=command,
            seed=self.config.experiment.seed,
            n=self.config.experiment.n,
            params=self.params.model_dump(),
            config=self.config.model_dump(),
            package_version=__version__,
            numpy_version=np.__version__,
            files=[os.path.basename(f) for f in files],
        )

    def _write_manifest(self, command: str, files: List[str]) -> str:
        path = os.path.join(self.out_dir, f"manifest_{command}.json")
        return write_model(self._manifest(command, files), path)

    # ------------------------------------------------------------------ simulate

    def simulate(self, write: bool = True) -> Tuple[np.ndarray, np.ndarray, List[str]]:
        """按配置生成序列，写出序列文件与参数回显"""
        params = self.params
        seed = self.config.experiment.seed
        log.info(f"开始模拟: n={params.n}, seed={seed}")
        x, y = simulate(params, seed)
        files: List[str] = []
        if write:
            regimes = np.array([params.regime_at(i) for i in range(1, params.n + 1)])
            path = output_path(self.out_dir, "sequences", self.config.output.format)
            files.append(write_frame(sequence_frame(x, y, regimes), path, self.config.output.format,
                                     self.config.output.precision))
            files.append(self._write_manifest("simulate", files))
            log.info(f"序列已写出: {path}")
        return x, y, files

    # ------------------------------------------------------------------ estimate

    def analyze(self, x: Sequence[int], y: Sequence[int], z: Optional[Sequence[int]] = None) -> AnalysisResult:
        """对给定序列按配置的方向估计因果度量，并计算真值、参考与遗憾报告"""
        xs, ys, zs = check_sequences(x, y, z)
        params = self.params
        if len(xs) != params.n:
            params = params.model_copy(update={
                "n": len(xs),
                "change_point": None if params.change_point is None else min(params.change_point, len(xs)),
            })
        ref_class = self.reference_class()
        result = AnalysisResult(x=xs, y=ys)
        for direction in self.directions:
            estimate = run_trace(xs, ys, zs, self.config.predictors, direction=direction)
            truth = true_causal_trace(params, xs, ys, direction, self.config.experiment.filter)
            reference = reference_trace(truth, ref_class)
            estimate = estimate.with_truth(truth).with_reference(
                reference.measure, reference.f_complete, reference.f_restricted)
            m_c, m_r = self.regret_bounds(len(xs), direction, zs is not None)
            effect = xs if direction == "yx" else ys
            report = evaluate_run(estimate, reference, m_c, m_r, effect)
            result.directions[direction] = DirectionResult(estimate, reference, report)
            log.info(f"方向{direction}: Ĉ均值={estimate.measure.mean():.6f}, CR={report.causality_regret:.4f}, "
                     f"L={report.l_empirical:.4f}")
        return result

    def write_traces(self, result: AnalysisResult) -> List[str]:
        files = []
        for direction, item in result.directions.items():
            path = output_path(self.out_dir, f"trace_{direction}", self.config.output.format)
            files.append(write_frame(trace_frame(item.estimate, result.x, result.y), path,
                                     self.config.output.format, self.config.output.precision))
        return files

    def estimate(self, sequences_path: Optional[str] = None) -> AnalysisResult:
        """
        读取序列文件（为空时按配置模拟）并写出逐轮轨迹
        """
        if sequences_path is None:
            x, y, _ = self.simulate(write=False)
            z = None
        else:
            data = read_sequences(sequences_path)
            x, y, z = data["x"], data["y"], data.get("z")
        result = self.analyze(x, y, z)
        result.files = self.write_traces(result)
        result.files.append(self._write_manifest("estimate", result.files))
        return result

    # ------------------------------------------------------------------ evaluate

    def evaluate(self, trace_paths: Dict[str, str], reference_path: Optional[str] = None) -> Dict[str, RegretReport]:
        """
        由轨迹文件计算遗憾报告

        Args:
            trace_paths: 方向 -> 轨迹文件
            reference_path: 参考轨迹文件，给出时以其C_hat作为C*，否则使用轨迹文件自带的C_star列
        """
        reports = {}
        for direction, path in trace_paths.items():
            estimate, reference, effect = read_trace(path, direction)
            if reference_path is not None:
                other, _, _ = read_trace(reference_path, direction)
                reference = CausalTrace(direction=direction, measure=other.measure,
                                        f_complete=other.f_complete, f_restricted=other.f_restricted,
                                        source="reference")
            if reference is None:
                raise ExperimentConfigError(f"{path}: 缺少C_star列且未指定参考轨迹")
            m_c, m_r = self.regret_bounds(len(estimate), direction)
            report = evaluate_run(estimate, reference, m_c, m_r, effect)
            write_model(report, os.path.join(self.out_dir, f"report_{direction}.json"))
            reports[direction] = report
        self._write_manifest("evaluate", [os.path.join(self.out_dir, f"report_{d}.json") for d in reports])
        return reports

    # ------------------------------------------------------------------ reproduce

    def reproduce_example1(self, n: int = 10_000) -> Example1Report:
        """
        闭式结果 0.58 / 0.3635 / 0.0187 / 0.0877 与蒙特卡洛估计的对照

        Raises:
            CheckFailure: 闭式结果与重新计算的偏差超过1e-6，或蒙特卡洛偏差超过0.02
        """
        restricted = example1_restricted_probability()
        c1, c0 = example1_closed_form(1), example1_closed_form(0)
        expected = example1_expected_measure()
        recomputed = (kl_divergence(bernoulli(0.9), bernoulli(0.58)),
                      kl_divergence(bernoulli(0.5), bernoulli(0.58)))
        closed_ok = (abs(restricted - 0.58) <= CLOSED_FORM_TOLERANCE
                     and abs(c1 - recomputed[0]) <= CLOSED_FORM_TOLERANCE
                     and abs(c0 - recomputed[1]) <= CLOSED_FORM_TOLERANCE
                     and abs(expected - (0.8 * recomputed[1] + 0.2 * recomputed[0])) <= CLOSED_FORM_TOLERANCE)

        x, y = simulate(example1_params(n), self.config.experiment.seed)
        trace = run_trace(x, y, predictors=self.config.predictors, direction="yx")
        mc_mean = float(trace.measure.mean())
        report = Example1Report(
            restricted_probability=restricted,
            c_y1=c1,
            c_y0=c0,
            expected_measure=expected,
            monte_carlo_mean=mc_mean,
            monte_carlo_n=n,
            closed_form_ok=closed_ok,
            monte_carlo_ok=abs(mc_mean - expected) <= MONTE_CARLO_TOLERANCE,
            note="E[C]按P(Y=0)=0.8、P(Y=1)=0.2加权得0.0877，保留两位有效数字为0.088",
        )
        write_model(report, os.path.join(self.out_dir, "example1.json"))
        self._write_manifest("example1", [os.path.join(self.out_dir, "example1.json")])
        if not report.closed_form_ok or not report.monte_carlo_ok:
            raise CheckFailure(f"Example 1 复现失败: {report.model_dump()}")
        return report

    def change_point_summary(self, result: AnalysisResult) -> Dict[str, ChangePointSummary]:
        """变点后的适应窗口、变点前的收敛误差与尖峰定位率"""
        params = self.params
        change_point = params.change_point or len(result.x)
        summaries = {}
        for direction, item in result.directions.items():
            c_hat, c_star = item.estimate.measure, item.reference.measure
            pre_start = max(1, change_point - 200)
            pre_error = window_error(c_hat, c_star, pre_start, change_point) if change_point > 1 else None
            summaries[direction] = ChangePointSummary(
                direction=direction,
                change_point=change_point,
                adaptation_window=adaptation_window(c_hat, c_star, change_point),
                pre_change_error=pre_error,
                spike_match_rate=spike_match_rate(item.estimate.true_measure, c_hat, item.estimate.regimes),
                l_empirical=item.report.l_empirical,
            )
        return summaries

    def reproduce_fig1(self) -> Tuple[AnalysisResult, Dict[str, ChangePointSummary]]:
        """变点实验：两个方向的真值与估计轨迹、遗憾报告与适应性统计"""
        x, y, files = self.simulate(write=True)
        result = self.analyze(x, y)
        result.files = files + self.write_traces(result)
        for direction, item in result.directions.items():
            result.files.append(write_model(item.report, os.path.join(self.out_dir, f"report_{direction}.json")))
        summaries = self.change_point_summary(result)
        path = os.path.join(self.out_dir, "fig1_summary.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({d: s.model_dump() for d, s in summaries.items()}, f, indent=2, ensure_ascii=False)
            f.write("\n")
        result.files.append(path)
        result.files.append(self._write_manifest("fig1", result.files))
        log.info(f"变点实验完成: {[s.model_dump() for s in summaries.values()]}")
        return result, summaries

    # ------------------------------------------------------------------ sweep

    def sweep(self) -> List[dict]:
        """对配置中的每个种子独立运行估计与评估，输出互不干扰"""
        seeds = self.config.sweep.seeds
        workers = self.config.sweep.workers
        payload = self.config.model_dump_json()
        log.info(f"开始批量运行: {len(seeds)}个种子, {workers}个进程")
        if workers == 1:
            rows = [_sweep_one(payload, seed) for seed in seeds]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_sweep_one, [payload] * len(seeds), seeds))
        path = os.path.join(self.out_dir, "sweep_summary.json")
        os.makedirs(self.out_dir, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(rows, f, indent=2)
            f.write("\n")
        return rows


def _sweep_one(config_json: str, seed: int) -> dict:
    config = ExperimentConfig.model_validate_json(config_json).with_seed(seed)
    config = config.model_copy(update={"output": config.output.model_copy(
        update={"out_dir": os.path.join(config.output.out_dir, f"seed_{seed}")})})
    runner = ExperimentRunner(config)
    x, y, files = runner.simulate(write=True)
    result = runner.analyze(x, y)
    runner.write_traces(result)
    row = {"seed": seed}
    for direction, item in result.directions.items():
        write_model(item.report, os.path.join(runner.out_dir, f"report_{direction}.json"))
        row[direction] = {
            "c_hat_mean": float(item.estimate.measure.mean()),
            "causality_regret": item.report.causality_regret,
            "theorem_bound": item.report.theorem_bound,
            "l_empirical": item.report.l_empirical,
            "applicable": item.report.applicable,
            "within_envelope": item.report.within_envelope,
            "satisfied": item.report.satisfied,
        }
    return row
