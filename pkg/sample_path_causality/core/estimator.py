"""
因果度量的在线估计

把一个完整预测器和一个受限预测器配对，每轮在观测到效应符号之前
计算 Ĉ(i) = D(f̂^(c)_i ‖ f̂^(r)_i)，再用该符号更新两个预测器。
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from sample_path_causality.core.prob import FinitePmf, kl_divergence
from sample_path_causality.core.predictors import (
    CAUSE, OWN, SIDE, SequentialPredictor, make_predictor
)
from sample_path_causality.models.config import PredictorPair
from sample_path_causality.models.trace import CausalTrace
from sample_path_causality.utils.exceptions import ContextError, LengthMismatchError, TraceError
from sample_path_causality.utils.log_utils import log

DIRECTIONS = ("yx", "xy")


@dataclass(frozen=True)
class EstimatorStep:
    """单轮估计结果"""
    c_hat: float
    f_complete: FinitePmf
    f_restricted: FinitePmf


class CausalEstimator:
    """
    估计某一方向的因果度量

    direction="yx" 时效应是X、原因是Y；"xy" 时反之。
    受限预测器的上下文不允许包含原因数据流。
    """

    def __init__(self, restricted: SequentialPredictor, complete: SequentialPredictor, direction: str = "yx"):
        if direction not in DIRECTIONS:
            raise TraceError(f"未知的方向: {direction}")
        if CAUSE in restricted.spec.streams:
            raise ContextError("受限预测器的上下文不能包含原因数据流")
        if restricted.alphabet_size != complete.alphabet_size:
            raise ContextError("两个预测器的字母表大小不一致")
        self.restricted = restricted
        self.complete = complete
        self.direction = direction
        self.history: Dict[str, List[int]] = {OWN: [], CAUSE: [], SIDE: []}

    @property
    def rounds(self) -> int:
        return len(self.history[OWN])

    def step(self, x: int, y: int, z: Optional[int] = None) -> EstimatorStep:
        """
        处理一轮观测

        先用本轮之前的历史给出两个预测分布并计算Ĉ，再揭示效应符号并更新。
        """
        effect, cause = (x, y) if self.direction == "yx" else (y, x)
        ctx_r = self.restricted.spec.build(self.history)
        ctx_c = self.complete.spec.build(self.history)
        f_r = self.restricted.predict(ctx_r)
        f_c = self.complete.predict(ctx_c)
        c_hat = kl_divergence(f_c, f_r)

        self.restricted.update(ctx_r, effect)
        self.complete.update(ctx_c, effect)
        self.history[OWN].append(int(effect))
        self.history[CAUSE].append(int(cause))
        if z is not None:
            self.history[SIDE].append(int(z))
        return EstimatorStep(c_hat=c_hat, f_complete=f_c, f_restricted=f_r)


def build_estimator(predictors: PredictorPair, direction: str = "yx", with_side: bool = False) -> CausalEstimator:
    """按配置创建估计器，受限上下文为自身(+旁路)历史，完整上下文再加上原因历史"""
    restricted_streams: Tuple[str, ...] = (OWN, SIDE) if with_side else (OWN,)
    complete_streams: Tuple[str, ...] = (OWN, CAUSE, SIDE) if with_side else (OWN, CAUSE)
    return CausalEstimator(
        restricted=make_predictor(predictors.restricted, restricted_streams),
        complete=make_predictor(predictors.complete, complete_streams),
        direction=direction,
    )


def _as_symbols(name: str, values: Sequence[int]) -> np.ndarray:
    array = np.asarray(values)
    if array.ndim != 1:
        raise TraceError(f"{name}必须是一维符号序列")
    if array.size and not np.issubdtype(array.dtype, np.integer):
        if not np.all(np.equal(np.mod(array, 1), 0)):
            raise TraceError(f"{name}包含非整数符号")
        array = array.astype(int)
    return array


def check_sequences(x: Sequence[int], y: Sequence[int], z: Optional[Sequence[int]] = None) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """校验输入序列等长且非空"""
    xs, ys = _as_symbols("x", x), _as_symbols("y", y)
    zs = _as_symbols("z", z) if z is not None else None
    if len(xs) == 0:
        raise TraceError("输入序列不能为空")
    if len(xs) != len(ys) or (zs is not None and len(zs) != len(xs)):
        raise LengthMismatchError(
            f"序列长度不一致: x={len(xs)}, y={len(ys)}" + (f", z={len(zs)}" if zs is not None else ""))
    return xs, ys, zs


def run_trace(x: Sequence[int],
              y: Sequence[int],
              z: Optional[Sequence[int]] = None,
              predictors: Optional[PredictorPair] = None,
              direction: str = "yx",
              estimator: Optional[CausalEstimator] = None) -> CausalTrace:
    """
    在整段序列上逐轮运行估计器

    Args:
        x, y, z: 等长符号序列，z可为空
        predictors: 预测器配置，默认两侧均为k=1的网格预测器
        direction: "yx" 或 "xy"
        estimator: 直接指定的估计器（例如注入真值分布），优先于predictors

    Returns:
        CausalTrace: 长度为n的估计轨迹
    """
    xs, ys, zs = check_sequences(x, y, z)
    if estimator is None:
        estimator = build_estimator(predictors or PredictorPair(), direction, with_side=zs is not None)
    n = len(xs)
    alphabet = estimator.complete.alphabet_size
    measure = np.empty(n)
    f_c = np.empty((n, alphabet))
    f_r = np.empty((n, alphabet))
    for t in range(n):
        result = estimator.step(int(xs[t]), int(ys[t]), int(zs[t]) if zs is not None else None)
        measure[t] = result.c_hat
        f_c[t] = result.f_complete.mass
        f_r[t] = result.f_restricted.mass
    log.debug(f"估计完成: 方向={estimator.direction}, 轮数={n}, Ĉ均值={measure.mean():.6f}")
    return CausalTrace(direction=estimator.direction, measure=measure, f_complete=f_c, f_restricted=f_r)


def run_bidirectional(x: Sequence[int],
                      y: Sequence[int],
                      z: Optional[Sequence[int]] = None,
                      predictors: Optional[PredictorPair] = None) -> Tuple[CausalTrace, CausalTrace]:
    """两个方向分别估计，两者不共享任何预测器状态

    Returns:
        (Y→X轨迹, X→Y轨迹)
    """
    return (run_trace(x, y, z, predictors, direction="yx"),
            run_trace(x, y, z, predictors, direction="xy"))
