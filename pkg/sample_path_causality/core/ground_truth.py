"""
联合马尔可夫二元过程的生成与真实因果度量

完整概率由逻辑斯蒂模型直接给出；受限概率通过对隐藏数据流最近一个符号的
递推滤波得到，另提供对全部隐藏路径穷举求和的校验实现。
第1轮的两个符号独立取自Bern(0.5)，逻辑斯蒂模型从第2轮开始生效。
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Tuple
import numpy as np
from scipy.special import expit, logit
from sample_path_causality.core.prob import FinitePmf, bernoulli, kl_divergence, mix
from sample_path_causality.models.process import ProcessParams, RegimeCoefficients
from sample_path_causality.models.trace import CausalTrace
from sample_path_causality.utils.exceptions import (
    EnumerationLimitError, FilterDegeneracyError, GroundTruthError, LengthMismatchError
)
from sample_path_causality.utils.log_utils import log

# 穷举校验允许的最长历史
MAX_ENUMERATION_HISTORY = 22

FilterVariant = Literal["exact", "paper-literal"]
FILTER_VARIANTS = ("exact", "paper-literal")


def _check_bit(name: str, value: int) -> int:
    if value not in (0, 1):
        raise GroundTruthError(f"{name}必须是0或1: {value!r}")
    return int(value)


def complete_probability(coef: RegimeCoefficients, x_prev: int, y_prev: int, target: str = "X") -> float:
    """完整条件下目标取1的概率"""
    if target == "X":
        return float(expit(coef.theta_x + coef.theta_xx * x_prev + coef.theta_yx * y_prev))
    if target == "Y":
        return float(expit(coef.theta_y + coef.theta_yy * y_prev + coef.theta_xy * x_prev))
    raise GroundTruthError(f"target必须是X或Y: {target}")


def complete_pmf(params: ProcessParams, regime: int, x_prev: int, y_prev: int, target: str = "X") -> FinitePmf:
    """
    逻辑斯蒂模型给出的完整条件分布

    Args:
        params: 过程参数
        regime: 参数区间编号，1或2
        x_prev, y_prev: 上一轮的两个符号
        target: "X" 或 "Y"
    """
    x_prev, y_prev = _check_bit("x_prev", x_prev), _check_bit("y_prev", y_prev)
    return bernoulli(complete_probability(params.coefficients(regime), x_prev, y_prev, target))


def simulate(params: ProcessParams, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    生成长度为n的 (x^n, y^n)

    随机数使用由seed派生的两条独立PCG64流，X与Y各一条。
    """
    x_stream, y_stream = (np.random.Generator(np.random.PCG64(s))
                          for s in np.random.SeedSequence(seed).spawn(2))
    n = params.n
    u_x = x_stream.random(n)
    u_y = y_stream.random(n)
    x = np.empty(n, dtype=np.int64)
    y = np.empty(n, dtype=np.int64)
    x[0] = int(u_x[0] < 0.5)
    y[0] = int(u_y[0] < 0.5)
    for t in range(1, n):
        coef = params.coefficients(params.regime_at(t + 1))
        p_x = complete_probability(coef, x[t - 1], y[t - 1], "X")
        p_y = complete_probability(coef, x[t - 1], y[t - 1], "Y")
        x[t] = int(u_x[t] < p_x)
        y[t] = int(u_y[t] < p_y)
    log.debug(f"生成过程完成: n={n}, seed={seed}, change_point={params.change_point}")
    return x, y


@dataclass(frozen=True)
class HiddenMarginal:
    """隐藏数据流最近一个符号为1的滤波概率"""
    p_h: float = 0.5
    variant: FilterVariant = "exact"

    def __post_init__(self):
        if not 0.0 <= self.p_h <= 1.0 or math.isnan(self.p_h):
            raise GroundTruthError(f"p_h必须在[0,1]内: {self.p_h}")
        if self.variant not in FILTER_VARIANTS:
            raise GroundTruthError(f"未知的滤波方式: {self.variant}")


def restricted_filter_step(params: ProcessParams,
                           marginal: HiddenMarginal,
                           x_prev: int,
                           x_new: int,
                           regime: int = 1) -> Tuple[FinitePmf, HiddenMarginal]:
    """
    受限分布的一步递推

    marginal 是 P(Y_{i-1}=1 | x^{i-1})，返回第i轮X的受限分布（在看到x_new之前），
    以及推进一步后的 P(Y_i=1 | x^i)。exact 方式先用x_new的似然修正y_{i-1}，
    paper-literal 方式直接按Y的转移概率传播。

    Args:
        params: 过程参数
        marginal: 当前隐藏边缘概率
        x_prev: x_{i-1}
        x_new: x_i
        regime: 第i轮的参数区间
    """
    x_prev, x_new = _check_bit("x_prev", x_prev), _check_bit("x_new", x_new)
    coef = params.coefficients(regime)
    p_h = marginal.p_h
    p_x1 = complete_probability(coef, x_prev, 1, "X")
    p_x0 = complete_probability(coef, x_prev, 0, "X")
    restricted = mix([bernoulli(p_x1), bernoulli(p_x0)], [p_h, 1.0 - p_h])

    p_y1 = complete_probability(coef, x_prev, 1, "Y")
    p_y0 = complete_probability(coef, x_prev, 0, "Y")
    if marginal.variant == "exact":
        like1 = p_x1 if x_new == 1 else 1.0 - p_x1
        like0 = p_x0 if x_new == 1 else 1.0 - p_x0
        w1 = p_h * like1
        w0 = (1.0 - p_h) * like0
        total = w1 + w0
        if total <= 0.0:
            raise FilterDegeneracyError(f"观测x={x_new}在两种隐藏假设下似然均为0")
        w1, w0 = w1 / total, w0 / total
    else:
        w1, w0 = p_h, 1.0 - p_h
    p_next = min(max(w1 * p_y1 + w0 * p_y0, 0.0), 1.0)
    return restricted, HiddenMarginal(p_next, marginal.variant)


def brute_force_restricted(params: ProcessParams, x_history: Sequence[int]) -> FinitePmf:
    """
    穷举全部隐藏路径 y^{i-1} 计算受限分布 P(X_i | x^{i-1})，只用作校验

    Args:
        params: 过程参数
        x_history: x^{i-1}，长度不超过 MAX_ENUMERATION_HISTORY

    Raises:
        EnumerationLimitError: 历史过长
    """
    xs = [_check_bit("x", v) for v in x_history]
    m = len(xs)
    if m > MAX_ENUMERATION_HISTORY:
        raise EnumerationLimitError(f"历史长度{m}超过穷举上限{MAX_ENUMERATION_HISTORY}")
    if m == 0:
        return bernoulli(0.5)

    # paths[k, t] = 第k条路径上的 y_{t+1}
    paths = (np.arange(2 ** m)[:, None] >> np.arange(m)[None, :]) & 1
    # y_1 与 x_1 独立且为Bern(0.5)，对所有路径是常数，略去
    log_weight = np.zeros(2 ** m)
    for t in range(1, m):
        coef = params.coefficients(params.regime_at(t + 1))
        y_prev = paths[:, t - 1]
        p_x = expit(coef.theta_x + coef.theta_xx * xs[t - 1] + coef.theta_yx * y_prev)
        p_y = expit(coef.theta_y + coef.theta_yy * y_prev + coef.theta_xy * xs[t - 1])
        log_weight += np.log(p_x if xs[t] == 1 else 1.0 - p_x)
        log_weight += np.where(paths[:, t] == 1, np.log(p_y), np.log1p(-p_y))

    coef = params.coefficients(params.regime_at(m + 1))
    p_next = expit(coef.theta_x + coef.theta_xx * xs[m - 1] + coef.theta_yx * paths[:, m - 1])
    weight = np.exp(log_weight - log_weight.max())
    return bernoulli(float(np.dot(weight, p_next) / weight.sum()))


def true_causal_trace(params: ProcessParams,
                      x: Sequence[int],
                      y: Sequence[int],
                      direction: str = "yx",
                      variant: FilterVariant = "exact") -> CausalTrace:
    """
    真实因果度量 C(i) = D(f^(c)_i ‖ f^(r)_i)

    X→Y 方向按交换X、Y角色后的参数计算。
    """
    xs = np.asarray(x, dtype=np.int64)
    ys = np.asarray(y, dtype=np.int64)
    if len(xs) != len(ys):
        raise LengthMismatchError(f"序列长度不一致: x={len(xs)}, y={len(ys)}")
    if len(xs) == 0:
        raise GroundTruthError("输入序列不能为空")
    if direction == "xy":
        params, xs, ys = params.mirrored(), ys, xs
    elif direction != "yx":
        raise GroundTruthError(f"未知的方向: {direction}")

    n = len(xs)
    measure = np.zeros(n)
    f_c = np.empty((n, 2))
    f_r = np.empty((n, 2))
    regimes = np.array([params.regime_at(i) for i in range(1, n + 1)])
    f_c[0] = f_r[0] = (0.5, 0.5)

    marginal = HiddenMarginal(0.5, variant)
    for t in range(1, n):
        regime = int(regimes[t])
        complete = complete_pmf(params, regime, int(xs[t - 1]), int(ys[t - 1]), "X")
        restricted, marginal = restricted_filter_step(params, marginal, int(xs[t - 1]), int(xs[t]), regime)
        measure[t] = kl_divergence(complete, restricted)
        f_c[t] = complete.mass
        f_r[t] = restricted.mass
    return CausalTrace(direction=direction, measure=measure, f_complete=f_c, f_restricted=f_r,
                       source="truth", regimes=regimes)


def example1_params(n: int = 10_000) -> ProcessParams:
    """Y独立同分布Bern(0.2)；y_{i-1}=1时X为Bern(0.9)，否则Bern(0.5)"""
    return ProcessParams(
        regime1=RegimeCoefficients(theta_yx=math.log(9.0), theta_y=float(logit(0.2))),
        n=n,
    )


def figure1_params(n: int = 2000, change_point: Optional[int] = None) -> ProcessParams:
    """默认的两区间变点过程：前半段Y→X占优，后半段X→Y占优"""
    base = dict(theta_x=-0.5, theta_y=-0.5, theta_xx=0.5, theta_yy=0.5)
    return ProcessParams(
        regime1=RegimeCoefficients(theta_yx=2.5, theta_xy=0.0, **base),
        regime2=RegimeCoefficients(theta_yx=0.5, theta_xy=2.0, **base),
        change_point=change_point if change_point is not None else max(1, n // 2),
        n=n,
    )


def example1_restricted_probability() -> float:
    """Y的平稳边缘下X取1的受限概率，0.2·0.9 + 0.8·0.5"""
    params = example1_params()
    p_y = complete_probability(params.regime1, 0, 0, "Y")
    return (p_y * complete_probability(params.regime1, 0, 1, "X")
            + (1.0 - p_y) * complete_probability(params.regime1, 0, 0, "X"))


def example1_closed_form(y_prev: int) -> float:
    """按y_{i-1}取值的闭式因果度量"""
    y_prev = _check_bit("y_prev", y_prev)
    params = example1_params()
    complete = complete_pmf(params, 1, 0, y_prev, "X")
    return kl_divergence(complete, bernoulli(example1_restricted_probability()))


def example1_expected_measure() -> float:
    """按Y的边缘概率(0.8, 0.2)加权的期望因果度量"""
    p_y = complete_probability(example1_params().regime1, 0, 0, "Y")
    return (1.0 - p_y) * example1_closed_form(0) + p_y * example1_closed_form(1)
