"""
遗憾计算：逐轮遗憾、最优参考分布、因果遗憾、经验L常数，
以及两个引理、参考类假设与总体上界的数值检查。
"""

import math
from typing import Callable, Hashable, List, Literal, Optional, Sequence, Tuple, Union
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sample_path_causality.core.predictors import OWN, ContextSpec, SequentialPredictor
from sample_path_causality.core.prob import (
    INFINITE, FinitePmf, bernoulli, expectation, kl_divergence, log_ratio_bound, make_pmf,
    self_information_loss
)
from sample_path_causality.models.report import InequalityCheck, RegretReport
from sample_path_causality.models.trace import CausalTrace
from sample_path_causality.utils.exceptions import LengthMismatchError, RegretError

# 检查有界函数时允许的浮点误差
BOUND_TOLERANCE = 1e-12

PmfRows = Union[np.ndarray, Sequence[FinitePmf]]


class ReferenceClass(BaseModel):
    """参考分布类：按上下文的伯努利网格，或连续参数空间"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    family: Literal["grid", "continuum"] = Field(default="continuum")
    grid_points: Optional[Tuple[float, ...]] = Field(default=None)
    stationary: bool = Field(default=True)

    @model_validator(mode="after")
    def _check_points(self) -> "ReferenceClass":
        if self.grid_points is not None and any(not 0.0 < p < 1.0 for p in self.grid_points):
            raise ValueError("参考网格点必须严格位于(0,1)内")
        return self

    @property
    def points(self) -> np.ndarray:
        if self.grid_points is not None:
            return np.asarray(self.grid_points, dtype=float)
        return np.linspace(0.025, 0.975, 21)


def _rows(pmfs: PmfRows) -> np.ndarray:
    if isinstance(pmfs, np.ndarray):
        return np.asarray(pmfs, dtype=float)
    return np.stack([f.mass for f in pmfs])


def _measure_values(trace: Union[CausalTrace, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(trace, CausalTrace):
        return trace.measure
    return np.asarray(trace, dtype=float)


def instantaneous_regret(f_hat: FinitePmf, f_tilde: FinitePmf, x: int) -> float:
    """单轮遗憾 l(f̂,x) - l(f̃,x)，可以为负"""
    if f_hat.alphabet_size != f_tilde.alphabet_size:
        raise RegretError(f"字母表大小不一致: {f_hat.alphabet_size} != {f_tilde.alphabet_size}")
    learner = self_information_loss(f_hat, x)
    reference = self_information_loss(f_tilde, x)
    if math.isinf(learner) and math.isinf(reference):
        raise RegretError("学习器与参考分布在该符号上的损失均为无穷")
    return learner - reference


def best_reference(x: Sequence[int],
                   contexts: Sequence[Hashable],
                   reference_class: ReferenceClass = ReferenceClass(),
                   alphabet_size: int = 2) -> List[FinitePmf]:
    """
    在整段序列上累计损失最小的平稳参考分布（每个上下文一个）

    Args:
        x: 观测序列
        contexts: 每轮的上下文标识
        reference_class: 参考类，网格类按最小累计损失选点，相同损失取编号最小者
        alphabet_size: 字母表大小

    Returns:
        每轮对应的参考分布 f*_i
    """
    xs = np.asarray(x, dtype=np.int64)
    if xs.size == 0:
        raise RegretError("序列不能为空")
    if len(contexts) != xs.size:
        raise LengthMismatchError(f"上下文个数{len(contexts)}与序列长度{xs.size}不一致")
    if not reference_class.stationary:
        raise RegretError("只支持平稳参考类")
    if np.any(xs < 0) or np.any(xs >= alphabet_size):
        raise RegretError(f"观测符号超出字母表范围[0,{alphabet_size})")

    counts = {}
    for key, symbol in zip(contexts, xs):
        counts.setdefault(key, np.zeros(alphabet_size))[symbol] += 1

    best = {}
    if reference_class.family == "continuum":
        for key, c in counts.items():
            best[key] = make_pmf(c / c.sum())
    else:
        if alphabet_size != 2:
            raise RegretError("网格参考类只支持二元字母表")
        points = reference_class.points
        with np.errstate(divide="ignore"):
            log_one, log_zero = np.log2(points), np.log2(1.0 - points)
        for key, c in counts.items():
            loss = -(c[1] * log_one + c[0] * log_zero)
            best[key] = bernoulli(float(points[int(np.argmin(loss))]))
    return [best[key] for key in contexts]


def project_probabilities(p_one: np.ndarray, reference_class: ReferenceClass) -> np.ndarray:
    """把真实的取1概率按KL投影到参考网格上，连续类原样返回"""
    p_one = np.asarray(p_one, dtype=float)
    if reference_class.family == "continuum":
        return p_one.copy()
    points = reference_class.points
    # argmin_θ D(p‖θ) 等价于最小化交叉熵
    cross = -(np.outer(p_one, np.log2(points)) + np.outer(1.0 - p_one, np.log2(1.0 - points)))
    return points[np.argmin(cross, axis=1)]


def project_onto_class(pmf: FinitePmf, reference_class: ReferenceClass) -> FinitePmf:
    """单个二元分布的投影"""
    if reference_class.family == "continuum":
        return pmf
    if pmf.alphabet_size != 2:
        raise RegretError("网格参考类只支持二元字母表")
    return bernoulli(float(project_probabilities(np.array([pmf.mass[1]]), reference_class)[0]))


def reference_trace(truth: CausalTrace, reference_class: ReferenceClass) -> CausalTrace:
    """
    参考轨迹：真实分布投影到参考类后的 C*(i) = D(f*^(c)_i ‖ f*^(r)_i)
    """
    if truth.alphabet_size != 2 and reference_class.family == "grid":
        raise RegretError("网格参考类只支持二元字母表")
    if reference_class.family == "continuum":
        f_c, f_r = truth.f_complete.copy(), truth.f_restricted.copy()
    else:
        p_c = project_probabilities(truth.f_complete[:, 1], reference_class)
        p_r = project_probabilities(truth.f_restricted[:, 1], reference_class)
        f_c = np.column_stack([1.0 - p_c, p_c])
        f_r = np.column_stack([1.0 - p_r, p_r])
    measure = np.array([kl_divergence(make_pmf(c), make_pmf(r)) for c, r in zip(f_c, f_r)])
    return CausalTrace(direction=truth.direction, measure=measure, f_complete=f_c, f_restricted=f_r,
                       source="reference", regimes=truth.regimes)


def causality_regret(estimated: Union[CausalTrace, Sequence[float]],
                     reference: Union[CausalTrace, Sequence[float]]) -> float:
    """因果遗憾 CR(n) = Σ|Ĉ(i) - C*(i)|"""
    a, b = _measure_values(estimated), _measure_values(reference)
    if a.shape != b.shape:
        raise LengthMismatchError(f"轨迹长度不一致: {a.shape[0]} != {b.shape[0]}")
    if np.any(np.isinf(a) & np.isinf(b)):
        raise RegretError("两条轨迹在同一轮均为无穷，无法比较")
    return float(np.abs(a - b).sum())


def empirical_L(trace: CausalTrace) -> float:
    """所有轮次与符号上 |log2(f̂^(c)(x)/f̂^(r)(x))| 的最大值"""
    bounds = [log_ratio_bound(make_pmf(c), make_pmf(r)) for c, r in zip(trace.f_complete, trace.f_restricted)]
    return float(max(bounds))


def theorem1_envelope(m_complete: float, m_restricted: float, L: float, alphabet_size: int, n: int) -> float:
    """
    因果遗憾上界 M^(c)(n) + M^(r)(n) + (|X|·L/√2)·√(n·M^(c)(n))

    Raises:
        RegretError: M < 1、L < 0、n < 1 或字母表小于2
    """
    if m_complete < 1.0 or m_restricted < 1.0:
        raise RegretError(f"遗憾界必须至少为1: M^(c)={m_complete}, M^(r)={m_restricted}")
    if not L >= 0.0:
        raise RegretError(f"L必须非负: {L}")
    if n < 1 or alphabet_size < 2:
        raise RegretError(f"非法的n或字母表大小: n={n}, |X|={alphabet_size}")
    if math.isinf(L):
        return INFINITE
    return m_complete + m_restricted + alphabet_size * L / math.sqrt(2.0) * math.sqrt(n * m_complete)


def contexts_for(spec: ContextSpec, own: Sequence[int], **streams: Sequence[int]) -> List[Tuple[int, ...]]:
    """按上下文规格得到每一轮的上下文"""
    histories = {OWN: list(own), **{k: list(v) for k, v in streams.items()}}
    n = len(histories[OWN])
    return [spec.build({k: v[max(0, i - spec.order):i] for k, v in histories.items()}) for i in range(n)]


def run_predictor(predictor: SequentialPredictor, x: Sequence[int], contexts: Sequence[Tuple[int, ...]]) -> List[FinitePmf]:
    """在序列上运行一个全新的预测器，返回每轮的预测分布"""
    if len(contexts) != len(x):
        raise LengthMismatchError(f"上下文个数{len(contexts)}与序列长度{len(x)}不一致")
    learner = predictor.fresh()
    predictions = []
    for ctx, symbol in zip(contexts, x):
        predictions.append(learner.predict(ctx))
        learner.update(ctx, int(symbol))
    return predictions


def lemma1_check(predictor: SequentialPredictor,
                 x: Sequence[int],
                 contexts: Optional[Sequence[Tuple[int, ...]]] = None,
                 reference_class: ReferenceClass = ReferenceClass(),
                 reference: Optional[Sequence[FinitePmf]] = None) -> InequalityCheck:
    """
    Σ_i D(f_i ‖ f̂_i) 与预测器最坏情况遗憾 M(n) 的比较

    Args:
        predictor: 预测器（使用其全新副本）
        x: 观测序列
        contexts: 每轮上下文，默认按预测器规格由x自身历史构造
        reference_class: 参考类，reference为空时取其中的最优平稳分布
        reference: 直接指定的参考分布序列
    """
    if contexts is None:
        contexts = contexts_for(predictor.spec, x)
    predictions = run_predictor(predictor, x, contexts)
    if reference is None:
        reference = best_reference(x, contexts, reference_class, predictor.alphabet_size)
    if len(reference) != len(predictions):
        raise LengthMismatchError("参考分布个数与轮数不一致")
    lhs = float(sum(kl_divergence(f, f_hat) for f, f_hat in zip(reference, predictions)))
    rhs = predictor.regret_bound(len(predictions))
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def _g_values(g: Union[np.ndarray, Callable[[int, int], float]], n: int, alphabet_size: int) -> np.ndarray:
    if callable(g):
        return np.array([[g(i, s) for s in range(alphabet_size)] for i in range(n)], dtype=float)
    values = np.asarray(g, dtype=float)
    if values.shape != (n, alphabet_size):
        raise RegretError(f"g的形状应为{(n, alphabet_size)}: {values.shape}")
    return values


def lemma2_bound(m: float, K: float, alphabet_size: int, n: int) -> float:
    """(|X|·K/√2)·√(n·M(n))"""
    return alphabet_size * K / math.sqrt(2.0) * math.sqrt(n * m)


def lemma2_check(predictor: SequentialPredictor,
                 x: Sequence[int],
                 g: Union[np.ndarray, Callable[[int, int], float]],
                 K: float,
                 contexts: Optional[Sequence[Tuple[int, ...]]] = None,
                 reference_class: ReferenceClass = ReferenceClass(),
                 reference: Optional[Sequence[FinitePmf]] = None) -> InequalityCheck:
    """
    Σ_i |E_{f*_i}[g_i] - E_{f̂_i}[g_i]| 与 (|X|K/√2)·√(n·M(n)) 的比较

    Args:
        g: 形状为 (n, |X|) 的取值表，或函数 g(i, x)，i从0开始
        K: g的界，|g_i(x)| ≤ K

    Raises:
        RegretError: g超出声明的界
    """
    if contexts is None:
        contexts = contexts_for(predictor.spec, x)
    predictions = run_predictor(predictor, x, contexts)
    n = len(predictions)
    values = _g_values(g, n, predictor.alphabet_size)
    if not K >= 0.0 or np.any(np.abs(values) > K + BOUND_TOLERANCE):
        raise RegretError(f"g超出声明的界K={K}")
    if reference is None:
        reference = best_reference(x, contexts, reference_class, predictor.alphabet_size)
    lhs = float(sum(abs(expectation(f, v) - expectation(f_hat, v))
                    for f, f_hat, v in zip(reference, predictions, values)))
    m = max(predictor.regret_bound(n), 1.0)
    rhs = lemma2_bound(m, K, predictor.alphabet_size, n)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def assumption2_check(complete_refs: PmfRows,
                      restricted_learner: PmfRows,
                      restricted_refs: PmfRows,
                      m_restricted: float) -> InequalityCheck:
    """
    Σ_i |E_{f*^(c)_i}[log2(f*^(r)_i(X) / f̂^(r)_i(X))]| 与 M^(r)(n) 的比较

    期望在字母表上精确求和；违反时只标记，不抛异常。
    """
    ref_c, learner, ref_r = _rows(complete_refs), _rows(restricted_learner), _rows(restricted_refs)
    if not ref_c.shape == learner.shape == ref_r.shape:
        raise LengthMismatchError(f"分布序列形状不一致: {ref_c.shape}, {learner.shape}, {ref_r.shape}")
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log2(ref_r) - np.log2(learner)
    # f*^(c)(x)=0 的符号不参与期望
    terms = np.where(ref_c > 0.0, ref_c * log_ratio, 0.0)
    per_round = terms.sum(axis=1)
    if np.any(np.isnan(per_round)):
        lhs = INFINITE
    else:
        lhs = float(np.abs(per_round).sum())
    return InequalityCheck(lhs=lhs, rhs=float(m_restricted), holds=lhs <= m_restricted)


def evaluate_run(estimate: CausalTrace,
                 reference: CausalTrace,
                 m_complete: float,
                 m_restricted: float,
                 effect: Optional[Sequence[int]] = None) -> RegretReport:
    """
    汇总一次运行的遗憾报告

    引理1与引理2在完整预测器一侧检查，引理2取 g_i = log2(f̂^(c)_i/f̂^(r)_i)、K = L。
    两个假设都成立时上界检查才适用；不适用时satisfied为None，within_envelope仍给出CR与上界的比较。

    Args:
        estimate: 估计轨迹
        reference: 参考轨迹（C*与参考分布）
        m_complete, m_restricted: 两个预测器的遗憾界
        effect: 效应符号序列，给出时报告逐轮损失与累计遗憾
    """
    n = len(estimate)
    if len(reference) != n:
        raise LengthMismatchError(f"估计轨迹长度{n}与参考轨迹长度{len(reference)}不一致")
    alphabet = estimate.alphabet_size
    m_c, m_r = max(m_complete, 1.0), max(m_restricted, 1.0)

    cr = causality_regret(estimate, reference)
    L = empirical_L(estimate)
    assumption1 = not math.isinf(L)

    lemma1_lhs = float(sum(kl_divergence(make_pmf(f), make_pmf(f_hat))
                           for f, f_hat in zip(reference.f_complete, estimate.f_complete)))
    lemma1 = InequalityCheck(lhs=lemma1_lhs, rhs=m_c, holds=lemma1_lhs <= m_c)

    if assumption1:
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.log2(estimate.f_complete) - np.log2(estimate.f_restricted)
        # 两侧同为零的符号取g=0
        g = np.where((estimate.f_complete == 0.0) & (estimate.f_restricted == 0.0), 0.0, g)
        diffs = np.abs((reference.f_complete * g).sum(axis=1) - (estimate.f_complete * g).sum(axis=1))
        lemma2_lhs = float(diffs.sum())
        lemma2_rhs = lemma2_bound(m_c, L, alphabet, n)
    else:
        lemma2_lhs, lemma2_rhs = INFINITE, INFINITE
    lemma2 = InequalityCheck(lhs=lemma2_lhs, rhs=lemma2_rhs, holds=assumption1 and lemma2_lhs <= lemma2_rhs)

    assumption2 = assumption2_check(reference.f_complete, estimate.f_restricted, reference.f_restricted, m_r)
    envelope = theorem1_envelope(m_c, m_r, L, alphabet, n)
    applicable = assumption1 and assumption2.holds

    learner_losses, reference_losses, cumulative = [], [], None
    if effect is not None:
        if len(effect) != n:
            raise LengthMismatchError(f"效应序列长度{len(effect)}与轨迹长度{n}不一致")
        learner_losses = [self_information_loss(make_pmf(f), int(s)) for f, s in zip(estimate.f_complete, effect)]
        reference_losses = [self_information_loss(make_pmf(f), int(s)) for f, s in zip(reference.f_complete, effect)]
        cumulative = float(np.sum(learner_losses) - np.sum(reference_losses))

    return RegretReport(
        direction=estimate.direction,
        n=n,
        alphabet_size=alphabet,
        learner_losses=learner_losses,
        reference_losses=reference_losses,
        cumulative_regret=cumulative,
        m_complete=m_c,
        m_restricted=m_r,
        causality_regret=cr,
        l_empirical=L,
        max_c_hat=float(np.max(estimate.measure)),
        theorem_bound=envelope,
        lemma1=lemma1,
        lemma2=lemma2,
        assumption1=assumption1,
        assumption2=assumption2,
        applicable=applicable,
        within_envelope=cr <= envelope,
        satisfied=(cr <= envelope) if applicable else None,
    )
