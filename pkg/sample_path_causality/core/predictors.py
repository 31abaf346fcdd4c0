"""
序贯概率分配：每一轮先由历史给出预测分布，再根据揭示的符号更新

提供两种学习器：
- AddHalfPredictor: 按上下文计数的加半（Krichevsky–Trofimov）估计
- GridPredictor: 在离散参数网格上做贝叶斯更新，并带向先验收缩
以及用于注入已知分布的 OraclePredictor。
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Tuple
import numpy as np
from sample_path_causality.core.prob import FinitePmf, bernoulli, make_pmf, uniform
from sample_path_causality.models.config import PredictorSettings
from sample_path_causality.utils.exceptions import ContextError, PredictorError, PmfError

# 单个网格预测器允许的最大网格单元数
MAX_GRID_CELLS = 5_000_000

# 上下文中各数据流的角色名
OWN, CAUSE, SIDE = "own", "cause", "side"

Context = Tuple[int, ...]


@dataclass(frozen=True)
class ContextSpec:
    """
    预测器上下文的构成：取哪些数据流的最近order个符号

    上下文元组按streams的顺序拼接，每个数据流内部从旧到新排列。
    历史不足order个符号时使用空元组，即启动上下文。
    """
    order: int
    streams: Tuple[str, ...] = (OWN,)
    alphabet_sizes: Tuple[int, ...] = (2,)

    def __post_init__(self):
        if self.order < 0:
            raise ContextError(f"上下文阶数必须非负: {self.order}")
        if len(self.streams) != len(self.alphabet_sizes):
            raise ContextError("数据流与字母表大小个数不一致")
        if any(a < 2 for a in self.alphabet_sizes):
            raise ContextError(f"字母表大小必须至少为2: {self.alphabet_sizes}")

    @property
    def context_length(self) -> int:
        return self.order * len(self.streams)

    @property
    def num_contexts(self) -> int:
        """不含启动上下文的上下文个数"""
        if self.order == 0:
            return 1
        return int(np.prod([a ** self.order for a in self.alphabet_sizes]))

    @property
    def has_boot(self) -> bool:
        return self.order > 0

    def build(self, histories: Mapping[str, Sequence[int]]) -> Context:
        """由各数据流的历史构造当前上下文"""
        if self.order == 0:
            return ()
        context = []
        for stream in self.streams:
            past = histories.get(stream)
            if past is None:
                raise ContextError(f"缺少数据流历史: {stream}")
            if len(past) < self.order:
                return ()
            context.extend(int(s) for s in past[-self.order:])
        return tuple(context)

    def index(self, context: Context) -> Optional[int]:
        """
        上下文编号，启动上下文返回None

        Raises:
            ContextError: 上下文长度或符号不合法
        """
        context = tuple(context)
        if len(context) == 0 and self.order > 0:
            return None
        if len(context) != self.context_length:
            raise ContextError(f"上下文长度应为{self.context_length}: {context}")
        idx = 0
        for pos, symbol in enumerate(context):
            radix = self.alphabet_sizes[pos // self.order] if self.order else 1
            if isinstance(symbol, (bool, np.bool_)) or not isinstance(symbol, (int, np.integer)) \
                    or not 0 <= symbol < radix:
                raise ContextError(f"上下文符号不合法: {context}")
            idx = idx * radix + int(symbol)
        return idx


class SequentialPredictor(ABC):
    """序贯预测器基类：predict必须只依赖此前的观测"""

    kind: str = ""

    def __init__(self, spec: ContextSpec, alphabet_size: int = 2):
        if alphabet_size < 2:
            raise PredictorError(f"字母表大小必须至少为2: {alphabet_size}")
        self.spec = spec
        self.alphabet_size = alphabet_size

    @abstractmethod
    def predict(self, context: Context) -> FinitePmf:
        """给出本轮的预测分布"""
        pass

    @abstractmethod
    def update(self, context: Context, observed: int) -> None:
        """揭示符号后更新内部统计量"""
        pass

    @abstractmethod
    def fresh(self) -> "SequentialPredictor":
        """相同配置、尚未观测任何数据的新预测器"""
        pass

    @abstractmethod
    def regret_bound(self, n: int) -> float:
        """n轮内的最坏情况遗憾上界M(n)，单位比特"""
        pass

    def _check_observed(self, observed: int) -> int:
        if isinstance(observed, (bool, np.bool_)) or not isinstance(observed, (int, np.integer)) \
                or not 0 <= observed < self.alphabet_size:
            raise PmfError(f"观测符号超出字母表范围[0,{self.alphabet_size}): {observed!r}")
        return int(observed)


class AddHalfPredictor(SequentialPredictor):
    """按上下文计数的加半估计: (n_x + ½) / (n + |X|/2)"""

    kind = "add-half"

    def __init__(self, spec: ContextSpec, alphabet_size: int = 2):
        super().__init__(spec, alphabet_size)
        # 最后一行是启动上下文
        self.counts = np.zeros((spec.num_contexts + 1, alphabet_size))

    def _row(self, context: Context) -> int:
        idx = self.spec.index(context)
        return self.spec.num_contexts if idx is None else idx

    def predict(self, context: Context) -> FinitePmf:
        row = self.counts[self._row(context)]
        return make_pmf((row + 0.5) / (row.sum() + self.alphabet_size / 2.0))

    def update(self, context: Context, observed: int) -> None:
        self.counts[self._row(context), self._check_observed(observed)] += 1

    def fresh(self) -> "AddHalfPredictor":
        return AddHalfPredictor(self.spec, self.alphabet_size)

    def regret_bound(self, n: int) -> float:
        # 启动上下文也是一个独立计数的上下文
        contexts = self.spec.num_contexts + int(self.spec.has_boot)
        return worst_case_regret_bound(self.kind, n, contexts, self.alphabet_size)


class GridPredictor(SequentialPredictor):
    """
    离散参数网格上的贝叶斯混合预测器（仅二元字母表）

    每个上下文的成功概率取自同一组网格点，后验定义在所有上下文的乘积网格上，
    每轮贝叶斯更新后执行向先验收缩 w ← λ·w + (1-λ)·prior。
    启动上下文不是网格坐标，启动轮预测先验均值且不更新。
    """

    kind = "grid"

    def __init__(self,
                 spec: ContextSpec,
                 grid_points: Optional[Sequence[float]] = None,
                 grid_size: int = 21,
                 grid_low: float = 0.025,
                 grid_high: float = 0.975,
                 lam: float = 0.9999,
                 alpha: float = 0.0):
        super().__init__(spec, 2)
        if not 0.0 < lam <= 1.0:
            raise PredictorError(f"lambda必须在(0,1]内: {lam}")
        if alpha != 0.0:
            raise PredictorError(f"只支持alpha=0: {alpha}")
        if grid_points is None:
            grid_points = np.linspace(grid_low, grid_high, grid_size)
        self.grid = np.asarray(grid_points, dtype=float)
        if self.grid.ndim != 1 or self.grid.size == 0 or np.any(self.grid <= 0.0) or np.any(self.grid >= 1.0):
            raise PredictorError(f"网格点必须严格位于(0,1)内: {grid_points}")
        self.lam = float(lam)
        self.alpha = float(alpha)

        num_contexts = spec.num_contexts
        self.num_cells = self.grid.size ** num_contexts
        if self.num_cells > MAX_GRID_CELLS:
            raise PredictorError(
                f"乘积网格过大: {self.grid.size}^{num_contexts} = {self.num_cells} > {MAX_GRID_CELLS}")
        self._prior_weight = 1.0 / self.num_cells
        self.weights = np.full((self.grid.size,) * num_contexts, self._prior_weight)

    def _split(self, idx: int) -> np.ndarray:
        # 把第idx个坐标轴单独拿出来: (前面的轴, 该轴, 后面的轴)
        g = self.grid.size
        return self.weights.reshape(g ** idx, g, -1)

    def marginal(self, context: Context) -> Optional[np.ndarray]:
        """某上下文成功概率在网格点上的后验边缘分布，启动上下文返回None"""
        idx = self.spec.index(context)
        if idx is None:
            return None
        return self._split(idx).sum(axis=(0, 2))

    def predict(self, context: Context) -> FinitePmf:
        marginal = self.marginal(context)
        if marginal is None:
            p_one = float(self.grid.mean())
        else:
            p_one = float(marginal @ self.grid / marginal.sum())
        return bernoulli(min(max(p_one, 0.0), 1.0))

    def update(self, context: Context, observed: int) -> None:
        observed = self._check_observed(observed)
        idx = self.spec.index(context)
        if idx is None:
            return
        likelihood = self.grid if observed == 1 else 1.0 - self.grid
        self._split(idx)[...] *= likelihood[None, :, None]
        self.weights /= self.weights.sum()
        if self.lam < 1.0:
            self.weights *= self.lam
            self.weights += (1.0 - self.lam) * self._prior_weight

    @property
    def posterior(self) -> FinitePmf:
        """乘积网格上的后验权重"""
        return make_pmf(self.weights.ravel())

    @property
    def prior(self) -> FinitePmf:
        return uniform(self.num_cells)

    def fresh(self) -> "GridPredictor":
        return GridPredictor(self.spec, grid_points=self.grid, lam=self.lam, alpha=self.alpha)

    def regret_bound(self, n: int) -> float:
        bound = worst_case_regret_bound(self.kind, n, self.spec.num_contexts, 2,
                                        grid_size=self.grid.size, lam=self.lam)
        # 启动轮按先验均值预测，每轮至多损失 -log2 min(p, 1-p)
        prior_mean = float(self.grid.mean())
        boot = min(self.spec.order, n) * -math.log2(min(prior_mean, 1.0 - prior_mean))
        return bound + boot


class OraclePredictor(SequentialPredictor):
    """按上下文直接给出已知分布的预测器，不学习"""

    kind = "oracle"

    def __init__(self, spec: ContextSpec, pmf_of: Callable[[Context], FinitePmf], alphabet_size: int = 2):
        super().__init__(spec, alphabet_size)
        self.pmf_of = pmf_of

    def predict(self, context: Context) -> FinitePmf:
        self.spec.index(context)
        return self.pmf_of(tuple(context))

    def update(self, context: Context, observed: int) -> None:
        self._check_observed(observed)

    def fresh(self) -> "OraclePredictor":
        return OraclePredictor(self.spec, self.pmf_of, self.alphabet_size)

    def regret_bound(self, n: int) -> float:
        # 以自身为参考时遗憾为0，按M(n) ≥ 1截断
        return 1.0


def worst_case_regret_bound(predictor_kind: str,
                            n: int,
                            num_contexts: int,
                            alphabet_size: int = 2,
                            *,
                            grid_size: int = 21,
                            lam: float = 1.0) -> float:
    """
    预测器的最坏情况遗憾上界M(n)，单位比特，结果至少为1

    Args:
        predictor_kind: "add-half" 或 "grid"
        n: 轮数
        num_contexts: 上下文个数S
        alphabet_size: 字母表大小
        grid_size: 网格预测器每个上下文的网格点数
        lam: 网格预测器的收缩系数

    Returns:
        add-half: S·((|X|-1)/2·log2 n + log2|X|)
        grid: log2(网格单元数) + n·(1-λ)·log2(1/最小先验权重)
    """
    if n < 1:
        raise PredictorError(f"轮数必须至少为1: {n}")
    if num_contexts < 1:
        raise PredictorError(f"上下文个数必须至少为1: {num_contexts}")
    if predictor_kind == "add-half":
        bound = num_contexts * ((alphabet_size - 1) / 2.0 * math.log2(n) + math.log2(alphabet_size))
    elif predictor_kind == "grid":
        log_cells = num_contexts * math.log2(grid_size)
        # 均匀先验下最小先验权重的倒数就是网格单元数
        c_shrink = log_cells
        bound = log_cells + n * (1.0 - lam) * c_shrink
    else:
        raise PredictorError(f"未知的预测器类型: {predictor_kind}")
    return max(bound, 1.0)


def make_predictor(settings: PredictorSettings, streams: Tuple[str, ...],
                   alphabet_sizes: Optional[Tuple[int, ...]] = None) -> SequentialPredictor:
    """
    按配置创建预测器

    Args:
        settings: 预测器配置
        streams: 上下文使用的数据流角色，如 ("own",) 或 ("own", "cause")
        alphabet_sizes: 各数据流的字母表大小，默认均为2
    """
    if alphabet_sizes is None:
        alphabet_sizes = (2,) * len(streams)
    spec = ContextSpec(order=settings.order, streams=tuple(streams), alphabet_sizes=tuple(alphabet_sizes))
    if settings.kind == "add-half":
        return AddHalfPredictor(spec, alphabet_size=alphabet_sizes[0])
    if settings.kind == "grid":
        return GridPredictor(spec,
                             grid_points=settings.grid_points,
                             grid_size=settings.grid_size,
                             grid_low=settings.grid_low,
                             grid_high=settings.grid_high,
                             lam=settings.lam,
                             alpha=settings.alpha)
    raise PredictorError(f"未知的预测器类型: {settings.kind}")
