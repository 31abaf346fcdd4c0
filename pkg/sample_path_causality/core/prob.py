"""
有限字母表概率原语：分布构造、KL散度、自信息损失

所有信息量统一以比特（以2为底的对数）为单位。
"""

import math
from dataclasses import dataclass
from typing import Sequence, Union
import numpy as np
from scipy.special import rel_entr
from sample_path_causality.utils.exceptions import PmfError, AlphabetMismatchError

# 归一化容差
NORMALIZATION_TOLERANCE = 1e-12

# 统一的对数底
LOG_BASE = 2.0

# 发散时返回的特殊值，不会被截断为一个大的浮点数
INFINITE = math.inf

ArrayLike = Union[Sequence[float], np.ndarray]


def is_infinite(value: float) -> bool:
    """判断是否为发散标记"""
    return math.isinf(value) and value > 0


@dataclass(frozen=True, eq=False)
class FinitePmf:
    """有限字母表上的概率质量函数，构造后不可变"""
    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        if mass.ndim != 1 or mass.size < 2:
            raise PmfError(f"字母表大小必须至少为2: {mass.size}")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise PmfError(f"概率质量必须为非负有限值: {mass}")
        if abs(mass.sum() - 1.0) > NORMALIZATION_TOLERANCE:
            raise PmfError(f"概率质量之和必须为1: {mass.sum()!r}")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @property
    def alphabet_size(self) -> int:
        return int(self.mass.size)

    def __getitem__(self, symbol: int) -> float:
        return float(self.mass[check_symbol(self, symbol)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePmf):
            return NotImplemented
        return self.alphabet_size == other.alphabet_size and bool(np.array_equal(self.mass, other.mass))

    def __hash__(self) -> int:
        return hash(self.mass.tobytes())

    def __repr__(self) -> str:
        return f"FinitePmf({np.array2string(self.mass, precision=6)})"


def make_pmf(mass: ArrayLike) -> FinitePmf:
    """
    由非负向量构造概率质量函数，必要时归一化

    Args:
        mass: 非负实数向量，长度至少为2

    Returns:
        FinitePmf: 归一化后的分布；输入已归一化时原样保留

    Raises:
        PmfError: 空向量、全零向量或存在负值
    """
    values = np.asarray(mass, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise PmfError(f"概率向量长度必须至少为2: {values.shape}")
    if not np.all(np.isfinite(values)):
        raise PmfError(f"概率向量包含非有限值: {values}")
    if np.any(values < 0):
        raise PmfError(f"概率向量包含负值: {values}")
    total = values.sum()
    if total <= 0:
        raise PmfError("概率向量全为零，无法归一化")
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        values = values / total
    return FinitePmf(values)


def bernoulli(p_one: float) -> FinitePmf:
    """二元分布 Bern(p_one)"""
    if not 0.0 <= p_one <= 1.0:
        raise PmfError(f"伯努利参数必须在[0,1]内: {p_one}")
    return make_pmf([1.0 - p_one, p_one])


def uniform(alphabet_size: int) -> FinitePmf:
    """均匀分布"""
    return make_pmf(np.full(alphabet_size, 1.0 / alphabet_size))


def check_symbol(f: FinitePmf, symbol: int) -> int:
    """校验符号是否在字母表内"""
    if isinstance(symbol, (bool, np.bool_)) or not isinstance(symbol, (int, np.integer)):
        raise PmfError(f"符号必须是整数: {symbol!r}")
    if not 0 <= symbol < f.alphabet_size:
        raise PmfError(f"符号超出字母表范围[0,{f.alphabet_size}): {symbol}")
    return int(symbol)


def _check_alphabets(p: FinitePmf, q: FinitePmf):
    if p.alphabet_size != q.alphabet_size:
        raise AlphabetMismatchError(f"字母表大小不一致: {p.alphabet_size} != {q.alphabet_size}")


def kl_divergence(p: FinitePmf, q: FinitePmf) -> float:
    """
    KL散度 D(p‖q)，单位为比特

    p(x)=0 的项贡献为0；p(x)>0 而 q(x)=0 时返回 INFINITE。
    """
    _check_alphabets(p, q)
    value = float(np.sum(rel_entr(p.mass, q.mass))) / math.log(LOG_BASE)
    if math.isinf(value):
        return INFINITE
    return max(value, 0.0)


def self_information_loss(f: FinitePmf, symbol: int) -> float:
    """自信息损失 l(f,x) = -log2 f(x)，f(x)=0 时返回 INFINITE"""
    mass = f.mass[check_symbol(f, symbol)]
    if mass == 0.0:
        return INFINITE
    return 0.0 - math.log2(mass)


def total_variation(p: FinitePmf, q: FinitePmf) -> float:
    """全变差距离 ½Σ|p(x)-q(x)|"""
    _check_alphabets(p, q)
    return 0.5 * float(np.abs(p.mass - q.mass).sum())


def log_ratio_bound(p: FinitePmf, q: FinitePmf) -> float:
    """
    sup_x |log2(p(x)/q(x))|

    两者同时为零的符号跳过；只有一方为零时返回 INFINITE。
    """
    _check_alphabets(p, q)
    both_zero = (p.mass == 0.0) & (q.mass == 0.0)
    one_zero = (p.mass == 0.0) ^ (q.mass == 0.0)
    if np.any(one_zero):
        return INFINITE
    keep = ~both_zero
    ratios = np.abs(np.log2(p.mass[keep]) - np.log2(q.mass[keep]))
    return float(ratios.max()) if ratios.size else 0.0


def expectation(f: FinitePmf, values: ArrayLike) -> float:
    """E_f[g(X)]，values[x] = g(x)"""
    g = np.asarray(values, dtype=float)
    if g.shape != f.mass.shape:
        raise AlphabetMismatchError(f"函数取值个数与字母表大小不一致: {g.shape} != {f.mass.shape}")
    # 0·inf 按0处理
    support = f.mass > 0
    return float(np.dot(f.mass[support], g[support]))


def mix(pmfs: Sequence[FinitePmf], weights: ArrayLike) -> FinitePmf:
    """分布的凸组合 Σ w_k f_k"""
    w = np.asarray(weights, dtype=float)
    if len(pmfs) == 0 or w.shape != (len(pmfs),):
        raise PmfError("混合分量与权重个数不一致")
    for other in pmfs[1:]:
        _check_alphabets(pmfs[0], other)
    stacked = np.stack([f.mass for f in pmfs])
    return make_pmf(w @ stacked)
