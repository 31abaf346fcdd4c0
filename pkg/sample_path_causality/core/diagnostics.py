"""
变点实验的诊断统计
"""

from typing import Optional
import numpy as np
from sample_path_causality.utils.exceptions import LengthMismatchError, TraceError


def window_error(c_hat: np.ndarray, c_star: np.ndarray, start: int, stop: int) -> float:
    """第start到第stop轮（从1开始，闭区间）的平均 |Ĉ - C*|"""
    c_hat, c_star = np.asarray(c_hat, dtype=float), np.asarray(c_star, dtype=float)
    if c_hat.shape != c_star.shape:
        raise LengthMismatchError(f"轨迹长度不一致: {c_hat.shape} != {c_star.shape}")
    if not 1 <= start <= stop <= len(c_hat):
        raise TraceError(f"窗口[{start}, {stop}]超出轨迹范围[1, {len(c_hat)}]")
    return float(np.mean(np.abs(c_hat[start - 1:stop] - c_star[start - 1:stop])))


def adaptation_window(c_hat: np.ndarray,
                      c_star: np.ndarray,
                      change_point: int,
                      span: int = 200,
                      tolerance: float = 0.05) -> Optional[int]:
    """
    变点后的适应轮数：最小的w使得 [cp+w, cp+w+span] 上的平均 |Ĉ - C*| < tolerance

    窗口超出轨迹前仍未满足时返回None。
    """
    n = len(c_hat)
    if len(c_star) != n:
        raise LengthMismatchError(f"轨迹长度不一致: {n} != {len(c_star)}")
    errors = np.abs(np.asarray(c_hat, dtype=float) - np.asarray(c_star, dtype=float))
    # 窗口 [a, a+span] 共span+1轮，用前缀和一次算出全部窗口均值
    prefix = np.concatenate([[0.0], np.cumsum(errors)])
    first = change_point
    last = n - span
    if last < first:
        return None
    starts = np.arange(first, last + 1)
    means = (prefix[starts + span] - prefix[starts - 1]) / (span + 1)
    hits = np.nonzero(means < tolerance)[0]
    return int(hits[0]) if hits.size else None


def spike_match_rate(c_true: np.ndarray,
                     c_hat: np.ndarray,
                     regimes: np.ndarray,
                     burn_in: int = 300,
                     true_factor: float = 3.0,
                     estimate_factor: float = 2.0) -> Optional[float]:
    """
    尖峰定位率：真值超过所在区间中位数true_factor倍的轮次中，
    估计值在同一轮也超过其区间中位数estimate_factor倍的比例

    每个区间开头burn_in轮不计入；没有尖峰时返回None。
    """
    c_true, c_hat, regimes = (np.asarray(a) for a in (c_true, c_hat, regimes))
    if not len(c_true) == len(c_hat) == len(regimes):
        raise LengthMismatchError("真值、估计与区间编号长度不一致")
    spikes = matched = 0
    for regime in np.unique(regimes):
        idx = np.nonzero(regimes == regime)[0]
        idx = idx[burn_in:]
        if idx.size == 0:
            continue
        true_median = np.median(c_true[idx])
        hat_median = np.median(c_hat[idx])
        is_spike = c_true[idx] > true_factor * true_median
        spikes += int(is_spike.sum())
        matched += int((is_spike & (c_hat[idx] > estimate_factor * hat_median)).sum())
    if spikes == 0:
        return None
    return matched / spikes
