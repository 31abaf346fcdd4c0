from dataclasses import dataclass, replace
from typing import Optional
import numpy as np
from sample_path_causality.utils.exceptions import LengthMismatchError, TraceError


@dataclass(frozen=True)
class CausalTrace:
    """
    逐轮的因果度量轨迹

    measure / f_complete / f_restricted 是轨迹本身的度量与两种预测分布：
    估计轨迹中是Ĉ与预测器输出，真值轨迹中是C与真实条件分布。
    reference_* 是参考度量C*及其分布，true_measure 是真值C。
    分布数组形状为 (n, |X|)。
    """
    direction: str
    measure: np.ndarray
    f_complete: np.ndarray
    f_restricted: np.ndarray
    source: str = "estimate"
    reference_measure: Optional[np.ndarray] = None
    reference_complete: Optional[np.ndarray] = None
    reference_restricted: Optional[np.ndarray] = None
    true_measure: Optional[np.ndarray] = None
    regimes: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.measure)
        if n == 0:
            raise TraceError("轨迹不能为空")
        for name in ("f_complete", "f_restricted", "reference_measure", "reference_complete",
                     "reference_restricted", "true_measure", "regimes"):
            value = getattr(self, name)
            if value is not None and len(value) != n:
                raise LengthMismatchError(f"{name}长度{len(value)}与轨迹长度{n}不一致")

    def __len__(self) -> int:
        return len(self.measure)

    @property
    def rounds(self) -> np.ndarray:
        """轮次编号，从1开始"""
        return np.arange(1, len(self) + 1)

    @property
    def alphabet_size(self) -> int:
        return int(self.f_complete.shape[1])

    def prefix(self, m: int) -> "CausalTrace":
        """前m轮组成的轨迹"""
        if not 1 <= m <= len(self):
            raise TraceError(f"前缀长度必须在[1, {len(self)}]内: {m}")
        cut = {}
        for name in ("measure", "f_complete", "f_restricted", "reference_measure", "reference_complete",
                     "reference_restricted", "true_measure", "regimes"):
            value = getattr(self, name)
            cut[name] = None if value is None else value[:m]
        return replace(self, **cut)

    def with_reference(self, measure: np.ndarray, complete: np.ndarray, restricted: np.ndarray) -> "CausalTrace":
        return replace(self, reference_measure=np.asarray(measure, dtype=float),
                       reference_complete=np.asarray(complete, dtype=float),
                       reference_restricted=np.asarray(restricted, dtype=float))

    def with_truth(self, truth: "CausalTrace") -> "CausalTrace":
        """挂上真值轨迹的度量与区间编号"""
        if len(truth) != len(self):
            raise LengthMismatchError(f"真值轨迹长度{len(truth)}与估计轨迹长度{len(self)}不一致")
        return replace(self, true_measure=truth.measure, regimes=truth.regimes)
