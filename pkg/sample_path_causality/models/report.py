from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field


class InequalityCheck(BaseModel):
    """一个不等式检查的两侧与结论"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    lhs: float
    rhs: float
    holds: bool


class RegretReport(BaseModel):
    """因果遗憾报告"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    direction: str
    n: int
    alphabet_size: int = Field(default=2)
    learner_losses: List[float] = Field(default_factory=list)
    reference_losses: List[float] = Field(default_factory=list)
    cumulative_regret: Optional[float] = Field(default=None)
    m_complete: float
    m_restricted: float
    causality_regret: float
    l_empirical: float
    max_c_hat: float
    theorem_bound: float
    lemma1: InequalityCheck
    lemma2: InequalityCheck
    assumption1: bool
    assumption2: InequalityCheck
    applicable: bool
    within_envelope: bool
    satisfied: Optional[bool] = Field(default=None)


class ChangePointSummary(BaseModel):
    """变点实验的适应性统计"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    direction: str
    change_point: int
    adaptation_window: Optional[int] = Field(default=None)
    pre_change_error: Optional[float] = Field(default=None)
    spike_match_rate: Optional[float] = Field(default=None)
    l_empirical: float


class Example1Report(BaseModel):
    """闭式结果与蒙特卡洛估计的对照"""
    restricted_probability: float
    c_y1: float
    c_y0: float
    expected_measure: float
    printed_expected_measure: float = Field(default=0.088)
    monte_carlo_mean: Optional[float] = Field(default=None)
    monte_carlo_n: int = Field(default=0)
    closed_form_ok: bool
    monte_carlo_ok: bool
    note: str = Field(default="")


class RunManifest(BaseModel):
    """一次运行的参数回显"""
    command: str
    seed: int
    n: int
    params: Dict
    config: Dict
    package_version: str
    numpy_version: str
    files: List[str] = Field(default_factory=list)
