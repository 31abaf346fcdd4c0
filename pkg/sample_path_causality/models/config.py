from typing import List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sample_path_causality.models.process import ProcessParams, RegimeCoefficients

# 变点实验两个区间的默认系数
_REGIME1_DEFAULT = dict(theta_x=-0.5, theta_xx=0.5, theta_yx=2.5, theta_y=-0.5, theta_yy=0.5, theta_xy=0.0)
_REGIME2_DEFAULT = dict(theta_x=-0.5, theta_xx=0.5, theta_yx=0.5, theta_y=-0.5, theta_yy=0.5, theta_xy=2.0)


class PredictorSettings(BaseModel):
    """序贯预测器配置"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["grid", "add-half"] = Field(default="grid")
    order: int = Field(default=1, ge=0)
    grid_size: int = Field(default=21, ge=2)
    grid_low: float = Field(default=0.025, gt=0.0, lt=1.0)
    grid_high: float = Field(default=0.975, gt=0.0, lt=1.0)
    grid_points: Optional[List[float]] = Field(default=None)
    lam: float = Field(default=0.9999, gt=0.0, le=1.0)
    alpha: float = Field(default=0.0)

    @field_validator("alpha")
    @classmethod
    def _alpha_is_zero(cls, value: float) -> float:
        if value != 0.0:
            raise ValueError("只支持alpha=0的向先验收缩")
        return value

    @model_validator(mode="after")
    def _check_grid(self) -> "PredictorSettings":
        if self.grid_low >= self.grid_high:
            raise ValueError(f"grid_low必须小于grid_high: {self.grid_low} >= {self.grid_high}")
        if self.grid_points is not None:
            if len(self.grid_points) == 0 or any(not 0.0 < p < 1.0 for p in self.grid_points):
                raise ValueError("grid_points必须非空且严格位于(0,1)内")
        return self


class PredictorPair(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    restricted: PredictorSettings = Field(default_factory=PredictorSettings)
    complete: PredictorSettings = Field(default_factory=PredictorSettings)


class ExperimentSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(default=2000, ge=1)
    seed: int = Field(default=0, ge=0)
    direction: Literal["yx", "xy", "both"] = Field(default="both")
    filter: Literal["exact", "paper-literal"] = Field(default="exact")


class ProcessSettings(BaseModel):
    """过程参数配置，change_point为"half"时取n/2；默认即两区间变点实验"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    regime1: RegimeCoefficients = Field(default_factory=lambda: RegimeCoefficients(**_REGIME1_DEFAULT))
    regime2: Optional[RegimeCoefficients] = Field(default_factory=lambda: RegimeCoefficients(**_REGIME2_DEFAULT))
    change_point: Optional[int | Literal["half"]] = Field(default="half")


class ReferenceSettings(BaseModel):
    """参考类配置"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    family: Literal["grid", "continuum"] = Field(default="grid")
    grid_points: Optional[List[float]] = Field(default=None)

    @field_validator("grid_points")
    @classmethod
    def _interior(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and (len(value) == 0 or any(not 0.0 < p < 1.0 for p in value)):
            raise ValueError("参考网格点必须非空且严格位于(0,1)内")
        return value


class OutputSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    out_dir: str = Field(default="out")
    format: Literal["csv", "json"] = Field(default="csv")
    precision: int = Field(default=12, ge=1, le=17)


class SweepSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seeds: List[int] = Field(default_factory=lambda: list(range(10)))
    workers: int = Field(default=1, ge=1)


class LoggingSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    level: str = Field(default="INFO")
    file: Optional[str] = Field(default=None)


class ExperimentConfig(BaseModel):
    """实验总配置，未知配置项一律拒绝"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: ExperimentSettings = Field(default_factory=ExperimentSettings)
    process: ProcessSettings = Field(default_factory=ProcessSettings)
    predictors: PredictorPair = Field(default_factory=PredictorPair)
    reference: ReferenceSettings = Field(default_factory=ReferenceSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    @model_validator(mode="after")
    def _check_process(self) -> "ExperimentConfig":
        # 提前构造一次，保证计算开始前所有字段已校验
        self.process_params()
        return self

    def process_params(self) -> ProcessParams:
        """组装真值模块使用的过程参数"""
        change_point = self.process.change_point
        if change_point == "half":
            change_point = max(1, self.experiment.n // 2)
        return ProcessParams(
            regime1=self.process.regime1,
            regime2=self.process.regime2,
            change_point=change_point,
            n=self.experiment.n,
        )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return self.model_copy(update={"experiment": self.experiment.model_copy(update={"seed": seed})})
