import math
from typing import Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator


class RegimeCoefficients(BaseModel):
    """单个参数区间的逻辑斯蒂系数"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    theta_x: float = Field(default=0.0)
    theta_xx: float = Field(default=0.0)
    theta_yx: float = Field(default=0.0)
    theta_y: float = Field(default=0.0)
    theta_yy: float = Field(default=0.0)
    theta_xy: float = Field(default=0.0)

    @model_validator(mode="after")
    def _finite(self) -> "RegimeCoefficients":
        for name, value in self.model_dump().items():
            if not math.isfinite(value):
                raise ValueError(f"系数必须为有限值: {name}={value}")
        return self

    def mirrored(self) -> "RegimeCoefficients":
        """交换X与Y的角色"""
        return RegimeCoefficients(
            theta_x=self.theta_y,
            theta_xx=self.theta_yy,
            theta_yx=self.theta_xy,
            theta_y=self.theta_x,
            theta_yy=self.theta_xx,
            theta_xy=self.theta_yx,
        )


class ProcessParams(BaseModel):
    """联合马尔可夫二元过程的两区间参数"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    regime1: RegimeCoefficients = Field(default_factory=RegimeCoefficients)
    regime2: Optional[RegimeCoefficients] = Field(default=None)
    change_point: Optional[int] = Field(default=None)
    n: int = Field(default=2000, ge=1)

    @model_validator(mode="after")
    def _check_change_point(self) -> "ProcessParams":
        if self.change_point is not None:
            if not 1 <= self.change_point <= self.n:
                raise ValueError(f"change_point必须在[1, n]内: {self.change_point}")
            if self.regime2 is None:
                raise ValueError("设置change_point时必须提供regime2")
        return self

    def regime_at(self, i: int) -> int:
        """第i轮（从1开始）所处的参数区间编号"""
        if self.change_point is None or i < self.change_point:
            return 1
        return 2

    def coefficients(self, regime: int) -> RegimeCoefficients:
        if regime == 2 and self.regime2 is not None:
            return self.regime2
        return self.regime1

    def mirrored(self) -> "ProcessParams":
        """交换X与Y后的参数，用于计算X→Y方向的真值"""
        return self.model_copy(update={
            "regime1": self.regime1.mirrored(),
            "regime2": self.regime2.mirrored() if self.regime2 is not None else None,
        })
