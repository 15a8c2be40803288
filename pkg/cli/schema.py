from fractions import Fraction
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import (
    ALGEBRA_TOL,
    BAE_TOL,
    DEFAULT_FORMAT,
    DEFAULT_MAX_BOSONS,
    EIGEN_TOL,
    MATCH_TOL,
    NEWTON_TOL,
    QES_TOL,
    ROOT_TOL,
)
from data_manager import parse_rational
from errors import ConfigError
from model import ModelSpec, ReferenceState
from presets import PresetName

Rational = Union[str, int]


def _rational(value: Rational) -> str:
    try:
        parse_rational(value)
    except ConfigError as e:
        raise ValueError(str(e)) from e
    return str(value)


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eigen: float = Field(EIGEN_TOL, gt=0, description="Jacobi 收敛阈值")
    roots: float = Field(ROOT_TOL, gt=0, description="Aberth 步长阈值")
    newton: float = Field(NEWTON_TOL, gt=0, description="Newton 残差阈值")
    bae: float = Field(BAE_TOL, gt=0, description="Bethe 方程缩放残差阈值")
    match: float = Field(MATCH_TOL, gt=0, description="能谱比对相对容差")
    algebra: float = Field(ALGEBRA_TOL, gt=0, description="对易关系容差")
    qes: float = Field(QES_TOL, gt=0, description="溢出系数容差")


class PresetRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: PresetName = Field(..., description="预设模型名称")
    params: dict[str, float] = Field(default_factory=dict, description="耦合参数，未给出的取默认值")


class ReferenceSelector(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mu: Rational = Field(..., description="参考态的 J_0 本征值")
    n: list[int] = Field(default_factory=list, description="参考态每个模式的玻色子数")

    @field_validator("mu")
    @classmethod
    def _check_mu(cls, value: Rational) -> str:
        return _rational(value)

    def to_reference(self) -> ReferenceState:
        return ReferenceState(mu=parse_rational(self.mu), n_bosons=tuple(self.n))


class OutputOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal["json", "csv"] = Field(DEFAULT_FORMAT, description="输出格式")
    path: Optional[str] = Field(None, description="输出文件路径，缺省写到标准输出")


class RunConfig(BaseModel):
    """一次运行的全部配置：命令行参数覆盖配置文件，配置文件覆盖默认值"""

    model_config = ConfigDict(extra="forbid")

    model: Optional[ModelSpec] = Field(None, description="内联模型参数")
    preset: Optional[PresetRef] = Field(None, description="预设模型引用")
    j: Optional[Rational] = Field(None, description="自旋 j，如 \"3/2\"")
    sector: Optional[ReferenceSelector] = Field(None, description="只计算该参考态所在扇区，缺省枚举全部")
    max_total_bosons: int = Field(DEFAULT_MAX_BOSONS, ge=0, description="枚举扇区时参考态的玻色子总数上限")
    index: Optional[int] = Field(None, ge=0, description="roots 命令选择的本征态序号（按能量升序）")
    refine: bool = Field(False, description="是否在 Bethe 方程上做 Newton 精化")
    seed: Optional[int] = Field(None, description="verify 随机耦合的种子")
    draws: Optional[int] = Field(None, ge=1, description="verify 每个预设的随机抽样次数")
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output: OutputOptions = Field(default_factory=OutputOptions)

    @field_validator("j")
    @classmethod
    def _check_j(cls, value: Optional[Rational]) -> Optional[str]:
        return None if value is None else _rational(value)

    @model_validator(mode="after")
    def _one_model_source(self):
        if self.model is not None and self.preset is not None:
            raise ValueError("model 与 preset 只能给出其中一个")
        return self

    @property
    def spin(self) -> Fraction:
        if self.j is None:
            raise ConfigError("缺少自旋 j（--j 或配置文件中的 j 字段）")
        return parse_rational(self.j)


class StateReport(BaseModel):
    index: int = Field(..., description="扇区内按能量升序的序号")
    E: float = Field(..., description="由 Bethe 根得到的能量")
    eigenvalue: float = Field(..., description="扇区矩阵对角化得到的本征值")
    roots: list[list[float]] = Field(..., description="Bethe 根 [实部, 虚部]")
    residual: Optional[float] = Field(None, description="Bethe 方程最大缩放残差")
    verified: bool = Field(..., description="Hψ = Eψ 校验是否通过")
    degenerate_roots: bool = Field(False, description="根是否重合")
    refined: bool = Field(False, description="是否经过 Newton 精化")
    refine_failed: bool = Field(False, description="Newton 精化是否失败（保留原根）")


class SectorReport(BaseModel):
    labels: dict[str, Any] = Field(..., description="扇区标签，有理数写成字符串")
    states: list[StateReport] = Field(default_factory=list)


class SpectrumReport(BaseModel):
    j: str = Field(..., description="自旋 j")
    model: ModelSpec = Field(..., description="实际使用的模型参数")
    sectors: list[SectorReport] = Field(default_factory=list)


class CheckResult(BaseModel):
    name: str = Field(..., description="检查项名称")
    scope: str = Field(..., description="检查范围，如预设名与自旋")
    max_deviation: Optional[float] = Field(None, description="最大偏差，未能计算时为空")
    tolerance: float = Field(..., description="判定阈值")
    passed: bool = Field(..., description="是否通过")
    detail: str = Field("", description="失败时的诊断信息")


class ErratumReport(BaseModel):
    id: str
    location: str
    printed: str
    corrected: str
    confirmed: bool = Field(..., description="印刷形式不通过且更正形式通过")


class VerificationReport(BaseModel):
    passed: bool
    checks: list[CheckResult] = Field(default_factory=list)
    errata: list[ErratumReport] = Field(default_factory=list)
