from enum import Enum
from fractions import Fraction
from typing import Any

from pydantic import Field, field_validator, model_validator

from config import DENSITY_HORIZON, PAIR_HORIZON
from models.basemodel import BaseModel, ExactRational


class Command(str, Enum):
    DENSITY = "density"
    CONSTRUCT = "construct"
    CHECK = "check"
    ORBIT = "orbit"
    HVECTOR = "hvector"

    @classmethod
    def comma_separated(cls):
        return ", ".join(x.value for x in Command)


class Functional(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    BANACH = "banach"
    WEIGHTED = "weighted"
    EXPONENTIAL = "exponential"
    HINDMAN = "hindman"
    PHI = "phi"
    POLYA = "polya"

    @classmethod
    def comma_separated(cls):
        return ", ".join(x.value for x in Functional)


class CommonParameters(BaseModel):
    base: int = Field(3, ge=2, description="construction base b")
    weight_base: int = Field(2, ge=2)
    coefficient: int = Field(5, ge=1)
    m_schedule: list[int] | None = Field([1, 4, 10], description="vfhc exponent prefix m_1 = 1 < m_2 < ...")
    j_schedule: list[int] | None = None


class DensityParameters(CommonParameters):
    set_name: str = Field(..., description="e.g. bmpp-hitting, bg-A, vfhc-B, multiples, squares")
    k: int = Field(1, ge=0)
    p: int = Field(1, ge=1)
    j: int = Field(1, ge=1)
    r: int = Field(2, ge=2)
    step: int = Field(3, ge=1, description="step of the `multiples` set")
    functional: Functional = Functional.UPPER
    window: int | None = Field(None, ge=0, description="window length minus one (banach)")
    alpha: float = Field(1.0, ge=0, description="exponent of w_k = 1/(k+1)^alpha (weighted, phi) or Polya ratio")
    depth: int = Field(0, ge=0, description="union depth (hindman)")
    horizon: int = Field(DENSITY_HORIZON, ge=1)
    horizons: list[int] | None = None
    points: int = Field(12, ge=1, description="number of geometric horizons when `horizons` is not given")

    @model_validator(mode="after")
    def _check_functional(self):
        if self.functional == Functional.BANACH and self.window is None:
            raise ValueError("the banach functional needs --window")
        if self.functional == Functional.POLYA and not 0 < self.alpha < 1:
            raise ValueError("the polya functional needs 0 < alpha < 1")
        if self.horizons is not None and any(h < 0 or h > self.horizon for h in self.horizons):
            raise ValueError("explicit horizons must lie in [0, horizon]")
        return self


class ConstructParameters(CommonParameters):
    name: str
    horizon: int = Field(PAIR_HORIZON, ge=1)
    k: int = Field(1, ge=0)
    p: int = Field(1, ge=1)
    r: int | None = Field(None, ge=2, description="Hindman depth level of vfhc (defaults to p + 2)")


class CheckParameters(CommonParameters):
    criterion: str = Field("shift-upper", description="shift-upper, shift-upper-per-j, shift-general or verify")
    construction: str = "bmpp"
    k: int = Field(1, ge=0)
    p: int = Field(1, ge=0)
    families: list[int] | None = Field(None, description="family indices p for shift-general")
    M: ExactRational | None = Field(None, description="threshold M (shift-upper) or M_1 (shift-general); defaults per construction")
    horizon: int = Field(PAIR_HORIZON, ge=1)

    @field_validator("M")
    @classmethod
    def _positive(cls, v: Fraction | None):
        if v is not None and v <= 0:
            raise ValueError("must be > 0")
        return v


class OrbitParameters(BaseModel):
    weights: str = Field("unweighted", description="unweighted, geometric or a construction name")
    ratio: ExactRational = Fraction(2)
    base: int = Field(3, ge=2)
    vector: dict[int, ExactRational] = Field(..., description="sparse start vector {index: value}")
    center: dict[int, ExactRational] = {}
    radius: ExactRational = Fraction(1, 2)
    space: str = "c0"
    horizon: int = Field(PAIR_HORIZON, ge=1)

    @field_validator("vector", "center")
    @classmethod
    def _indices(cls, v: dict[int, Fraction]):
        if any(i < 0 for i in v):
            raise ValueError("vector indices must be >= 0")
        return v


class HVectorParameters(CommonParameters):
    construction: str = "bg"
    p_max: int = Field(2, ge=1)
    horizon: int = Field(PAIR_HORIZON, ge=1)
    scale: ExactRational = Fraction(1, 4)


PARAMETER_MODELS: dict[Command, type[BaseModel]] = {
    Command.DENSITY: DensityParameters,
    Command.CONSTRUCT: ConstructParameters,
    Command.CHECK: CheckParameters,
    Command.ORBIT: OrbitParameters,
    Command.HVECTOR: HVectorParameters,
}


class ExperimentConfig(BaseModel):
    """
    A complete, reproducible CLI run: the command, its typed parameters, where outputs
    go and the seed for any randomized sampling. The JSON form of this record is echoed
    into every output file.
    """

    command: Command
    parameters: dict[str, Any] = {}
    output_path: str | None = None
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _validate_parameters(self):
        self.typed_parameters()
        return self

    def typed_parameters(self):
        return PARAMETER_MODELS[self.command].from_dict(self.parameters)

    def echo(self) -> str:
        """Compact, key-sorted JSON used in output headers."""
        return self.to_json(indent=None, sort_keys=True).replace("\n", " ")
