from pydantic import Field, field_validator, model_validator

from models.basemodel import BaseModel


class ConstructionParams(BaseModel):
    """
    Parameters shared by the four counter-example constructions.

    `j_schedule` (hitting-set exponents j_1 < j_2 < ... of the bounded-Banach-density
    construction) and `m_schedule` (the exponents m_1 = 1 < m_2 < ... of the Hindman
    construction) are optional explicit prefixes; when absent the constructions use
    their default rules.
    """

    base: int = Field(10, ge=2)
    weight_base: int = Field(2, ge=2)
    coefficient: int = Field(5, ge=1)
    j_schedule: list[int] | None = None
    m_schedule: list[int] | None = None
    max_level: int = Field(64, ge=1, description="largest interval generation j (or q) enumerated explicitly")
    max_horizon: int = Field(10**13, ge=1, description="largest horizon any enumeration may reach")

    @field_validator("j_schedule", "m_schedule")
    @classmethod
    def _strictly_increasing(cls, v: list[int] | None):
        if v is not None:
            if not v:
                raise ValueError("schedules must not be empty")
            if any(b <= a for a, b in zip(v, v[1:])):
                raise ValueError(f"schedule must be strictly increasing: {v}")
            if v[0] < 1:
                raise ValueError(f"schedule entries must be positive: {v}")
        return v

    @model_validator(mode="after")
    def _m_starts_at_one(self):
        if self.m_schedule is not None and self.m_schedule[0] != 1:
            raise ValueError("m_schedule must start with m_1 = 1")
        return self

    def with_updates(self, **kwargs) -> "ConstructionParams":
        return type(self)(**{**self.model_dump(), **kwargs})

    @classmethod
    def full_scale(cls) -> "ConstructionParams":
        return cls(base=10, weight_base=2, coefficient=5)

    @classmethod
    def desk(cls, **kwargs) -> "ConstructionParams":
        data = dict(base=3, weight_base=2, coefficient=5, m_schedule=[1, 4, 10])
        data.update(kwargs)
        return cls(**data)
