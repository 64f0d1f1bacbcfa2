import csv
from fractions import Fraction

import pandas as pd
from pydantic import model_validator

from models.basemodel import BaseModel, ExactRational


class ComponentCheck(BaseModel):
    """Finite-horizon membership test of one family component: sound for `holds`, inconclusive otherwise."""

    component: str
    holds: bool
    witness: int | None = None
    value: ExactRational | None = None
    horizon: int


class DensityProfile(BaseModel):
    functional_tag: str
    horizons: list[int]
    values: list[ExactRational]
    running_sup: list[ExactRational] = []
    running_inf: list[ExactRational] = []
    # certified truncation error per horizon (matrix densities)
    slack: list[ExactRational] = []

    @model_validator(mode="after")
    def _check_shape(self):
        if len(self.values) != len(self.horizons):
            raise ValueError("values and horizons must have the same length")
        if any(b <= a for a, b in zip(self.horizons, self.horizons[1:])):
            raise ValueError("horizons must be strictly increasing")
        return self

    @classmethod
    def from_values(
        cls,
        functional_tag: str,
        horizons: list[int],
        values: list[Fraction],
        slack: list[Fraction] | None = None,
    ) -> "DensityProfile":
        """running_sup[i] / running_inf[i] are the max / min of values[i:]."""
        sup: list[Fraction] = []
        inf: list[Fraction] = []
        for v in reversed(values):
            sup.append(v if not sup else max(v, sup[-1]))
            inf.append(v if not inf else min(v, inf[-1]))
        return cls(
            functional_tag=functional_tag,
            horizons=list(horizons),
            values=list(values),
            running_sup=sup[::-1],
            running_inf=inf[::-1],
            slack=list(slack or []),
        )

    @property
    def last(self) -> Fraction:
        return self.values[-1]

    def value_at(self, horizon: int) -> Fraction:
        return self.values[self.horizons.index(horizon)]

    def to_df(self) -> pd.DataFrame:
        df = pd.DataFrame(
            {
                "functional_tag": self.functional_tag,
                "N": self.horizons,
                "value": [float(v) for v in self.values],
                "running_sup": [float(v) for v in self.running_sup],
                "running_inf": [float(v) for v in self.running_inf],
            }
        )
        if self.slack:
            df["slack"] = [float(v) for v in self.slack]
        return df

    @staticmethod
    def to_csv(profiles: list["DensityProfile"], path: str, header_comment: str | None = None):
        df = pd.concat([p.to_df() for p in profiles], ignore_index=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            if header_comment:
                f.write(f"# {header_comment}\n")
            df.to_csv(f, index=False, quoting=csv.QUOTE_NONNUMERIC)
