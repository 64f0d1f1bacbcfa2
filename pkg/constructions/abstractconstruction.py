import logging
from abc import ABC, abstractmethod
from typing import Any

import numpy as np
import pandas as pd

from config import DENSE_ARRAY_LIMIT, PAIR_HORIZON
from dynamics.index_sets import IndexSet
from dynamics.shift_ops import ExponentWeights
from helpers.errors import CapExceededError, PreconditionError
from helpers.utils import find_best_match, timed
from models.params import ConstructionParams
from models.reports import BoundCheck, CriterionReport, VerificationReport


class AbstractConstruction(ABC):
    """
    Abstract class for the counter-example weight constructions.

    Every construction is a weighted backward shift given by closed-form weight products
    varpi_n = weight_base ** nu(n), together with the auxiliary index sets its proof works
    with (hitting sets, level sets, interval unions, ...). Subclasses provide:

    - `weights`: the `ExponentWeights` of the shift,
    - `sets(**levels)`: the named sets for the given levels (k, p, r ...), keyed by short names,
    - `_bound_checks(horizon)`: every inequality the proof relies on, as exact `BoundCheck`s,
    - `_criterion_reports(horizon)` (optional): criterion checks run on the construction.

    `verify(horizon)` gathers all of them into a single `VerificationReport`. Schedule
    preconditions are validated once, when the construction is instantiated, and raise
    `ScheduleError` with the failing index.
    """

    name: str = ""
    level_names: tuple[str, ...] = ()

    def __init__(self, params: ConstructionParams | None = None):
        """
        Initialize the construction.

        Parameters:
            params: ConstructionParams
                Base, weight base, coefficient and schedules. Defaults to `ConstructionParams()`.

        Raises:
            ScheduleError: a schedule inequality required by the construction fails.
        """
        self.params = params or ConstructionParams()
        self._validate()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(base={self.params.base}, weight_base={self.params.weight_base})"

    def _validate(self) -> None:
        """Check the schedule preconditions. Subclasses override when they have any."""
        pass

    @property
    @abstractmethod
    def weights(self) -> ExponentWeights:
        """The weight sequence of the shift, varpi_n = weight_base ** nu(n)."""
        pass

    @abstractmethod
    def sets(self, **levels: int) -> dict[str, IndexSet]:
        """
        The named auxiliary sets of the construction.

        Parameters:
            **levels: int
                The levels the sets depend on, among `level_names`.

        Returns:
            dict[str, IndexSet]
        """
        pass

    @abstractmethod
    def _bound_checks(self, horizon: int) -> list[BoundCheck]:
        """
        The exact inequalities of the construction, certified within [0, horizon].

        Parameters:
            horizon: int
                The largest index inspected.

        Returns:
            list[BoundCheck]
        """
        pass

    def _criterion_reports(self, horizon: int) -> list[CriterionReport]:
        return []

    def named_set(self, name: str, **levels: int) -> IndexSet:
        """
        One set from `sets(**levels)`, by name.

        Raises:
            PreconditionError: unknown set name (the closest known name is suggested).
        """
        sets = self.sets(**self._levels(levels))
        if name not in sets:
            match = find_best_match(name, list(sets))
            raise PreconditionError(
                f"{self.name} has no set {name!r}, did you mean {match.text!r}?",
                {"set": name, "known": list(sets)},
            )
        return sets[name]

    def _levels(self, levels: dict[str, Any]) -> dict[str, int]:
        return {k: v for k, v in levels.items() if k in self.level_names and v is not None}

    def _operator_check(self, horizon: int) -> BoundCheck:
        w = self.weights
        return BoundCheck.compare(
            "operator_ratio",
            w.max_weight(min(horizon, DENSE_ARRAY_LIMIT)),
            w.sup_bound,
            note="varpi_(n+1)/varpi_n <= sup bound",
            horizon=horizon,
        )

    def verify(self, horizon: int = PAIR_HORIZON) -> VerificationReport:
        """
        Certify every bound of the construction within [0, horizon].

        Parameters:
            horizon: int
                The largest index inspected. Dense checks are capped at DENSE_ARRAY_LIMIT.

        Returns:
            VerificationReport
        """
        if horizon < 1:
            raise PreconditionError("verification horizon must be >= 1", {"horizon": horizon})
        if horizon > self.params.max_horizon:
            raise CapExceededError(
                f"horizon {horizon} is above max_horizon {self.params.max_horizon}",
                {"horizon": horizon, "max_horizon": self.params.max_horizon},
            )
        with timed(f"verify {self.name} up to {horizon}"):
            checks = [self._operator_check(horizon)] + self._bound_checks(horizon)
            reports = self._criterion_reports(horizon)
        report = VerificationReport(
            construction=self.name,
            parameters=self.params.to_dict(),
            horizon=horizon,
            checks=checks,
            reports=reports,
        )
        for c in report.failed():
            logging.warning(f"{self.name}: {c.name} fails: {c.lhs} {c.relation} {c.rhs} {c.parameters}")
        return report

    def weight_table(self, horizon: int) -> pd.DataFrame:
        """
        Closed-form weight table on [0, horizon].

        Columns: `n`, `nu` (varpi_n = weight_base ** nu) and `weight_exponent`
        (w_n = weight_base ** weight_exponent, 0 at n = 0).
        """
        if horizon > DENSE_ARRAY_LIMIT:
            raise CapExceededError(
                f"weight table horizon {horizon} is above the dense array limit", {"horizon": horizon}
            )
        nu = self.weights.exponents(horizon)
        steps = np.concatenate(([0], np.diff(nu)))
        return pd.DataFrame({"n": np.arange(horizon + 1), "nu": nu, "weight_exponent": steps})

