"""
This module registers the counter-example weight constructions and gives the rest of the
workbench a single way to build them by name.

Main Methodology:
- Every construction subclasses `AbstractConstruction`: closed-form weights, named auxiliary
  sets and a `verify(horizon)` that certifies the bounds its proof relies on.
- `getConstruction(name, params)` instantiates the registered class. Unknown names raise a
  `PreconditionError` that suggests the closest registered name.

Registered constructions:
- `bmpp`: interval-offset shift, upper frequently hypercyclic with hitting sets of bounded
  upper Banach density, not upper frequently hypercyclic.
- `br`: the same shift with widened square intervals, hitting sets of positive upper density.
- `bg`: block shift, frequently hypercyclic but not chaotic.
- `vfhc`: block shift with an exponent schedule, very frequently hypercyclic.

Usage:
    >>> from constructions import getConstruction
    >>> bg = getConstruction("bg", ConstructionParams.desk())
    >>> bg.verify(10**4).verdict
"""
from constructions.abstractconstruction import AbstractConstruction
from constructions.bg import BGConstruction
from constructions.bmpp import BMPPConstruction
from constructions.br import BRConstruction
from constructions.vfhc import VFHCConstruction
from helpers.errors import PreconditionError
from helpers.utils import find_best_match
from models.params import ConstructionParams

CONSTRUCTIONS: dict[str, type[AbstractConstruction]] = {
    cls.name: cls for cls in (BMPPConstruction, BRConstruction, BGConstruction, VFHCConstruction)
}


def getConstruction(name: str, params: ConstructionParams | None = None, **options) -> AbstractConstruction:
    """
    Returns the construction registered under `name`

    Args:
        name (str): one of bmpp, br, bg, vfhc
        params (ConstructionParams): defaults to `ConstructionParams()`
        **options: forwarded to the construction (`levels`, and `r` for vfhc)

    Returns:
        AbstractConstruction: the construction instance
    """
    cls = CONSTRUCTIONS.get(name)
    if cls is None:
        match = find_best_match(name, list(CONSTRUCTIONS))
        raise PreconditionError(
            f"unknown construction {name!r}, did you mean {match.text!r}?",
            {"construction": name, "known": list(CONSTRUCTIONS)},
        )
    return cls(params, **options)


__all__ = [
    "AbstractConstruction",
    "BGConstruction",
    "BMPPConstruction",
    "BRConstruction",
    "CONSTRUCTIONS",
    "VFHCConstruction",
    "getConstruction",
]
