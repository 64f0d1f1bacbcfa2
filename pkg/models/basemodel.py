"""
BaseModel: the base class for every serializable record of the workbench.

Reports, profiles, parameters and experiment configs subclass `BaseModel` and get
loading from / saving to JSON and YAML, plus value equality and hashing on the
JSON form.

Methods:
    `from_dict(data: dict) -> BaseModel`
    `from_json(data: str) -> BaseModel`
    `from_yaml(data: str) -> BaseModel`
    `from_file(path) -> BaseModel`            (.json, .yml or .yaml)
    `to_dict(mode="json") -> dict`
    `to_json(indent=4) -> str`
    `to_yaml(indent=4) -> str`
    `to_file(path) -> None`                   (.json, .yml or .yaml)

The module also defines `ExactRational`, a `fractions.Fraction` field type that
accepts ints, strings ("3/7"), floats (converted exactly) and Fractions, and
serializes to the string "p/q" in JSON mode so values survive a round trip
without rounding.

Usage Examples:
    # Saving a report to JSON
    report.to_file("report.json")

    # Loading it back
    report = CriterionReport.from_file("report.json")
"""

import json
from pathlib import Path
from fractions import Fraction
from typing import Annotated, Any, Literal

import yaml
from pydantic.main import IncEx
from pydantic import BaseModel as PydanticBaseModel, PlainSerializer, PlainValidator

from helpers.arith import to_fraction


PathLike = str | Path


def _validate_rational(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not an exact rational: {value!r}") from e


ExactRational = Annotated[
    Fraction,
    PlainValidator(_validate_rational),
    PlainSerializer(lambda q: f"{q.numerator}/{q.denominator}", return_type=str, when_used="json"),
]


class DoubleQuotedDumper(yaml.SafeDumper):
    def represent_str(self, data):
        return self.represent_scalar('tag:yaml.org,2002:str', data, style='"')

DoubleQuotedDumper.add_representer(str, DoubleQuotedDumper.represent_str)


class BaseModel(PydanticBaseModel):
    def __str__(self):
        return str(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]):
        """
        Creates a model from a dictionary, validating every field.

        Args:
            data: A dictionary containing the field values.

        Returns:
            BaseModel: The created model.
        """
        return cls.model_validate(data)

    @classmethod
    def from_json(cls, data: str):
        return cls.from_dict(json.loads(data))

    @classmethod
    def from_yaml(cls, data: str):
        return cls.from_dict(yaml.safe_load(data))

    @classmethod
    def from_file(cls, path: PathLike):
        """
        Creates a model from a JSON or YAML file.

        Args:
            path: A path to the file containing the data.

        Returns:
            BaseModel: The created model.
        """
        path = Path(path)
        data = path.read_text(encoding="utf-8")

        if path.suffix == ".json":
            return cls.from_json(data)
        elif path.suffix in [".yml", ".yaml"]:
            return cls.from_yaml(data)
        else:
            raise ValueError("Invalid file format. Must be .json or .yaml.")

    def to_dict(
        self,
        mode: Literal['json', 'python'] = 'json',
        include: IncEx = None,
        exclude: IncEx = None,
        by_alias: bool = False,
        exclude_none: bool = False,
    ):
        """
        Generate a dictionary representation of the model.

        Args:
            mode: If 'json', the output only contains JSON serializable types (rationals become "p/q").
                If 'python', Fractions and enums are kept as Python objects.
            include: A set of fields to include in the output.
            exclude: A set of fields to exclude from the output.
            by_alias: Whether to use the field's alias in the dictionary key if defined.
            exclude_none: Whether to exclude fields that have a value of `None`.

        Returns:
            A dictionary representation of the model.
        """
        return self.model_dump(
            mode=mode,
            include=include,
            exclude=exclude,
            by_alias=by_alias,
            exclude_none=exclude_none,
        )

    def to_json(self, indent=4, sort_keys=False, include: IncEx = None, exclude: IncEx = None, exclude_none: bool = False):
        d = self.to_dict(mode="json", include=include, exclude=exclude, exclude_none=exclude_none)
        return json.dumps(d, indent=indent, sort_keys=sort_keys)

    def to_yaml(self, indent=4, width=1000, sort_keys=False, include: IncEx = None, exclude: IncEx = None, exclude_none: bool = False):
        d = self.to_dict(mode="json", include=include, exclude=exclude, exclude_none=exclude_none)
        return yaml.dump(
            d,
            Dumper=DoubleQuotedDumper,
            allow_unicode=True,
            sort_keys=sort_keys,
            indent=indent,
            width=width,
        )

    def to_file(self, path: PathLike, indent=4, sort_keys=False, exclude_none: bool = False):
        """
        Save the model to a file (in JSON or YAML), inferring the format from the file extension.

        Args:
            path: The path to the file to save the model.
            indent: The indentation level to use when serializing the model.
            sort_keys: Whether to sort the keys in the output.
            exclude_none: Whether to exclude fields that have a value of `None`.
        """
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(self.to_json(indent=indent, sort_keys=sort_keys, exclude_none=exclude_none), encoding="utf-8")
        elif path.suffix in [".yml", ".yaml"]:
            path.write_text(self.to_yaml(indent=indent, sort_keys=sort_keys, exclude_none=exclude_none), encoding="utf-8")
        else:
            raise ValueError("Invalid file format. Must be .json or .yaml.")

    def __hash__(self) -> int:
        return hash(self.to_json(sort_keys=True))

    def __eq__(self, other: "BaseModel") -> bool:
        if not isinstance(other, BaseModel):
            return False
        return type(self) is type(other) and self.to_json(sort_keys=True) == other.to_json(sort_keys=True)
