"""
Writers for CLI outputs. Every file carries the artifact version and the echo of the
experiment config that produced it: CSV and text files as a leading `# hyplab ...` comment
line, JSON files as the `hyplab` and `config` keys around the result.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd

from config import ARTIFACT_VERSION, OUTPUT_DIR
from dynamics.index_sets import IndexSet, export
from helpers.text_utils import slugify
from models.basemodel import BaseModel
from models.experiment import ExperimentConfig


def header_line(config: ExperimentConfig) -> str:
    return f"hyplab {ARTIFACT_VERSION} config={config.echo()}"


def output_file(config: ExperimentConfig, name: str, suffix: str) -> Path:
    """`<output_path or OUTPUT_DIR>/<command>-<slug(name)><suffix>`, creating the directory."""
    folder = Path(config.output_path) if config.output_path else OUTPUT_DIR
    folder.mkdir(parents=True, exist_ok=True)
    return folder / f"{config.command.value}-{slugify(name)}{suffix}"


def write_csv(df: pd.DataFrame, config: ExperimentConfig, name: str) -> Path:
    path = output_file(config, name, ".csv")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# {header_line(config)}\n")
        df.to_csv(f, index=False, quoting=csv.QUOTE_NONNUMERIC)
    logging.info(f"wrote {len(df)} rows to {str(path)!r}")
    return path


def write_set(A: IndexSet, horizon: int, config: ExperimentConfig, name: str) -> Path:
    path = export(A, horizon, output_file(config, name, ".csv"), header_comment=header_line(config))
    logging.info(f"wrote enumeration of {A.label!r} up to {horizon} to {str(path)!r}")
    return path


def write_json(result: BaseModel | dict[str, Any], config: ExperimentConfig, name: str) -> Path:
    path = output_file(config, name, ".json")
    data = result.to_dict() if isinstance(result, BaseModel) else result
    payload = {"hyplab": ARTIFACT_VERSION, "config": config.to_dict(), "result": data}
    path.write_text(json.dumps(payload, indent=4), encoding="utf-8")
    logging.info(f"wrote {str(path)!r}")
    return path
