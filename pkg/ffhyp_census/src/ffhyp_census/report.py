"""Serialisation of reports: JSON documents, fixed-schema CSV and aligned text tables."""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

import pandas as pd

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "n", "d", "q", "total", "smooth", "sum_aut", "nontrivial",
    "average_num", "average_den", "density_num", "density_den", "orbits",
    "groupoid_num", "groupoid_den", "max_fixed_dim", "mode", "seed",
]


def exact(value: Fraction | int | None) -> dict[str, str] | None:
    """A rational as {"num": "...", "den": "..."} strings."""
    if value is None:
        return None
    value = Fraction(value)
    return {"num": str(value.numerator), "den": str(value.denominator)}


def big(value: int | None) -> int | str | None:
    """Integers beyond 2**53 as decimal strings, smaller ones unchanged."""
    if value is None or abs(value) <= 2**53:
        return value
    return str(value)


def from_exact(data: dict[str, str] | None) -> Fraction | None:
    if data is None:
        return None
    return Fraction(int(data["num"]), int(data["den"]))


def to_json(document: Any) -> str:
    """JSON text with two-space indentation and a trailing newline."""
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _csv_cell(value: Any) -> str:
    return "" if value is None else str(value)


def census_frame(rows: Iterable[dict[str, Any]]) -> pd.DataFrame:
    """Census CSV rows as a DataFrame of strings in the fixed column order."""
    records = [{col: _csv_cell(row.get(col)) for col in CSV_COLUMNS} for row in rows]
    return pd.DataFrame(records, columns=CSV_COLUMNS, dtype=str)


def to_csv(rows: Iterable[dict[str, Any]]) -> str:
    return census_frame(rows).to_csv(index=False, lineterminator="\n")


def _show(value: Any) -> Any:
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return value["num"] if value["den"] == "1" else f"{value['num']}/{value['den']}"
    return value


def _flat(value: Any) -> Any:
    value = _show(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"))
    return "" if value is None else value


def records_csv(rows: list[dict[str, Any]]) -> str:
    """CSV of arbitrary flat records; nested values become compact JSON."""
    frame = pd.DataFrame([{k: _flat(v) for k, v in row.items()} for row in rows])
    return frame.to_csv(index=False, lineterminator="\n")


def to_table(rows: list[dict[str, Any]]) -> str:
    """Aligned text table; rationals are shown as num/den."""
    if not rows:
        return ""
    frame = pd.DataFrame([{k: _show(v) for k, v in row.items()} for row in rows])
    return frame.to_string(index=False) + "\n"


def key_value_table(document: dict[str, Any]) -> str:
    """Two-column quantity/value table for flat documents such as a bound report."""
    rows = [{"quantity": key, "value": value} for key, value in document.items()]
    return to_table(rows)


def write_text(path: str | Path, text: str) -> Path:
    """Write text to path, creating parent directories.

    Raises:
        OSError: If the path is not writable.
    """
    target = Path(path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", target)
    return target


__all__ = [
    "CSV_COLUMNS",
    "big",
    "census_frame",
    "exact",
    "from_exact",
    "key_value_table",
    "records_csv",
    "to_csv",
    "to_json",
    "to_table",
    "write_text",
]
