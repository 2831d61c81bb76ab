"""CSV ingestion of competing-risks data and emission of result tables."""

import logging
from dataclasses import dataclass
from typing import Dict, Literal, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import IngestionError
from .sample import Sample, validate_sample

logger = logging.getLogger(__name__)

CensorPolicy = Literal["extra_cause", "drop"]


def parse_cause_map(text: str) -> Dict[str, int]:
    """Parse ``"label=1,other label=2"`` into a label-to-cause mapping.

    Raises
    ------
    IngestionError
        On a malformed entry or a non-positive cause
    """
    mapping = {}
    for entry in text.split(","):
        if not entry.strip():
            continue
        label, sep, value = entry.rpartition("=")
        if not sep or not label.strip():
            raise IngestionError(f"cause map entry '{entry}' is not of the form label=cause")
        try:
            cause = int(value)
        except ValueError:
            raise IngestionError(f"cause map entry '{entry}' has a non-integer cause") from None
        if cause < 1:
            raise IngestionError(f"cause map entry '{entry}' maps to a cause below 1")
        mapping[label.strip()] = cause
    if not mapping:
        raise IngestionError("cause map is empty")
    return mapping


@dataclass(frozen=True)
class IngestionPolicy:
    """How a CSV file becomes a sample.

    Censored rows are those whose status cell (or, without a status
    column, whose cause cell) equals one of ``censored_values``.

    Parameters
    ----------
    time_column, cause_column : str
        Column names
    status_column : str, optional
        Column flagging censored rows
    censored_values : tuple of str
        Cell values marking a censored row
    censor_policy : {'extra_cause', 'drop'}
        Give censored rows the label k + 1, or remove them
    cause_label_map : dict, optional
        Text label to cause number
    k : int, optional
        Declared number of causes before censoring; inferred from the largest
        label when omitted
    min_causes : int
        Smallest admissible number of causes in the result
    """

    time_column: str = "time"
    cause_column: str = "cause"
    status_column: Optional[str] = None
    censored_values: Tuple[str, ...] = ("0",)
    censor_policy: CensorPolicy = "extra_cause"
    cause_label_map: Optional[Dict[str, int]] = None
    k: Optional[int] = None
    min_causes: int = 2

    def __post_init__(self):
        if self.censor_policy not in ("extra_cause", "drop"):
            raise IngestionError(
                f"Unknown censor policy '{self.censor_policy}'. "
                "Available policies: ['extra_cause', 'drop']"
            )
        object.__setattr__(
            self, "censored_values", tuple(str(v).strip() for v in self.censored_values)
        )


def _line(i: int) -> int:
    # data row i (0-based) sits on file line i + 2, after the header
    return int(i) + 2


_INT64_MAX = int(np.iinfo(np.int64).max)
# floats hold every integer exactly up to here
_FLOAT_EXACT = 2**53


def _parse_integers(cells: pd.Series, what: str) -> np.ndarray:
    values = np.zeros(len(cells), dtype=np.int64)
    unparseable = np.zeros(len(cells), dtype=bool)
    fractional = np.zeros(len(cells), dtype=bool)
    too_large = np.zeros(len(cells), dtype=bool)

    integral = cells.str.fullmatch(r"[+-]?\d+").to_numpy(dtype=bool)
    for i in np.flatnonzero(integral):
        value = int(cells.iloc[i])
        if abs(value) > _INT64_MAX:
            too_large[i] = True
        else:
            values[i] = value

    rest = np.flatnonzero(~integral)
    if rest.size:
        floats = pd.to_numeric(cells.iloc[rest], errors="coerce").to_numpy(dtype=float)
        unparseable[rest] = np.isnan(floats)
        with np.errstate(invalid="ignore"):
            fractional[rest] = ~unparseable[rest] & (np.isinf(floats) | (floats != np.floor(floats)))
            too_large[rest] = ~(unparseable[rest] | fractional[rest]) & (np.abs(floats) > _FLOAT_EXACT)
        good = ~(unparseable[rest] | fractional[rest] | too_large[rest])
        values[rest[good]] = floats[good].astype(np.int64)

    bad = unparseable | fractional | too_large
    if bad.any():
        i = int(np.argmax(bad))
        cell, line = cells.iloc[i], _line(cells.index[i])
        if unparseable[i]:
            raise IngestionError(f"unparseable {what} '{cell}' on line {line}")
        if fractional[i]:
            raise IngestionError(
                f"non-integer {what} '{cell}' on line {line}; "
                "rank-map the values to 1, 2, ... first"
            )
        raise IngestionError(f"{what} '{cell}' on line {line} is too large")
    return values


def _parse_causes(cells: pd.Series, policy: IngestionPolicy) -> np.ndarray:
    if policy.cause_label_map is None:
        return _parse_integers(cells, "cause")
    mapped = cells.map(policy.cause_label_map)
    unknown = mapped.isna().to_numpy()
    if unknown.any():
        i = int(np.argmax(unknown))
        raise IngestionError(
            f"unknown cause label '{cells.iloc[i]}' on line {_line(cells.index[i])}"
        )
    return mapped.to_numpy(dtype=np.int64)


def read_csv(path, policy: Optional[IngestionPolicy] = None) -> Sample:
    """Read a competing-risks sample from CSV.

    Parameters
    ----------
    path : str or path-like or buffer
        File with a header row
    policy : IngestionPolicy, optional
        Column names and censoring handling

    Returns
    -------
    Sample
        Censored rows carry cause k + 1 under ``extra_cause`` (k grows by
        one only when censored rows exist) and are removed under ``drop``

    Raises
    ------
    IngestionError
        Missing file or column, no data rows, unparseable cell (line number
        reported), or nothing left after dropping censored rows
    """
    policy = policy or IngestionPolicy()
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise IngestionError(f"input file not found: {path}") from None
    except pd.errors.EmptyDataError:
        raise IngestionError(f"{path}: no header row") from None

    frame.columns = [str(c).strip() for c in frame.columns]
    required = [policy.time_column, policy.cause_column]
    if policy.status_column is not None:
        required.append(policy.status_column)
    for column in required:
        if column not in frame.columns:
            raise IngestionError(
                f"missing column '{column}' (found: {list(frame.columns)})"
            )
    if len(frame) == 0:
        raise IngestionError("no data rows")

    frame = frame.apply(lambda col: col.str.strip())
    flag_column = policy.status_column or policy.cause_column
    censored = frame[flag_column].isin(policy.censored_values).to_numpy()

    times = _parse_integers(frame[policy.time_column], "time")
    non_positive = np.flatnonzero(times < 1)
    if non_positive.size:
        i = int(non_positive[0])
        raise IngestionError(f"non-positive time {times[i]} on line {_line(i)}")
    events = frame[~censored]
    causes = np.zeros(len(frame), dtype=np.int64)
    if len(events):
        causes[~censored] = _parse_causes(events[policy.cause_column], policy)

    k = policy.k
    if k is None:
        k = int(causes.max()) if len(events) else 0
    n_censored = int(censored.sum())
    if n_censored:
        if policy.censor_policy == "extra_cause":
            causes[censored] = k + 1
            k += 1
        else:
            times = times[~censored]
            causes = causes[~censored]
            if times.size == 0:
                raise IngestionError("no rows left after dropping censored observations")

    sample = validate_sample(times, causes, k, min_causes=policy.min_causes)
    logger.info(
        "read %d rows (%d censored, policy %s): n=%d, k=%d, counts per cause %s",
        len(frame), n_censored, policy.censor_policy,
        sample.n, sample.k, sample.cause_counts.tolist(),
    )
    return sample


def write_sample_csv(sample: Sample, path, policy: Optional[IngestionPolicy] = None) -> None:
    """Write a sample as ``time,cause`` CSV that ``read_csv`` reads back unchanged."""
    policy = policy or IngestionPolicy()
    frame = pd.DataFrame({
        policy.time_column: sample.times,
        policy.cause_column: sample.causes,
    })
    frame.to_csv(path, index=False, lineterminator="\n")


def write_cif_csv(table: pd.DataFrame, path) -> None:
    """Write a CIF (or hazard-share) table with its header."""
    table.to_csv(path, index=False, lineterminator="\n")


def write_power_table(
    table: pd.DataFrame,
    path,
    fmt: Literal["csv", "json"] = "csv",
) -> None:
    """Write a long or wide power table as CSV or JSON records.

    Raises
    ------
    ValueError
        If the format is unknown
    """
    if fmt == "csv":
        table.to_csv(path, index=not isinstance(table.index, pd.RangeIndex),
                     lineterminator="\n")
    elif fmt == "json":
        if not isinstance(table.index, pd.RangeIndex):
            table = _flatten_wide(table)
        text = table.to_json(orient="records", indent=2)
        if hasattr(path, "write"):
            path.write(text + "\n")
        else:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text + "\n")
    else:
        raise ValueError(f"Unknown format '{fmt}'. Available formats: ['csv', 'json']")


def _flatten_wide(table: pd.DataFrame) -> pd.DataFrame:
    flat = table.copy()
    flat.columns = [f"{label} alpha={alpha:g}" for label, alpha in flat.columns]
    return flat.reset_index()
