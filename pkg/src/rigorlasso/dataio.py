"""CSV ingestion and design-matrix construction.

Replaces a formula interface with an explicit column-selection spec: the
caller names the outcome, target, control, and instrument columns and lists
any pairwise interactions to generate.  Constant columns are pruned after
expansion and the removals are reported through warnings.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Dataset",
    "DesignSpec",
    "DesignMatrix",
    "DataError",
    "load_csv",
    "expand_design",
    "filter_columns_by_mean",
]


class DataError(ValueError):
    """Raised for unreadable files, bad headers, or invalid design specs."""


@dataclass(frozen=True)
class Dataset:
    """Column-oriented numeric table with unique, nonempty column names."""

    names: tuple
    columns: tuple  # tuple of 1-d float arrays, all of length n
    dropped_rows: int = 0

    def __post_init__(self):
        if len(self.names) != len(self.columns):
            raise DataError("names and columns length mismatch")
        if len(set(self.names)) != len(self.names):
            raise DataError("duplicate column names")
        if any(not name for name in self.names):
            raise DataError("empty column name")
        lengths = {len(c) for c in self.columns}
        if len(lengths) != 1:
            raise DataError("columns have differing lengths")
        if self.n < 1:
            raise DataError("dataset has no rows")

    @property
    def n(self) -> int:
        return len(self.columns[0])

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[self.names.index(name)]
        except ValueError:
            raise DataError(f"no such column: {name!r}") from None


@dataclass(frozen=True)
class DesignSpec:
    """Role assignment and interaction list for building a design matrix."""

    outcome: str
    targets: tuple = ()
    controls: tuple = ()
    instruments: tuple = ()
    interactions: tuple = ()  # pairs (a, b) -> product column "a:b"
    include_intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "controls", tuple(self.controls))
        object.__setattr__(self, "instruments", tuple(self.instruments))
        object.__setattr__(self, "interactions", tuple(tuple(p) for p in self.interactions))
        groups = (self.targets, self.controls, self.instruments)
        seen = set()
        for group in groups:
            for name in group:
                if name == self.outcome:
                    raise DataError(f"outcome {name!r} also listed as regressor")
                if name in seen:
                    raise DataError(f"column {name!r} assigned more than one role")
                seen.add(name)


@dataclass(frozen=True)
class DesignMatrix:
    """Named n x p matrix with per-column role tags and no constant columns."""

    X: np.ndarray
    column_names: tuple
    roles: tuple  # "target" | "control" | "instrument"
    removed: tuple = ()

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def columns_with_role(self, role: str) -> np.ndarray:
        idx = [j for j, r in enumerate(self.roles) if r == role]
        return self.X[:, idx]

    def indices_with_role(self, role: str) -> list:
        return [j for j, r in enumerate(self.roles) if r == role]


def _parse_cell(text: str):
    text = text.strip()
    if text == "" or text.upper() in ("NA", "NAN"):
        return None
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path, na_policy: str = "reject") -> Dataset:
    """Read a headered, comma-delimited numeric CSV into a Dataset.

    na_policy="reject" fails on the first missing or unparsable cell;
    na_policy="drop_rows" silently removes offending rows and records the
    count in Dataset.dropped_rows (also emitted as a warning).
    """
    if na_policy not in ("reject", "drop_rows"):
        raise DataError(f"unknown na_policy: {na_policy!r}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file") from None
            header = [h.strip() for h in header]
            if len(set(header)) != len(header):
                raise DataError(f"{path}: duplicate header names")
            rows = []
            dropped = 0
            for i, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise DataError(f"{path}: row {i} has {len(row)} cells, expected {len(header)}")
                values = [_parse_cell(cell) for cell in row]
                if any(v is None for v in values):
                    if na_policy == "reject":
                        j = next(k for k, v in enumerate(values) if v is None)
                        raise DataError(
                            f"{path}: missing or non-numeric value at row {i}, column {header[j]!r}"
                        )
                    dropped += 1
                    continue
                rows.append(values)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no usable data rows")
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} row(s) with missing cells", stacklevel=2)
    data = np.asarray(rows, dtype=float)
    columns = tuple(np.ascontiguousarray(data[:, j]) for j in range(data.shape[1]))
    return Dataset(names=tuple(header), columns=columns, dropped_rows=dropped)


def expand_design(ds: Dataset, spec: DesignSpec) -> DesignMatrix:
    """Assemble the design matrix: base columns, then interaction products.

    Column order is deterministic: targets, controls, instruments in spec
    order, then interactions in list order.  Constant columns (population
    variance exactly zero) are removed after generation; near-constant
    columns are kept.
    """
    generated = {f"{a}:{b}" for a, b in spec.interactions}
    names, cols, roles = [], [], []
    for role, group in (
        ("target", spec.targets),
        ("control", spec.controls),
        ("instrument", spec.instruments),
    ):
        for name in group:
            if name in generated:
                continue  # interaction columns are appended after the base block
            names.append(name)
            cols.append(ds.column(name))
            roles.append(role)

    base = dict(zip(names, cols))

    def resolve(name):
        if name in base:
            return base[name]
        return ds.column(name)

    for a, b in spec.interactions:
        prod_name = f"{a}:{b}"
        if prod_name in base:
            raise DataError(f"duplicate interaction column {prod_name!r}")
        prod = resolve(a) * resolve(b)
        names.append(prod_name)
        cols.append(prod)
        base[prod_name] = prod
        # Interactions are targets only when listed under targets explicitly.
        roles.append("target" if prod_name in spec.targets else "control")

    X = np.column_stack(cols) if cols else np.empty((ds.n, 0))
    variances = X.var(axis=0) if X.size else np.empty(0)
    keep = variances != 0.0
    removed = tuple(n for n, k in zip(names, keep) if not k)
    if removed:
        warnings.warn(f"removed constant column(s): {', '.join(removed)}", stacklevel=2)
    X = X[:, keep]
    if X.shape[1] == 0:
        raise DataError("all design columns were constant; empty design")
    kept_names = tuple(n for n, k in zip(names, keep) if k)
    kept_roles = tuple(r for r, k in zip(roles, keep) if k)
    return DesignMatrix(X=X, column_names=kept_names, roles=kept_roles, removed=removed)


def filter_columns_by_mean(X: np.ndarray, names, threshold: float):
    """Keep columns whose mean exceeds threshold (sparse-dummy screening)."""
    X = np.asarray(X, dtype=float)
    keep = X.mean(axis=0) > threshold
    kept_names = tuple(n for n, k in zip(names, keep) if k)
    return X[:, keep], kept_names
