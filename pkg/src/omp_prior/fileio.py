"""Plain-text file formats: matrices, problems, sweep configs, result CSV.

Matrix files are "rows cols" on the first line followed by one line of
space-separated decimals per row. Values are written with 17 significant
digits, which round-trips doubles exactly. All indices in files are
0-based.

Problem files and sweep configs are key-value text: one "key = value"
per line, full-line comments starting with '#', keys case-insensitive.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import OmpPriorError
from .harness import (
    EnsembleSpec,
    SweepRow,
    TrialConfig,
    UniformMagnitude,
    UnitMagnitudeRandomSign,
)

SWEEP_CSV_HEADER = "k,g,b,epsilon,trials,threshold_rate,success_rate,exact_rate,mean_err_l2"


class FileFormatError(OmpPriorError):
    """A file does not follow its documented format."""


def format_value(x: float) -> str:
    return f"{x:.17g}"


def matrix_to_text(A: np.ndarray) -> str:
    rows, cols = A.shape
    lines = [f"{rows} {cols}"]
    lines += [" ".join(format_value(v) for v in row) for row in A]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, source: str = "<matrix>") -> np.ndarray:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise FileFormatError(f"{source}: empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise FileFormatError(f"{source}: header must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError as exc:
        raise FileFormatError(f"{source}: non-integer header {lines[0]!r}") from exc
    if rows < 1 or cols < 1:
        raise FileFormatError(f"{source}: dimensions must be >= 1")
    if len(lines) - 1 != rows:
        raise FileFormatError(f"{source}: expected {rows} data lines, found {len(lines) - 1}")
    data = []
    for i, line in enumerate(lines[1:], start=1):
        parts = line.split()
        if len(parts) != cols:
            raise FileFormatError(f"{source}: line {i + 1} has {len(parts)} entries, expected {cols}")
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise FileFormatError(f"{source}: line {i + 1} has a non-numeric entry") from exc
        data.append(row)
    A = np.array(data)
    if not np.all(np.isfinite(A)):
        raise FileFormatError(f"{source}: matrix entries must be finite")
    return A


def write_matrix(path, A: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(matrix_to_text(np.asarray(A, dtype=float)))


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return parse_matrix(fh.read(), source=str(path))


def _parse_key_values(text: str, source: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FileFormatError(f"{source}: line {lineno} is not 'key = value'")
        key, value = line.split("=", 1)
        pairs.append((key.strip().lower(), value.strip()))
    return pairs


def _floats(value: str, source: str, key: str) -> list[float]:
    try:
        return [float(p) for p in value.split()]
    except ValueError as exc:
        raise FileFormatError(f"{source}: {key} has a non-numeric entry") from exc


def _ints(value: str, source: str, key: str) -> list[int]:
    try:
        return [int(p) for p in value.split()]
    except ValueError as exc:
        raise FileFormatError(f"{source}: {key} has a non-integer entry") from exc


@dataclass(frozen=True)
class Problem:
    """A recovery problem: matrix, measurements, prior, and metadata.

    ``truth`` is the dense true signal when the file provides one, else
    None. ``epsilon`` defaults to 0 (noiseless).
    """

    matrix: np.ndarray
    y: np.ndarray
    prior_indices: tuple[int, ...]
    k: int
    epsilon: float
    truth: np.ndarray | None


def read_problem(path) -> Problem:
    source = str(path)
    with open(path) as fh:
        pairs = _parse_key_values(fh.read(), source)
    seen: dict[str, str] = {}
    for key, value in pairs:
        if key in seen:
            raise FileFormatError(f"{source}: duplicate key {key!r}")
        seen[key] = value

    if "matrix_file" in seen:
        base = os.path.dirname(source)
        mpath = seen["matrix_file"]
        if base and not os.path.isabs(mpath):
            mpath = os.path.join(base, mpath)
        A = read_matrix(mpath)
    elif "matrix_inline" in seen:
        A = parse_matrix(seen["matrix_inline"].replace(";", "\n"), source=source)
    else:
        raise FileFormatError(f"{source}: needs matrix_file or matrix_inline")

    if "y" not in seen:
        raise FileFormatError(f"{source}: missing measurement vector y")
    y = np.array(_floats(seen["y"], source, "y"))
    if y.shape[0] != A.shape[0]:
        raise FileFormatError(f"{source}: y has length {y.shape[0]}, matrix has {A.shape[0]} rows")

    prior = tuple(_ints(seen["t0"], source, "t0")) if seen.get("t0") else ()
    if any(not 0 <= i < A.shape[1] for i in prior):
        raise FileFormatError(f"{source}: t0 index out of range")
    if len(set(prior)) != len(prior):
        raise FileFormatError(f"{source}: t0 has duplicate indices")

    if "k" not in seen:
        raise FileFormatError(f"{source}: missing sparsity k")
    k = _ints(seen["k"], source, "k")
    if len(k) != 1 or not 1 <= k[0] <= A.shape[1]:
        raise FileFormatError(f"{source}: k must be a single integer in [1, cols]")

    epsilon = 0.0
    if seen.get("epsilon"):
        eps = _floats(seen["epsilon"], source, "epsilon")
        if len(eps) != 1 or eps[0] < 0 or not math.isfinite(eps[0]):
            raise FileFormatError(f"{source}: epsilon must be a single finite value >= 0")
        epsilon = eps[0]

    truth = None
    if seen.get("x"):
        truth = np.array(_floats(seen["x"], source, "x"))
        if truth.shape[0] != A.shape[1]:
            raise FileFormatError(
                f"{source}: x has length {truth.shape[0]}, matrix has {A.shape[1]} columns"
            )

    return Problem(
        matrix=A,
        y=y,
        prior_indices=tuple(sorted(prior)),
        k=k[0],
        epsilon=epsilon,
        truth=truth,
    )


def _parse_trial_line(value: str, source: str) -> TrialConfig:
    fields: dict[str, str] = {}
    for token in value.split():
        if "=" not in token:
            raise FileFormatError(f"{source}: trial token {token!r} is not key=value")
        key, val = token.split("=", 1)
        fields[key.strip().lower()] = val.strip()
    try:
        model_raw = fields.pop("model", "unit")
        if model_raw == "unit":
            model = UnitMagnitudeRandomSign()
        elif model_raw.startswith("uniform:"):
            _, lo, hi = model_raw.split(":")
            model = UniformMagnitude(float(lo), float(hi))
        else:
            raise FileFormatError(f"{source}: unknown signal model {model_raw!r}")
        return TrialConfig(
            k=int(fields.pop("k")),
            g=int(fields.pop("g")),
            b=int(fields.pop("b")),
            noise_epsilon=float(fields.pop("epsilon", "0")),
            signal_model=model,
            trials=int(fields.pop("trials", "100")),
            tie=fields.pop("tie", "lowest"),
            verify_ric=fields.pop("verify_ric", "0") in ("1", "true", "yes"),
        )
    except KeyError as exc:
        raise FileFormatError(f"{source}: trial line missing {exc}") from exc
    except ValueError as exc:
        raise FileFormatError(f"{source}: bad trial value ({exc})") from exc


def read_sweep_config(path) -> tuple[EnsembleSpec, list[TrialConfig]]:
    source = str(path)
    with open(path) as fh:
        pairs = _parse_key_values(fh.read(), source)
    spec_fields: dict[str, str] = {}
    configs: list[TrialConfig] = []
    for key, value in pairs:
        if key == "trial":
            configs.append(_parse_trial_line(value, source))
        elif key in ("seed", "rows", "cols", "family"):
            if key in spec_fields:
                raise FileFormatError(f"{source}: duplicate key {key!r}")
            spec_fields[key] = value
        else:
            raise FileFormatError(f"{source}: unknown key {key!r}")
    try:
        spec = EnsembleSpec(
            rows=int(spec_fields["rows"]),
            cols=int(spec_fields["cols"]),
            family=spec_fields.get("family", "gaussian_normalized"),
            seed=int(spec_fields.get("seed", "0")),
        )
    except KeyError as exc:
        raise FileFormatError(f"{source}: missing ensemble key {exc}") from exc
    except ValueError as exc:
        raise FileFormatError(f"{source}: bad ensemble value ({exc})") from exc
    return spec, configs


def sweep_rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [SWEEP_CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.k},{r.g},{r.b},{r.epsilon!r},{r.trials},{r.threshold_rate!r},"
            f"{r.success_rate!r},{r.exact_rate!r},{r.mean_err_l2!r}"
        )
    return "\n".join(lines) + "\n"


def write_sweep_csv(path, rows: list[SweepRow]) -> None:
    with open(path, "w") as fh:
        fh.write(sweep_rows_to_csv(rows))
