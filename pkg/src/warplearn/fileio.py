"""Readers and writers for the on-disk formats.

Formats:
  trajectory CSV   header ``traj_id,step,dim_0,...,dim_{D-1}``, rows sorted
                   by (traj_id, step), step 0-based contiguous
  labels CSV       header ``traj_id,label``
  latents CSV      header ``traj_id,z_0,...,z_{dh-1}``
  params JSON      object {"alpha":…, "gamma":…, "epsilon":…, "betacv":…}
  distance CSV     first row and first column are the trajectory ids;
                   +inf serialized as the literal string ``inf``

Floats are written with ``repr`` (shortest round-trip form), which keeps
rewrites byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import DataError, DistanceMatrix, LatentMatrix, Trajectory, TrajectoryDataset


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_float(text: str, *, path, row: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise DataError(
            f"{path}, row {row}: column {column!r} is not a number: {text!r}"
        ) from None


def write_dataset(ds: TrajectoryDataset, path) -> None:
    """Write a trajectory CSV.  Rows are sorted by (traj_id, step)."""
    dim = ds.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["traj_id", "step"] + [f"dim_{d}" for d in range(dim)])
        for traj in sorted(ds.trajectories, key=lambda t: t.id):
            for step, state in enumerate(traj.states):
                writer.writerow([traj.id, step] + [_fmt(v) for v in state])


def read_dataset(path, labels_path=None) -> TrajectoryDataset:
    """Read a trajectory CSV (and optionally a labels CSV)."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if header[:2] != ["traj_id", "step"] or len(header) < 3:
            raise DataError(
                f"{path}, row 1: header must be traj_id,step,dim_0,...; got {header}"
            )
        dim = len(header) - 2
        expected_dims = [f"dim_{d}" for d in range(dim)]
        if header[2:] != expected_dims:
            raise DataError(f"{path}, row 1: dimension columns must be {expected_dims}")

        order: list[str] = []
        states: dict[str, list[list[float]]] = {}
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 2:
                raise DataError(
                    f"{path}, row {rownum}: expected {dim + 2} fields, got {len(row)}"
                )
            tid = row[0]
            step = int(_parse_float(row[1], path=path, row=rownum, column="step"))
            if tid not in states:
                order.append(tid)
                states[tid] = []
            if step != len(states[tid]):
                raise DataError(
                    f"{path}, row {rownum}: step for {tid!r} must be 0-based "
                    f"contiguous; expected {len(states[tid])}, got {step}"
                )
            states[tid].append(
                [
                    _parse_float(v, path=path, row=rownum, column=c)
                    for v, c in zip(row[2:], expected_dims)
                ]
            )
        if not order:
            raise DataError(f"{path}: no trajectory rows")

    labels = read_labels(labels_path) if labels_path is not None else None
    trajs = tuple(Trajectory(tid, np.array(states[tid])) for tid in order)
    return TrajectoryDataset(trajs, labels=labels)


def write_labels(labels: dict[str, int], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["traj_id", "label"])
        for tid in sorted(labels):
            writer.writerow([tid, labels[tid]])


def read_labels(path) -> dict[str, int]:
    path = Path(path)
    labels: dict[str, int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["traj_id", "label"]:
            raise DataError(f"{path}, row 1: header must be traj_id,label; got {header}")
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}, row {rownum}: expected 2 fields")
            tid = row[0]
            if tid in labels:
                raise DataError(f"{path}, row {rownum}: duplicate id {tid!r}")
            try:
                labels[tid] = int(row[1])
            except ValueError:
                raise DataError(
                    f"{path}, row {rownum}: label must be an integer, got {row[1]!r}"
                ) from None
    return labels


def write_latents(latents: LatentMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["traj_id"] + [f"z_{d}" for d in range(latents.dim)])
        for tid, vec in zip(latents.ids, latents.vectors):
            writer.writerow([tid] + [_fmt(v) for v in vec])


def read_latents(path) -> LatentMatrix:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "traj_id" or len(header) < 2:
            raise DataError(f"{path}, row 1: header must be traj_id,z_0,...; got {header}")
        width = len(header) - 1
        if header[1:] != [f"z_{d}" for d in range(width)]:
            raise DataError(f"{path}, row 1: latent columns must be z_0..z_{width - 1}")
        ids: list[str] = []
        rows: list[list[float]] = []
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width + 1:
                raise DataError(
                    f"{path}, row {rownum}: expected {width + 1} fields, got {len(row)}"
                )
            ids.append(row[0])
            vec = [
                _parse_float(v, path=path, row=rownum, column=f"z_{d}")
                for d, v in enumerate(row[1:])
            ]
            if not all(math.isfinite(v) for v in vec):
                raise DataError(f"{path}, row {rownum}: non-finite latent component")
            rows.append(vec)
        if not ids:
            raise DataError(f"{path}: no latent rows")
        if len(set(ids)) != len(ids):
            raise DataError(f"{path}: duplicate trajectory ids")
    return LatentMatrix(tuple(ids), np.array(rows))


def write_distance_matrix(dm: DistanceMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(dm.ids))
        for tid, row in zip(dm.ids, dm.values):
            writer.writerow([tid] + [_fmt(v) for v in row])


def read_distance_matrix(path) -> DistanceMatrix:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "":
            raise DataError(f"{path}, row 1: first header cell must be empty")
        ids = header[1:]
        values = []
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(ids) + 1:
                raise DataError(f"{path}, row {rownum}: ragged row")
            expected = ids[rownum - 2] if rownum - 2 < len(ids) else None
            if row[0] != expected:
                raise DataError(
                    f"{path}, row {rownum}: row id {row[0]!r} does not match "
                    f"column order ({expected!r})"
                )
            values.append(
                [_parse_float(v, path=path, row=rownum, column=c) for v, c in zip(row[1:], ids)]
            )
    return DistanceMatrix(tuple(ids), np.array(values))


def write_params(params, betacv: float, path) -> None:
    payload = {
        "alpha": params.alpha,
        "gamma": params.gamma,
        "epsilon": params.epsilon,
        "betacv": float(betacv),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_params(path):
    from .core import WarpParams

    path = Path(path)
    with open(path) as fh:
        payload = json.load(fh)
    for key in ("alpha", "gamma", "epsilon"):
        if key not in payload:
            raise DataError(f"{path}: missing key {key!r}")
    params = WarpParams(payload["alpha"], payload["gamma"], payload["epsilon"])
    return params, float(payload.get("betacv", math.nan))
