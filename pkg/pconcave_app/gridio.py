"""Grid CSV files with a key=value metadata sidecar, and the argmax CSV of a convolution."""

import csv
from pathlib import Path
from typing import Union

import numpy as np

from pconcave_app.config import load_key_value_file
from pconcave_app.convex_geom import describe_body, parse_body_literal
from pconcave_app.convolve import ConvolutionResult
from pconcave_app.errors import ArgumentError
from pconcave_app.field import EXTERIOR, GridFunction, discretize

GRID_HEADER = ["x", "y", "value"]
ARGMAX_HEADER = ["x", "y", "x0", "y0", "x1", "y1", "value"]


def meta_path(path: Union[str, Path]) -> Path:
    return Path(path).with_suffix(".meta")


def write_grid_csv(gf: GridFunction, path: Union[str, Path]) -> Path:
    """Non-exterior nodes in row-major order, plus `<stem>.meta` with origin, h, nx, ny and the body."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    points = gf.node_points()
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(GRID_HEADER)
        for i, j in np.argwhere(gf.mask != EXTERIOR):
            writer.writerow([repr(float(points[i, j, 0])), repr(float(points[i, j, 1])), repr(float(gf.values[i, j]))])

    origin = gf.origin
    lines = [
        f"origin={origin[0]!r},{origin[1]!r}",
        f"index_origin={gf.index_origin[0]},{gf.index_origin[1]}",
        f"h={gf.h!r}",
        f"nx={gf.nx}",
        f"ny={gf.ny}",
        f"body={describe_body(gf.body)}",
    ]
    lines.extend(f"{key}={value}" for key, value in sorted(gf.meta.items()))
    meta_path(path).write_text("\n".join(lines) + "\n")
    return path


def read_grid_csv(path: Union[str, Path]) -> GridFunction:
    """Rebuild the field from its CSV and sidecar; the mask is recomputed from the body."""
    path = Path(path)
    sidecar = meta_path(path)
    if not sidecar.exists():
        raise ArgumentError(f"missing metadata sidecar {sidecar}")
    meta = load_key_value_file(sidecar)
    try:
        h = float(meta["h"])
        body = parse_body_literal(meta["body"])
    except KeyError as exc:
        raise ArgumentError(f"{sidecar}: missing key {exc}") from exc
    gf = discretize(body, h)
    expected = tuple(int(v) for v in meta.get("index_origin", "").split(",") if v)
    if expected and expected != gf.index_origin:
        raise ArgumentError(f"{sidecar}: index origin {expected} does not match the rebuilt grid {gf.index_origin}")

    values = np.zeros(gf.values.shape)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != GRID_HEADER:
            raise ArgumentError(f"{path}: expected header {','.join(GRID_HEADER)}")
        for row in reader:
            x, y, value = (float(item) for item in row)
            i = int(round(x / h)) - gf.index_origin[0]
            j = int(round(y / h)) - gf.index_origin[1]
            if not (0 <= i < gf.nx and 0 <= j < gf.ny):
                raise ArgumentError(f"{path}: node ({x}, {y}) lies outside the grid")
            values[i, j] = value
    extra = {key: value for key, value in meta.items() if key not in ("origin", "index_origin", "h", "nx", "ny", "body")}
    return gf.with_values(values, dirichlet=False, **extra)


def write_argmax_csv(result: ConvolutionResult, path: Union[str, Path]) -> Path:
    """One row per scanned target node: x, y, the maximizing x0 and x1, and the value."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    gf = result.field
    points = gf.node_points()
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ARGMAX_HEADER)
        for i, j in np.argwhere(~np.isnan(result.argmax[..., 0])):
            pair = result.argmax[i, j]
            writer.writerow(
                [repr(float(v)) for v in (points[i, j, 0], points[i, j, 1], pair[0], pair[1], pair[2], pair[3], gf.values[i, j])]
            )
    return path
