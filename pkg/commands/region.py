"""Scan the contraction constant over a (delta, gamma) box and trace the region edge"""
import math
import os
import time

import numpy as np

import config
from config import (
    EXIT_OK,
    REGION_DEFAULT_RANGE,
    REGION_DEFAULT_RESOLUTION,
    BOUNDARY_TOL_DEFAULT,
)
from contraction import (
    Params,
    contraction_constants,
    earlier_boundary,
    region_boundary,
    region_scan,
)
from utils import write_csv, write_json, write_sidecar
from commands import arguments_of, output_path


def setup(subparsers, parent):
    parser = subparsers.add_parser("region", parents=[parent], help="map where M(delta, gamma) < 1")
    lo, hi = REGION_DEFAULT_RANGE
    parser.add_argument("--delta-min", type=float, default=lo)
    parser.add_argument("--delta-max", type=float, default=hi)
    parser.add_argument("--gamma-min", type=float, default=lo)
    parser.add_argument("--gamma-max", type=float, default=hi)
    parser.add_argument("--resolution", type=int, default=REGION_DEFAULT_RESOLUTION)
    parser.add_argument("--boundary-tol", type=float, default=BOUNDARY_TOL_DEFAULT)
    parser.set_defaults(handler=run, format="csv")


def boundary_path(path: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_boundary{ext}"


def boundary_rows(gammas, tol: float):
    """(gamma, upper edge, lower edge) for each gamma where the upper edge exists"""
    rows = []
    for gamma in gammas:
        upper = region_boundary(gamma, tol, side="upper")
        if upper is None:
            continue
        lower = region_boundary(gamma, tol, side="lower")
        rows.append((gamma, upper, math.nan if lower is None else lower))
    return rows


async def run(args) -> int:
    """Examples:
        region
        region --delta-min 0 --delta-max 0 --gamma-min 0 --gamma-max 0 --resolution 1
    """
    started = time.time()
    records = region_scan(
        (args.delta_min, args.delta_max),
        (args.gamma_min, args.gamma_max),
        args.resolution,
    )
    gammas = np.unique([r.gamma for r in records])

    if config.VERBOSE:
        print(f"[REGION] {len(records)} lattice points, {len(gammas)} gamma slices")

    edges = boundary_rows(gammas, args.boundary_tol)
    inside = sum(r.in_region for r in records)

    path = output_path(args, "region")
    edge_path = boundary_path(path)

    if args.format == "json":
        write_json(path, {"records": [r._asdict() for r in records]})
        write_json(edge_path, {"boundary": [
            {"gamma": g, "delta_star": up, "delta_star_lower": low} for g, up, low in edges
        ]})
    else:
        write_csv(path, ["delta", "gamma", "M", "in_region"], records)
        write_csv(edge_path, ["gamma", "delta_star", "delta_star_lower"], edges)

    classical = contraction_constants(Params(0.0, 0.0))
    write_sidecar(path, "region", arguments_of(args), started, time.time(), {
        "boundary_file": os.path.basename(edge_path),
        "points": len(records),
        "points_in_region": inside,
        "M_at_origin": classical.m,
        "earlier_boundary_gamma0": earlier_boundary(args.boundary_tol),
        "exit_code": EXIT_OK,
    })

    print(f"[REGION] ✅ {inside}/{len(records)} points inside, {len(edges)} boundary points")
    print(f"[CLI] wrote {path} and {edge_path}")
    return EXIT_OK
