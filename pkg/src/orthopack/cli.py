"""Command-line interface: one entry point for cells, packings, scenes, tables.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
All output is a pure function of the flags; no clocks, environment variables
or randomness are consulted, so identical invocations produce byte-identical
files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import horoball, inball, lorentz, scene, tiling, volume
from .coxeter import ADMISSIBLE_SYMBOLS, SchlafliSymbol, build_cell, cell_report
from .errors import (
    BudgetExceededError,
    GeometryError,
    InvalidSymbolError,
    NumericalError,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    command: str
    symbol: SchlafliSymbol | None
    placement_t: float = 0.0
    tol: float = 5e-4
    crowns: int = 1
    crown_mode: str = "face"
    resolution: int = 64
    fmt: str = "obj"
    out: str | None = None
    allow_nonstandard: bool = False
    mode: str = "one"
    vertex: int = 2
    touch_t: float | None = None
    packing: str = "none"
    with_inball: bool = False
    with_horoballs: str = "none"
    model_sphere: bool = False


def _build_parser():
    p = argparse.ArgumentParser(
        prog="orthopack",
        description=(
            "Ball and horoball packings of simply truncated Coxeter orthoschemes "
            "{inf,q,r,inf} in hyperbolic 3-space"
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, symbol_required=True):
        if symbol_required:
            sp.add_argument("--symbol", required=True, help="e.g. 'inf,4,4,inf' or '4,4'")
        sp.add_argument("--placement-t", type=float, default=0.0, dest="placement_t")
        sp.add_argument("--tol", type=float, default=5e-4)
        sp.add_argument("--out", default=None)
        sp.add_argument(
            "--allow-nonstandard-symbol",
            action="store_true",
            dest="allow_nonstandard",
            help="accept any q,r >= 3 with 1/q + 1/r >= 1/2",
        )

    sp = sub.add_parser("cell", help="build the cell and report its data")
    common(sp)

    sp = sub.add_parser("inball", help="optimal inscribed ball and density")
    common(sp)

    sp = sub.add_parser("horoball", help="one- or two-horoball configuration")
    common(sp)
    sp.add_argument("--mode", choices=["one", "two"], default="one")
    sp.add_argument("--vertex", type=int, choices=[0, 2], default=2)
    sp.add_argument("--touch-t", type=float, default=None, dest="touch_t")

    sp = sub.add_parser("optimize", help="two-horoball density over the feasible range")
    common(sp)

    sp = sub.add_parser("tiling", help="expand crowns of the reflection tiling")
    common(sp)
    sp.add_argument("--crowns", type=int, default=1)
    sp.add_argument("--crown-mode", choices=["face", "vertex"], default="face", dest="crown_mode")
    sp.add_argument(
        "--packing", choices=["none", "inball", "horoball-one", "horoball-two"], default="none"
    )
    sp.add_argument("--resolution", type=int, default=64)
    sp.add_argument("--format", choices=["obj", "ply", "json"], default="obj", dest="fmt")

    sp = sub.add_parser("export", help="mesh the cell and packing objects")
    common(sp)
    sp.add_argument("--with-inball", action="store_true", dest="with_inball")
    sp.add_argument(
        "--with-horoballs", choices=["none", "one", "two"], default="none", dest="with_horoballs"
    )
    sp.add_argument("--model-sphere", action="store_true", dest="model_sphere")
    sp.add_argument("--resolution", type=int, default=64)
    sp.add_argument("--format", choices=["obj", "ply", "json"], default="obj", dest="fmt")

    sp = sub.add_parser("table", help="summary table over the eight standard symbols")
    sp.add_argument("--tol", type=float, default=5e-4)
    sp.add_argument("--placement-t", type=float, default=0.0, dest="placement_t")
    sp.add_argument("--out", default=None)
    return p


def _config_from_args(args) -> RunConfig:
    symbol = None
    if getattr(args, "symbol", None) is not None:
        symbol = SchlafliSymbol.parse(args.symbol)
    cfg = RunConfig(command=args.command, symbol=symbol)
    for name in vars(cfg):
        if hasattr(args, name) and name not in ("command", "symbol"):
            setattr(cfg, name, getattr(args, name))
    return cfg


def _emit(cfg: RunConfig, text: str, payload: bytes | None = None):
    if payload is not None and cfg.out:
        with open(cfg.out, "wb") as fh:
            fh.write(payload)
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _cell(cfg: RunConfig):
    return build_cell(
        cfg.symbol, placement_t=cfg.placement_t, allow_nonstandard=cfg.allow_nonstandard
    )


def cmd_cell(cfg: RunConfig) -> int:
    cell = _cell(cfg)
    report = cell_report(cell)
    text = json.dumps(report, sort_keys=True, indent=1)
    _emit(cfg, text, payload=text.encode())
    return EXIT_OK


def cmd_inball(cfg: RunConfig) -> int:
    cell = _cell(cfg)
    report = inball.inball_report(cell)
    lines = [
        f"symbol          {report['symbol']}",
        f"center (Klein)  {tuple(round(c, 12) for c in report['center_klein'])}",
        f"radius          {report['radius']:.10f}",
        f"tangent faces   {report['tangent_faces']}",
        f"density         {report['density']:.7f} +- {report['density_err']:.1e}",
    ]
    _emit(cfg, "\n".join(lines), payload=json.dumps(report, sort_keys=True, indent=1).encode())
    return EXIT_OK


def cmd_horoball(cfg: RunConfig) -> int:
    cell = _cell(cfg)
    vol = volume.cell_volume(cell, tol=cfg.tol)
    if cfg.mode == "one":
        ball = horoball.max_one_horoball(cell, cfg.vertex)
        dens = horoball.density(cell, ball, vol.value)
        report = {
            "symbol": str(cell.symbol),
            "mode": "one",
            "vertex": cfg.vertex,
            "s_param": ball.s_param,
            "b": [float(x) for x in ball.b],
            "sector_volume": volume.horoball_sector_volume(ball, cell),
            "cell_volume": vol.value,
            "density": dens,
            "density_err": dens * vol.est_error / vol.value,
        }
    else:
        t = cfg.touch_t
        if t is None:
            t, _, _ = horoball.optimize_density(cell)
        config = horoball.two_horoball_config(cell, t)
        dens = horoball.density(cell, config, vol.value)
        report = {
            "symbol": str(cell.symbol),
            "mode": "two",
            "touch_t": t,
            "touch_point_klein": [float(c) for c in lorentz.klein_coords(config.touch_point)],
            "s_params": [b.s_param for b in config.balls],
            "sector_volumes": [
                volume.horoball_sector_volume(b, cell) for b in config.balls
            ],
            "cell_volume": vol.value,
            "density": dens,
            "density_err": dens * vol.est_error / vol.value,
        }
    text = json.dumps(report, sort_keys=True, indent=1)
    _emit(cfg, text, payload=text.encode())
    return EXIT_OK


def cmd_optimize(cfg: RunConfig) -> int:
    cell = _cell(cfg)
    t_star, d_star, curve = horoball.optimize_density(cell)
    vol = volume.cell_volume(cell, tol=cfg.tol)
    lines = [
        f"symbol            {cell.symbol}",
        f"feasible t        [{curve.feasible[0]:.6f}, {curve.feasible[1]:.6f}]",
        f"optimal t*        {t_star:.6f}",
        f"optimal density   {d_star:.7f} +- {d_star * vol.est_error / vol.value:.1e}",
        f"curve samples     {len(curve.samples)}",
    ]
    _emit(cfg, "\n".join(lines), payload=curve.csv().encode())
    return EXIT_OK


def _packing_for(cfg: RunConfig, cell):
    if cfg.packing == "inball":
        return inball.optimal_inball(cell)
    if cfg.packing == "horoball-one":
        return horoball.max_one_horoball(cell, 2)
    if cfg.packing == "horoball-two":
        t, _, _ = horoball.optimize_density(cell)
        return horoball.two_horoball_config(cell, t)
    return None


def cmd_tiling(cfg: RunConfig) -> int:
    cell = _cell(cfg)
    packing = _packing_for(cfg, cell)
    crown = tiling.CrownSpec(depth=cfg.crowns, mode=cfg.crown_mode)
    instances = tiling.expand(cell, crown, packing=packing)
    meshes = []
    for k, inst in enumerate(instances):
        verts = np.array([lorentz.klein_coords(v) for v in inst.vertices])
        tris = []
        for cycle in scene.FACE_POLYGONS.values():
            for j in range(1, len(cycle) - 1):
                tris.append((cycle[0], cycle[j], cycle[j + 1]))
        meshes.append(
            scene.Mesh(vertices=verts, triangles=np.array(tris), part_label=f"cell_{k:04d}")
        )
    for k, ball in enumerate(tiling.distinct_balls(instances)):
        meshes.append(
            scene.mesh_horoball(ball, resolution=cfg.resolution, label=f"horoball_{k:04d}")
        )
    for k, ib in enumerate(tiling.distinct_inballs(instances)):
        meshes.append(scene.mesh_ball(ib, resolution=cfg.resolution, label=f"inball_{k:04d}"))
    sc = scene.Scene(
        meshes=tuple(meshes),
        metadata={
            "symbol": str(cell.symbol),
            "placement_t": cell.placement_t,
            "crowns": cfg.crowns,
            "crown_mode": cfg.crown_mode,
            "cells": len(instances),
            "tool": "orthopack 0.1.0",
        },
    )
    payload = scene.export(sc, cfg.fmt)
    _emit(cfg, f"cells: {len(instances)}  meshes: {len(meshes)}", payload=payload)
    return EXIT_OK


def cmd_export(cfg: RunConfig) -> int:
    cell = _cell(cfg)
    meshes = [scene.mesh_cell(cell)]
    metadata = {
        "symbol": str(cell.symbol),
        "placement_t": cell.placement_t,
        "tool": "orthopack 0.1.0",
    }
    if cfg.with_inball:
        ib = inball.optimal_inball(cell)
        meshes.append(scene.mesh_ball(ib, resolution=cfg.resolution))
        metadata["inball_density"] = inball.inball_density(cell)
    if cfg.with_horoballs == "one":
        ball = horoball.max_one_horoball(cell, 2)
        meshes.append(scene.mesh_horoball(ball, resolution=cfg.resolution))
        metadata["horoball_density"] = horoball.density(cell, ball)
    elif cfg.with_horoballs == "two":
        t, d_star, _ = horoball.optimize_density(cell)
        config = horoball.two_horoball_config(cell, t)
        for k, ball in enumerate(config.balls):
            meshes.append(
                scene.mesh_horoball(ball, resolution=cfg.resolution, label=f"horoball_{k}")
            )
        metadata["touch_t"] = t
        metadata["horoball_density"] = d_star
    if cfg.model_sphere:
        meshes.append(scene.mesh_model_sphere())
    sc = scene.Scene(meshes=tuple(meshes), metadata=metadata)
    payload = scene.export(sc, cfg.fmt)
    _emit(cfg, f"meshes: {len(meshes)}", payload=payload)
    return EXIT_OK


def table_rows(tol: float = 5e-4, placement_t: float = 0.0):
    """Density summary for the eight standard symbols."""
    rows = []
    for q, r in sorted(ADMISSIBLE_SYMBOLS):
        cell = build_cell((q, r), placement_t=placement_t)
        vol = volume.cell_volume(cell, tol=tol)
        ib_dens = inball.inball_density(cell, vol.value)
        one = horoball.density(cell, horoball.max_one_horoball(cell, 2), vol.value)
        err = vol.est_error / vol.value
        row = {
            "symbol": f"{{inf,{q},{r},inf}}",
            "inball_density": f"{ib_dens:.6f}",
            "inball_density_err": f"{ib_dens * err:.1e}",
            "one_horoball_density": f"{one:.6f}",
            "one_horoball_density_err": f"{one * err:.1e}",
        }
        if 0 in cell.ideal_vertex_indices():
            t_star, d_star, curve = horoball.optimize_density(cell)
            row.update(
                two_horoball_density=f"{d_star:.6f}",
                two_horoball_density_err=f"{d_star * err:.1e}",
                t_lower=f"{curve.feasible[0]:.6f}",
                t_upper=f"{curve.feasible[1]:.6f}",
                t_star=f"{t_star:.6f}",
            )
        else:
            row.update(
                two_horoball_density="n/a",
                two_horoball_density_err="n/a",
                t_lower="n/a",
                t_upper="n/a",
                t_star="n/a",
            )
        rows.append(row)
    return rows


TABLE_COLUMNS = [
    "symbol",
    "inball_density",
    "inball_density_err",
    "one_horoball_density",
    "one_horoball_density_err",
    "two_horoball_density",
    "two_horoball_density_err",
    "t_lower",
    "t_upper",
    "t_star",
]


def table_csv(rows) -> str:
    lines = [",".join(TABLE_COLUMNS)]
    lines += [",".join(row[c] for c in TABLE_COLUMNS) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_table(cfg: RunConfig) -> int:
    rows = table_rows(tol=cfg.tol, placement_t=cfg.placement_t)
    csv = table_csv(rows)
    width = {c: max(len(c), max(len(r[c]) for r in rows)) for c in TABLE_COLUMNS}
    text_lines = ["  ".join(c.ljust(width[c]) for c in TABLE_COLUMNS)]
    for r in rows:
        text_lines.append("  ".join(r[c].ljust(width[c]) for c in TABLE_COLUMNS))
    _emit(cfg, "\n".join(text_lines), payload=csv.encode())
    return EXIT_OK


_DISPATCH = {
    "cell": cmd_cell,
    "inball": cmd_inball,
    "horoball": cmd_horoball,
    "optimize": cmd_optimize,
    "tiling": cmd_tiling,
    "export": cmd_export,
    "table": cmd_table,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _config_from_args(args)
        return _DISPATCH[args.command](cfg)
    except (InvalidSymbolError, GeometryError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (NumericalError, BudgetExceededError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
