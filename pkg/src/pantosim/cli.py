"""Command-line front door.

Exit codes: 0 success, 1 verification failure, 2 usage/input error.
Diagnostics go to stderr; machine output goes to files or stdout.
PANTOSIM_LOG=off|info|debug controls logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import data as bundled
from .errors import PantosimError
from .linkage import load_geometry, sample_reachable_points, workspace_report
from .session import (
    generate_raster_trajectory,
    load_scene,
    load_trajectory,
    result_to_dict,
    run,
    save_trajectory,
)
from .verify import run_all

log = logging.getLogger("pantosim.cli")

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2


def _setup_logging():
    level = os.environ.get("PANTOSIM_LOG", "off").lower()
    if level == "off":
        logging.disable(logging.CRITICAL)
        return
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if level == "debug" else logging.INFO,
        format="%(name)s %(levelname)s %(message)s",
    )


def _fail(msg: str) -> int:
    print(f"pantosim: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def cmd_workspace(args) -> int:
    if args.samples < 1000:
        return _fail(f"--samples must be >= 1000, got {args.samples}")
    try:
        geom = load_geometry(args.geometry)
    except (PantosimError, OSError) as exc:
        return _fail(str(exc))
    t0 = time.perf_counter()
    report = workspace_report(geom, args.samples)
    points = sample_reachable_points(geom, min(args.samples, 100_000))
    log.info("workspace report in %.2f s", time.perf_counter() - t0)
    payload = {
        "format_version": 1,
        "r_min_m": report.r_min,
        "r_max_m": report.r_max,
        "solid_angle_analytic_sr": report.solid_angle_analytic,
        "solid_angle_mc_sr": report.solid_angle_mc,
        "mc_samples": report.mc_samples,
        "mc_stderr_sr": report.mc_stderr,
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    csv_path = os.path.splitext(args.out)[0] + ".csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("x_m,y_m,z_m\n")
        for p in points:
            fh.write(f"{float(p[0])!r},{float(p[1])!r},{float(p[2])!r}\n")
    print(
        f"workspace: r [{report.r_min:.3f}, {report.r_max:.3f}] m, "
        f"solid angle {report.solid_angle_analytic:.3f} sr "
        f"(mc {report.solid_angle_mc:.3f} +- {report.mc_stderr:.3f})"
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        geom = load_geometry(args.geometry)
        scene = load_scene(args.scene, geom)
        traj = load_trajectory(args.trajectory)
    except (PantosimError, OSError) as exc:
        return _fail(str(exc))
    if args.dt <= 0:
        return _fail(f"--dt must be positive, got {args.dt}")
    try:
        result = run(scene, geom, traj, dt=args.dt)
    except PantosimError as exc:
        return _fail(str(exc))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(result_to_dict(result, geom), fh, indent=2, sort_keys=True)
            fh.write("\n")
    m = result.metrics
    print(
        f"{m.tiles_erased}/{m.tiles_total} tiles, "
        f"max penetration {m.max_penetration:.3e} m, "
        f"{m.elapsed:.2f} s simulated in {m.steps} steps"
    )
    return EXIT_OK


def cmd_gen_traj(args) -> int:
    try:
        geom = load_geometry(args.geometry)
        scene = load_scene(args.scene, geom)
    except (PantosimError, OSError) as exc:
        return _fail(str(exc))
    if args.pattern not in ("raster", "hover"):
        return _fail(f"--pattern must be raster or hover, got {args.pattern!r}")
    press = 0.005 if args.pattern == "raster" else -0.05
    try:
        traj = generate_raster_trajectory(scene, speed=args.speed, press_depth=press)
    except ValueError as exc:
        return _fail(str(exc))
    save_trajectory(traj, args.out)
    print(f"{len(traj)} samples, {traj[-1].t:.2f} s, pattern {args.pattern}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        geom = load_geometry(args.geometry)
    except (PantosimError, OSError) as exc:
        # a geometry that violates construction invariants is a verification
        # failure, not a usage error -- verify's whole job is to notice
        print(f"FAIL construction-preconditions: {exc}", file=sys.stderr)
        print(f"FAIL construction-preconditions ({exc})")
        return EXIT_VERIFY
    results = run_all(geom)
    failed = [name for name, ok, _ in results if not ok]
    for name, ok, detail in results:
        print(f"{'ok  ' if ok else 'FAIL'} {name} ({detail})")
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        geom = load_geometry(args.geometry)
        scene = load_scene(args.scene, geom)
    except (PantosimError, OSError) as exc:
        return _fail(str(exc))
    from .service import SessionHub, create_app

    hub = SessionHub(default_scene=scene, default_geometry=geom)
    app = create_app(hub)
    import uvicorn

    config = uvicorn.Config(app, host="127.0.0.1", port=args.port, log_level="error")
    server = uvicorn.Server(config)
    try:
        server.run()
    except SystemExit:
        return _fail(f"could not serve on port {args.port}")
    except OSError as exc:
        return _fail(f"could not serve on port {args.port}: {exc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pantosim",
        description="Simulate a 3D-pantograph haptic device: workspace reports, "
        "wiping-task sessions, invariant verification, and a live session server.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_geom = str(bundled.default_geometry_path())

    p = sub.add_parser("workspace", help="write a workspace report and reachable-point cloud")
    p.add_argument("--geometry", default=default_geom)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_workspace)

    p = sub.add_parser("simulate", help="run a scripted session against a scene")
    p.add_argument("--geometry", default=default_geom)
    p.add_argument("--scene", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-traj", help="generate a table-wiping trajectory CSV")
    p.add_argument("--geometry", default=default_geom)
    p.add_argument("--scene", required=True)
    p.add_argument("--pattern", default="raster")
    p.add_argument("--speed", type=float, default=0.25)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_traj)

    p = sub.add_parser("verify", help="run the kinematic invariant suites")
    p.add_argument("--geometry", default=default_geom)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="serve interactive sessions over WebSocket")
    p.add_argument("--geometry", default=None)
    p.add_argument("--scene", default=None)
    p.add_argument("--port", type=int, default=8089)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching our convention
        return int(exc.code or 0)
    if args.command == "serve":
        if args.geometry is None or args.scene is None:
            scene_path, geom_path = bundled.study_bundle("093")
            args.scene = args.scene or str(scene_path)
            args.geometry = args.geometry or str(geom_path)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
