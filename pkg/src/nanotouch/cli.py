"""Command-line entry points.

    nanotouch serve  --config FILE [--port P] [--static DIR]
    nanotouch sweep  [--config FILE] [--z-start M] [--z-end M] [--speed M/S]
                     --out curve.csv [--validate] [--plot PNG]
    nanotouch oracle [--config FILE] --handle-pos M [--scan-out CSV] [--plot PNG]
    nanotouch replay --trajectory CSV --out CSV [--config FILE]

Exit codes: 0 success, 1 validation failure, 2 usage or configuration
error. Output files are written atomically (temp + rename) so a failing
run leaves nothing half-written behind.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import signal
import sys
from dataclasses import replace

from . import experiments
from .config import AppConfig, ConfigError, load_config
from .stick import StickState, run

REPLAY_CSV_HEADER = "time_s,handle_pos_m,tip_pos_m,tip_vel_mps,handle_force_N,surface_force_N"


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _sweep_kernel_config(args) -> "experiments.KernelConfig":
    if args.config:
        return load_config(args.config).kernel
    return experiments.default_sweep_config()


def _cmd_serve(args) -> int:
    app_cfg = load_config(args.config)
    if args.port is not None:
        app_cfg = AppConfig(
            kernel=app_cfg.kernel, service=replace(app_cfg.service, port=args.port)
        )
    from .server import SessionServer

    server = SessionServer(app_cfg, static_dir=args.static)

    async def main() -> None:
        stop = asyncio.Event()
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            loop.add_signal_handler(sig, stop.set)
        await server.serve_forever(stop)

    asyncio.run(main())
    return 0


def _cmd_sweep(args) -> int:
    cfg = _sweep_kernel_config(args)
    curve = experiments.quasi_static_sweep(
        cfg,
        z_start=args.z_start,
        z_end=args.z_end,
        speed=args.speed,
    )
    _atomic_write(args.out, experiments.curve_csv_text(curve))
    if args.plot:
        from .figures import plot_force_curve

        plot_force_curve(curve, args.plot)
    if args.validate:
        report = experiments.validate_against_oracle(curve)
        print(report.to_json())
        return 0 if report.passed else 1
    print(
        json.dumps(
            {
                "out": args.out,
                "samples": len(curve.approach) + len(curve.retract),
                "events": [
                    {"kind": ev.kind, "handle_pos_m": ev.handle_pos}
                    for ev in curve.events
                ],
            }
        )
    )
    return 0


def _cmd_oracle(args) -> int:
    cfg = _sweep_kernel_config(args)
    eq = experiments.equilibrium_oracle(cfg, args.handle_pos)
    print(
        json.dumps(
            {
                "handle_pos_m": eq.handle_pos,
                "equilibria": [
                    {"tip_gap_m": gap, "stable": stable} for gap, stable in eq.equilibria
                ],
            }
        )
    )
    if args.scan_out or args.plot:
        gaps, balance = experiments._balance_grid(cfg, args.handle_pos)
        if args.scan_out:
            lines = ["tip_gap_m,balance_N"]
            lines += [f"{float(g)!r},{float(b)!r}" for g, b in zip(gaps, balance)]
            _atomic_write(args.scan_out, "\n".join(lines) + "\n")
        if args.plot:
            from .figures import plot_balance_scan

            plot_balance_scan(gaps, balance, eq, args.plot)
    return 0


def _cmd_replay(args) -> int:
    cfg = _sweep_kernel_config(args)
    targets = _read_trajectory(args.trajectory)
    initial = StickState.at_rest(targets[0])
    states = run(initial, targets, cfg)
    lines = [REPLAY_CSV_HEADER]
    lu, fu = cfg.scene.length_unit, cfg.scene.force_unit
    for st in states:
        lines.append(
            f"{st.time!r},{st.handle_pos * lu!r},{st.tip_pos * lu!r},"
            f"{st.tip_vel * lu!r},{st.last_force_on_handle * fu!r},"
            f"{st.last_surface_force * fu!r}"
        )
    _atomic_write(args.out, "\n".join(lines) + "\n")
    print(json.dumps({"out": args.out, "steps": len(states)}))
    return 0


def _read_trajectory(path: str) -> list[float]:
    """Handle targets, one per line; a handle_pos_m column header is allowed."""
    targets: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            first = line.split(",")[0]
            try:
                targets.append(float(first))
            except ValueError:
                if not targets:  # header row
                    continue
                raise
    if not targets:
        raise ValueError(f"no handle targets found in {path}")
    return targets


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nanotouch",
        description="Virtual nanomanipulator: realtime service and headless experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the realtime session host")
    p_serve.add_argument("--config", default=None, help="JSON config file")
    p_serve.add_argument("--port", type=int, default=None, help="override the config port")
    p_serve.add_argument("--static", default=None, help="serve UI assets from this directory")
    p_serve.set_defaults(fn=_cmd_serve)

    p_sweep = sub.add_parser("sweep", help="quasi-static approach/retract force curve")
    p_sweep.add_argument("--config", default=None)
    p_sweep.add_argument("--z-start", type=float, default=experiments.DEFAULT_Z_START)
    p_sweep.add_argument("--z-end", type=float, default=experiments.DEFAULT_Z_END)
    p_sweep.add_argument("--speed", type=float, default=experiments.DEFAULT_SPEED)
    p_sweep.add_argument("--out", required=True, help="curve CSV output path")
    p_sweep.add_argument("--plot", default=None, help="also render a PNG figure here")
    p_sweep.add_argument(
        "--validate", action="store_true",
        help="check the curve against the equilibrium oracle (exit 1 on failure)",
    )
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="static equilibria at one handle height")
    p_oracle.add_argument("--config", default=None)
    p_oracle.add_argument("--handle-pos", type=float, required=True)
    p_oracle.add_argument("--scan-out", default=None, help="write the balance scan CSV here")
    p_oracle.add_argument("--plot", default=None, help="render the balance scan PNG here")
    p_oracle.set_defaults(fn=_cmd_oracle)

    p_replay = sub.add_parser("replay", help="run a recorded handle trajectory")
    p_replay.add_argument("--config", default=None)
    p_replay.add_argument("--trajectory", required=True, help="CSV of handle targets")
    p_replay.add_argument("--out", required=True, help="state series CSV output path")
    p_replay.set_defaults(fn=_cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, experiments.PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 0


if __name__ == "__main__":
    sys.exit(main())
