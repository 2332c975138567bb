"""Command-line front end, a thin client of the guidance service.

Every numeric subcommand builds a request from the scenario file, sends
it to the service (in-process by default, remote with --url) and writes
the response to CSV or matrix-dump files.  Exit codes: 0 success, 2
infeasible problem, 1 any other error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _client(url: str | None):
    if url:
        import httpx

        return httpx.Client(base_url=url, timeout=300.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _scenario_request(path: str | None, preset: str | None):
    from .config import load_scenario
    from .service.schemas import request_from_scenario
    from .simulate import table1_scenario

    if path:
        return request_from_scenario(load_scenario(path))
    if preset == "table1" or preset is None:
        return request_from_scenario(table1_scenario())
    raise ValueError(f"unknown preset {preset!r}")


def cmd_simulate(args) -> int:
    from .simulate import TELEMETRY_COLUMNS

    req = _scenario_request(args.config, args.preset)
    with _client(args.url) as client:
        resp = client.post("/simulate", json=req.model_dump(mode="json"))
    if resp.status_code == 409:
        print(f"infeasible: {resp.json()['detail']}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if resp.status_code != 200:
        print(f"error {resp.status_code}: {resp.text}", file=sys.stderr)
        return EXIT_ERROR
    body = resp.json()
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    telem_path = outdir / "telemetry.csv"
    with open(telem_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TELEMETRY_COLUMNS)
        writer.writeheader()
        for row in body["telemetry"]:
            writer.writerow({k: row[k] for k in TELEMETRY_COLUMNS})
    summary = dict(body["summary"])
    summary["theta_max_m"] = body["theta_max_m"]
    summary["y_max_m"] = body["y_max_m"]
    summary_path = outdir / "summary.csv"
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(summary.keys()))
        writer.writerow(list(summary.values()))
    print(f"wrote {telem_path} and {summary_path}")
    print(
        f"steps={summary['steps']} total_dv={summary['total_dv']:.6f} m/s "
        f"min_margin={summary['min_margin']:.3e} "
        f"final_err={summary['final_tracking_err_m']:.4f} m"
    )
    return EXIT_OK


def cmd_feasibility(args) -> int:
    from .config import load_scenario, load_sweep
    from .service.schemas import (
        ConstraintsModel,
        FeasibilityRequest,
        InertiaModel,
        OrbitModel,
        SweepModel,
    )
    from .simulate import table1_scenario

    cfg = load_scenario(args.config) if args.config else table1_scenario()
    sweep = load_sweep(args.config) if args.config else None
    import numpy as np

    sweep_model = SweepModel()
    if sweep is not None:
        sweep_model = SweepModel(
            spin_rates_deg_s=[float(v) for v in np.rad2deg(sweep["spin_rates_rad_s"])],
            sampling_periods_s=[float(v) for v in sweep["sampling_periods_s"]],
            omega_direction=tuple(sweep["omega_direction"]),
        )
    req = FeasibilityRequest(
        orbit=OrbitModel(
            mu_km3_s2=cfg.orbit.mu,
            orbit_radius_km=cfg.orbit.radius,
            sampling_period_s=cfg.orbit.period,
        ),
        inertia=InertiaModel(
            i1_kg_m2=cfg.inertia.i1,
            i2_kg_m2=cfg.inertia.i2,
            i3_kg_m2=cfg.inertia.i3,
        ),
        omega_body_deg_s=tuple(np.rad2deg(cfg.omega0)),
        constraints=ConstraintsModel(
            c_x=cfg.c_x, c_z=cfg.c_z, x0_m=cfg.x0, z0_m=cfg.z0, u_max_m_s=cfg.u_max
        ),
        sweep=sweep_model,
    )
    with _client(args.url) as client:
        resp = client.post("/feasibility", json=req.model_dump(mode="json"))
    if resp.status_code != 200:
        print(f"error {resp.status_code}: {resp.text}", file=sys.stderr)
        return EXIT_ERROR
    body = resp.json()
    print(
        f"varpi_star={body['varpi_star']:.6e} theta_max={body['theta_max_m']:.4f} m "
        f"y_max={body['y_max_m']}"
    )
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["spin_rate_deg_s", "sampling_period_s", "varpi_star", "theta_max_m", "y_max_m"]
        )
        for row in body["sweep"]:
            writer.writerow(
                [
                    row["spin_rate_deg_s"],
                    row["sampling_period_s"],
                    row["varpi_star"],
                    row["theta_max_m"],
                    "" if row["y_max_m"] is None else row["y_max_m"],
                ]
            )
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_attitude(args) -> int:
    from .config import load_scenario
    from .service.schemas import AttitudeRequest, InertiaModel, OrbitModel
    from .simulate import table1_scenario

    cfg = load_scenario(args.config) if args.config else table1_scenario()
    import numpy as np

    req = AttitudeRequest(
        orbit=OrbitModel(
            mu_km3_s2=cfg.orbit.mu,
            orbit_radius_km=cfg.orbit.radius,
            sampling_period_s=cfg.orbit.period,
        ),
        inertia=InertiaModel(
            i1_kg_m2=cfg.inertia.i1,
            i2_kg_m2=cfg.inertia.i2,
            i3_kg_m2=cfg.inertia.i3,
        ),
        q_scalar_first=tuple(cfg.q0),
        omega_body_deg_s=tuple(np.rad2deg(cfg.omega0)),
        steps=args.steps if args.steps else cfg.steps,
        substeps=cfg.attitude_substeps,
        mode=cfg.attitude_mode,
    )
    with _client(args.url) as client:
        resp = client.post("/attitude", json=req.model_dump(mode="json"))
    if resp.status_code != 200:
        print(f"error {resp.status_code}: {resp.text}", file=sys.stderr)
        return EXIT_ERROR
    rows = resp.json()["rows"]
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["k", "t_s"]
            + [f"c{i}{j}" for i in range(1, 4) for j in range(1, 4)]
            + ["w1_rad_s", "w2_rad_s", "w3_rad_s"]
        )
        for row in rows:
            writer.writerow([row["k"], row["t_s"]] + row["dcm"] + list(row["omega_rad_s"]))
    print(f"wrote {args.output} ({len(rows)} grid points)")
    return EXIT_OK


def cmd_stm(args) -> int:
    with _client(args.url) as client:
        resp = client.get(
            "/stm", params={"n_rad_s": args.n, "period_s": args.T}
        )
    if resp.status_code != 200:
        print(f"error {resp.status_code}: {resp.text}", file=sys.stderr)
        return EXIT_ERROR
    body = resp.json()

    def block(name, rows):
        lines = [f"{name} {len(rows)} {len(rows[0])}"]
        lines += [" ".join(f"{v:.17g}" for v in row) for row in rows]
        return "\n".join(lines)

    text = block("A_L", body["A_L"]) + "\n" + block("B_L", body["B_L"]) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_example_config(args) -> int:
    from .config import write_example_config

    write_example_config(args.path)
    print(f"wrote {args.path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("tumbledock.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tumbledock",
        description="Rendezvous guidance for tumbling targets: simulation, "
        "feasibility maps, attitude grids and transition matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the closed-loop simulation")
    p.add_argument("config", nargs="?", help="scenario INI file")
    p.add_argument("--preset", default=None, help="named preset (table1)")
    p.add_argument("--output-dir", default=".", help="directory for CSV outputs")
    p.add_argument("--url", default=None, help="remote service URL")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("feasibility", help="envelope map over a (rate, T) grid")
    p.add_argument("config", nargs="?", help="scenario INI file")
    p.add_argument("--output", default="feasibility.csv")
    p.add_argument("--url", default=None)
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("attitude", help="export the attitude grid as CSV")
    p.add_argument("config", nargs="?", help="scenario INI file")
    p.add_argument("--output", default="attitude.csv")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--url", default=None)
    p.set_defaults(func=cmd_attitude)

    p = sub.add_parser("stm", help="dump the transition matrices for (n, T)")
    p.add_argument("n", type=float, help="mean motion, rad/s")
    p.add_argument("T", type=float, help="sampling period, s")
    p.add_argument("--output", default=None)
    p.add_argument("--url", default=None)
    p.set_defaults(func=cmd_stm)

    p = sub.add_parser("example-config", help="write a fully populated scenario file")
    p.add_argument("path")
    p.set_defaults(func=cmd_example_config)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
