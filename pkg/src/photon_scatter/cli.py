"""Command-line front end: plot-ready curves, reports, and validation.

Every subcommand emits either a CSV table (header row with units, decimal
precision 12, LF endings) or a single JSON object with snake_case keys.
Outputs are deterministic: identical inputs give byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical-tolerance
failure.  Errors are reported as a single-line JSON record on stderr.
The env var PHOTON_SCATTER_THREADS caps grid-evaluation parallelism.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import hwg, lattice_oracle, tcra, twg, validation
from .core import HWGParams, TCRAParams, TWGParams, ToleranceError

__all__ = ["main"]

_PAIR_LABELS = {"11": (1, 1), "12": (1, 2), "22": (2, 2)}


class _CliError(Exception):
    """Configuration-level failure (bad flag, key, grid, or parameter)."""


class _Parser(argparse.ArgumentParser):
    # argparse would print usage and exit on its own; route through the
    # JSON error record instead
    def error(self, message):
        raise _CliError(message)


# ---------------------------------------------------------------------------
# config and grid plumbing


def _apply_config(args) -> None:
    """Overlay a key=value config file onto parsed flags (file wins)."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise _CliError(f"cannot read config file: {exc}") from exc
    coerce = args._coerce
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise _CliError(f"config line {lineno}: expected key=value, got {raw.strip()!r}")
        dest = key.strip().replace("-", "_")
        if dest == "config" or dest.startswith("_") or dest not in coerce:
            raise _CliError(f"config line {lineno}: unknown key {key.strip()!r}")
        try:
            setattr(args, dest, coerce[dest](value.strip()))
        except (TypeError, ValueError) as exc:
            raise _CliError(f"config line {lineno}: bad value for {key.strip()!r}: {exc}") from exc


def _parse_grid(spec: str, expected: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise _CliError(f"grid must be var:start:stop:points, got {spec!r}")
    var, start_s, stop_s, points_s = parts
    if var != expected:
        raise _CliError(f"grid variable must be {expected!r} for this subcommand, got {var!r}")
    try:
        start, stop, points = float(start_s), float(stop_s), int(points_s)
    except ValueError as exc:
        raise _CliError(f"bad grid {spec!r}: {exc}") from exc
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise _CliError("grid endpoints must be finite")
    if points < 2:
        raise _CliError("grid needs at least 2 points")
    return np.linspace(start, stop, points)


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise _CliError(f"missing required parameter: --{name}")


# ---------------------------------------------------------------------------
# output plumbing


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _jsonify(value):
    """JSON-safe copy: numpy scalars/arrays unwrapped, non-finite -> null."""
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)) or isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonify(value.real), "im": _jsonify(value.imag)}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def _emit_json(args, obj) -> int:
    if getattr(args, "format", "json") != "json":
        raise _CliError("this subcommand only supports --format json")
    _write_text(args.out, json.dumps(_jsonify(obj), indent=2, allow_nan=False) + "\n")
    return 0


def _emit_table(args, columns) -> int:
    """columns: list of (csv_label, json_key, 1d array)."""
    arrays = [np.asarray(col[2], dtype=float) for col in columns]
    if args.format == "json":
        return _emit_json(args, {col[1]: arr for (col, arr) in zip(columns, arrays)})
    if args.format != "csv":
        raise _CliError(f"unknown output format {args.format!r}")
    p = args.precision
    lines = [",".join(col[0] for col in columns)]
    for row in zip(*arrays):
        lines.append(",".join(f"{v:.{p}g}" for v in row))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _error_record(kind: str, message) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")


# ---------------------------------------------------------------------------
# parameter builders


def _tcra_params(args) -> TCRAParams:
    _require(args, "omega", "omega0")
    return TCRAParams(
        omega_atom=args.omega,
        omega_cavity=args.omega0,
        hopping=args.J,
        coupling=args.V,
    )


def _twg_params(args) -> TWGParams:
    return TWGParams(omega_atom=args.omega, gamma_t=args.gamma)


def _hwg_params(args) -> HWGParams:
    _require(args, "omega", "vbar1", "vbar2")
    velocities = (getattr(args, "v1", 1.0), getattr(args, "v2", 1.0))
    return HWGParams(
        omega_atom=args.omega, vbar=(args.vbar1, args.vbar2), group_velocity=velocities
    )


def _require_choice(args, name: str, allowed) -> None:
    # config files bypass argparse choices, so leaf handlers recheck
    if getattr(args, name) not in allowed:
        raise _CliError(f"--{name} must be one of {', '.join(allowed)}")


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_t_reflect(args) -> int:
    params = _tcra_params(args)
    k = _parse_grid(args.grid, "k")
    r = tcra.reflection_amplitude(params, k)
    return _emit_table(
        args,
        [
            ("k[rad]", "k", k),
            ("re_r[1]", "re_r", r.real),
            ("im_r[1]", "im_r", r.imag),
            ("|r|^2[1]", "r_sq", np.abs(r) ** 2),
            ("|1+r|^2[1]", "transmission", np.abs(1.0 + r) ** 2),
        ],
    )


def _cmd_bound_states(args) -> int:
    lower, upper = tcra.bound_state_energies(_tcra_params(args))
    return _emit_json(
        args,
        {
            "lower": lower.energy,
            "upper": upper.energy,
            "kappa_lower": lower.kappa,
            "kappa_upper": upper.kappa,
        },
    )


def _cmd_bound_wavefunction(args) -> int:
    _require_choice(args, "branch", ("lower", "upper"))
    lower, upper = tcra.bound_state_energies(_tcra_params(args))
    state = lower if args.branch == "lower" else upper
    x = _parse_grid(args.grid, "x")
    if np.any(x != np.round(x)):
        raise _CliError("bound-wavefunction grid must land on integer sites")
    psi = tcra.bound_state_wavefunction(state, x.astype(int))
    return _emit_table(
        args, [("x[site]", "x", x), ("amplitude[1]", "amplitude", psi)]
    )


def _cmd_wg_transmit(args) -> int:
    params = _twg_params(args)
    k = _parse_grid(args.grid, "k")
    t = twg.transmission_amplitude(params, k)
    return _emit_table(
        args,
        [
            ("k[Omega]", "k", k),
            ("re_t[1]", "re_t", t.real),
            ("im_t[1]", "im_t", t.imag),
            ("phase[rad]", "phase", np.angle(t)),
        ],
    )


def _cmd_two_photon_wf(args) -> int:
    params = _twg_params(args)
    _require(args, "k1", "k2")
    x = _parse_grid(args.grid, "x")
    psi = twg.two_photon_out_wavefunction(params, args.k1, args.k2, args.xc, x)
    return _emit_table(
        args,
        [
            ("x[1/Omega]", "x", x),
            ("re_psi[1]", "re_psi", psi.real),
            ("im_psi[1]", "im_psi", psi.imag),
            ("|psi|^2[1]", "psi_sq", np.abs(psi) ** 2),
        ],
    )


def _cmd_fluorescence2(args) -> int:
    params = _twg_params(args)
    _require(args, "k1", "k2")
    p1 = _parse_grid(args.grid, "p1")
    val = twg.two_photon_fluorescence(params, args.k1, args.k2, p1)
    return _emit_table(
        args,
        [
            ("p1[Omega]", "p1", p1),
            ("p2[Omega]", "p2", args.k1 + args.k2 - p1),
            ("|T2|^2[1]", "t2_sq", val),
        ],
    )


def _cmd_fluorescence3(args) -> int:
    params = _twg_params(args)
    _require(args, "k1", "k2", "k3")
    k = (args.k1, args.k2, args.k3)
    e = sum(k)
    p3 = e / 3.0 if args.p3 is None else args.p3
    p1 = _parse_grid(args.grid, "p1")
    p2 = e - p3 - p1
    val = twg.three_photon_fluorescence(params, k, p1, p2)
    return _emit_table(
        args,
        [
            ("p1[Omega]", "p1", p1),
            ("p2[Omega]", "p2", p2),
            ("|T3|^2[1]", "t3_sq", val),
        ],
    )


def _cmd_three_photon_wf(args) -> int:
    params = _twg_params(args)
    _require(args, "k1", "k2", "k3")
    k = (args.k1, args.k2, args.k3)
    grid = _parse_grid(args.grid, "x")
    x1 = np.repeat(grid, grid.size)
    x2 = np.tile(grid, grid.size)
    psi = np.empty(x1.size, dtype=complex)
    for i in range(x1.size):
        psi[i] = twg.three_photon_out_wavefunction(
            params,
            k,
            (x1[i], x2[i], args.x3),
            rtol=args.rtol,
            window=args.window,
            max_panels=args.max_panels,
        )
    return _emit_table(
        args,
        [
            ("x1[1/Omega]", "x1", x1),
            ("x2[1/Omega]", "x2", x2),
            ("re_psi[1]", "re_psi", psi.real),
            ("im_psi[1]", "im_psi", psi.imag),
            ("|psi|^2[1]", "psi_sq", np.abs(psi) ** 2),
        ],
    )


def _cmd_h_single(args) -> int:
    params = _hwg_params(args)
    k = _parse_grid(args.grid, "k")
    c = hwg.channel_amplitudes(params, k)
    return _emit_table(
        args,
        [
            ("k[Omega]", "k", k),
            ("|t11|^2[1]", "t11_sq", np.abs(c.t11) ** 2),
            ("|t21|^2[1]", "t21_sq", np.abs(c.t21) ** 2),
            ("|t22|^2[1]", "t22_sq", np.abs(c.t22) ** 2),
        ],
    )


def _cmd_h_two_photon(args) -> int:
    params = _hwg_params(args)
    _require(args, "k1", "k2")
    table = hwg.two_photon_s_h(params, args.k1, args.k2)
    channels = {}
    for pair, amp_set in table.items():
        channels[f"{pair[0]}{pair[1]}"] = {
            "disconnected": [
                {"pinned": list(term.pinned), "weight": term.weight}
                for term in amp_set.disconnected
            ],
            "connected_at_incident": amp_set.connected(args.k1, args.k2),
        }
    return _emit_json(
        args, {"total_energy": args.k1 + args.k2, "channels": channels}
    )


def _cmd_correlation(args) -> int:
    params = _hwg_params(args)
    _require(args, "E")
    if args.pair not in _PAIR_LABELS:
        raise _CliError(f"--pair must be one of 11, 12, 22, got {args.pair!r}")
    pair = _PAIR_LABELS[args.pair]
    k1 = 0.5 * args.E + args.dk
    k2 = 0.5 * args.E - args.dk
    x = _parse_grid(args.grid, "x")
    val = hwg.second_order_correlation(params, pair, k1, k2, x)
    return _emit_table(
        args,
        [
            ("x[1/Omega]", "x", x),
            (f"|g{args.pair}|^2[1]", f"g{args.pair}_sq", val),
        ],
    )


def _cmd_oracle_bound(args) -> int:
    model = lattice_oracle.LatticeModel(
        params=_tcra_params(args), size=args.L, boundary=args.boundary
    )
    report = lattice_oracle.bound_state_check(model)
    return _emit_json(args, dataclasses.asdict(report))


def _cmd_oracle_scatter(args) -> int:
    _require_choice(args, "kind", ("t", "h"))
    if args.kind == "t":
        params = _tcra_params(args)
    else:
        params = _hwg_params(args)
    model = lattice_oracle.LatticeModel(params=params, size=args.L, boundary=args.boundary)
    _require(args, "carrier")
    result = lattice_oracle.wavepacket_scatter(
        model, args.carrier, args.width, duration=args.duration
    )
    return _emit_json(args, dataclasses.asdict(result))


def _cmd_oracle_pair(args) -> int:
    model = lattice_oracle.LatticeModel(
        params=_tcra_params(args), size=args.L, boundary=args.boundary
    )
    _require(args, "k1", "k2")
    report = lattice_oracle.two_excitation_check(
        model,
        args.k1,
        args.k2,
        duration=args.duration,
        width=args.width,
        separation=args.separation,
        window=args.window,
    )
    return _emit_json(args, dataclasses.asdict(report))


def _cmd_validate(args) -> int:
    numbers = None
    if args.only:
        try:
            numbers = [int(part) for part in args.only.split(",") if part.strip()]
        except ValueError as exc:
            raise _CliError(f"bad --only list: {exc}") from exc
    try:
        results = validation.run(numbers)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    _write_text(args.out, validation.format_report(results) + "\n")
    return 0 if all(r.passed for r in results) else 3


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(parser) -> None:
    parser.add_argument("--config", help="key=value file overriding the flags")
    parser.add_argument("--out", default="-", help="output path (default stdout)")
    parser.add_argument(
        "--precision", type=int, default=12, help="CSV significant digits"
    )


def _add_format(parser, default="csv") -> None:
    parser.add_argument("--format", default=default, help="output format: csv or json")


def _add_tcra_flags(parser) -> None:
    parser.add_argument("--omega", type=float, help="atom transition frequency")
    parser.add_argument("--omega0", type=float, help="cavity frequency")
    parser.add_argument("--J", type=float, default=1.0, help="inter-cavity hopping")
    parser.add_argument("--V", type=float, default=1.0, help="atom-cavity coupling")


def _add_twg_flags(parser) -> None:
    parser.add_argument("--omega", type=float, default=1.0, help="atom frequency")
    parser.add_argument("--gamma", type=float, default=1.0, help="decay rate")


def _add_hwg_flags(parser) -> None:
    parser.add_argument("--omega", type=float, default=1.0, help="atom frequency")
    parser.add_argument("--vbar1", type=float, help="guide-1 even-channel coupling")
    parser.add_argument("--vbar2", type=float, help="guide-2 even-channel coupling")


def _finish(parser, handler) -> None:
    skip = {"help"}
    coerce = {
        a.dest: (a.type or str) for a in parser._actions if a.dest not in skip
    }
    parser.set_defaults(_handler=handler, _coerce=coerce)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="photon-scatter",
        description="Photon scattering on coupled-resonator arrays: "
        "S-matrix curves, bound states, correlations, lattice oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("t-reflect", help="reflection amplitude curve")
    _add_tcra_flags(p)
    p.add_argument("--grid", help="k:start:stop:points")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_t_reflect)

    p = sub.add_parser("bound-states", help="bound-state energies")
    _add_tcra_flags(p)
    _add_common(p)
    p.set_defaults(format="json")
    _finish(p, _cmd_bound_states)

    p = sub.add_parser(
        "bound-wavefunction", help="bound-state site amplitudes"
    )
    _add_tcra_flags(p)
    p.add_argument("--branch", default="lower", choices=("lower", "upper"))
    p.add_argument("--grid", help="x:start:stop:points (integer sites)")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_bound_wavefunction)

    p = sub.add_parser("wg-transmit", help="transmission amplitude curve")
    _add_twg_flags(p)
    p.add_argument("--grid", help="k:start:stop:points")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_wg_transmit)

    p = sub.add_parser(
        "two-photon-wf", help="two-photon out-state wavefunction"
    )
    _add_twg_flags(p)
    p.add_argument("--k1", type=float, help="incident momentum 1")
    p.add_argument("--k2", type=float, help="incident momentum 2")
    p.add_argument("--xc", type=float, default=0.0, help="center of mass coordinate")
    p.add_argument("--grid", help="x:start:stop:points (relative coordinate)")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_two_photon_wf)

    p = sub.add_parser(
        "fluorescence2", help="two-photon background fluorescence"
    )
    _add_twg_flags(p)
    p.add_argument("--k1", type=float, help="incident momentum 1")
    p.add_argument("--k2", type=float, help="incident momentum 2")
    p.add_argument("--grid", help="p1:start:stop:points")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_fluorescence2)

    p = sub.add_parser(
        "fluorescence3", help="three-photon background fluorescence slice"
    )
    _add_twg_flags(p)
    p.add_argument("--k1", type=float, help="incident momentum 1")
    p.add_argument("--k2", type=float, help="incident momentum 2")
    p.add_argument("--k3", type=float, help="incident momentum 3")
    p.add_argument("--p3", type=float, help="fixed outgoing momentum (default E/3)")
    p.add_argument("--grid", help="p1:start:stop:points")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_fluorescence3)

    p = sub.add_parser(
        "three-photon-wf", help="three-photon out-state on an x3 plane"
    )
    _add_twg_flags(p)
    p.add_argument("--k1", type=float, help="incident momentum 1")
    p.add_argument("--k2", type=float, help="incident momentum 2")
    p.add_argument("--k3", type=float, help="incident momentum 3")
    p.add_argument("--x3", type=float, default=0.0, help="fixed third coordinate")
    p.add_argument("--rtol", type=float, default=1e-5, help="quadrature tolerance")
    p.add_argument("--window", type=float, help="quadrature momentum window")
    p.add_argument("--max-panels", type=int, default=60000, help="quadrature panel cap")
    p.add_argument("--grid", help="x:start:stop:points (applied to x1 and x2)")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_three_photon_wf)

    p = sub.add_parser("h-single", help="two-channel amplitude curves")
    _add_hwg_flags(p)
    p.add_argument("--grid", help="k:start:stop:points")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_h_single)

    p = sub.add_parser(
        "h-two-photon", help="two-photon S-matrix element table"
    )
    _add_hwg_flags(p)
    p.add_argument("--k1", type=float, help="incident momentum in waveguide 1")
    p.add_argument("--k2", type=float, help="incident momentum in waveguide 2")
    _add_common(p)
    p.set_defaults(format="json")
    _finish(p, _cmd_h_two_photon)

    p = sub.add_parser(
        "correlation", help="second-order correlation |g_ij|^2"
    )
    _add_hwg_flags(p)
    p.add_argument("--pair", default="11", help="detection channels: 11, 12 or 22")
    p.add_argument("--E", type=float, help="total pair energy")
    p.add_argument("--dk", type=float, default=0.0, help="half momentum difference")
    p.add_argument("--grid", help="x:start:stop:points (relative coordinate)")
    _add_common(p)
    _add_format(p)
    _finish(p, _cmd_correlation)

    oracle = sub.add_parser("oracle", help="finite-lattice validators")
    osub = oracle.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    p = osub.add_parser("bound", help="bound states vs exact diagonalization")
    _add_tcra_flags(p)
    p.add_argument("--L", type=int, default=601, help="lattice size (odd)")
    p.add_argument("--boundary", default="open", choices=("open", "ring"))
    _add_common(p)
    p.set_defaults(format="json")
    _finish(p, _cmd_oracle_bound)

    p = osub.add_parser("scatter", help="single-photon wavepacket run")
    p.add_argument("--kind", default="t", choices=("t", "h"), help="lattice family")
    _add_tcra_flags(p)
    p.add_argument("--vbar1", type=float, help="guide-1 coupling (kind h)")
    p.add_argument("--vbar2", type=float, help="guide-2 coupling (kind h)")
    p.add_argument("--v1", type=float, default=1.0, help="guide-1 velocity (kind h)")
    p.add_argument("--v2", type=float, default=1.0, help="guide-2 velocity (kind h)")
    p.add_argument("--carrier", type=float, help="carrier momentum in (0, pi)")
    p.add_argument("--width", type=float, default=40.0, help="packet width (sites)")
    p.add_argument("--duration", type=float, help="evolution time (default auto)")
    p.add_argument("--L", type=int, default=801, help="lattice size (odd)")
    p.add_argument("--boundary", default="open", choices=("open", "ring"))
    _add_common(p)
    p.set_defaults(format="json")
    _finish(p, _cmd_oracle_scatter)

    p = osub.add_parser("pair", help="two-excitation bunching run")
    _add_tcra_flags(p)
    p.add_argument("--k1", type=float, help="carrier momentum of packet 1")
    p.add_argument("--k2", type=float, help="carrier momentum of packet 2")
    p.add_argument("--width", type=float, default=10.0, help="packet width (sites)")
    p.add_argument("--separation", type=float, help="packet separation (default 2.5 width)")
    p.add_argument("--window", type=int, default=9, help="coincidence window (sites)")
    p.add_argument("--duration", type=float, help="evolution time (default auto)")
    p.add_argument("--L", type=int, default=281, help="lattice size (odd)")
    p.add_argument("--boundary", default="open", choices=("open", "ring"))
    _add_common(p)
    p.set_defaults(format="json")
    _finish(p, _cmd_oracle_pair)

    p = sub.add_parser("validate", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers (default all)")
    _add_common(p)
    _finish(p, _cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args)
        if "grid" in args._coerce and getattr(args, "grid", None) is None:
            raise _CliError("missing required parameter: --grid")
        return args._handler(args)
    except _CliError as exc:
        _error_record("config", exc)
        return 2
    except (ValueError, TypeError) as exc:
        _error_record("config", exc)
        return 2
    except ToleranceError as exc:
        _error_record("numerical-tolerance", exc)
        return 3
    except RuntimeError as exc:
        _error_record("numerical-tolerance", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
