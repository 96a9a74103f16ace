"""Command-line front end.

Subcommands: breit-rabi, magic-field, scan-wavelength, scan-field, slopes,
lattice-map, ramsey. Each writes a CSV data file plus a JSON sidecar with
the fully resolved configuration, located extrema/roots, and provenance;
re-running a command from its sidecar reproduces the outputs byte for
byte.

Configuration precedence: built-in defaults < --config JSON < CLI flags.
Unknown configuration keys are rejected. Exit codes: 0 success,
2 validation error, 3 numerical failure, 4 no root/extremum found.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .atoms import load_atom, recoil_energy, registry_version
from .constants import CONSTANTS_VERSION
from .dressed import dnu_dI, dressed_transition
from .exceptions import (
    BracketError,
    ConfigError,
    DomainError,
    FitError,
    LatticeClockError,
    NearResonanceError,
    NumericalError,
    UnknownSpeciesError,
)
from .lattice import LatticeParams, depth_to_intensity, double_well_beamset, unit_cell_map
from .polarizability import LightConfig, shift_coefficients
from .ramsey import PulseSpec, RamseyEnsemble, ensemble_contrast
from .serialize import render_csv, render_json, write_atomic
from .solver import find_magic_field, scan_field, scan_wavelength
from .spinham import (
    StateLabel,
    TransitionSpec,
    breit_rabi_energy,
    dnu_dB,
    solve_bare,
    transition_frequency,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_NO_ROOT = 4


def _parse_transition(text: str) -> TransitionSpec:
    """Parse 'F,mF:F',mF'[:photon_order]' e.g. '1,-1:2,1:2'."""
    try:
        parts = text.split(":")
        lo = parts[0].split(",")
        up = parts[1].split(",")
        order = int(parts[2]) if len(parts) > 2 else (2 if lo[1] != up[1] else 1)
        return TransitionSpec(
            lower=StateLabel(int(lo[0]), int(lo[1])),
            upper=StateLabel(int(up[0]), int(up[1])),
            photon_order=order,
        )
    except (IndexError, ValueError, DomainError) as exc:
        raise ConfigError(f"bad transition {text!r}: {exc}") from exc


# command -> {key: (type, default)}
SCHEMAS: dict[str, dict[str, tuple]] = {
    "breit-rabi": {
        "species": (str, "Rb87"),
        "field_start_T": (float, 0.0),
        "field_stop_T": (float, 1e-3),
        "field_points": (int, 101),
    },
    "magic-field": {
        "species": (str, "Rb87"),
        "transition": (str, "1,-1:2,1:2"),
        "bracket_T": (list, [1e-4, 1e-3]),
    },
    "scan-wavelength": {
        "species": (str, "Rb87"),
        "wavelength_start_nm": (float, 802.0),
        "wavelength_stop_nm": (float, 815.0),
        "points": (int, 27),
        "circularity": (float, 0.99),
        "B_two_photon_T": (float, 0.323e-3),
        "B_clock_T": (float, 20e-6),
        "depth_er": (float, 40.0),
        "threads": (int, 0),
    },
    "scan-field": {
        "species": (str, "Rb87"),
        "wavelength_nm": (float, 806.0),
        "circularity": (float, 0.99),
        "depth_er": (float, 30.0),
        "transition": (str, "1,-1:2,1:2"),
        "field_start_T": (float, 0.30e-3),
        "field_stop_T": (float, 0.38e-3),
        "points": (int, 17),
        "threads": (int, 0),
    },
    "slopes": {
        "species": (str, "Rb87"),
        "wavelength_nm": (float, 806.0),
        "circularity": (float, 0.99),
        "depth_er": (float, 40.0),
        "B_two_photon_T": (float, 0.323e-3),
        "B_clock_T": (float, 20e-6),
    },
    "lattice-map": {
        "species": (str, "Rb87"),
        "wavelength_nm": (float, 806.0),
        "resolution": (int, 64),
        "ideal": (bool, False),
        "depth_er": (float, 30.0),
        "B_T": (float, 0.323e-3),
    },
    "ramsey": {
        "distribution": (str, "gaussian"),
        "spread_hz": (float, 2.5),
        "detuning_hz": (float, 1e3),
        "n_samples": (int, 4096),
        "seed": (int, 0),
        "tau_start_s": (float, 0.0),
        "tau_stop_s": (float, 0.2),
        "tau_points": (int, 41),
        "rabi_hz": (float, 0.0),
        "shift_per_depth_hz": (float, 0.0),
        "site_depth_er": (float, 30.0),
    },
}


def resolve_config(command: str, file_cfg: dict | None, overrides: dict) -> dict:
    schema = SCHEMAS[command]
    cfg = {k: default for k, (_, default) in schema.items()}
    for source, name in ((file_cfg or {}, "config file"), (overrides, "flags")):
        for key, value in source.items():
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} for {command} (from {name})")
            typ = schema[key][0]
            try:
                cfg[key] = typ(value) if typ is not list else list(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from exc
    return cfg


def _load_config_file(path: str, command: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} line {exc.lineno}: {exc.msg}") from exc
    if "config" in doc and "command" in doc:  # a sidecar from an earlier run
        if doc["command"] != command:
            raise ConfigError(
                f"sidecar is for {doc['command']!r}, not {command!r}"
            )
        return doc["config"]
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _sidecar(command: str, cfg: dict, results: dict) -> dict:
    return {
        "artifact": {"name": "latticeclock", "version": __version__},
        "constants": CONSTANTS_VERSION,
        "atomic_registry": registry_version(),
        "command": command,
        "config": cfg,
        "results": results,
    }


def _emit(base: str, fmt: str, schema: str, header: list[str], rows: list[list],
          sidecar: dict) -> None:
    if fmt == "csv":
        write_atomic(base + ".csv", render_csv(schema, header, rows))
        write_atomic(base + ".json", render_json(sidecar))
    else:
        doc = dict(sidecar)
        doc["data"] = {"schema": schema, "header": header, "rows": rows}
        write_atomic(base + ".json", render_json(doc))


# ---------------------------------------------------------------- commands

def cmd_breit_rabi(cfg: dict, base: str, fmt: str) -> int:
    atom = load_atom(cfg["species"])
    if cfg["field_points"] < 1:
        raise ConfigError("field_points must be >= 1")
    if cfg["field_points"] == 1:
        if cfg["field_start_T"] != cfg["field_stop_T"]:
            raise ConfigError("single-point grid needs equal start/stop")
        grid = [cfg["field_start_T"]]
    else:
        if not cfg["field_start_T"] < cfg["field_stop_T"]:
            raise ConfigError("field grid must be increasing")
        grid = list(np.linspace(cfg["field_start_T"], cfg["field_stop_T"],
                                cfg["field_points"]))
    basis_labels = solve_bare(atom, 0.0).labels
    rows = []
    for B in grid:
        for lab in basis_labels:
            rows.append([B, lab.F, lab.m_F, breit_rabi_energy(atom, lab, B)])
    side = _sidecar("breit-rabi", cfg, {"n_rows": len(rows)})
    _emit(base, fmt, "breit-rabi/v1", ["B_T", "F", "m_F", "E_Hz"], rows, side)
    return EXIT_OK


def cmd_magic_field(cfg: dict, base: str, fmt: str) -> int:
    atom = load_atom(cfg["species"])
    t = _parse_transition(cfg["transition"])
    a, b = (float(x) for x in cfg["bracket_T"])
    Bm = find_magic_field(atom, t, (a, b))
    nu = transition_frequency(solve_bare(atom, Bm), t)
    # curvature from the derivative's own finite difference
    h_step = 2e-6
    curv = (dnu_dB(atom, t, Bm + h_step).value - dnu_dB(atom, t, Bm - h_step).value) / (2 * h_step)
    results = {
        "B_m_T": Bm,
        "nu_Hz": nu,
        "curvature_Hz_per_T2": curv,
        "solver": {"xtol_T": 1e-12, "derivative_step_T": 1e-7},
    }
    side = _sidecar("magic-field", cfg, results)
    rows = [[Bm, nu, curv]]
    _emit(base, fmt, "magic-field/v1", ["B_m_T", "nu_Hz", "curvature_Hz_per_T2"], rows, side)
    return EXIT_OK


def cmd_scan_wavelength(cfg: dict, base: str, fmt: str) -> int:
    atom = load_atom(cfg["species"])
    res = scan_wavelength(
        atom,
        (cfg["wavelength_start_nm"] * 1e-9, cfg["wavelength_stop_nm"] * 1e-9),
        cfg["points"],
        circularity=cfg["circularity"],
        B_two_photon=cfg["B_two_photon_T"],
        B_clock=cfg["B_clock_T"],
        depth_er=cfg["depth_er"],
        threads=cfg["threads"],
    )
    rows = [
        [lam * 1e9, v.ratio, v.slope.per_intensity, v.slope.per_recoil, v.nu]
        for lam, v in zip(res.grid, res.values)
    ]
    minima = [
        {"wavelength_nm": e.x * 1e9, "ratio": e.value,
         "bracket_nm": [e.bracket[0] * 1e9, e.bracket[1] * 1e9]}
        for e in res.extrema
    ]
    side = _sidecar("scan-wavelength", cfg, {"minima": minima})
    _emit(base, fmt, "scan-wavelength/v1",
          ["wavelength_nm", "ratio", "two_photon_slope_Hz_per_Wm2",
           "two_photon_slope_Hz_per_ER", "nu_Hz"], rows, side)
    return EXIT_OK


def cmd_scan_field(cfg: dict, base: str, fmt: str) -> int:
    atom = load_atom(cfg["species"])
    t = _parse_transition(cfg["transition"])
    res = scan_field(
        atom,
        cfg["wavelength_nm"] * 1e-9,
        cfg["circularity"],
        cfg["depth_er"],
        t,
        (cfg["field_start_T"], cfg["field_stop_T"]),
        cfg["points"],
        threads=cfg["threads"],
    )
    rows = [
        [B, v.slope.per_intensity, v.slope.per_recoil, v.dnu_dB.value, v.nu]
        for B, v in zip(res.grid, res.values)
    ]
    roots = [
        {"B_T": e.x, "slope_Hz_per_Wm2": e.value,
         "dnu_dB_Hz_per_T": e.extra["dnu_dB_Hz_per_T"]}
        for e in res.extrema
    ]
    side = _sidecar("scan-field", cfg, {"zero_crossings": roots})
    _emit(base, fmt, "scan-field/v1",
          ["B_T", "dnu_dI_Hz_per_Wm2", "dnu_dI_Hz_per_ER", "dnu_dB_Hz_per_T", "nu_Hz"],
          rows, side)
    return EXIT_OK


def cmd_slopes(cfg: dict, base: str, fmt: str) -> int:
    from .spinham import CLOCK, TWO_PHOTON

    atom = load_atom(cfg["species"])
    lam = cfg["wavelength_nm"] * 1e-9
    coeffs = shift_coefficients(atom, lam)
    i_max = cfg["depth_er"] * recoil_energy(atom, lam) / abs(coeffs.kappa_s_avg)
    light = LightConfig(lam, i_max, cfg["circularity"])
    fits = {
        "two_photon": (cfg["B_two_photon_T"], dnu_dI(atom, cfg["B_two_photon_T"], light, TWO_PHOTON, coeffs)),
        "clock": (cfg["B_clock_T"], dnu_dI(atom, cfg["B_clock_T"], light, CLOCK, coeffs)),
    }
    rows = [
        [name, B, fit.per_intensity, fit.per_recoil, fit.nonlinearity]
        for name, (B, fit) in fits.items()
    ]
    ratio = fits["two_photon"][1].per_intensity / fits["clock"][1].per_intensity
    side = _sidecar("slopes", cfg, {"ratio": ratio})
    _emit(base, fmt, "slopes/v1",
          ["transition", "B_T", "dnu_dI_Hz_per_Wm2", "dnu_dI_Hz_per_ER", "nonlinearity"],
          rows, side)
    return EXIT_OK


def cmd_lattice_map(cfg: dict, base: str, fmt: str) -> int:
    atom = load_atom(cfg["species"])
    lam = cfg["wavelength_nm"] * 1e-9
    coeffs = shift_coefficients(atom, lam)
    beams = double_well_beamset(lam, ideal=cfg["ideal"])
    params = LatticeParams(depth=cfg["depth_er"], recoil=recoil_energy(atom, lam))
    cell = unit_cell_map(
        beams, cfg["resolution"], atom, coeffs, B=cfg["B_T"],
        intensity_scale=depth_to_intensity(params, coeffs),
    )
    rows = []
    n = cfg["resolution"]
    for i in range(n):
        for j in range(n):
            rows.append([
                cell.x[i, j], cell.y[i, j], cell.intensity[i, j], cell.circularity[i, j],
                cell.potentials[-1][i, j], cell.potentials[0][i, j], cell.potentials[1][i, j],
            ])
    sites = [
        {"x": s.position[0], "y": s.position[1], "intensity": s.intensity,
         "circularity": s.circularity_along_B, "class": s.site_class}
        for s in cell.sites
    ]
    side = _sidecar("lattice-map", cfg, {"sites": sites, "e_B": list(cell.e_B)})
    _emit(base, fmt, "lattice-map/v1",
          ["x_lambda", "y_lambda", "intensity", "circularity",
           "U_mF_m1_Hz", "U_mF_0_Hz", "U_mF_p1_Hz"], rows, side)
    return EXIT_OK


def cmd_ramsey(cfg: dict, base: str, fmt: str) -> int:
    ens = RamseyEnsemble(
        detuning_nominal=cfg["detuning_hz"],
        distribution=cfg["distribution"],
        spread=cfg["spread_hz"],
        n_samples=cfg["n_samples"],
        seed=cfg["seed"],
        site_depth_er=cfg["site_depth_er"],
        shift_per_depth=cfg["shift_per_depth_hz"],
    )
    if cfg["tau_points"] < 2 or not cfg["tau_start_s"] < cfg["tau_stop_s"]:
        raise ConfigError("tau grid must have >= 2 increasing points")
    taus = np.linspace(cfg["tau_start_s"], cfg["tau_stop_s"], cfg["tau_points"])
    pulses = None
    if cfg["rabi_hz"] > 0:
        pulses = (PulseSpec.pi_half(cfg["rabi_hz"]), PulseSpec.pi_half(cfg["rabi_hz"]))
    curve = ensemble_contrast(ens, taus, pulses)
    rows = [[t, c] for t, c in zip(curve.tau, curve.contrast)]
    side = _sidecar("ramsey", cfg, {"flags": list(curve.flags)})
    _emit(base, fmt, "ramsey/v1", ["tau_s", "contrast"], rows, side)
    return EXIT_OK


COMMANDS = {
    "breit-rabi": cmd_breit_rabi,
    "magic-field": cmd_magic_field,
    "scan-wavelength": cmd_scan_wavelength,
    "scan-field": cmd_scan_field,
    "slopes": cmd_slopes,
    "lattice-map": cmd_lattice_map,
    "ramsey": cmd_ramsey,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="latticeclock",
        description="Hyperfine transitions of optically trapped atoms: "
                    "magic fields, light-shift cancellation, Ramsey coherence.",
    )
    p.add_argument("--version", action="version", version=f"latticeclock {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=f"run the {name} computation")
        sp.add_argument("--config", help="JSON config file (or a sidecar from a previous run)")
        sp.add_argument("--output", default=f"out/{name}", help="output base path (no extension)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--threads", type=int, help="parallel scan evaluation")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    return p


def _overrides_from_args(args: argparse.Namespace, command: str) -> dict:
    out: dict = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    if args.seed is not None:
        out["seed"] = args.seed
    if args.threads is not None:
        out["threads"] = args.threads
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        file_cfg = _load_config_file(args.config, command) if args.config else None
        cfg = resolve_config(command, file_cfg, _overrides_from_args(args, command))
        return COMMANDS[command](cfg, args.output, args.format)
    except (ConfigError, UnknownSpeciesError, DomainError, NearResonanceError) as exc:
        print(f"latticeclock {command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BracketError as exc:
        print(f"latticeclock {command}: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    except (NumericalError, FitError, np.linalg.LinAlgError) as exc:
        print(f"latticeclock {command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LatticeClockError as exc:
        print(f"latticeclock {command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
