"""Command-line front end.

Exit codes: 0 success, 1 quantitative failure (invalid fit, failed check),
2 usage, domain or I/O error. Every option can also come from a JSON file
given with ``--config``; explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bell import (
    TSIRELSON,
    AnalyzerSettings,
    correlation,
    maximize_bell_numeric,
    optimal_settings_closed,
    outcome_probs,
)
from .compensation import Scheme, as_scheme, compensate
from .errors import BellPhaseError, LowVisibilityError
from .estimation import estimate_phase
from .jones import rotation
from .simulate import ScanSpec, SourceModel, scan_fringe
from .states import as_family, make_state
from .verify import run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ANGLE_KEYS = {
    "phi", "a", "b", "alpha_a", "alpha_b", "phi_start", "phi_stop",
    "grid_start", "grid_stop", "zeta_1a", "zeta_b",
}

DEFAULTS = {
    "smax": {"phi_start": 0.0, "phi_stop": math.pi, "phi_num": 181, "phi_list": None, "tol": 1e-10, "out": None},
    "probs": {"family": "phi", "phi": 0.0, "a": 0.0, "b": 0.0, "out": None},
    "optimize": {"phi": 0.0, "tol": 1e-10, "out": None},
    "compensate": {"family": "phi", "phi": 0.0, "scheme": "fixed_pair", "alpha_a": math.pi / 4,
                   "alpha_b": math.pi / 4, "out": None},
    "scan-fit": {"family": "psi", "phi": 0.0, "scheme": "experimental", "grid_start": None, "grid_stop": None,
                 "grid_num": None, "endpoint": None, "pair_rate": 1000.0, "integration_time": 1.0,
                 "accidental_rate": 0.0, "seed": 0, "noiseless": False, "zeta_1a": math.pi / 8,
                 "zeta_b": math.pi / 8, "out": None},
    "verify": {},
}
DEFAULTS["simulate"] = dict(DEFAULTS["scan-fit"])


class UsageError(Exception):
    pass


def fmt(v) -> str:
    """Shortest round-trip text for a number."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, header, rows, manifest: dict) -> None:
    text = ",".join(header) + "\n" + "".join(",".join(fmt(v) for v in row) + "\n" for row in rows)
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    man = path.with_name(path.stem + ".manifest.json")
    with open(man, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(command: str, cfg: dict) -> dict:
    return {"command": command, "inputs": {k: v for k, v in cfg.items() if k != "out"}, "version": __version__}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_smax(cfg):
    if cfg["phi_list"] is not None:
        phis = [float(p) for p in cfg["phi_list"]]
    else:
        phis = list(np.linspace(cfg["phi_start"], cfg["phi_stop"], int(cfg["phi_num"])))
    rows = []
    for phi in phis:
        settings, s_closed = optimal_settings_closed(phi)
        s_num = maximize_bell_numeric(phi, cfg["tol"]).s
        rows.append((phi, *settings.as_tuple(), s_closed, s_num))
    write_csv(cfg["out"], ["phi", "a", "a_prime", "b", "b_prime", "s_closed", "s_numeric"], rows,
              _manifest("smax", cfg))
    return EXIT_OK


def cmd_probs(cfg):
    state = make_state(as_family(cfg["family"]), cfg["phi"])
    p = outcome_probs(state, rotation(cfg["a"]), rotation(cfg["b"]))
    write_csv(cfg["out"], ["phi", "a", "b", "p_pp", "p_pm", "p_mp", "p_mm", "correlation"],
              [(cfg["phi"], cfg["a"], cfg["b"], p.p_pp, p.p_pm, p.p_mp, p.p_mm, correlation(p))],
              _manifest("probs", cfg))
    return EXIT_OK


def cmd_optimize(cfg):
    opt = maximize_bell_numeric(cfg["phi"], cfg["tol"])
    _, s_closed = optimal_settings_closed(cfg["phi"])
    write_csv(cfg["out"], ["phi", "a", "a_prime", "b", "b_prime", "s_numeric", "s_closed"],
              [(cfg["phi"], *opt.settings.as_tuple(), opt.s, s_closed)], _manifest("optimize", cfg))
    return EXIT_OK


def cmd_compensate(cfg):
    scheme = as_scheme(cfg["scheme"])
    family = as_family(cfg["family"])
    rep = compensate(scheme, family, cfg["phi"], cfg["alpha_a"], cfg["alpha_b"])
    settings = vars(rep.settings_echo)
    report = sys.stdout if cfg["out"] is not None else sys.stderr
    print(f"scheme {scheme.value}, state {family.value.upper()}(phi={cfg['phi']:.6f})", file=report)
    for k, v in settings.items():
        print(f"  {k} = {v:.6f}", file=report)
    print(f"  phi_eff = {rep.phi_eff:.3e} (matrix check)", file=report)
    print(f"  S = {rep.s_at_chsh:.6f} at CHSH alpha settings (0, pi/4, pi/8, -pi/8)", file=report)
    write_csv(cfg["out"], ["phi", "alpha_a", "alpha_b", *settings, "phi_eff", "s"],
              [(cfg["phi"], cfg["alpha_a"], cfg["alpha_b"], *settings.values(), rep.phi_eff, rep.s_at_chsh)],
              _manifest("compensate", cfg))
    return EXIT_OK if abs(rep.s_at_chsh - TSIRELSON) <= 1e-6 else EXIT_FAIL


def _scan(cfg):
    scheme = as_scheme(cfg["scheme"])
    rotating = scheme is Scheme.ROTATING
    start = cfg["grid_start"] if cfg["grid_start"] is not None else (math.pi / 2 if rotating else 0.0)
    stop = cfg["grid_stop"] if cfg["grid_stop"] is not None else (1.5 * math.pi if rotating else 2 * math.pi)
    num = int(cfg["grid_num"]) if cfg["grid_num"] is not None else (21 if rotating else 20)
    endpoint = cfg["endpoint"] if cfg["endpoint"] is not None else rotating
    grid = np.linspace(start, stop, num, endpoint=bool(endpoint))
    model = SourceModel(cfg["pair_rate"], cfg["integration_time"], cfg["accidental_rate"], int(cfg["seed"]))
    spec = ScanSpec(scheme, cfg["zeta_1a"], cfg["zeta_b"])
    return scan_fringe(as_family(cfg["family"]), cfg["phi"], spec, grid, model)


def _write_fringe(cfg, data, command):
    rows = [(p.scan_value, p.counts.n_pp, p.counts.n_pm, p.counts.n_mp, p.counts.n_mm, p.p_model)
            for p in data.points]
    write_csv(cfg["out"], ["scan_value", "n_pp", "n_pm", "n_mp", "n_mm", "p_model"], rows, _manifest(command, cfg))


def cmd_simulate(cfg):
    _write_fringe(cfg, _scan(cfg), "simulate")
    return EXIT_OK


def cmd_scan_fit(cfg):
    data = _scan(cfg)
    _write_fringe(cfg, data, "scan-fit")
    report = sys.stdout if cfg["out"] is not None else sys.stderr
    try:
        est = estimate_phase(data.scheme, data, use_expected=bool(cfg["noiseless"]))
        code = EXIT_OK
    except LowVisibilityError as exc:
        est, code = exc.estimate, EXIT_FAIL
        print(f"warning: {exc}", file=report)
    print(f"phi_hat = {est.phi_hat:.6f} +/- {est.sigma:.6f} rad (visibility {est.fit.visibility:.4f})", file=report)
    if est.setpoint is not None:
        print(f"compensating set-point = {est.setpoint:.6f} rad", file=report)
    if est.alt_setpoint is not None:
        print(f"alternate set-point (effective phase pi) = {est.alt_setpoint:.6f} rad", file=report)
    return code


def cmd_verify(cfg):
    return EXIT_OK if run_verify() else EXIT_FAIL


COMMANDS = {
    "smax": cmd_smax,
    "probs": cmd_probs,
    "optimize": cmd_optimize,
    "compensate": cmd_compensate,
    "scan-fit": cmd_scan_fit,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _add(p, *flags, **kw):
    p.add_argument(*flags, default=argparse.SUPPRESS, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellphase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, angles=True):
        p.add_argument("--config", help="JSON file with option values (flags win)")
        if angles:
            p.add_argument("--degrees", action="store_true", help="read angle options in degrees")
        _add(p, "--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("smax", help="closed-form and numeric S_max over a phase grid")
    common(p)
    _add(p, "--phi-start", dest="phi_start", type=float)
    _add(p, "--phi-stop", dest="phi_stop", type=float)
    _add(p, "--phi-num", dest="phi_num", type=int)
    _add(p, "--phi", dest="phi_list", type=float, nargs="+", help="explicit phase values")
    _add(p, "--tol", type=float)

    p = sub.add_parser("probs", help="outcome probabilities behind rotated analyzers")
    common(p)
    _add(p, "--family", choices=["phi", "psi"])
    _add(p, "--phi", type=float)
    _add(p, "--a", type=float)
    _add(p, "--b", type=float)

    p = sub.add_parser("optimize", help="numeric maximisation of S for one phase")
    common(p)
    _add(p, "--phi", type=float)
    _add(p, "--tol", type=float)

    p = sub.add_parser("compensate", help="device settings that cancel the phase, matrix-verified")
    common(p)
    _add(p, "--family", choices=["phi", "psi"])
    _add(p, "--phi", type=float)
    _add(p, "--scheme", choices=[s.value for s in Scheme])
    _add(p, "--alpha-a", dest="alpha_a", type=float)
    _add(p, "--alpha-b", dest="alpha_b", type=float)

    for name, text in (("scan-fit", "simulate a compensator scan and estimate the phase"),
                       ("simulate", "simulate a compensator scan")):
        p = sub.add_parser(name, help=text)
        common(p)
        _add(p, "--family", choices=["phi", "psi"])
        _add(p, "--phi", type=float, help="true state phase")
        _add(p, "--scheme", choices=[s.value for s in Scheme])
        _add(p, "--grid-start", dest="grid_start", type=float)
        _add(p, "--grid-stop", dest="grid_stop", type=float)
        _add(p, "--grid-num", dest="grid_num", type=int)
        _add(p, "--endpoint", dest="endpoint", action="store_true", help="include grid stop")
        _add(p, "--pair-rate", dest="pair_rate", type=float)
        _add(p, "--integration-time", dest="integration_time", type=float)
        _add(p, "--accidental-rate", dest="accidental_rate", type=float)
        _add(p, "--seed", type=int)
        _add(p, "--noiseless", action="store_true", help="fit expected counts instead of samples")
        _add(p, "--zeta-1a", dest="zeta_1a", type=float)
        _add(p, "--zeta-b", dest="zeta_b", type=float)

    p = sub.add_parser("verify", help="run the oracle cross-check suites")
    p.add_argument("--config", help=argparse.SUPPRESS)
    return parser


def resolve_config(command: str, ns: argparse.Namespace) -> dict:
    defaults = DEFAULTS[command]
    flags = {k: v for k, v in vars(ns).items() if k in defaults}
    from_file = {}
    if getattr(ns, "config", None):
        try:
            with open(ns.config, encoding="utf-8") as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        from_file = {k.replace("-", "_"): v for k, v in from_file.items()}
        unknown = sorted(set(from_file) - set(defaults))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
    cfg = {**defaults, **from_file, **flags}
    if getattr(ns, "degrees", False):
        for k in ANGLE_KEYS & cfg.keys():
            if cfg[k] is not None and (k in flags or k in from_file):
                cfg[k] = math.radians(cfg[k])
        if cfg.get("phi_list") is not None:
            cfg["phi_list"] = [math.radians(p) for p in cfg["phi_list"]]
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(ns.command, ns)
        return COMMANDS[ns.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BellPhaseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
