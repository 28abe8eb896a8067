"""Command-line interface.

Subcommands: ``polarizability``, ``magic``, ``potential``, ``modeinfo``,
``validate``. All write CSV (header row, 9 significant digits) to stdout or
to ``--output``. A ``--config`` INI file may supply any long option,
one section per subcommand (keys as option names, ``-`` or ``_``); options
given on the command line take precedence.

Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import io
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .atomicdata import DEFAULT_DATASET, load_atom, resolve_dataset
from .constants import AU_POLARIZABILITY, wavelength_to_omega
from .errors import NanotrapError, ResonanceError
from .fibermode import FiberSpec, mode_info
from .magic import DEFAULT_INTENSITY, MagicSearchSpec, find_magic_all
from .polarizability import Manifold, alpha_triple
from .trap import AXES, PRESET_NAMES, AxisSpec, find_trap_minimum, potential_grid, preset
from .validation import run_checks

SUBCOMMANDS = ("polarizability", "magic", "potential", "modeinfo", "validate")
_CFG_PREFIX = "_config_"


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.8e}"


def _pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(":", ",").split(",") if p.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    lo, hi = (float(p) for p in parts)
    if not lo < hi:
        raise argparse.ArgumentTypeError("bracket needs LO < HI")
    return lo, hi


def _manifold(text: str) -> Manifold:
    try:
        return Manifold.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _count(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 samples")
    return n


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", default=DEFAULT_DATASET,
                        help="transition table (path, or name under $CS_NANOTRAP_DATA "
                             "or the shipped data directory)")
    common.add_argument("--output", "-o", default=None, help="CSV file (default stdout)")
    common.add_argument("--gnuplot-hints", action="store_true",
                        help="print column descriptions to stderr")

    p = argparse.ArgumentParser(prog="cs-nanotrap", description=__doc__.split("\n")[0])
    p.add_argument("--config", default=None, help="INI file with per-subcommand sections")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("polarizability", parents=[common],
                        help="alpha0/alpha1/alpha2 vs wavelength for one manifold")
    sp.add_argument("--manifold", type=_manifold, default="6S1/2:F=4")
    sp.add_argument("--from", dest="start", type=float, default=600.0, help="nm")
    sp.add_argument("--to", dest="stop", type=float, default=1100.0, help="nm")
    sp.add_argument("--n", type=_count, default=501)
    sp.add_argument("--units", choices=("au", "si"), default="au")

    sp = sub.add_parser("magic", parents=[common], help="magic-wavelength crossings")
    sp.add_argument("--ground", type=_manifold, default="6S1/2:F=4")
    sp.add_argument("--excited", type=_manifold, default="6P3/2:F=4")
    sp.add_argument("--bracket", type=_pair, default="930,940", help="LO,HI in nm")
    sp.add_argument("--intensity", type=float, default=DEFAULT_INTENSITY, help="W/m^2")
    sp.add_argument("--tolerance", type=float, default=0.01, help="nm")

    sp = sub.add_parser("potential", parents=[common], help="trap potential along one axis")
    sp.add_argument("--preset", choices=PRESET_NAMES, required=False, default=None)
    sp.add_argument("--axis", choices=AXES, default="radial")
    sp.add_argument("--from", dest="start", type=float, default=None,
                    help="m for radial/axial cuts, rad for azimuthal")
    sp.add_argument("--to", dest="stop", type=float, default=None)
    sp.add_argument("--n", type=_count, default=200)
    sp.add_argument("--r-minus-a", type=float, default=None,
                    help="surface distance (m) for azimuthal/axial cuts; "
                         "default: radial trap minimum")
    sp.add_argument("--phi", type=float, default=0.0)
    sp.add_argument("--z", type=float, default=0.0)
    sp.add_argument("--manifold", type=_manifold, action="append", default=None,
                    help="repeatable; default: the preset's manifolds")

    sp = sub.add_parser("modeinfo", parents=[common], help="HE11 mode parameters")
    sp.add_argument("--radius", type=float, default=None, help="fiber radius (m)")
    sp.add_argument("--preset", choices=PRESET_NAMES, default=None)
    sp.add_argument("--lambda", dest="lambdas", type=_float_list, default=None,
                    help="comma-separated wavelengths in nm (default: preset beams)")

    sub.add_parser("validate", parents=[common], help="run the dataset invariant suite")
    return p


def _apply_config(parser: argparse.ArgumentParser, path: str, command: str) -> None:
    cfg = configparser.ConfigParser()
    if not cfg.read(path, encoding="utf-8"):
        parser.error(f"cannot read config file {path!r}")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sp = subparsers.choices[command]
    dests = {}
    for action in sp._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                dests[opt[2:]] = action
                dests[opt[2:].replace("-", "_")] = action
        dests.setdefault(action.dest, action)
    values = {}
    for section in ("common", command):
        if not cfg.has_section(section):
            continue
        for key, raw in cfg.items(section):
            action = dests.get(key)
            if action is None:
                parser.error(f"unknown key {key!r} in [{section}] of {path}")
            if isinstance(action, argparse._StoreTrueAction):
                values[action.dest] = cfg.getboolean(section, key)
            elif isinstance(action, argparse._AppendAction):
                # kept aside so that flags replace, rather than extend, the config list
                values[_CFG_PREFIX + action.dest] = [action.type(v.strip())
                                                     for v in raw.split(";") if v.strip()]
            else:
                values[action.dest] = raw
    sp.set_defaults(**values)


def _merge_config_lists(args) -> None:
    for key in [k for k in vars(args) if k.startswith(_CFG_PREFIX)]:
        dest = key[len(_CFG_PREFIX):]
        if getattr(args, dest, None) is None:
            setattr(args, dest, getattr(args, key))
        delattr(args, key)


def _write(args, header: list[str], rows, hints: list[str] | None = None) -> None:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")
    text = buf.getvalue()
    if args.gnuplot_hints:
        for i, col in enumerate(header, start=1):
            desc = hints[i - 1] if hints else col
            print(f"# column {i}: {desc}", file=sys.stderr)
    if args.output is None:
        sys.stdout.write(text)
        return
    out = Path(args.output)
    fd, tmp = tempfile.mkstemp(dir=out.parent if str(out.parent) else ".", prefix=".tmp-",
                               suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_polarizability(args) -> int:
    atom = load_atom(args.dataset)
    scale = AU_POLARIZABILITY if args.units == "au" else 1.0
    rows = []
    for lam in np.linspace(args.start, args.stop, args.n):
        try:
            t = alpha_triple(atom, args.manifold, wavelength_to_omega(lam * 1e-9))
            rows.append((lam, t.alpha0 / scale, t.alpha1 / scale, t.alpha2 / scale))
        except ResonanceError:
            rows.append((lam, math.nan, math.nan, math.nan))
    unit = "a.u." if args.units == "au" else "C^2 m^2/J"
    header = ["lambda_nm", "alpha0", "alpha1", "alpha2"]
    hints = ["wavelength (nm)"] + [f"{h} of {args.manifold} ({unit})" for h in header[1:]]
    _write(args, header, rows, hints)
    return 0


def cmd_magic(args) -> int:
    atom = load_atom(args.dataset)
    spec = MagicSearchSpec(args.ground, args.excited, args.intensity, args.bracket, args.tolerance)
    roots = find_magic_all(spec, atom)
    if not roots:
        print(f"error: no crossing between {args.bracket[0]} and {args.bracket[1]} nm",
              file=sys.stderr)
        return 1
    _write(args, ["index", "lambda_nm"], [(str(i), r) for i, r in enumerate(roots)],
           ["root index", f"magic wavelength {args.ground} -> {args.excited} (nm)"])
    return 0


def _column(m: Manifold, k: int, unit: str) -> str:
    return f"{m.level}_F{m.F}_{k}_{unit}"


def cmd_potential(args, parser) -> int:
    if args.preset is None:
        parser.error("potential requires --preset")
    atom = load_atom(args.dataset)
    config = preset(args.preset)
    manifolds = args.manifold or list(config.manifolds)
    defaults = {"radial": (150e-9, 600e-9), "azimuthal": (0.0, 2 * math.pi),
                "axial": (-1e-6, 1e-6)}
    start = args.start if args.start is not None else defaults[args.axis][0]
    stop = args.stop if args.stop is not None else defaults[args.axis][1]
    r_minus_a = args.r_minus_a
    if args.axis != "radial" and r_minus_a is None:
        r_minus_a = find_trap_minimum(config, None, (50e-9, 800e-9), atom).r_minus_a
    try:
        axis = AxisSpec(args.axis, start, stop, args.n, r_minus_a, args.phi, args.z)
    except ValueError as exc:
        parser.error(str(exc))
    grid = potential_grid(config, manifolds, axis, atom)
    sample_col = {"radial": "r_minus_a_m", "azimuthal": "phi_rad", "axial": "z_m"}[args.axis]
    header = [sample_col]
    hints = [sample_col]
    for unit in ("mK", "MHz"):
        for m in manifolds:
            for k in range(m.dim):
                header.append(_column(m, k, unit))
                hints.append(f"{m} sublevel {k} (ascending), U/{'k_B' if unit == 'mK' else 'h'} "
                             f"in {unit}")
    rows = []
    for i, x in enumerate(grid.samples):
        row = [x]
        for table in (grid.mK, grid.MHz):
            for m in manifolds:
                row.extend(table[m][i])
        rows.append(row)
    _write(args, header, rows, hints)
    return 0


def cmd_modeinfo(args, parser) -> int:
    if args.radius is None and args.preset is None:
        parser.error("modeinfo requires --radius or --preset")
    if args.radius is not None:
        spec = FiberSpec(args.radius)
    else:
        spec = preset(args.preset).fiber
    lambdas = args.lambdas
    if lambdas is None:
        if args.preset is None:
            parser.error("modeinfo with --radius requires --lambda")
        lambdas = sorted({b.lambda_m * 1e9 for b in preset(args.preset).beams})
    rows = []
    for lam in lambdas:
        info = mode_info(spec, lam * 1e-9)
        rows.append((info["lambda_nm"], info["n1"], info["beta"], info["neff"], info["q"],
                     info["V"]))
    _write(args, ["lambda_nm", "n1", "beta_per_m", "beta_over_k0", "q_per_m", "V"], rows,
           ["wavelength (nm)", "core index", "propagation constant (1/m)",
            "effective index", "exterior decay constant (1/m)", "V-number"])
    return 0


def cmd_validate(args) -> int:
    atom = load_atom(args.dataset)
    results = run_checks(atom)
    _write(args, ["check", "status", "detail"],
           [(r.name, "pass" if r.passed else "FAIL", r.detail.replace(",", ";")) for r in results])
    return 0 if all(r.passed for r in results) else 1


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in SUBCOMMANDS), None)
    try:
        if known.config and command:
            _apply_config(parser, known.config, command)
        args = parser.parse_args(argv)
        _merge_config_lists(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        resolve_dataset(args.dataset)
        if args.command == "polarizability":
            return cmd_polarizability(args)
        if args.command == "magic":
            return cmd_magic(args)
        if args.command == "potential":
            return cmd_potential(args, parser)
        if args.command == "modeinfo":
            return cmd_modeinfo(args, parser)
        return cmd_validate(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    except NanotrapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
