"""Command-line front end.

    proxres <subcommand> --config <path> [--out <dir>] [--section.key=value ...]

Subcommands: disk-modes, doublet-sweep, three-disk, two-level-demo. Each
writes schema-stable CSV plus a run manifest into the output directory
(--out flag, else PROXRES_OUT, else the config's [output] directory).

Exit codes: 0 success, 1 config/geometry error, 2 empty result,
3 partial failure (a sweep lost more than 20% of its points).
"""

import argparse
import datetime
import math
import os
import sys

import numpy as np

from . import __version__
from .config import load_config
from .diskmode import ModeFamily, ModeIndex, evanescent_kappa, mode_frequencies, q_budget
from .doublewell import fit_splitting, mean_inter_well_kappa, sweep_distance
from .effmodel import (
    SiteNetwork,
    common_channel,
    individual_channels,
    spectrum,
    symmetry_break_sweep,
)
from .errors import GeometryError, ProxresError
from .tables import SweepResult, atomic_write_text, format_number, write_csv, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EMPTY = 2
EXIT_PARTIAL = 3

DISK_MODES_HEADER = ["family", "m", "n", "p", "frequency_GHz", "kappa_r_per_mm", "Q_estimate"]
DOUBLET_HEADER = ["d_over_D", "eps_S", "gamma_S", "eps_A", "gamma_A", "delta_eps",
                  "ratio_gamma_S_over_gamma_A"]
THREE_DISK_HEADER = ["b_over_D", "sharp_width", "sharp_Q", "sharp_irrep_score",
                     "bright_width", "mid_width"]
TWO_LEVEL_HEADER = ["T", "gamma_common", "gamma_individual", "f_S", "gamma_S_model",
                    "f_A", "gamma_A_model"]


def _split_overrides(argv):
    """Pull --section.key=value tokens out of the raw argument list."""
    plain, overrides = [], []
    for token in argv:
        if token.startswith("--") and "=" in token and "." in token.split("=", 1)[0]:
            head, value = token[2:].split("=", 1)
            section, key = head.split(".", 1)
            overrides.append((section, key, value))
        else:
            plain.append(token)
    return plain, overrides


def _out_dir(args, config):
    if args.out:
        return args.out
    env = os.environ.get("PROXRES_OUT")
    if env:
        return env
    return config.output.directory


def _emit(out_dir, name, table, config, command):
    path = os.path.join(out_dir, name)
    write_csv(path, table, config.output.precision_digits)
    manifest_path = os.path.join(out_dir, "run_manifest.txt")
    write_manifest(
        manifest_path,
        __version__,
        command,
        config.to_ini(),
        datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    return path


def cmd_disk_modes(config, args, out_dir):
    geometry = config.geometry.resonator()
    family = ModeFamily(args.family)
    try:
        freqs = mode_frequencies(geometry, family, args.m, args.p, args.n_max)
    except ProxresError as exc:
        print(f"proxres: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    if not freqs:
        print("proxres: no guided modes below cutoff", file=sys.stderr)
        return EXIT_EMPTY
    table = SweepResult("disk_modes", DISK_MODES_HEADER)
    for n, f in enumerate(freqs, start=1):
        kappa = evanescent_kappa(geometry, f, args.p)
        q_est = None
        if args.surface_resistance_ohm is not None:
            mode = ModeIndex(family, args.m, n, args.p)
            _, _, q_est = q_budget(
                geometry, mode, args.surface_resistance_ohm,
                args.loss_tangent, frequency=f,
            )
        table.add_row([family.value, args.m, n, args.p, f, kappa, q_est])
    _emit(out_dir, "disk_modes.csv", table, config, "disk-modes")
    return EXIT_OK


def cmd_doublet_sweep(config, args, out_dir):
    dw = config.doublewell
    spec = dw.spec()
    d_values = dw.d_values()
    rows = sweep_distance(spec, d_values, dw.level)
    table = SweepResult("doublet_sweep", DOUBLET_HEADER)
    n_ok = 0
    for d, res in rows:
        if res is None:
            print(f"proxres: no doublet at d = {d:g}; row omitted", file=sys.stderr)
            continue
        n_ok += 1
        table.add_row([
            d,
            res.level_S.energy_eps,
            res.level_S.width_gamma,
            res.level_A.energy_eps,
            res.level_A.width_gamma,
            res.delta_eps,
            res.width_ratio,
        ])
    if n_ok == 0:
        print("proxres: empty sweep", file=sys.stderr)
        return EXIT_EMPTY
    _emit(out_dir, "doublet_sweep.csv", table, config, "doublet-sweep")
    _write_splitting_fit(out_dir, spec, rows, config)
    if n_ok < 0.8 * len(d_values):
        return EXIT_PARTIAL
    return EXIT_OK


def _write_splitting_fit(out_dir, spec, rows, config):
    digits = config.output.precision_digits
    good = [(d, r) for d, r in rows if r is not None]
    lines = []
    try:
        kappa_r = mean_inter_well_kappa(spec, good)
        window = [(d, r.delta_eps) for d, r in good if r.delta_eps > 0]
        decay, prefactor, rms = fit_splitting(
            [d for d, _ in window], [de for _, de in window], kappa_r, 1.0
        )
        lines = [
            f"kappa_r_mean = {format_number(kappa_r, digits)}",
            f"decay_constant = {format_number(decay, digits)}",
            f"prefactor = {format_number(prefactor, digits)}",
            f"rms_log_residual = {format_number(rms, digits)}",
        ]
    except ProxresError as exc:
        lines = [
            "kappa_r_mean =",
            "decay_constant =",
            "prefactor =",
            "rms_log_residual =",
            f"# fit unavailable: {exc}",
        ]
    atomic_write_text(os.path.join(out_dir, "splitting_fit.txt"), "\n".join(lines) + "\n")


def cmd_three_disk(config, args, out_dir):
    em = config.effmodel
    rows = symmetry_break_sweep(
        em.side_s, em.b_values(), em.T0, em.kappa,
        em.gamma_common, em.gamma_individual,
        site_energy=em.eps0, freq_scale=em.freq_scale_GHz,
    )
    for b, row in rows:
        if row is None:
            print(f"proxres: geometry overlap at b = {b:g}", file=sys.stderr)
            return EXIT_CONFIG
    table = SweepResult("symmetry_break", THREE_DISK_HEADER)
    for b, row in rows:
        table.add_row([
            b,
            row["sharp_width"],
            row["sharp_Q"],
            row["sharp_irrep_score"],
            row["bright_width"],
            row["mid_width"],
        ])
    _emit(out_dir, "symmetry_break.csv", table, config, "three-disk")
    return EXIT_OK


def cmd_two_level_demo(config, args, out_dir):
    em = config.effmodel
    t_coupling = em.T0
    gamma_c, gamma_d = em.gamma_common, em.gamma_individual
    eps0 = em.eps0
    network = SiteNetwork(
        site_energies=(eps0, eps0),
        channels=tuple([common_channel(gamma_c, 2)] + individual_channels(gamma_d, 2)),
        coupling_override=((0.0, t_coupling), (t_coupling, 0.0)),
    )
    reports = spectrum(network)
    low, high = reports[0], reports[-1]
    f_s, gamma_s = low.eigenvalue.real, low.width
    f_a, gamma_a = high.eigenvalue.real, high.width
    # Closed-form cross-check of the two-level physics.
    expected = [
        (f_s, eps0 - t_coupling), (f_a, eps0 + t_coupling),
        (gamma_s, 2.0 * gamma_c + gamma_d), (gamma_a, gamma_d),
    ]
    for got, want in expected:
        if abs(got - want) > 1e-12 * max(1.0, abs(want)):
            raise ProxresError(
                f"two-level closed form violated: got {got!r}, expected {want!r}"
            )
    table = SweepResult("two_level", TWO_LEVEL_HEADER)
    table.add_row([t_coupling, gamma_c, gamma_d, f_s, gamma_s, f_a, gamma_a])
    _emit(out_dir, "two_level.csv", table, config, "two-level-demo")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="proxres",
        description="Tunneling proximity resonances: disk modes, double-well "
        "doublets, and N-site non-Hermitian models.",
    )
    parser.add_argument("--version", action="version", version=f"proxres {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="INI configuration file")
    common.add_argument("--out", default=None, help="output directory (wins over PROXRES_OUT)")

    p_modes = sub.add_parser("disk-modes", parents=[common],
                             help="single-disk resonance table")
    p_modes.add_argument("--family", choices=["TM", "TE", "HEM"], default="TM")
    p_modes.add_argument("--m", type=int, default=0)
    p_modes.add_argument("--n-max", type=int, default=3)
    p_modes.add_argument("--p", type=int, default=1)
    p_modes.add_argument("--surface-resistance-ohm", type=float, default=None,
                         help="enable the Q_estimate column (conductor loss)")
    p_modes.add_argument("--loss-tangent", type=float, default=0.0)
    p_modes.set_defaults(func=cmd_disk_modes)

    p_sweep = sub.add_parser("doublet-sweep", parents=[common],
                             help="double-well doublet vs separation")
    p_sweep.set_defaults(func=cmd_doublet_sweep)

    p_three = sub.add_parser("three-disk", parents=[common],
                             help="triangle symmetry-breaking sweep")
    p_three.set_defaults(func=cmd_three_disk)

    p_two = sub.add_parser("two-level-demo", parents=[common],
                           help="two-site common-channel closed form")
    p_two.set_defaults(func=cmd_two_level_demo)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    plain, overrides = _split_overrides(argv)
    parser = build_parser()
    args = parser.parse_args(plain)
    try:
        config = load_config(args.config, overrides)
    except ProxresError as exc:
        print(f"proxres: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = _out_dir(args, config)
    try:
        return args.func(config, args, out_dir)
    except GeometryError as exc:
        print(f"proxres: geometry error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProxresError as exc:
        print(f"proxres: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
