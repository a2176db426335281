"""Command-line front end.

Subcommands
-----------
roots        channel roots s (or the full regime cross-check with --regime-check)
potentials   adiabatic potential curves U_nu(R) tracked over an R grid
spectrum     bound states of one hyperradial channel
observables  loss-rate and atom-dimer scaling sweeps
spinbasis    product and coupled spin bases as JSON

Conventions shared by all subcommands:

* lengths are in units of r_vdW, energies in 1/(m r_vdW^2)
* CSV output uses LF line endings, ``%.12g`` floats, no quoting
* option precedence: command-line flag > config-file entry > built-in default
* exit status 0 on success, 1 on usage errors, 2 on numerical failures
* ``HYPERSPIN_THREADS`` caps the worker-process count; output is
  byte-identical at any parallelism level
"""

from __future__ import annotations

import argparse
import functools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import adiabatic
from . import observables as obsmod
from . import spectrum as specmod
from .spins import SpinorSpecies, product_block, three_body_coupled_states

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

_REGIME_CHECK_RATIO = 1.0e4
_REGIME_CHECK_TOL = 5.0e-4
_REGIME_ROWS = {
    1: ("R<<a0,a2", "a0<<R<<a2", "a2<<R<<a0", "R>>a0,a2"),
    2: ("R<<a0,a2,a4", "a0<<R<<a2,a4", "a2<<R<<a0,a4", "a4<<R<<a0,a2",
        "a{0,2}<<R<<a4", "a{0,4}<<R<<a2", "a{2,4}<<R<<a0", "R>>a0,a2,a4"),
}
# scale factors keep every pairwise separation at the full ratio
_BIG_FACTORS = (1.0, 1.7, 2.9)
_SMALL_FACTORS = (1.0, 0.61, 0.37)


class _CliError(Exception):
    """Carries an exit code and a message for stderr."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _CliError(EXIT_USAGE, f"{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# option declarations (single source for parser construction, config-file
# resolution, and type conversion)

def _boolean(text):
    val = str(text).strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _positive_int(text):
    val = int(text)
    if val < 1:
        raise ValueError("must be >= 1")
    return val


class _Opt:
    def __init__(self, name, conv, default, help, flag=False):
        self.name = name          # long option, underscores
        self.conv = conv          # str -> value
        self.default = default
        self.help = help
        self.flag = flag


_COMMON = [
    _Opt("output", str, None, "write to this file instead of stdout"),
    _Opt("config", str, None, "flat key=value config file"),
    _Opt("jobs", _positive_int, None,
         "worker processes for sweeps (default: CPU count, capped by "
         "HYPERSPIN_THREADS)"),
]

_OPTS = {
    "roots": _COMMON + [
        _Opt("f", _positive_int, 1, "single-particle spin"),
        _Opt("a0", float, 0.0, "F2b=0 scattering length [r_vdW]"),
        _Opt("a2", float, 0.0, "F2b=2 scattering length [r_vdW]"),
        _Opt("a4", float, 0.0, "F2b=4 scattering length [r_vdW] (f>=2)"),
        _Opt("M", int, 0, "total spin projection MF3b"),
        _Opt("F3b", int, None, "restrict to one total spin F3b (default: all)"),
        _Opt("R", float, None, "single hyperradius [r_vdW]"),
        _Opt("Rmin", float, None, "sweep start [r_vdW]"),
        _Opt("Rmax", float, None, "sweep end [r_vdW]"),
        _Opt("points", _positive_int, None, "sweep point count (>= 2)"),
        _Opt("log", _boolean, False, "logarithmic sweep spacing", flag=True),
        _Opt("regime_check", _boolean, False,
             "compare computed roots against the reference regime table",
             flag=True),
    ],
    "potentials": _COMMON + [
        _Opt("f", _positive_int, 1, "single-particle spin"),
        _Opt("a0", float, 0.0, "F2b=0 scattering length [r_vdW]"),
        _Opt("a2", float, 0.0, "F2b=2 scattering length [r_vdW]"),
        _Opt("a4", float, 0.0, "F2b=4 scattering length [r_vdW] (f>=2)"),
        _Opt("M", int, 0, "total spin projection MF3b"),
        _Opt("F3b", int, None, "restrict to one total spin F3b (default: all)"),
        _Opt("Rmin", float, None, "grid start [r_vdW]"),
        _Opt("Rmax", float, None, "grid end [r_vdW]"),
        _Opt("points", _positive_int, None, "grid point count (>= 2)"),
        _Opt("log", _boolean, False, "logarithmic grid spacing", flag=True),
    ],
    "observables": _COMMON + [
        _Opt("F3b", int, None, "three-body spin sector (1, 2, or 3)"),
        _Opt("obs", str, None, "observable identifier, e.g. K3_d or aad_2"),
        _Opt("a0", float, None, "fixed F2b=0 scattering length [r_vdW]"),
        _Opt("a2", float, None, "fixed F2b=2 scattering length [r_vdW]"),
        _Opt("a0_sweep", str, None, "sweep a0 over lo:hi (geometric)"),
        _Opt("a2_sweep", str, None, "sweep a2 over lo:hi (geometric)"),
        _Opt("points", _positive_int, 200, "sweep point count"),
        _Opt("eta", float, 0.0, "inelasticity parameter"),
        _Opt("phi", float, 0.0, "short-range phase"),
        _Opt("alpha", float, 1.0, "non-oscillatory amplitude"),
        _Opt("beta", float, 1.0, "oscillatory amplitude"),
        _Opt("gamma", float, 1.0, "plain power-law amplitude"),
        _Opt("s0", float, 1.006238, "|s0| of the attractive channel"),
        _Opt("s1", float, None, "override the subleading exponent s1"),
        _Opt("rvdw", float, 1.0, "short-range length scale [r_vdW]"),
        _Opt("k", float, 0.0, "collision wave number (free-atom rates)"),
        _Opt("kad", float, 0.0, "atom-dimer relative wave number"),
        _Opt("regime", str, None,
             "force this regime label instead of classifying lengths"),
    ],
    "spectrum": _COMMON + [
        _Opt("x", float, None, "channel eigenvalue x = s^2 (x < 0 attractive)"),
        _Opt("wall", float, None, "inner hard-wall radius [r_vdW]"),
        _Opt("n", _positive_int, None, "number of bound states requested"),
        _Opt("outer", float, None, "outer boundary [r_vdW] (default: wall*1e9)"),
        _Opt("ppd", _positive_int, 200, "grid points per decade"),
    ],
    "spinbasis": _COMMON + [
        _Opt("f", _positive_int, None, "single-particle spin"),
        _Opt("M", int, 0, "total spin projection MF3b"),
    ],
}

_ALL_KEYS = {o.name for opts in _OPTS.values() for o in opts}


def _build_parser():
    parser = _Parser(prog="hyperspin",
                     description="spin-dependent three-boson toolkit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, opts in _OPTS.items():
        p = sub.add_parser(name, help=None)
        for o in opts:
            flag = "--" + o.name.replace("_", "-")
            if o.flag:
                p.add_argument(flag, dest=o.name, action="store_true",
                               default=None, help=o.help)
            else:
                p.add_argument(flag, dest=o.name, default=None, help=o.help)
    return parser


def _load_config(path):
    """Flat key=value file; '#' comments and blank lines are skipped."""
    entries = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _CliError(
                        EXIT_USAGE,
                        f"hyperspin: error: {path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                key = key.strip().lower().replace("-", "_")
                if key not in _ALL_KEYS:
                    raise _CliError(
                        EXIT_USAGE,
                        f"hyperspin: error: {path}:{lineno}: unknown key {key!r}")
                entries[key] = val.strip()
    except OSError as exc:
        raise _CliError(EXIT_USAGE,
                        f"hyperspin: error: cannot read config: {exc}")
    return entries


def _resolve(ns):
    """Apply flag > config > default precedence with uniform conversion."""
    opts = _OPTS[ns.command]
    config = {}
    raw_config = getattr(ns, "config", None)
    if raw_config:
        config = _load_config(raw_config)
    for o in opts:
        raw = getattr(ns, o.name, None)
        if raw is None and o.name in config:
            raw = config[o.name]
        if raw is None:
            setattr(ns, o.name, o.default)
            continue
        if isinstance(raw, bool):    # store_true flag given on the line
            setattr(ns, o.name, raw)
            continue
        try:
            setattr(ns, o.name, o.conv(raw))
        except (TypeError, ValueError) as exc:
            raise _CliError(
                EXIT_USAGE,
                f"hyperspin {ns.command}: error: bad value for --"
                f"{o.name.replace('_', '-')}: {exc}")
    return ns


def _job_count(ns, n_tasks):
    jobs = ns.jobs if ns.jobs else (os.cpu_count() or 1)
    cap_text = os.environ.get("HYPERSPIN_THREADS")
    if cap_text:
        try:
            cap = int(cap_text)
        except ValueError:
            print("hyperspin: warning: ignoring non-integer HYPERSPIN_THREADS",
                  file=sys.stderr)
        else:
            if cap >= 1:
                jobs = min(jobs, cap)
    return max(1, min(jobs, n_tasks))


def _pool_map(fn, tasks, jobs):
    """Order-preserving map; the serial and parallel paths are identical."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


# ---------------------------------------------------------------------------
# output helpers

def _fmt(value):
    if isinstance(value, float):
        return "%.12g" % value
    return str(value)


def _csv(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(ns, text):
    if ns.output:
        try:
            with open(ns.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise _CliError(EXIT_USAGE,
                            f"hyperspin: error: cannot write output: {exc}")
    else:
        sys.stdout.write(text)


def _species(ns):
    lengths = {0: ns.a0, 2: ns.a2}
    if ns.f >= 2:
        lengths[4] = ns.a4
    elif ns.a4:
        raise _CliError(EXIT_USAGE,
                        "hyperspin: error: --a4 requires --f 2 or higher")
    return ns.f, tuple(sorted(lengths.items()))


def _f3b_list(ns):
    top = 3 * ns.f
    if ns.F3b is None:
        return list(range(top + 1))
    if not 0 <= ns.F3b <= top:
        raise _CliError(EXIT_USAGE,
                        f"hyperspin: error: --F3b must be in 0..{top}")
    return [ns.F3b]


def _grid(ns, allow_single):
    if getattr(ns, "R", None) is not None:
        if ns.Rmin is not None or ns.Rmax is not None:
            raise _CliError(EXIT_USAGE,
                            "hyperspin: error: give --R or --Rmin/--Rmax, not both")
        if ns.R <= 0:
            raise _CliError(EXIT_USAGE, "hyperspin: error: --R must be positive")
        return [ns.R]
    if ns.Rmin is None or ns.Rmax is None or ns.points is None:
        raise _CliError(EXIT_USAGE,
                        "hyperspin: error: need --Rmin, --Rmax and --points"
                        + (" (or a single --R)" if allow_single else ""))
    if ns.Rmin <= 0 or ns.Rmax <= ns.Rmin:
        raise _CliError(EXIT_USAGE,
                        "hyperspin: error: need 0 < Rmin < Rmax")
    if ns.points < 2:
        raise _CliError(EXIT_USAGE,
                        "hyperspin: error: a grid needs --points >= 2")
    if ns.log:
        return list(np.geomspace(ns.Rmin, ns.Rmax, ns.points))
    return list(np.linspace(ns.Rmin, ns.Rmax, ns.points))


def _axis_columns(x):
    """(s_or_abs_s, s_axis) for a channel eigenvalue x = s^2."""
    if not math.isfinite(x):
        return float("nan"), "gap"
    if x < 0.0:
        return math.sqrt(-x), "imaginary"
    return math.sqrt(x), "real"


# ---------------------------------------------------------------------------
# worker functions (module level so process pools can pickle them)

@functools.lru_cache(maxsize=32)
def _context_for(f, length_items, M):
    species = SpinorSpecies(f, dict(length_items))
    return species, adiabatic.kernel_context(species, M)


def _roots_worker(task):
    f, length_items, M, R, f3b_values = task
    _, ctx = _context_for(f, length_items, M)
    rows = []
    for F3b in f3b_values:
        found = sorted(adiabatic.find_channel_roots(R, ctx, F3b),
                       key=lambda r: r.x)
        for idx, root in enumerate(found):
            s_val, axis = _axis_columns(root.x)
            rows.append((R, F3b, idx, s_val, axis, root.x,
                         root.residual, root.multiplicity))
    return rows


def _potentials_worker(task):
    f, length_items, M, F3b, grid = task
    species, _ = _context_for(f, length_items, M)
    curve = adiabatic.potential_curves(species, F3b, M, np.array(grid))
    rows = []
    failures = 0
    for ch in curve.channels:
        finite = np.nonzero(np.isfinite(ch.x))[0]
        if len(finite) == 0:
            continue
        for i in range(finite[0], finite[-1] + 1):
            x = float(ch.x[i])
            s_val, axis = _axis_columns(x)
            if axis == "gap":
                failures += 1
            rows.append((i, F3b, ch.index, s_val, axis, x, float(ch.U[i])))
    return rows, list(curve.diagnostics), failures


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_roots(ns):
    if ns.regime_check:
        return _regime_check(ns)
    f, items = _species(ns)
    grid = _grid(ns, allow_single=True)
    f3b_values = tuple(_f3b_list(ns))
    tasks = [(f, items, ns.M, R, f3b_values) for R in grid]
    chunks = _pool_map(_roots_worker, tasks, _job_count(ns, len(tasks)))
    header = ("R[r_vdW]", "F3b", "root_index", "s_or_abs_s", "s_axis",
              "x", "residual", "multiplicity")
    rows = [row for chunk in chunks for row in chunk]
    _emit(ns, _csv(header, rows))
    return EXIT_OK


def _regime_check(ns):
    """Realize every scale-separation regime and compare with the reference.

    Each regime is realized at R = 1 with well-separated lengths (pairwise
    ratio >= 1e4); each reference (s, multiplicity) entry must match the
    computed root list within 5e-4 in s.
    """
    if ns.f not in _REGIME_ROWS:
        raise _CliError(EXIT_USAGE,
                        "hyperspin: error: --regime-check supports --f 1 or 2")
    f = ns.f
    evens = list(range(0, 2 * f + 1, 2))
    big = {F: fac for F, fac in zip(evens, _BIG_FACTORS)}
    small = {F: fac for F, fac in zip(evens, _SMALL_FACTORS)}
    lines = [f"regime check: f={f} ratio={_fmt(_REGIME_CHECK_RATIO)} "
             f"R=1 tolerance={_fmt(_REGIME_CHECK_TOL)}"]
    cells = 0
    failures = 0
    worst = 0.0
    for regime in _REGIME_ROWS[f]:
        large = adiabatic._parse_regime(f, regime)
        lengths = {F: _REGIME_CHECK_RATIO * big[F] if F in large
                   else small[F] / _REGIME_CHECK_RATIO for F in evens}
        species = SpinorSpecies(f, lengths)
        ctx = adiabatic.kernel_context(species, ns.M)
        table = adiabatic.asymptotic_root_table(f, regime)
        for F3b in sorted(table.by_F3b):
            expected = table.by_F3b[F3b]
            found = sorted(adiabatic.find_channel_roots(1.0, ctx, F3b),
                           key=lambda r: r.x)
            cell_bad = []
            cell_worst = 0.0
            for i, (s_ref, mult) in enumerate(expected):
                if i >= len(found):
                    cell_bad.append(f"missing root #{i}")
                    continue
                dev = abs(abs(found[i].s) - abs(s_ref))
                cell_worst = max(cell_worst, dev)
                if dev > _REGIME_CHECK_TOL:
                    cell_bad.append(f"root #{i}: |ds|={dev:.3e}")
                if found[i].multiplicity != mult:
                    cell_bad.append(
                        f"root #{i}: multiplicity {found[i].multiplicity} != {mult}")
            worst = max(worst, cell_worst)
            cells += 1
            if cell_bad:
                failures += 1
                lines.append(f"[FAIL] {regime} F3b={F3b}: " + "; ".join(cell_bad))
            else:
                lines.append(f"[ok] {regime} F3b={F3b} roots={len(expected)} "
                             f"worst|ds|={cell_worst:.3e}")
    lines.append(f"cells checked: {cells}  worst deviation: {worst:.3e}  "
                 f"failures: {failures}")
    _emit(ns, "\n".join(lines) + "\n")
    return EXIT_OK if failures == 0 else EXIT_NUMERICAL


def _cmd_potentials(ns):
    f, items = _species(ns)
    ns.R = None
    grid = _grid(ns, allow_single=False)
    f3b_values = _f3b_list(ns)
    tasks = [(f, items, ns.M, F3b, tuple(grid)) for F3b in f3b_values]
    try:
        results = _pool_map(_potentials_worker, tasks,
                            _job_count(ns, len(tasks)))
    except adiabatic.TrackingError as exc:
        raise _CliError(EXIT_NUMERICAL, f"hyperspin potentials: error: {exc}")
    rows = []
    failures = 0
    for (chunk, diags, n_fail), F3b in zip(results, f3b_values):
        failures += n_fail
        for msg in diags:
            print(f"hyperspin potentials: F3b={F3b}: {msg}", file=sys.stderr)
        rows.extend(chunk)
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    header = ("R[r_vdW]", "F3b", "channel_index", "s_or_abs_s", "s_axis",
              "x", "U[1/(m*r_vdW^2)]")
    out = [(grid[r[0]], r[1], r[2], r[3], r[4], r[5], r[6]) for r in rows]
    _emit(ns, _csv(header, out))
    if rows and failures / len(rows) > 0.01:
        print(f"hyperspin potentials: error: {failures} of {len(rows)} rows "
              "lost channel tracking", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _parse_sweep(text, name):
    parts = text.split(":")
    if len(parts) != 2:
        raise _CliError(EXIT_USAGE,
                        f"hyperspin observables: error: --{name} needs lo:hi")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise _CliError(EXIT_USAGE,
                        f"hyperspin observables: error: --{name} needs numbers")
    if lo == 0.0 or hi == 0.0 or (lo > 0) != (hi > 0):
        raise _CliError(EXIT_USAGE,
                        f"hyperspin observables: error: --{name} endpoints must "
                        "be nonzero with the same sign")
    return lo, hi


def _cmd_observables(ns):
    if ns.F3b not in (1, 2, 3):
        raise _CliError(EXIT_USAGE,
                        "hyperspin observables: error: --F3b must be 1, 2 or 3")
    if not ns.obs:
        raise _CliError(EXIT_USAGE,
                        "hyperspin observables: error: --obs is required")
    try:
        obs_id = obsmod._canon_observable(ns.obs)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, f"hyperspin observables: error: {exc}")
    if (ns.a0_sweep is None) == (ns.a2_sweep is None):
        raise _CliError(EXIT_USAGE,
                        "hyperspin observables: error: give exactly one of "
                        "--a0-sweep / --a2-sweep")
    sweep_name = "a0-sweep" if ns.a0_sweep else "a2-sweep"
    lo, hi = _parse_sweep(ns.a0_sweep or ns.a2_sweep, sweep_name)
    sweep = (1.0 if lo > 0 else -1.0) * np.geomspace(abs(lo), abs(hi), ns.points)
    fixed_a0 = 0.0 if ns.a0 is None else ns.a0
    fixed_a2 = 0.0 if ns.a2 is None else ns.a2
    if ns.F3b == 1:
        fixed = ns.a2 if ns.a0_sweep else ns.a0
        if fixed is None:
            raise _CliError(
                EXIT_USAGE,
                "hyperspin observables: error: F3b=1 needs the non-swept "
                "length (--a0 or --a2)")
    try:
        params = obsmod.ScalingParams(alpha=ns.alpha, beta=ns.beta,
                                      gamma=ns.gamma, eta=ns.eta, phi=ns.phi,
                                      s0_mag=ns.s0, s1=ns.s1, r_vdw=ns.rvdw)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, f"hyperspin observables: error: {exc}")
    three_body = obs_id in obsmod.THREE_BODY_IDS
    rows = []
    skipped = 0
    for a in sweep:
        a = float(a)
        a0, a2 = (a, fixed_a2) if ns.a0_sweep else (fixed_a0, a)
        try:
            if ns.regime is not None:
                regime = ns.regime
            else:
                regime = obsmod.classify_regime(ns.F3b, a0, a2, params)
            desc = obsmod.RegimeDescriptor(ns.F3b, regime, obs_id)
            if three_body:
                value = obsmod.rate_scaling(desc, a0, a2, params, k=ns.k,
                                            override=ns.regime is not None)
            else:
                value = obsmod.atom_dimer_scaling(desc, a0, a2, params,
                                                  k_ad=ns.kad,
                                                  override=ns.regime is not None)
        except obsmod.RegimeError as exc:
            skipped += 1
            print(f"hyperspin observables: skipping a={_fmt(a)}: {exc}",
                  file=sys.stderr)
            continue
        except ValueError as exc:
            raise _CliError(EXIT_USAGE,
                            f"hyperspin observables: error: {exc}")
        rows.append((a, value, desc.regime, desc.observable))
    header = ("a[r_vdW]", "value", "regime", "observable")
    _emit(ns, _csv(header, rows))
    if not rows:
        print("hyperspin observables: error: no sweep point could be "
              "evaluated", file=sys.stderr)
        return EXIT_NUMERICAL
    if skipped:
        print(f"hyperspin observables: {skipped} of {len(sweep)} points "
              "skipped", file=sys.stderr)
    return EXIT_OK


def _cmd_spectrum(ns):
    if ns.x is None or ns.wall is None or ns.n is None:
        raise _CliError(EXIT_USAGE,
                        "hyperspin spectrum: error: need --x, --wall and --n")
    if ns.wall <= 0:
        raise _CliError(EXIT_USAGE,
                        "hyperspin spectrum: error: --wall must be positive")
    if ns.outer is not None and ns.outer <= ns.wall:
        raise _CliError(EXIT_USAGE,
                        "hyperspin spectrum: error: --outer must exceed --wall")
    potential = specmod.power_law_potential(ns.x)
    outer = ns.outer if ns.outer is not None else ns.wall * 1e9
    try:
        result = specmod.bound_states(potential, ns.wall, ns.n,
                                      outer_radius=outer,
                                      points_per_decade=ns.ppd)
    except (ValueError, ArithmeticError) as exc:
        raise _CliError(EXIT_NUMERICAL, f"hyperspin spectrum: error: {exc}")
    rows = []
    energies = result.energies
    for i, e in enumerate(energies):
        ratio = e / energies[i + 1] if i + 1 < len(energies) else float("nan")
        rows.append((i, e, ratio))
    header = ("n", "E_n[1/(m*r_vdW^2)]", "ratio_to_next")
    _emit(ns, _csv(header, rows))
    if result.truncated:
        print(f"hyperspin spectrum: warning: grid supports only "
              f"{len(energies)} of {ns.n} requested states", file=sys.stderr)
    return EXIT_OK


def _cmd_spinbasis(ns):
    if ns.f is None:
        raise _CliError(EXIT_USAGE,
                        "hyperspin spinbasis: error: --f is required")
    try:
        block = product_block(ns.f, ns.M)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, f"hyperspin spinbasis: error: {exc}")
    coupled = []
    for F3b in range(abs(ns.M), 3 * ns.f + 1):
        for state in three_body_coupled_states(ns.f, F3b, ns.M):
            coupled.append({
                "F3b": state.F3b,
                "F2b": state.F2b,
                "symmetry": state.symmetry,
                "coefficients": [float(c) for c in state.coefficients],
            })
    coupled.sort(key=lambda d: (d["F3b"], d["F2b"]))
    doc = {
        "f": ns.f,
        "M": ns.M,
        "dimension": block.dim,
        "product_states": [list(map(float, s)) for s in block.states],
        "coupled_states": coupled,
        "count_product": block.dim,
        "count_coupled": len(coupled),
    }
    _emit(ns, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


_HANDLERS = {
    "roots": _cmd_roots,
    "potentials": _cmd_potentials,
    "observables": _cmd_observables,
    "spectrum": _cmd_spectrum,
    "spinbasis": _cmd_spinbasis,
}


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        try:
            ns = parser.parse_args(argv)
        except SystemExit as exc:      # --help / --version paths
            return int(exc.code or 0)
        _resolve(ns)
        return _HANDLERS[ns.command](ns)
    except _CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
