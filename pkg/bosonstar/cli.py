"""Command line entry point.

    bosonstar solve --n 2048 --rmax 200
    bosonstar verify
    bosonstar linearize --n 1024 --rmax 60
    bosonstar certify
    bosonstar evolve --dt 0.005 --steps 200 --snapshot-every 50
    bosonstar selftest --seed 3

Configuration is layered: defaults < JSONC file (--config) < --set KEY=VALUE
< flags. Reports are JSON files in the output directory (BOSONSTAR_OUTPUT,
default ./bosonstar_out), fields and tables are CSV files next to them.
Exit status is 0 iff every executed check passes, 1 on a failed check or a
module error and 2 on a usage error.
"""
from contextlib import contextmanager
import argparse
import json
import logging
import os
import sys

import numpy as np
import scipy

from bosonstar import __version__
from bosonstar.analysis import (DEFAULT_FOURIER_WINDOW, abel_identity,
    certify_analyticity, fit_far_field, fit_fourier_decay, moment_growth_table)
from bosonstar.dynamics import WaveField, splitting_order, stationarity_report
from bosonstar.energetics import energy_breakdown, equation_residual, virial_report
from bosonstar.file_handling import find_files, format_filename, timestamp, write_columns
from bosonstar.json_handling import (SCHEMA_VERSION, jsonc_load, report_dump,
    to_json, update_dict, validate_report)
from bosonstar.linearization import (cosine_similarity, kernel_element_decay,
    kernel_scan, assemble_Lplus, sectors_report, translation_mode, zero_mode_residuals)
from bosonstar.miscellaneous import Record, parallel_map, seeded
from bosonstar.data_collection import Trace
from bosonstar.operators import (hardy_kato_check, hartree_term, newton_potential,
    poisson_semigroup)
from bosonstar.solver import (INITS, SolverConfig, nonexistence_probe, scan_profile,
    solve_ground_state)
from bosonstar.spectral_core import (BosonStarError, ConfigError, RadialField,
    RadialGrid, _check_kind, forward_transform, inverse_transform, norm, quadrature_3d,
    read_field, spectral_quadrature_3d, write_field)


logger = logging.getLogger(__name__)

COMMANDS = ("solve", "verify", "linearize", "certify", "evolve", "selftest")
GROUNDSTATE_PATTERN = "groundstate_{n}_{rmax:g}"
N_STAR_BOUNDS = (4/np.pi, 2*np.sqrt(2))
SELFTEST_FIELDS = 100
SELFTEST_SHARDS = 4


class UsageError(ConfigError):
    pass


def default_output():
    return os.environ.get("BOSONSTAR_OUTPUT", "bosonstar_out")


DEFAULTS = {
    "command": None,
    "n": 2048,
    "r_max": 200.0,
    "tol": 1e-8,
    "max_iter": 5000,
    "gamma": 1.5,
    "m": 0.0,
    "mu": 1.0,
    "init": "gaussian",
    "init_width": 1.0,
    "output": None,
    "seed": 0,
    "q_file": None,
    "dt": 0.005,
    "steps": 200,
    "snapshot_every": 0,
    "checked_n": 12,
    "far_field_window": None,
    "fourier_window": list(DEFAULT_FOURIER_WINDOW),
    "ells": [0, 1, 2],
    "kernel_threshold": 1e-2,
    "progress": False,
}


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_number(value):
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool)


def _window(key, value, allow_none=False):
    if value is None and allow_none:
        return None
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(_is_number(v) for v in value) or not 0 <= value[0] < value[1]):
        raise UsageError(key, "must be two increasing nonnegative numbers, got {!r}".format(value))
    return [float(v) for v in value]


class RunConfig:
    """Fully resolved configuration of one run, validated key by key"""
    def __init__(self, **values):
        unknown = set(values) - set(DEFAULTS)
        if unknown:
            raise UsageError(sorted(unknown)[0], "unknown configuration key")
        values = {**DEFAULTS, **values}

        if values["command"] not in COMMANDS:
            raise UsageError("command", "must be one of {}, got {!r}"
                             .format(COMMANDS, values["command"]))
        for key in ("n", "max_iter"):
            if not _is_int(values[key]) or values[key] < 1:
                raise UsageError(key, "must be a positive integer, got {!r}".format(values[key]))
        for key in ("steps", "snapshot_every", "checked_n", "seed"):
            if not _is_int(values[key]) or values[key] < 0:
                raise UsageError(key, "must be a nonnegative integer, got {!r}".format(values[key]))
        for key in ("r_max", "tol", "init_width", "dt", "kernel_threshold"):
            if not _is_number(values[key]) or not values[key] > 0:
                raise UsageError(key, "must be positive, got {!r}".format(values[key]))
        for key in ("gamma", "m", "mu"):
            if not _is_number(values[key]):
                raise UsageError(key, "must be a number, got {!r}".format(values[key]))
        if not values["gamma"] > 1:
            raise UsageError("gamma", "must be > 1, got {!r}".format(values["gamma"]))
        if not values["m"] >= 0:
            raise UsageError("m", "must be nonnegative, got {!r}".format(values["m"]))
        if not values["mu"] > -values["m"]:
            raise UsageError("mu", "must satisfy mu > -m, got mu={!r}, m={!r}"
                             .format(values["mu"], values["m"]))
        if values["init"] not in INITS:
            raise UsageError("init", "must be one of {}, got {!r}".format(INITS, values["init"]))
        ells = values["ells"]
        if not isinstance(ells, (list, tuple)) or not ells or not all(_is_int(e) and e >= 0 for e in ells):
            raise UsageError("ells", "must be a list of nonnegative integers, got {!r}".format(ells))
        values["far_field_window"] = _window("far_field_window", values["far_field_window"], True)
        values["fourier_window"] = _window("fourier_window", values["fourier_window"])
        if values["output"] is None:
            values["output"] = default_output()
        if not isinstance(values["output"], str) or not values["output"]:
            raise UsageError("output", "must be a directory name, got {!r}".format(values["output"]))
        values["progress"] = bool(values["progress"])

        for key in ("r_max", "tol", "init_width", "dt", "kernel_threshold", "gamma", "m", "mu"):
            values[key] = float(values[key])
        values["ells"] = [int(e) for e in ells]
        self.__dict__.update(values)
        self._keys = tuple(DEFAULTS)

    def __repr__(self):
        return "RunConfig({})".format(", ".join("{}={!r}".format(k, getattr(self, k))
                                                for k in self._keys))

    def to_dict(self):
        return {key: getattr(self, key) for key in self._keys}

    def grid(self):
        return RadialGrid(self.n, self.r_max)

    def solver_config(self, grid=None):
        return SolverConfig(grid=grid or self.grid(), init=self.init, init_width=self.init_width,
                            gamma=self.gamma, tol_residual=self.tol, max_iter=self.max_iter,
                            m=self.m, mu=self.mu, progress=self.progress)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("arguments", message)


_flags = (
    ("--n", dict(type=int, dest="n", help="Number of interior radial nodes")),
    ("--rmax", dict(type=float, dest="r_max", help="Truncation radius")),
    ("--tol", dict(type=float, help="Relative equation residual target")),
    ("--max-iter", dict(type=int, dest="max_iter", help="Iteration cap of the solver")),
    ("--gamma", dict(type=float, help="Stabilization exponent")),
    ("--m", dict(type=float, help="Mass parameter of sqrt(-Laplacian + m^2)")),
    ("--mu", dict(type=float, help="Eigenvalue of the massive variant")),
    ("--init", dict(type=str, help="Initial guess: gaussian or lorentzian")),
    ("--init-width", dict(type=float, dest="init_width", help="Width of the initial guess")),
    ("--output", dict(type=str, metavar="DIR", help="Output directory")),
    ("--seed", dict(type=int, help="Seed of the randomized suites")),
    ("--q-file", dict(type=str, dest="q_file", metavar="CSV",
                      help="Ground state field to verify, linearize, certify or evolve")),
    ("--dt", dict(type=float, help="Time step")),
    ("--steps", dict(type=int, help="Number of time steps")),
    ("--snapshot-every", dict(type=int, dest="snapshot_every",
                              help="Write a field snapshot every k steps (0: none)")),
    ("--checked-n", dict(type=int, dest="checked_n", help="Highest checked Fourier moment")),
    ("--progress", dict(action="store_const", const=True, help="Show progress bars")),
)


def build_parser():
    parser = _Parser(prog="bosonstar", description=__doc__.splitlines()[0])
    parser.add_argument("command", nargs="?", choices=COMMANDS)
    for flag, kwargs in _flags:
        parser.add_argument(flag, default=None, **kwargs)
    parser.add_argument("--config", metavar="FILE", help="JSON (with comments) configuration file")
    parser.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        help="Override a configuration key, VALUE is read as JSON")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")
    return parser


def _parse_override(item):
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise UsageError("set", "expected KEY=VALUE, got {!r}".format(item))
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def parse_config(args, file=None):
    """Resolve a RunConfig from command line arguments and an optional
    configuration file. Returns (config, namespace)."""
    namespace = build_parser().parse_args(list(args))
    values = dict(DEFAULTS)
    values["fourier_window"] = list(values["fourier_window"])
    values["ells"] = list(values["ells"])

    file = namespace.config if namespace.config is not None else file
    if file is not None:
        try:
            with open(file, "r") as fp:
                loaded = jsonc_load(fp)
        except (OSError, ValueError) as e:
            raise UsageError("config", "cannot read {}: {}".format(file, e))
        if not isinstance(loaded, dict):
            raise UsageError("config", "{} must hold an object".format(file))
        for key in loaded:
            if key not in DEFAULTS:
                raise UsageError(key, "unknown configuration key in {}".format(file))
        values.update(loaded)

    for item in namespace.set:
        key, value = _parse_override(item)
        if key.split(".")[0] not in DEFAULTS:
            raise UsageError(key, "unknown configuration key")
        try:
            update_dict(values, {key: value})
        except (KeyError, IndexError, ValueError, TypeError):
            raise UsageError(key, "cannot set {!r}".format(item))

    if namespace.command is not None:
        values["command"] = namespace.command
    for _flag, kwargs in _flags:
        dest = kwargs.get("dest", _flag.lstrip("-").replace("-", "_"))
        value = getattr(namespace, dest)
        if value is not None:
            values[dest] = value
    if values["command"] is None:
        raise UsageError("command", "a command is required, one of {}".format(COMMANDS))
    return RunConfig(**values), namespace


def _meta():
    return {"created": timestamp(), "version": __version__,
            "numpy": np.__version__, "scipy": scipy.__version__,
            "python": sys.version.split()[0]}


class Checks:
    """Named pass/fail rows of a run, in execution order"""
    def __init__(self):
        self.rows = []

    def add(self, name, value, passed, bound=None, message=None):
        row = Record(name=name, value=value, bound=bound, passed=bool(passed), message=message)
        self.rows.append(row)
        log = logger.info if row.passed else logger.error
        log("check %-28s %s (value %s, bound %s)", name, "pass" if row.passed else "FAIL",
            value, bound)
        return row.passed

    @contextmanager
    def guard(self, name):
        """A module error inside the block fails the check `name`"""
        try:
            yield
        except BosonStarError as e:
            self.add(name, None, False, message="{}: {}".format(type(e).__name__, e))

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    @property
    def first_failure(self):
        for row in self.rows:
            if not row.passed:
                return row.name
        return None


def _write_report(cfg, kind, filename, body, checks=None):
    report = {"schema_version": SCHEMA_VERSION, "command": cfg.command,
              "config": cfg.to_dict(), **body}
    if checks is not None:
        report["checks"] = checks.rows
        report["passed"] = checks.passed
    report["meta"] = _meta()
    report = to_json(report)
    validate_report(kind, report)
    path = os.path.join(cfg.output, filename)
    with open(path, "w") as fp:
        report_dump(report, fp)
    logger.info("wrote %s", path)
    return path


def _groundstate_name(cfg, grid=None):
    grid = grid or cfg.grid()
    return format_filename(GROUNDSTATE_PATTERN, n=grid.n, rmax=grid.r_max)


def _ground_state(cfg):
    """(Q, source): --q-file, else the stored ground state of the configured
    grid, else a fresh solve that is not written"""
    if cfg.q_file is not None:
        Q = read_field(cfg.q_file)
        _check_kind(Q, RadialField)
        return Q.real, cfg.q_file
    found = find_files(_groundstate_name(cfg) + ".csv", base_dir=cfg.output)
    if found:
        path = os.path.join(cfg.output, found[0])
        return read_field(path, cfg.grid()).real, path
    logger.info("no stored ground state for %r, solving", cfg.grid())
    return solve_ground_state(cfg.solver_config()).Q, "solved"


def _profile_checks(checks, Q):
    scan = scan_profile(Q)
    checks.add("positive", scan.first_nonpositive, scan.positive)
    checks.add("strictly_decreasing", scan.first_nonmonotone, scan.strictly_decreasing)
    N_star = float(quadrature_3d(Q.abs2()))
    checks.add("N_star_bounds", N_star, N_STAR_BOUNDS[0] < N_star < N_STAR_BOUNDS[1],
               list(N_STAR_BOUNDS))


def _trace_file(cfg, filename):
    """A Trace streaming its rows to a JSON-lines file, replacing the file of
    an earlier run"""
    path = os.path.join(cfg.output, filename)
    if os.path.exists(path):
        os.remove(path)
    return Trace(path)


def run_solve(cfg):
    name = _groundstate_name(cfg)
    trace = _trace_file(cfg, name + "_trace.jsonl")
    try:
        report = solve_ground_state(cfg.solver_config(), trace)
    finally:
        trace.close()
    write_field(report.Q, os.path.join(cfg.output, name + ".csv"))
    checks = Checks()
    checks.add("residual", report.residual, report.residual <= cfg.tol, cfg.tol)
    _profile_checks(checks, report.Q)
    summary = report.summary()
    summary["solver"] = summary.pop("config")
    _write_report(cfg, "groundstate", name + ".json", summary, checks)
    return checks


def run_verify(cfg):
    Q, source = _ground_state(cfg)
    checks = Checks()
    with checks.guard("residual"):
        residual = equation_residual(Q, cfg.m, cfg.mu)
        checks.add("residual", residual, residual <= 10*cfg.tol, 10*cfg.tol)
    _profile_checks(checks, Q)

    with checks.guard("energy_identities"):
        energy = energy_breakdown(Q)
        checks.add("T_equals_M", abs(energy.T - energy.M)/energy.M,
                   abs(energy.T - energy.M)/energy.M < 1e-6, 1e-6)
        checks.add("D_equals_2T", abs(energy.D - 2*energy.T)/energy.D,
                   abs(energy.D - 2*energy.T)/energy.D < 1e-6, 1e-6)
        half = energy.M/2
        checks.add("I_equals_half_N_star", abs(energy.I - half)/half,
                   abs(energy.I - half)/half < 1e-5, 1e-5)

    with checks.guard("virial"):
        virial = virial_report(Q)
        M = float(quadrature_3d(Q.abs2()))
        error = abs(virial.interaction + M)/M
        checks.add("virial_identity", error, error < 1e-4, 1e-4)
        worst = float(np.max(virial.newton_lhs.values))
        checks.add("virial_sign", worst, worst <= 1e-8, 1e-8)

    with checks.guard("hardy_kato"):
        ratio = hardy_kato_check(Q)
        checks.add("hardy_kato", ratio, ratio <= 1 + 1e-3, 1 + 1e-3)

    with checks.guard("far_field"):
        window = cfg.far_field_window
        fit = fit_far_field(Q, hartree_term(Q), None if window is None else tuple(window))
        checks.add("far_field_c4", fit.rel_err_4, fit.rel_err_4 < 0.10, 0.10)
        checks.add("far_field_c5", fit.rel_err_5, fit.rel_err_5 < 0.15, 0.15)

    with checks.guard("fourier_decay"):
        fit = fit_fourier_decay(forward_transform(Q), tuple(cfg.fourier_window))
        checks.add("fourier_decay", fit.sigma_est, fit.sigma_est > 0 and fit.r_squared > 0.99)

    probe_cfg = cfg.solver_config(Q.grid)
    for E in (0.0, 0.5):
        with checks.guard("nonexistence_E{:g}".format(E)):
            probe = nonexistence_probe(E, probe_cfg)
            checks.add("nonexistence_E{:g}".format(E), probe.outcome, True)

    _write_report(cfg, "verification", "verification.json",
                  {"source": source, "first_failure": checks.first_failure}, checks)
    return checks


def run_linearize(cfg):
    Q, source = _ground_state(cfg)
    checks = Checks()
    zero_modes = zero_mode_residuals(Q)
    checks.add("lminus_residual", zero_modes.lminus, zero_modes.lminus < 1e-6, 1e-6)
    checks.add("translation_residual", zero_modes.translation,
               zero_modes.translation < 1e-3, 1e-3)
    checks.add("scaling_residual", zero_modes.scaling, zero_modes.scaling < 1e-3, 1e-3)

    report = sectors_report(Q, cfg.ells, threshold=cfg.kernel_threshold)
    rows = []
    sectors = []
    for sector in report.sectors:
        checks.add("symmetry_{}_{}".format(sector.operator, sector.ell), sector.asymmetry,
                   sector.asymmetry < 1e-10, 1e-10)
        for index, value in enumerate(sector.eigenvalues):
            rows.append((sector.ell, index, value, sector.operator == "L-"))
        sectors.append({"ell": sector.ell, "operator": sector.operator,
                        "lowest": sector.eigenvalues[:8], "near_zero": sector.near_zero,
                        "asymmetry": sector.asymmetry})
    rows = np.array(rows, dtype=float)
    stem = format_filename("eigenvalues_{n}_{rmax:g}", n=Q.grid.n, rmax=Q.grid.r_max)
    plus, minus = rows[rows[:, 3] == 0], rows[rows[:, 3] == 1]
    write_columns(os.path.join(cfg.output, stem + "_lplus.csv"), ("ell", "index", "eigenvalue"),
                  (plus[:, 0], plus[:, 1], plus[:, 2]))
    write_columns(os.path.join(cfg.output, stem + "_lminus.csv"), ("ell", "index", "eigenvalue"),
                  (minus[:, 0], minus[:, 1], minus[:, 2]))

    dQ = translation_mode(Q)
    if 1 in cfg.ells:
        scan = kernel_scan(assemble_Lplus(Q, 1), cfg.kernel_threshold)
        checks.add("translation_kernel_count", len(scan), len(scan) == 1, 1)
        for k, (_value, vector) in enumerate(scan):
            write_field(vector, os.path.join(cfg.output, "kernel_l1_{}.csv".format(k)))
        if scan:
            similarity = abs(cosine_similarity(scan[0][1], dQ))
            checks.add("translation_kernel_alignment", similarity, similarity > 0.999, 0.999)
    decay = kernel_element_decay(dQ, Q)
    checks.add("kernel_element_decay", decay.l1_norm,
               decay.l1_norm_finite and np.isfinite(decay.fourier_sup))

    _write_report(cfg, "linearization", "linearization.json",
                  {"source": source, "zero_modes": zero_modes, "sectors": sectors,
                   "threshold": report.threshold, "kernel_element": decay}, checks)
    return checks


def _abel_box():
    """Worst relative error of the Abel identity on n = 0..30, a, b in {1, 2, 3}"""
    return max(abel_identity(n, a, b).rel_err
               for n in range(31) for a in (1, 2, 3) for b in (1, 2, 3))


def run_certify(cfg):
    Q, source = _ground_state(cfg)
    Qhat = forward_transform(Q)
    checks = Checks()
    certificate = None
    with checks.guard("certificate"):
        certificate = certify_analyticity(Qhat, cfg.checked_n, residual=cfg.tol)
        checks.add("certificate", certificate.sigma, certificate.sigma > 0)
    fit = None
    with checks.guard("fourier_decay"):
        fit = fit_fourier_decay(Qhat, tuple(cfg.fourier_window))
        checks.add("fourier_decay", fit.r_squared, fit.sigma_est > 0 and fit.r_squared > 0.99, 0.99)
    if certificate is not None and fit is not None:
        checks.add("sigma_conservative", certificate.sigma,
                   certificate.sigma <= fit.sigma_est, fit.sigma_est)

    worst = _abel_box()
    checks.add("abel_identity", worst, worst < 1e-12, 1e-12)

    moments = []
    if certificate is not None:
        moments = moment_growth_table(Qhat, cfg.checked_n, certificate)
        ratio = max(row[3] for row in moments)
        checks.add("moment_table", ratio, ratio <= 1, 1)
        table = np.array(moments, dtype=float)
        write_columns(os.path.join(cfg.output, "moments.csv"), ("n", "measured", "bound", "ratio"),
                      table.T)
    write_field(Qhat, os.path.join(cfg.output, format_filename(
        "fourier_profile_{n}_{rmax:g}.csv", n=Q.grid.n, rmax=Q.grid.r_max)))

    _write_report(cfg, "certificate", "certificate.json",
                  {"source": source,
                   "certificate": certificate.summary() if certificate is not None else None,
                   "fourier_fit": fit, "moments": moments}, checks)
    return checks


def _splitting_data(grid):
    return WaveField(grid, 0.5*np.exp(-grid.r**2/2))


def run_evolve(cfg):
    Q, source = _ground_state(cfg)
    checks = Checks()

    def snapshot(psi, step):
        write_field(psi, os.path.join(cfg.output, format_filename("snapshot_{step:06d}.csv",
                                                                  step=step)))

    trace = _trace_file(cfg, "evolution_trace.jsonl")
    try:
        stationarity = stationarity_report(Q, cfg.dt, cfg.steps, mu=cfg.mu, m=cfg.m,
                                           trace=trace, snapshot=snapshot,
                                           snapshot_every=cfg.snapshot_every,
                                           progress=cfg.progress)
    finally:
        trace.close()
    checks.add("no_abort", stationarity.aborted_at, stationarity.aborted_at is None)
    checks.add("amplitude", stationarity.amplitude_error,
               stationarity.amplitude_error < 1e-3, 1e-3)
    checks.add("phase", stationarity.phase_error, stationarity.phase_error < 1e-3, 1e-3)
    checks.add("mass_drift", stationarity.mass_drift, stationarity.mass_drift < 1e-8, 1e-8)
    checks.add("energy_drift", stationarity.energy_drift, stationarity.energy_drift < 1e-5, 1e-5)

    splitting = splitting_order(_splitting_data(Q.grid), 0.05, 0.5)
    checks.add("splitting_order", splitting.order, 1.7 <= splitting.order <= 2.3, [1.7, 2.3])

    series = {key: trace[:, key] for key in ("t", "mass", "kinetic", "potential", "total")}
    _write_report(cfg, "evolution", "evolution.json",
                  {"source": source, "stationarity": stationarity, "splitting": splitting,
                   "series": series}, checks)
    return checks


def _transform_shard(seed, grid, count):
    worst_roundtrip = worst_plancherel = 0.0
    with seeded(seed, np.random.RandomState()) as random:
        for _ in range(count):
            u = RadialField(grid, random.randn(grid.n))
            uhat = forward_transform(u)
            back = inverse_transform(uhat)
            worst_roundtrip = max(worst_roundtrip, float(norm(back - u)/norm(u)))
            mass = quadrature_3d(u.abs2())
            spectral = spectral_quadrature_3d(uhat.abs2())
            worst_plancherel = max(worst_plancherel, float(abs(mass - spectral)/mass))
    return worst_roundtrip, worst_plancherel


def unit_ball_density(grid):
    """Uniform unit mass ball, half density on a node sitting at r = 1"""
    rho = np.where(grid.r < 1, 3/(4*np.pi), 0.0)
    rho[np.isclose(grid.r, 1.0, rtol=0, atol=1e-9*grid.r_max)] = 3/(8*np.pi)
    return RadialField(grid, rho)


def run_selftest(cfg):
    checks = Checks()
    grid = cfg.grid()
    per_shard = SELFTEST_FIELDS//SELFTEST_SHARDS
    results = parallel_map(lambda shard: _transform_shard(cfg.seed + shard, grid, per_shard),
                           range(SELFTEST_SHARDS))
    roundtrip = max(r for r, _ in results)
    plancherel = max(p for _, p in results)
    checks.add("transform_roundtrip", roundtrip, roundtrip < 1e-12, 1e-12)
    checks.add("plancherel", plancherel, plancherel < 1e-10, 1e-10)

    gaussian = RadialField(grid, np.exp(-grid.r**2/2))
    twice = poisson_semigroup(poisson_semigroup(gaussian, 0.1), 1.0)
    once = poisson_semigroup(gaussian, 1.1)
    semigroup = float(norm(twice - once)/norm(once))
    checks.add("poisson_semigroup", semigroup, semigroup < 1e-10, 1e-10)

    worst = _abel_box()
    checks.add("abel_identity", worst, worst < 1e-12, 1e-12)

    ball_grid = RadialGrid(2999, 3.0)
    rho = unit_ball_density(ball_grid)
    r = ball_grid.r
    phi = newton_potential(rho).values
    exact = np.where(r < 1, (3 - r**2)/2, 1/r)
    edge = np.isclose(r, 1.0, rtol=0, atol=1e-9)
    inner_error = float(np.max(np.abs(phi - exact)[~edge]))
    checks.add("newton_unit_ball", inner_error, inner_error < 1e-6, 1e-6)
    edge_error = float(np.max(np.abs(phi - exact)[edge]))
    checks.add("newton_unit_ball_edge", edge_error, edge_error < 1e-3, 1e-3)
    mass = float(quadrature_3d(rho))
    tail = r >= 1.5
    tail_error = float(np.max(np.abs(phi[tail] - mass/r[tail])))
    checks.add("newton_exterior", tail_error, tail_error < 1e-8, 1e-8)

    _write_report(cfg, "selftest", "selftest.json", {}, checks)
    return checks


PIPELINES = {
    "solve": run_solve,
    "verify": run_verify,
    "linearize": run_linearize,
    "certify": run_certify,
    "evolve": run_evolve,
    "selftest": run_selftest,
}


def echo_config(cfg):
    return _write_report(cfg, "run_config", "run_config.json", {})


def run_pipeline(cfg):
    """Run cfg.command; 0 iff every check passed, 1 otherwise. A module error
    is written to error.json and gives 1."""
    try:
        os.makedirs(cfg.output, exist_ok=True)
    except OSError as e:
        raise UsageError("output", "cannot create {}: {}".format(cfg.output, e))
    if not os.access(cfg.output, os.W_OK):
        raise UsageError("output", "{} is not writable".format(cfg.output))
    echo_config(cfg)
    try:
        checks = PIPELINES[cfg.command](cfg)
    except BosonStarError as e:
        logger.error("%s failed: %s: %s", cfg.command, type(e).__name__, e)
        error = {"error": type(e).__name__, "message": str(e)}
        if getattr(e, "key", None) is not None:
            error["key"] = e.key
        if getattr(e, "n", None) is not None:
            error["n"] = e.n
        _write_report(cfg, "error", "error.json", error)
        return 1
    if checks.passed:
        logger.info("%s: all %d checks passed", cfg.command, len(checks.rows))
        return 0
    logger.error("%s: first failing check %s", cfg.command, checks.first_failure)
    return 1


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, namespace = parse_config(argv)
    except UsageError as e:
        print("bosonstar: error: {}".format(e), file=sys.stderr)
        return 2
    level = logging.DEBUG if namespace.verbose else logging.WARNING if namespace.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return run_pipeline(cfg)
    except UsageError as e:
        print("bosonstar: error: {}".format(e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
