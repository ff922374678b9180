"""Command-line front end.

Every subcommand validates its configuration first (exit 1 on failure), runs the
grid points through an ordered worker pool and writes one deterministic CSV or
JSON document.  ``verify`` and ``compile --check`` exit 2 when a deviation
exceeds its tolerance; unexpected failures exit 3.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as xio
from .fermion import ChainSpec, XYChain

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_RUNTIME = 0, 1, 2, 3
THREADS_ENV = "XYCOMPRESS_THREADS"
VERIFY_TOL = 1e-9
COMPILE_TOL = 1e-10


class ConfigError(Exception):
    pass


class VerificationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# --- parsing helpers --------------------------------------------------------------------------------


def parse_grid(text: str) -> np.ndarray:
    """``"a:b:k"`` (k evenly spaced points), ``"x,y,z"`` or a single number."""
    try:
        if ":" in text:
            a, b, k = text.split(":")
            k = int(k)
            if k < 1:
                raise ValueError
            return np.linspace(float(a), float(b), k)
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return value


@dataclass
class RunConfig:
    subcommand: str
    chain: XYChain | None
    params: dict
    out: Path | None
    fmt: str
    threads: int
    extra: dict = field(default_factory=dict)


def _chain(args, pow2: bool) -> XYChain:
    cls = ChainSpec if pow2 else XYChain
    try:
        return cls(args.n, B=args.B, j_max=args.j_max, delta=args.delta, boundary=args.bc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _common(p: argparse.ArgumentParser, j_max: float = 1.0) -> None:
    p.add_argument("--n", type=int, required=True, help="number of spins")
    p.add_argument("--B", type=float, default=1.0, help="transverse field")
    p.add_argument("--j-max", type=float, default=j_max, help="final coupling J_max")
    p.add_argument("--delta", type=float, default=0.0, help="anisotropy of the YY term")
    p.add_argument("--bc", default="open", help="boundary: open or jw")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (default: ${THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xycompress", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("magnetize", help="adiabatic magnetization sweep M(J)")
    _common(p, j_max=2.0)
    p.add_argument("--T", default="50", help="total ramp time(s), grid syntax")
    p.add_argument("--rule", default="2T^2", help="step rule, e.g. 2T^2 or a fixed count")
    p.add_argument("--step-rule", default="LofJ", choices=("LofJ", "Fixed"))
    p.add_argument("--j-grid", default=None, help="J grid (default 0:j_max:41)")
    p.add_argument("--path", default="m_hat", choices=("m", "m_hat"))
    p.add_argument("--exact", action="store_true", help="add the exact ground-state M_z column")

    p = sub.add_parser("quench", help="two-stage quench and kink-density scaling")
    _common(p)
    p.add_argument("--B-max", type=float, default=20.0)
    p.add_argument("--T1", type=float, default=50.0)
    p.add_argument("--L1", type=int, default=20000)
    p.add_argument("--Tgrid", default="50,75,100,150,200,250", help="T2 grid")
    p.add_argument("--rule", default="2T^2", help="L2 rule")
    p.add_argument("--path", default="m_hat", choices=("m", "m_hat"))

    p = sub.add_parser("timeevo", help="signal propagation after flipping the middle spins")
    _common(p, j_max=0.3)
    p.add_argument("--J", default=None, help="coupling grid (default: j_max)")
    p.add_argument("--T", type=float, default=10.0, help="adiabatic preparation time")
    p.add_argument("--rule", default="2T^2")
    p.add_argument("--t-grid", default="0:30:16")
    p.add_argument("--dt-max", type=float, default=0.05)
    p.add_argument("--threshold", type=float, default=0.01)

    p = sub.add_parser("spectrum", help="exact spectrum with parity labels, or gap curves")
    _common(p)
    p.add_argument("--max-levels", type=int, default=None)
    p.add_argument("--brute-force", action="store_true", help="dense diagonalization with momentum labels")
    p.add_argument("--gaps", default=None, help="emit gap curves over this J grid instead")

    p = sub.add_parser("compile", help="compressed gate list of one Trotter step")
    _common(p)
    p.add_argument("--angles", default=None, help="w0,w1,w2 (default: random from --seed)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="store_true", help="compare with the dense W factors")

    p = sub.add_parser("verify", help="oracle equivalence of the R-matrix and statevector paths")
    _common(p)
    p.add_argument("--circuits", type=int, default=100)
    p.add_argument("--gates", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    threads = args.threads if args.threads is not None else default_threads()
    if threads < 1:
        raise ConfigError("--threads must be >= 1")
    sc = args.subcommand
    extra: dict = {}
    if sc == "magnetize":
        chain = _chain(args, pow2=True)
        extra["T"] = parse_grid(args.T)
        grid = args.j_grid or f"0:{chain.j_max}:41"
        extra["J"] = parse_grid(grid)
        if np.any(extra["T"] <= 0):
            raise ConfigError("ramp times must be > 0")
        if np.any(np.diff(extra["J"]) < 0) or extra["J"].min() < 0 or extra["J"].max() > chain.j_max:
            raise ConfigError("J grid must be non-decreasing inside [0, j_max]")
    elif sc == "quench":
        chain = _chain(args, pow2=True)
        if chain.delta != 0:
            raise ConfigError("the quench protocol needs delta = 0")
        extra["T2"] = parse_grid(args.Tgrid)
        if np.any(extra["T2"] <= 0) or args.T1 <= 0 or args.L1 < 1 or args.B_max <= 0:
            raise ConfigError("T1, L1, B_max and T2 values must be positive")
    elif sc == "timeevo":
        chain = _chain(args, pow2=True)
        extra["J"] = parse_grid(args.J) if args.J else np.array([chain.j_max])
        extra["t"] = parse_grid(args.t_grid)
        if np.any(extra["J"] < 0) or np.any(np.diff(extra["t"]) <= 0) or extra["t"].min() < 0:
            raise ConfigError("J must be >= 0 and the t grid increasing and nonnegative")
        if args.dt_max <= 0 or args.T <= 0:
            raise ConfigError("--dt-max and --T must be > 0")
    elif sc == "spectrum":
        chain = _chain(args, pow2=False)
        if args.gaps is not None:
            extra["J"] = parse_grid(args.gaps)
        elif args.brute_force:
            from .spectrum import MAX_DENSE_QUBITS
            if chain.n > MAX_DENSE_QUBITS:
                raise ConfigError(f"--brute-force is limited to n <= {MAX_DENSE_QUBITS}")
        elif args.max_levels is None and chain.n > 10:
            raise ConfigError("full spectra need n <= 10; pass --max-levels for a truncation")
        elif chain.n > 20:
            raise ConfigError("subset enumeration is limited to n <= 20")
        if args.max_levels is not None and not 1 <= args.max_levels <= 2 ** min(chain.n, 62):
            raise ConfigError("--max-levels must lie in [1, 2^n]")
    elif sc == "compile":
        chain = _chain(args, pow2=True)
        if args.angles is not None:
            a = parse_grid(args.angles)
            if a.size != 3:
                raise ConfigError("--angles needs three values w0,w1,w2")
            extra["angles"] = a
        else:
            extra["angles"] = np.random.default_rng(args.seed).uniform(-np.pi, np.pi, 3)
    elif sc == "verify":
        from .matchgate import MAX_ORACLE_QUBITS
        chain = _chain(args, pow2=False)
        if chain.n > MAX_ORACLE_QUBITS:
            raise ConfigError(f"verify is limited to n <= {MAX_ORACLE_QUBITS} (statevector oracle)")
        if args.circuits < 1 or args.gates < 1:
            raise ConfigError("--circuits and --gates must be >= 1")
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown subcommand {sc}")
    params = {k: v for k, v in vars(args).items() if k not in ("out", "fmt", "threads", "subcommand")}
    return RunConfig(sc, chain, params, args.out, args.fmt, threads, extra)


# --- workers (top level so they pickle) -------------------------------------------------------------


def _magnetize_worker(job):
    from .protocols import magnetization_sweep
    from .schedule import TrotterSchedule

    chain, T, rule, step_rule, J, path = job
    sched = TrotterSchedule.from_rule(T, rule, step_rule)
    return magnetization_sweep(chain, sched, J, path).y


def _exact_m_worker(job):
    from .spectrum import bogoliubov, ground_magnetization, quadratic_form

    chain, J = job
    return ground_magnetization(bogoliubov(quadratic_form(chain.replace(j_max=float(J)))))


def _quench_worker(job):
    from .protocols import quench_series

    chain, T1, L1, T2s, rule, B_max, path = job
    return [(r.T2, r.K, r.nu) for r in quench_series(chain, T1, L1, T2s, rule, B_max, path)]


def _timeevo_worker(job):
    from .protocols import timeevo_profile
    from .schedule import TrotterSchedule

    chain, T, rule, t, dt_max = job
    return timeevo_profile(chain, TrotterSchedule.from_rule(T, rule), t, dt_max)


def _run_jobs(fn, jobs, threads: int) -> list:
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


# --- subcommands ------------------------------------------------------------------------------------


def _emit(cfg: RunConfig, header, rows, payload: dict, tolerances=None) -> None:
    prov = xio.provenance({"subcommand": cfg.subcommand, **cfg.params}, tolerances)
    if cfg.fmt == "json":
        text = xio.json_text({"columns": list(header), "rows": [list(r) for r in rows], **payload}, prov)
    else:
        text = xio.csv_text(header, rows, prov)
    _write(cfg.out, text)
    if cfg.fmt == "csv" and payload and cfg.out is not None:
        _write(cfg.out.with_suffix(".json"), xio.json_text(payload, prov))


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_bytes(text.encode())


def cmd_magnetize(cfg: RunConfig) -> int:
    p, chain = cfg.params, cfg.chain
    Ts, J = cfg.extra["T"], cfg.extra["J"]
    jobs = [(chain, float(T), p["rule"], p["step_rule"], J, p["path"]) for T in Ts]
    curves = _run_jobs(_magnetize_worker, jobs, cfg.threads)
    header = ["T", "J", "M"]
    exact = None
    if p["exact"]:
        exact = _run_jobs(_exact_m_worker, [(chain, j) for j in J], cfg.threads)
        header.append("M_exact")
    rows = []
    for T, curve in zip(Ts, curves):
        for i, (j, m) in enumerate(zip(J, curve)):
            rows.append([T, j, m] + ([exact[i]] if exact is not None else []))
    _emit(cfg, header, rows, {})
    return EXIT_OK


def cmd_quench(cfg: RunConfig) -> int:
    from .protocols import kink_scaling_fit

    p, chain = cfg.params, cfg.chain
    T2 = cfg.extra["T2"]
    if cfg.threads <= 1:
        jobs = [(chain, p["T1"], p["L1"], list(T2), p["rule"], p["B_max"], p["path"])]
    else:
        jobs = [(chain, p["T1"], p["L1"], [t], p["rule"], p["B_max"], p["path"]) for t in T2]
    rows = [row for part in _run_jobs(_quench_worker, jobs, cfg.threads) for row in part]
    payload = {}
    if len(rows) >= 4:
        stats = kink_scaling_fit((np.array([r[0] for r in rows]), np.array([r[2] for r in rows])))
        payload = {"p": stats.p, "p_stderr": stats.p_stderr, "window": list(stats.window)}
    _emit(cfg, ["T", "K", "nu"], rows, payload)
    return EXIT_OK


def cmd_timeevo(cfg: RunConfig) -> int:
    from .protocols import propagation_speed

    p, chain = cfg.params, cfg.chain
    Js, t = cfg.extra["J"], cfg.extra["t"]
    jobs = [(chain.replace(j_max=float(J)), p["T"], p["rule"], t, p["dt_max"]) for J in Js]
    profiles = _run_jobs(_timeevo_worker, jobs, cfg.threads)
    header = ["J", "t"] + [f"Z_{k}" for k in range(1, chain.n + 1)]
    rows, speeds = [], []
    for J, prof in zip(Js, profiles):
        rows.extend([J, ti] + list(row) for ti, row in zip(t, prof))
        res = propagation_speed(prof, t, p["threshold"])
        speeds.append({"J": float(J), "speed": res.speed, "flagged": res.flagged,
                       "fronts": res.fronts.tolist()})
    _emit(cfg, header, rows, {"speeds": speeds}, {"threshold": p["threshold"]})
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    from .spectrum import bogoliubov, brute_force_labels, gap_curves, quadratic_form, spectrum

    p, chain = cfg.params, cfg.chain
    if "J" in cfg.extra:
        curves = gap_curves(chain, cfg.extra["J"])
        keys = ["J", "particle", "hole", "two_particle", "ground_parity"]
        rows = list(zip(*[curves[k] for k in keys]))
        _emit(cfg, keys, rows, {})
        return EXIT_OK
    if p["brute_force"]:
        spec = brute_force_labels(chain)
        payload = {}
    else:
        sol = bogoliubov(quadratic_form(chain))
        spec = spectrum(sol, p["max_levels"])
        payload = {"ground_energy": sol.ground_energy, "ground_parity": sol.ground_parity,
                   "lambdas": sol.lambdas.tolist()}
    n_rows = len(spec) if p["max_levels"] is None else min(len(spec), p["max_levels"])
    rows = [[e, par, m, occ] for e, par, m, occ in spec.rows()[:n_rows]]
    _emit(cfg, ["energy", "parity", "momentum", "occupation"], rows, payload)
    return EXIT_OK


def cmd_compile(cfg: RunConfig) -> int:
    from .compressed import _dense_step, compile_step

    chain = cfg.chain
    w0, w1, w2 = (float(x) for x in cfg.extra["angles"])
    gl = compile_step(chain, w0, w1, w2)
    payload = {"angles": [w0, w1, w2], "width": gl.width, "elementary_count": gl.elementary_count(),
               "gates": [g.as_dict() for g in gl.gates]}
    dev = None
    if cfg.params["check"]:
        dev = float(np.abs(gl.dense() - _dense_step(chain, w0, w1, w2)).max())
        payload["max_deviation"] = dev
    prov = xio.provenance({"subcommand": "compile", **cfg.params}, {"check": COMPILE_TOL})
    _write(cfg.out, xio.json_text(payload, prov))
    if dev is not None and dev > COMPILE_TOL:
        raise VerificationFailure(f"gate list deviates from the W factors by {dev:.3e}")
    return EXIT_OK


def verify_suite(n: int, circuits: int, gates: int, seed: int, jw: bool) -> float:
    """Max |<Z_k>| deviation between the rotation picture and the statevector."""
    from .matchgate import (expect_z_via_r, r_of_circuit, random_parametric_circuit, s_matrix,
                            statevector_run, expect_observable_statevector)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(circuits):
        circ = random_parametric_circuit(n, int(rng.integers(1, gates + 1)), rng, jw)
        bits = rng.integers(0, 2, n)
        R = r_of_circuit(circ)
        S = s_matrix(bits)
        state = statevector_run(circ, bits)
        for k in range(1, n + 1):
            worst = max(worst, abs(expect_z_via_r(R, S, k) - expect_observable_statevector(state, "Z", k)))
    return worst


def cmd_verify(cfg: RunConfig) -> int:
    p, chain = cfg.params, cfg.chain
    dev = verify_suite(chain.n, p["circuits"], p["gates"], p["seed"], chain.is_jw)
    print(f"max deviation: {dev:.3e} (tolerance {VERIFY_TOL:.0e})")
    if cfg.out is not None:
        prov = xio.provenance({"subcommand": "verify", **p}, {"z_expectation": VERIFY_TOL})
        xio.write_json(cfg.out, {"max_deviation": dev, "passed": dev <= VERIFY_TOL}, prov)
    if dev > VERIFY_TOL:
        raise VerificationFailure(f"deviation {dev:.3e} exceeds {VERIFY_TOL:.0e}")
    return EXIT_OK


COMMANDS = {"magnetize": cmd_magnetize, "quench": cmd_quench, "timeevo": cmd_timeevo,
            "spectrum": cmd_spectrum, "compile": cmd_compile, "verify": cmd_verify}


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.subcommand](cfg)


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"xycompress: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except VerificationFailure as exc:
        print(f"xycompress: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        print(f"xycompress: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
