"""Command-line front end: rate-region sweeps, verification suites, Monte Carlo runs.

Subcommands
-----------
``sweep``   evaluate the feasibility/rate region on an (epsilon, lambda_t)
            grid and write one CSV row per cell (row-major: epsilon outer,
            lambda_t inner).
``rate``    evaluate a single (epsilon, lambda_t) point and print the
            feasibility report as ``key = value`` lines.
``mc``      run one Monte Carlo estimator and emit a single JSON object.
``verify``  run the analytic-versus-oracle check suites and report
            pass/fail per invariant.

Exit codes: 0 success, 1 configuration error, 2 I/O error,
3 verification failure.

Configuration files
-------------------
Flat ``key = value`` text; ``#`` starts a comment; keys mirror the
parameter field names below and flags override file values.  Example::

    # channel (linear power units)
    alpha_w_sq = 0.1
    sigma_w_sq = 0.1
    h_w = 1+0j          # realized fading gain, python complex literal
    # operating point
    lambda_a = 20.0
    r_a = 3.51          # bits/channel use; must stay below link capacity
    delta_1 = 0.3162
    epsilon = 0.1
    lambda_t = 0.3

Unset values fall back to a representative operating point (0.1 losses,
0.1 noise powers, unit gains, lambda_a = 20) with ``r_a`` defaulting to
80% of the link capacity.

CSV schema (``sweep``)
----------------------
Fixed column order; rates in bits/channel use, powers/thresholds in
linear (watt) units::

    epsilon,lambda_t,feasible,failing_condition,r_t_tin_bpcu,r_t_ic_bpcu,
    gamma_w,tau_eps_w,delta_1_gap

``feasible`` is 1/0; ``failing_condition`` is empty for feasible cells
and otherwise the first failing condition in the order pilot_covert,
blind_comm, no_disruption, eve_ic.  Infeasible cells report zero rates so
plots can distinguish "zero rate" from "infeasible".  Output bytes depend
only on the grid, parameters, and seed, never on ``--threads``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (AttackParams, ChannelParams, ParameterError,
                      SystemConfig, link_capacity)
from .detection import classify_regime, solve_sqrt_law_coefficient, tau_eps
from .montecarlo import (McConfig, McTarget, mc_comm_error_probs,
                         mc_estimator_error, mc_pilot_kl, mc_sqrt_law)
from .rates import attack_feasibility
from . import verification

_MC_TARGETS = {"pilot-kl": McTarget.PILOT_KL,
               "comm-detection": McTarget.COMM_DETECTION,
               "estimator": McTarget.ESTIMATOR_ERROR,
               "sqrtlaw": McTarget.SQRT_LAW}

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_VERIFY = 3

CSV_HEADER = ("epsilon,lambda_t,feasible,failing_condition,"
              "r_t_tin_bpcu,r_t_ic_bpcu,gamma_w,tau_eps_w,delta_1_gap")

# flag/config keys -> parser; h_* are python complex literals
_PARAM_PARSERS = {
    "alpha_w_sq": float, "alpha_e_sq": float,
    "sigma_w_sq": float, "sigma_e_sq": float, "sigma_h_sq": float,
    "h_w": complex, "h_e": complex,
    "lambda_a": float, "r_a": float, "delta_1": float, "delta_2": float,
    "pilot_len": int, "block_len": int,
    "epsilon": float, "lambda_t": float,
}

_DEFAULTS = {
    "alpha_w_sq": 0.1, "alpha_e_sq": 0.1,
    "sigma_w_sq": 0.1, "sigma_e_sq": 0.1, "sigma_h_sq": 1.0,
    "h_w": 1 + 0j, "h_e": 1 + 0j,
    "lambda_a": 20.0, "r_a": None,   # None -> 80% of link capacity
    "delta_1": 1 / math.sqrt(10), "delta_2": 0.1,
    "pilot_len": 64, "block_len": 10_000,
    "epsilon": 0.1, "lambda_t": 0.3,
}


@dataclass(frozen=True)
class SweepSpec:
    """Grid specification for the rate-region sweep."""

    eps_min: float
    eps_max: float
    eps_steps: int
    lt_min: float
    lt_max: float
    lt_steps: int
    output_path: str

    def __post_init__(self):
        if self.eps_steps < 2 or self.lt_steps < 2:
            raise ParameterError("grids need at least 2 steps")
        if not (self.eps_min < self.eps_max and self.lt_min < self.lt_max):
            raise ParameterError("grid min must be below max")
        if self.eps_min < 0 or self.lt_min <= 0:
            raise ParameterError("epsilon may start at 0; lambda_t must be > 0")


def _fmt(x: float) -> str:
    """Shortest exact decimal for a float (round-trip stable)."""
    return repr(float(x))


def parse_config_file(path: str) -> dict:
    """Read a flat key = value file into parsed parameter values."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _PARAM_PARSERS:
                raise ParameterError(f"{path}:{lineno}: unknown key '{key}'")
            try:
                values[key] = _PARAM_PARSERS[key](val)
            except ValueError as exc:
                raise ParameterError(f"{path}:{lineno}: bad value for "
                                     f"'{key}': {exc}") from None
    return values


def resolve_params(args: argparse.Namespace) -> dict:
    """Defaults, overridden by config file, overridden by explicit flags."""
    values = dict(_DEFAULTS)
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for key in _PARAM_PARSERS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def build_scenario(values: dict) -> tuple[ChannelParams, SystemConfig, AttackParams]:
    channel = ChannelParams(
        alpha_w_sq=values["alpha_w_sq"], alpha_e_sq=values["alpha_e_sq"],
        sigma_w_sq=values["sigma_w_sq"], sigma_e_sq=values["sigma_e_sq"],
        sigma_h_sq=values["sigma_h_sq"], h_w=values["h_w"], h_e=values["h_e"])
    r_a = values["r_a"]
    if r_a is None:
        r_a = 0.8 * link_capacity(channel, values["lambda_a"])
    config = SystemConfig.create(
        channel, lambda_a=values["lambda_a"], r_a=r_a,
        delta_1=values["delta_1"], delta_2=values["delta_2"],
        pilot_len=values["pilot_len"], block_len=values["block_len"])
    attack = AttackParams(epsilon=values["epsilon"], lambda_t=values["lambda_t"])
    return channel, config, attack


def _first_failing(report) -> str:
    if not report.cond_pilot_covert:
        return "pilot_covert"
    if not report.cond_blind_comm:
        return "blind_comm"
    if not report.cond_no_disruption:
        return "no_disruption"
    if not report.cond_eve_ic:
        return "eve_ic"
    return ""


def sweep_cell_line(channel: ChannelParams, config: SystemConfig,
                    eps: float, lt: float) -> str:
    attack = AttackParams(eps, lt)
    rep = attack_feasibility(channel, attack, config)
    cls = classify_regime(channel, attack, config)
    failing = "" if rep.feasible else _first_failing(rep)
    tin, ic = (rep.r_t_tin, rep.r_t_ic) if rep.feasible else (0.0, 0.0)
    return ",".join([
        _fmt(eps), _fmt(lt), "1" if rep.feasible else "0", failing,
        _fmt(tin), _fmt(ic), _fmt(rep.gamma_w), _fmt(tau_eps(channel, attack)),
        _fmt(cls.delta_1_gap),
    ])


def run_sweep(channel: ChannelParams, config: SystemConfig, spec: SweepSpec,
              threads: int = 1) -> list[str]:
    """All CSV lines in row-major order, independent of evaluation order."""
    eps_grid = np.linspace(spec.eps_min, spec.eps_max, spec.eps_steps)
    lt_grid = np.linspace(spec.lt_min, spec.lt_max, spec.lt_steps)

    def row(eps: float) -> list[str]:
        return [sweep_cell_line(channel, config, float(eps), float(lt))
                for lt in lt_grid]

    if threads <= 1:
        rows = [row(e) for e in eps_grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, eps_grid))
    return [CSV_HEADER] + [line for block in rows for line in block]


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_sweep(args: argparse.Namespace) -> int:
    values = resolve_params(args)
    channel, config, _ = build_scenario(values)
    spec = SweepSpec(args.eps_min, args.eps_max, args.eps_steps,
                     args.lt_min, args.lt_max, args.lt_steps,
                     output_path=args.out)
    lines = run_sweep(channel, config, spec, threads=args.threads)
    _write_text(spec.output_path, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_rate(args: argparse.Namespace) -> int:
    values = resolve_params(args)
    channel, config, attack = build_scenario(values)
    rep = attack_feasibility(channel, attack, config)
    cls = classify_regime(channel, attack, config)
    lines = [
        f"epsilon = {_fmt(attack.epsilon)}",
        f"lambda_t = {_fmt(attack.lambda_t)}",
        f"feasible = {'true' if rep.feasible else 'false'}",
        f"cond_pilot_covert = {'true' if rep.cond_pilot_covert else 'false'}",
        f"cond_blind_comm = {'true' if rep.cond_blind_comm else 'false'}",
        f"cond_no_disruption = {'true' if rep.cond_no_disruption else 'false'}",
        f"cond_eve_ic = {'true' if rep.cond_eve_ic else 'false'}",
        f"gamma_w = {_fmt(rep.gamma_w)}",
        f"r_t_tin_bpcu = {_fmt(rep.r_t_tin)}",
        f"r_t_ic_bpcu = {_fmt(rep.r_t_ic)}",
        f"tau_eps_w = {_fmt(tau_eps(channel, attack))}",
        f"regime = {cls.regime.value}",
        f"delta_1_gap = {_fmt(cls.delta_1_gap)}",
    ]
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _mc_payload(args: argparse.Namespace) -> dict:
    values = resolve_params(args)
    channel, config, attack = build_scenario(values)
    mc = McConfig(trials=args.trials, base_seed=args.seed,
                  n=values["block_len"], l=values["pilot_len"],
                  target=_MC_TARGETS[args.target])
    params = {"epsilon": attack.epsilon, "lambda_t": attack.lambda_t,
              "n": values["block_len"], "l": values["pilot_len"]}
    out = {"target": args.target, "trials": args.trials, "seed": args.seed,
           "params": params}

    if args.target == "pilot-kl":
        res = mc_pilot_kl(channel, attack, values["pilot_len"], mc,
                          threads=args.threads)
        out.update(point_estimate=res.point_estimate, std_error=res.std_error,
                   analytic_reference=res.analytic_reference)
    elif args.target == "comm-detection":
        probs, (rf, rm) = mc_comm_error_probs(channel, attack, config, mc,
                                              threads=args.threads)
        out.update(point_estimate=probs.sum, p_f=probs.p_f, p_m=probs.p_m,
                   std_error=math.hypot(rf.std_error, rm.std_error),
                   analytic_reference=(rf.analytic_reference
                                       + rm.analytic_reference))
    elif args.target == "estimator":
        l_grid = [2 ** k for k in range(4, 13)]
        rows = mc_estimator_error(channel, attack, l_grid, mc)
        logl = np.log([r.l for r in rows])
        slope = float(np.polyfit(logl, np.log([r.mse_scaled for r in rows]), 1)[0])
        out.update(point_estimate=slope, std_error=float("nan"),
                   analytic_reference=-1.0,
                   table=[{"l": r.l, "mse_clean": r.mse_clean,
                           "mse_scaled": r.mse_scaled} for r in rows])
    elif args.target == "sqrtlaw":
        c = args.c if args.c is not None \
            else solve_sqrt_law_coefficient(channel, 0.1)
        n_grid = [10_000, 100_000]
        rows = mc_sqrt_law(channel, config, c, n_grid, mc,
                           threads=args.threads)
        last = rows[-1]
        out["params"]["c"] = c
        out.update(point_estimate=last.one_minus_sum, std_error=last.std_error,
                   analytic_reference=last.bound_limit,
                   table=[{"n": r.n, "lambda_t": r.lambda_t,
                           "one_minus_sum": r.one_minus_sum,
                           "std_error": r.std_error, "bound": r.bound,
                           "bound_limit": r.bound_limit} for r in rows])
    else:  # pragma: no cover - argparse restricts choices
        raise ParameterError(f"unknown mc target {args.target}")
    return out


def cmd_mc(args: argparse.Namespace) -> int:
    payload = _mc_payload(args)
    _write_text(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    suites = (list(verification.SUITES) if args.suite == "all"
              else [args.suite])
    first_failure = None
    for name in suites:
        for check in verification.SUITES[name](seed=args.seed):
            status = "ok  " if check.passed else "FAIL"
            print(f"[{status}] {name}/{check.name}: {check.detail}")
            if not check.passed and first_failure is None:
                first_failure = f"{name}/{check.name}"
    if first_failure is not None:
        print(f"verification failed: first failing invariant {first_failure}")
        return EXIT_VERIFY
    print("all invariants hold")
    return EXIT_OK


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    for key, parser in _PARAM_PARSERS.items():
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=parser,
                       default=None, help=f"override {key}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="key = value parameter file")
    p.add_argument("--seed", type=int, default=0, help="root RNG seed")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; output is identical for any value")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertpilot",
        description="covert pilot-scaling attack analysis",
        epilog="see module docstring / README for the config-file grammar "
               "and the CSV schema")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="feasibility/rate region CSV over an "
                                     "(epsilon, lambda_t) grid",
                       description=f"CSV columns: {CSV_HEADER}")
    _add_common(p)
    _add_param_flags(p)
    p.add_argument("--eps-min", type=float, default=0.0)
    p.add_argument("--eps-max", type=float, default=0.2475)
    p.add_argument("--eps-steps", type=int, default=100)
    p.add_argument("--lt-min", type=float, default=0.01)
    p.add_argument("--lt-max", type=float, default=1.0)
    p.add_argument("--lt-steps", type=int, default=100)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rate", help="feasibility report for one point")
    _add_common(p)
    _add_param_flags(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("mc", help="Monte Carlo estimate as a JSON object")
    _add_common(p)
    _add_param_flags(p)
    p.add_argument("--target", required=True,
                   choices=["pilot-kl", "comm-detection", "estimator",
                            "sqrtlaw"])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--c", type=float, default=None,
                   help="sqrt-law coefficient (default: bound limit 0.1)")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", help="analytic-vs-oracle invariant suites")
    p.add_argument("--suite", default="all",
                   choices=["kl", "mmse", "threshold", "regimes", "sqrtlaw",
                            "all"])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Entry point returning the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def run() -> None:  # console-script wrapper
    sys.exit(main())


if __name__ == "__main__":
    run()
