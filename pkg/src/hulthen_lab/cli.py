"""Command line: ``hulthen-lab <spectrum|state|chain|verify> ...``.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 empty or
out-of-range result, 4 internal theory violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import darboux, hulthen
from .errors import ConvergenceError, HulthenError, NoSuchStateError, TheoryViolation
from .hulthen import PhysicalParams, ReducedParams
from .verify import Perturbation, run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_EMPTY = 3
EXIT_THEORY = 4

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: ReducedParams
    physical: PhysicalParams | None
    n: object  # int or "all"
    j: int
    tol: float
    arithmetic: str
    fmt: str
    samples: int
    span: float | None
    perturb: Perturbation


# -- formatting ----------------------------------------------------------------

def fmt_number(x) -> str:
    """17 significant digits; JSON and CSV both go through this."""
    return f"{float(x):.17g}"


def _num(x) -> float:
    return float(fmt_number(x))


def _csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_number(c) if isinstance(c, (float, int, Fraction)) and not isinstance(c, bool)
                    else c for c in row])
    return buf.getvalue()


# -- parsing -------------------------------------------------------------------

def _parse_value(text: str, rational: bool):
    if rational and _RATIONAL.fullmatch(text.strip()):
        return Fraction(text.strip())
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise InputError(f"not finite: {text!r}")
    return value


def _params(args) -> tuple[ReducedParams, PhysicalParams | None]:
    physical_given = args.mu is not None or args.delta is not None
    if (args.v is None) == (not physical_given):
        raise InputError("give either --v or both --mu and --delta")
    if physical_given and (args.mu is None or args.delta is None):
        raise InputError("--mu and --delta go together")
    raw = [args.q] + ([args.v] if args.v is not None else [args.mu, args.delta])
    values = [_parse_value(s, args.rational) for s in raw]
    # one decimal input puts the whole run in float mode
    if not all(isinstance(x, Fraction) for x in values):
        values = [float(x) for x in values]
    q = values[0]
    if args.v is not None:
        return ReducedParams(values[1], q), None
    phys = PhysicalParams(values[1], values[2], q)
    return hulthen.to_reduced(phys), phys


def _state_index(text: str):
    if text == "all":
        return "all"
    try:
        n = int(text)
    except ValueError:
        raise InputError(f"--n must be a non-negative integer or 'all', got {text!r}") from None
    if n < 0:
        raise InputError("--n must be >= 0")
    return n


def build_config(args) -> RunConfig:
    p, phys = _params(args)
    if not args.tol > 0:
        raise InputError("--tol must be > 0")
    if args.j < 0:
        raise InputError("--j must be >= 0")
    if args.samples < 2:
        raise InputError("--samples must be >= 2")
    if args.span is not None and not args.span > 0:
        raise InputError("--span must be > 0")
    return RunConfig(
        params=p,
        physical=phys,
        n=_state_index(args.n),
        j=args.j,
        tol=args.tol,
        arithmetic="rational" if p.exact else "float",
        fmt=args.format,
        samples=args.samples,
        span=args.span,
        perturb=Perturbation(args.perturb_energy, args.perturb_norm),
    )


# -- commands ------------------------------------------------------------------

def _params_record(cfg: RunConfig) -> dict:
    p = cfg.params
    out = {"v": _num(p.v), "q": _num(p.q), "arithmetic": cfg.arithmetic}
    if cfg.physical is not None:
        out.update(mu=_num(cfg.physical.mu), delta=_num(cfg.physical.delta))
    if p.exact:
        out.update(v_exact=str(p.v), q_exact=str(p.q))
    return out


def cmd_spectrum(cfg: RunConfig) -> tuple[int, str]:
    p = cfg.params
    states = []
    for n, e in enumerate(hulthen.spectrum(p)):
        row = {"n": n, "energy_reduced": _num(e)}
        if cfg.physical is not None:
            row["energy_physical"] = _num(hulthen.energy_to_physical(e, cfg.physical.delta))
        if p.exact:
            row["energy_reduced_exact"] = str(e)
        states.append(row)
    code = EXIT_OK if states else EXIT_EMPTY
    if cfg.fmt == "csv":
        header = ["n", "energy_reduced"] + (["energy_physical"] if cfg.physical else [])
        return code, _csv(header, [[s[k] for k in header] for s in states])
    return code, json.dumps({"params": _params_record(cfg), "states": states}, indent=2)


def _indices(cfg: RunConfig, lowest: int = 0) -> list:
    count = hulthen.bound_state_count(cfg.params)
    if cfg.n == "all":
        if count <= lowest:
            raise NoSuchStateError(f"no states with n >= {lowest} ({count} bound states)")
        return list(range(lowest, count))
    if not lowest <= cfg.n < count:
        raise NoSuchStateError(f"n={cfg.n} outside {lowest}..{count - 1}")
    return [cfg.n]


def state_record(cfg: RunConfig, n: int) -> dict:
    p = cfg.params
    psi = hulthen.eigenfunction(p, n)
    norm = hulthen.normalization_constant(p, n)
    kappa = float(hulthen.decay_rate(p, n))
    span = cfg.span if cfg.span is not None else 20.0 / kappa
    r = math.log(float(p.q)) + np.linspace(0.0, span, cfg.samples)
    values = norm * np.asarray(psi(r))
    e = hulthen.energy(p, n)
    rec = {
        "n": n,
        "energy": _num(e),
        "norm_constant": _num(norm),
        "exppoly": psi.to_dict(),
        "samples": [{"r": _num(x), "value": _num(y)} for x, y in zip(r, values)],
    }
    if p.exact:
        rec["energy_exact"] = str(e)
    return rec


def _emit_states(cfg: RunConfig, records: list) -> str:
    if cfg.fmt == "csv":
        rows = [[rec["n"], rec["energy"], rec["norm_constant"], s["r"], s["value"]]
                for rec in records for s in rec["samples"]]
        return _csv(["n", "energy", "norm_constant", "r", "value"], rows)
    body = records[0] if cfg.n != "all" else {"params": _params_record(cfg), "states": records}
    return json.dumps(body, indent=2)


def cmd_state(cfg: RunConfig) -> tuple[int, str]:
    return EXIT_OK, _emit_states(cfg, [state_record(cfg, n) for n in _indices(cfg)])


def chain_record(cfg: RunConfig, n: int) -> dict:
    p, j = cfg.params, cfg.j
    wr = darboux.crum_chain(p, j, n)
    closed = darboux.closed_form_chain_state(p, j, n)
    readings = darboux.alternative_norm_readings(p, j, n)
    return {
        "j": j,
        "n": n,
        "barrier": _num(darboux.chain_potential(p, j).barrier_coefficient),
        "energy": _num(hulthen.energy(p, n)),
        "routes": {"wronskian": wr.psi.to_dict(), "closed_form": closed.psi.to_dict()},
        "proportionality": _num(closed.proportionality),
        "norm_eq50": _num(darboux.chain_norm(p, j, n)),
        "norm_eq82": {"reading_a": _num(readings["reading_a"]),
                      "reading_b": _num(readings["reading_b"])},
    }


def cmd_chain(cfg: RunConfig) -> tuple[int, str]:
    if cfg.j == 0:
        return cmd_state(cfg)
    records = [chain_record(cfg, n) for n in _indices(cfg, lowest=cfg.j)]
    if cfg.fmt == "csv":
        header = ["j", "n", "barrier", "energy", "proportionality", "norm_eq50",
                  "norm_eq82_reading_a", "norm_eq82_reading_b"]
        rows = [[r["j"], r["n"], r["barrier"], r["energy"], r["proportionality"], r["norm_eq50"],
                 r["norm_eq82"]["reading_a"], r["norm_eq82"]["reading_b"]] for r in records]
        return EXIT_OK, _csv(header, rows)
    body = records[0] if cfg.n != "all" else {"params": _params_record(cfg), "chains": records}
    return EXIT_OK, json.dumps(body, indent=2)


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    report = run_verification(cfg.params, cfg.tol, cfg.perturb)
    if not report.checks:
        code = EXIT_EMPTY
    else:
        code = EXIT_OK if report.passed else EXIT_VERIFY_FAILED
    if cfg.fmt == "csv":
        header = ["name", "target_ref", "computed", "expected", "tolerance", "passed"]
        rows = [[c.name, c.target_ref, c.computed, c.expected, c.tolerance, str(c.passed).lower()]
                for c in report.checks]
        return code, _csv(header, rows)
    body = report.to_dict()
    body["params"] = {**_params_record(cfg), "bound_states": report.params["bound_states"]}
    for c in body["checks"]:
        for key in ("computed", "expected", "tolerance"):
            c[key] = _num(c[key])
    return code, json.dumps(body, indent=2)


COMMANDS = {"spectrum": cmd_spectrum, "state": cmd_state, "chain": cmd_chain, "verify": cmd_verify}


# -- entry point ---------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--v", help="reduced coupling v = 2 mu / delta^2")
    common.add_argument("--mu", help="physical coupling (with --delta)")
    common.add_argument("--delta", help="screening parameter (with --mu)")
    common.add_argument("--q", required=True, help="deformation parameter q > 0")
    common.add_argument("--n", default="0", help="state index or 'all' (default 0)")
    common.add_argument("--j", type=int, default=0, help="chain depth (default 0)")
    common.add_argument("--tol", type=float, default=1e-8, help="quadrature tolerance (default 1e-8)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--rational", action="store_true",
                        help="exact arithmetic when every input is an integer or p/q")
    common.add_argument("--samples", type=int, default=101, help="grid points for state samples")
    common.add_argument("--span", type=float, default=None,
                        help="sample grid length past ln q (default 20/kappa_n)")
    # harness self-test hooks: corrupt closed forms by a relative amount
    common.add_argument("--perturb-energy", type=float, default=0.0, help=argparse.SUPPRESS)
    common.add_argument("--perturb-norm", type=float, default=0.0, help=argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="hulthen-lab",
                                     description="Deformed Hulthen potential: spectra, states, chains.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(argv: list | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        code, text = COMMANDS[args.command](cfg)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except NoSuchStateError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_EMPTY
    except TheoryViolation as exc:
        print(f"theory violation: {exc}", file=err)
        return EXIT_THEORY
    except ConvergenceError as exc:
        print(f"numerical oracle failed: {exc}", file=err)
        return EXIT_VERIFY_FAILED
    except HulthenError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    print(text, file=out, end="" if text.endswith("\n") else "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
