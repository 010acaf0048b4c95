"""Command-line front end.

Subcommands::

    level         one level: energy, decay constant, exponent, label, status
    table         regenerate a published table with a diff against it
    wavefunction  sampled (r, F, G) of a level as CSV
    verify        run self-checks and print a JSON report
    sweep         one level across a range of one parameter, as CSV

Parameter file grammar (``--config FILE``)::

    # comment lines and blank lines are ignored
    key = value        # a trailing comment is allowed too

Keys are M, r0, V0, C, H, d0, mode and format, each at most once. d0 takes a
number or a preset name (usual, twelfth, table3). Unknown keys are errors.

Values are resolved as: command-line flag, then parameter file, then the
preset chosen with ``--preset`` (default table2: M = r0 = V0 = 10,
C = 10.1, H = 0, d0 = 0, spin mode).

Exit codes: 0 success, 1 usage or configuration error, 2 no bound state,
3 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .model import D0_PRESETS, PotentialParams, QuantumNumbers, SymmetryMode, exponents, resolve_d0
from .spectrum import BoundState, NoBoundState, StateStatus, solve_energy
from .verify import CHECKS, TABLE_TOLERANCE, regenerate_table, run_checks
from .wavefunctions import NormalizationDomainError, spinor

EXIT_OK, EXIT_CONFIG, EXIT_NO_STATE, EXIT_VERIFY = 0, 1, 2, 3

FORMATS = ("table", "csv", "json")
CONFIG_KEYS = ("M", "r0", "V0", "C", "H", "d0", "mode", "format")

PRESETS: dict[str, dict[str, object]] = {
    "table2": {"M": 10.0, "r0": 10.0, "V0": 10.0, "C": 10.1, "H": 0.0, "d0": "usual",
               "mode": "spin", "format": "table"},
    "table3": {"M": 10.0, "r0": 10.0, "V0": 10.0, "C": 10.1, "H": 0.0, "d0": "table3",
               "mode": "spin", "format": "table"},
}


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key."""


def fmt(x: float | None) -> str:
    """Ten significant digits, trailing zeros kept, independent of locale."""
    if x is None:
        return ""
    return format(float(x), "#.10g")


def _round10(x: float | None) -> float | None:
    return None if x is None else float(format(float(x), ".10g"))


# --- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    mode: SymmetryMode
    M: float
    r0: float
    V0: float
    C: float
    H: float
    d0: float
    format: str

    @property
    def params(self) -> PotentialParams:
        return PotentialParams(self.M, self.r0, self.V0, self.C, self.H)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse the flat ``key = value`` grammar into raw strings."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} (allowed: {', '.join(CONFIG_KEYS)})")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: key {key!r} given twice")
        if not value:
            raise ConfigError(f"{source}:{lineno}: key {key!r} has no value")
        out[key] = value
    return out


def _number(key: str, value) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: must be finite, got {value!r}")
    return x


def build_config(args: argparse.Namespace) -> RunConfig:
    merged: dict[str, object] = dict(PRESETS[args.preset])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config!r}: {exc.strerror}") from None
        merged.update(parse_config_text(text, args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    values = {k: _number(k, merged[k]) for k in ("M", "r0", "V0", "C", "H")}
    for key in ("M", "r0", "V0"):
        if not values[key] > 0:
            raise ConfigError(f"{key}: must be positive, got {merged[key]!r}")
    try:
        d0 = resolve_d0(merged["d0"] if isinstance(merged["d0"], str) else float(merged["d0"]))
    except ValueError as exc:
        raise ConfigError(f"d0: {exc}") from None
    try:
        mode = SymmetryMode.parse(str(merged["mode"]))
    except ValueError as exc:
        raise ConfigError(f"mode: {exc}") from None
    out_format = str(merged["format"]).strip().lower()
    if out_format not in FORMATS:
        raise ConfigError(f"format: expected one of {', '.join(FORMATS)}, got {merged['format']!r}")
    return RunConfig(mode=mode, d0=d0, format=out_format, **values)


def _quantum_numbers(n, kappa) -> QuantumNumbers:
    if n is None or int(n) != n or n < 0:
        raise ConfigError(f"n: must be a non-negative integer, got {n!r}")
    if kappa is None or int(kappa) != kappa or kappa == 0:
        raise ConfigError(f"kappa: must be a nonzero integer, got {kappa!r}")
    return QuantumNumbers(int(n), int(kappa))


# --- rendering --------------------------------------------------------------

def state_record(st: BoundState) -> dict:
    return {
        "energy": _round10(st.E),
        "lambda": _round10(st.lam),
        "exponent": _round10(st.exponent),
        "status": st.status.value,
        "mode": st.mode.value,
        "n": st.n,
        "kappa": st.kappa,
        "label": st.label(),
    }


def none_record(q: QuantumNumbers, mode: SymmetryMode, reason: str) -> dict:
    return {"energy": None, "lambda": None, "exponent": None, "status": "none",
            "mode": mode.value, "n": q.n, "kappa": q.kappa, "label": q.label(mode), "reason": reason}


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (fmt(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _plain(obj):
    # numpy scalars that slip into check details
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, default=_plain) + "\n"


def render_level(rec: dict, out_format: str) -> str:
    keys = ["energy", "lambda", "exponent", "status", "mode", "n", "kappa", "label"]
    if out_format == "json":
        return _json_text(rec)
    if out_format == "csv":
        return _csv_text(keys, [[rec[k] for k in keys]])
    exponent_name = "eta" if rec["mode"] == "spin" else "Lambda"
    lines = [
        f"state     {rec['label']}  (n={rec['n']}, kappa={rec['kappa']}, {rec['mode']})",
        f"status    {rec['status']}",
    ]
    if rec["status"] == "none":
        lines.append(f"reason    {rec['reason']}")
    else:
        lines += [
            f"E         {fmt(rec['energy'])} fm^-1",
            f"lambda    {fmt(rec['lambda'])}",
            f"{exponent_name:<10}{fmt(rec['exponent'])}",
        ]
        if rec["status"] == StateStatus.MIRROR.value:
            lines.append("note      mirror of the |A| partner; not an eigenvalue of this kappa")
        elif rec["status"] == StateStatus.IRREGULAR.value:
            lines.append("note      closed form is singular at the origin")
    return "\n".join(lines) + "\n"


# --- commands ---------------------------------------------------------------

def cmd_level(cfg: RunConfig, args) -> tuple[str, int]:
    q = _quantum_numbers(args.n, args.kappa)
    try:
        st = solve_energy(cfg.params, q, cfg.d0, cfg.mode)
    except NoBoundState as exc:
        return render_level(none_record(q, cfg.mode, str(exc)), cfg.format), EXIT_NO_STATE
    return render_level(state_record(st), cfg.format), EXIT_OK


def cmd_table(cfg: RunConfig, args) -> tuple[str, int]:
    table_id = args.table_id
    cells = regenerate_table(table_id)
    index = {(c.n, c.kappa, c.H): c for c in cells}
    matched = sum(c.matches for c in cells)
    if cfg.format == "json":
        recs = []
        for c in cells:
            recs.append({"energy": _round10(c.energy), "lambda": _round10(c.lam),
                         "exponent": _round10(c.exponent), "status": c.status, "mode": "spin",
                         "n": c.n, "kappa": c.kappa, "label": c.label, "H": c.H,
                         "reference": c.reference, "diff": _round10(c.diff), "within_tolerance": c.matches})
        return _json_text(recs), EXIT_OK
    if cfg.format == "csv":
        rows = [[c.n, c.l, c.kappa, c.H, c.label, c.status, c.energy, c.reference, c.diff,
                 "ok" if c.matches else "FLAG"] for c in cells]
        return _csv_text(["n", "l", "kappa", "H", "label", "status", "energy", "reference", "diff",
                          "flag"], rows), EXIT_OK

    def cell_text(key) -> tuple[str, float | None, bool]:
        c = index.get(key)
        if c is None:
            return "", None, True
        if c.energy is None:
            return "-", None, c.matches
        mark = {"mirror": "m", "irregular": "i"}.get(c.status, "")
        diff = abs(c.diff) if c.diff is not None else None
        return fmt(c.energy) + mark, diff, c.matches

    head = (f"{'n':>2} {'l':>2} | {'k<0':>6} {'E(H=0)':>14} {'E(H=0.5)':>14} | "
            f"{'k>0':>6} {'E(H=0)':>14} {'E(H=0.5)':>14} | {'max|diff|':>10} flag")
    lines = [f"# {table_id}: M=10 r0=10 V0=10 C=10.1 d0={fmt(resolve_d0(PRESETS[table_id]['d0']))}", head,
             "-" * len(head)]
    for l in range(4):
        for n in range(4):
            kneg, kpos = -(l + 1), l
            parts, diffs, ok = [], [], True
            for kappa in (kneg, kpos):
                for H in (0.0, 0.5):
                    text, diff, good = cell_text((n, kappa, H))
                    parts.append(text)
                    ok &= good
                    if diff is not None:
                        diffs.append(diff)
            label_neg = QuantumNumbers(n, kneg).label()
            label_pos = QuantumNumbers(n, kpos).label() if kpos else ""
            worst = fmt(max(diffs)) if diffs else ""
            lines.append(f"{n:>2} {l:>2} | {label_neg:>6} {parts[0]:>14} {parts[1]:>14} | "
                         f"{label_pos:>6} {parts[2]:>14} {parts[3]:>14} | {worst:>10} "
                         f"{'' if ok else '!'}")
    lines.append(f"# {matched}/{len(cells)} cells agree within {TABLE_TOLERANCE:g}; "
                 "'-' no bound state, m mirror level, i singular at origin, ! outside tolerance")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_wavefunction(cfg: RunConfig, args) -> tuple[str, int]:
    q = _quantum_numbers(args.n, args.kappa)
    try:
        st = solve_energy(cfg.params, q, cfg.d0, cfg.mode)
        if st.status is not StateStatus.BOUND:
            raise NoBoundState(f"no bound state ({st.label()} is a {st.status.value} level)")
        comps = spinor(st)
    except (NoBoundState, NormalizationDomainError) as exc:
        return f"# {exc}\n", EXIT_NO_STATE
    r_max = args.r_max if args.r_max is not None else 40.0 * cfg.r0
    if not (args.r_min > 0 and r_max > args.r_min):
        raise ConfigError(f"r-min/r-max: need 0 < r_min < r_max, got {args.r_min!r}, {r_max!r}")
    if args.points < 2:
        raise ConfigError(f"points: need at least 2, got {args.points!r}")
    if args.spacing == "log":
        r = np.geomspace(args.r_min, r_max, args.points)
    else:
        r = np.linspace(args.r_min, r_max, args.points)
    F, G = np.asarray(comps.F(r)), np.asarray(comps.G(r))
    header = (f"# state={st.label()} n={st.n} kappa={st.kappa} mode={st.mode.value} "
              f"status={st.status.value} E={fmt(st.E)} lambda={fmt(st.lam)} exponent={fmt(st.exponent)}\r\n"
              f"# M={fmt(cfg.M)} r0={fmt(cfg.r0)} V0={fmt(cfg.V0)} C={fmt(cfg.C)} H={fmt(cfg.H)} "
              f"d0={fmt(cfg.d0)} normalisation={fmt(comps.norm_const)} version={__version__}\r\n")
    rows = [[float(a), float(b), float(c)] for a, b, c in zip(r, F, G)]
    return header + _csv_text(["r", "F", "G"], rows), EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> tuple[str, int]:
    names = args.check or ["oracle"]
    if "all" in names:
        names = list(CHECKS)
    results = run_checks(dict.fromkeys(names))
    report = {"version": __version__, "passed": all(r.passed for r in results),
              "checks": [r.as_dict() for r in results]}
    return _json_text(report), EXIT_OK if report["passed"] else EXIT_VERIFY


SWEEPABLE = ("M", "r0", "V0", "C", "H", "d0")


def cmd_sweep(cfg: RunConfig, args) -> tuple[str, int]:
    q = _quantum_numbers(args.n, args.kappa)
    if args.steps < 1:
        raise ConfigError(f"steps: need at least 1, got {args.steps!r}")
    values = np.linspace(args.start, args.stop, args.steps + 1)
    rows = []
    for v in values:
        v = float(v)
        fields = {"M": cfg.M, "r0": cfg.r0, "V0": cfg.V0, "C": cfg.C, "H": cfg.H, "d0": cfg.d0}
        fields[args.param] = v
        try:
            p = PotentialParams(fields["M"], fields["r0"], fields["V0"], fields["C"], fields["H"])
        except ValueError as exc:
            raise ConfigError(f"{args.param}: {exc}") from None
        if fields["d0"] < 0:
            raise ConfigError(f"d0: must be non-negative, got {v!r}")
        try:
            st = solve_energy(p, q, fields["d0"], cfg.mode)
            rows.append([v, st.E, st.lam, st.exponent, st.status.value])
        except NoBoundState:
            rows.append([v, None, None, float(exponents(q, p.H, cfg.mode)), "none"])
    return _csv_text([args.param, "energy", "lambda", "exponent", "status"], rows), EXIT_OK


# --- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("physical parameters")
    g.add_argument("--config", metavar="FILE", help="flat key = value parameter file")
    g.add_argument("--preset", choices=sorted(PRESETS), default="table2",
                   help="base parameter set (default table2)")
    g.add_argument("--mode", help="spin or pseudospin")
    g.add_argument("--M", help="mass in fm^-1")
    g.add_argument("--r0", help="Hulthen range in fm")
    g.add_argument("--V0", help="Hulthen depth in fm^-1")
    g.add_argument("--C", help="spin or pseudospin constant in fm^-1")
    g.add_argument("--H", help="tensor strength")
    g.add_argument("--d0", help=f"centrifugal constant or preset ({', '.join(D0_PRESETS)})")
    g.add_argument("--format", help="table, csv or json")

    parser = _Parser(prog="hulthen-dirac", description="Dirac levels in a Hulthen well with a tensor term.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    def state_args(sp):
        sp.add_argument("--n", type=int, required=True, help="radial quantum number")
        sp.add_argument("--kappa", type=int, required=True, help="spin-orbit quantum number (nonzero)")

    state_args(add("level", "solve one level"))
    t = add("table", "regenerate a published table")
    t.add_argument("table_id", choices=("table2", "table3"))
    w = add("wavefunction", "sample (r, F, G) of a level as CSV")
    state_args(w)
    w.add_argument("--r-min", type=float, default=1e-4, help="first radius in fm (default 1e-4)")
    w.add_argument("--r-max", type=float, default=None, help="last radius in fm (default 40 r0)")
    w.add_argument("--points", type=int, default=2000)
    w.add_argument("--spacing", choices=("log", "linear"), default="log")
    v = add("verify", "run self-checks, JSON report")
    v.add_argument("--check", action="append", choices=sorted(CHECKS) + ["all"],
                   help="check to run (repeatable; default oracle)")
    s = add("sweep", "one level across a parameter range, as CSV")
    state_args(s)
    s.add_argument("--param", choices=SWEEPABLE, required=True)
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float, required=True)
    s.add_argument("--steps", type=int, default=10, help="number of intervals (default 10)")
    return parser


COMMANDS = {
    "level": cmd_level,
    "table": cmd_table,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        text, code = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
