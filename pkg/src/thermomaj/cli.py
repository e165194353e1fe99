"""Command-line front end.

Every subcommand reads a JSON problem file::

    {"gamma": [...]} or {"beta": b, "energies": [...]},
    "p": [...], "q": [...] (optional),
    "options": {"tol": 1e-9, "exact": false, "alpha_grid": [...], "a_grid": [...]}

Numbers may be given as JSON numbers or as strings such as ``"1/3"``.
Level indices are 1-based, logarithms natural. Exit status is 0 on success
(for ``check`` and ``protocol``: reachable), 1 for "not reachable" and 2 for
bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from .core import ThermalContext, as_dist, gibbs_distribution, lorenz_curve, thermomajorizes
from .dynamics import Trajectory, integrate_populations, schedule_from_protocol
from .entropy import MonotoneSpec, audit_trajectory, default_monotones
from .thermalization import ElementaryStep, Protocol
from .verifier import check_continuous, reachable_set

EXIT_OK, EXIT_UNREACHABLE, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


# -- parsing ---------------------------------------------------------------------


def _number(x):
    if isinstance(x, bool):
        raise InputError(f"expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise InputError(f"cannot parse number {x!r}") from None
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, int) for v in x):
        return Fraction(x[0], x[1])
    raise InputError(f"expected a number, got {x!r}")


def _vector(doc, key):
    v = doc.get(key)
    if not isinstance(v, list) or not v:
        raise InputError(f"{key!r} must be a non-empty list")
    return [_number(x) for x in v]


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None


def _grid(text):
    if text is None:
        return None
    if isinstance(text, list):
        return [float(_number(x)) for x in text]
    try:
        return [float(Fraction(x.strip())) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cannot parse grid {text!r}") from None


class Problem:
    """Parsed problem file with command-line overrides applied."""

    def __init__(self, doc, args):
        if not isinstance(doc, dict):
            raise InputError("problem file must hold a JSON object")
        opts = doc.get("options", {})
        if not isinstance(opts, dict):
            raise InputError("'options' must be an object")
        has_gamma = "gamma" in doc
        has_energies = "beta" in doc or "energies" in doc
        if has_gamma == has_energies:
            raise InputError("give exactly one of 'gamma' or 'beta' + 'energies'")
        tol = args.tol if args.tol is not None else opts.get("tol", 1e-9)
        exact = bool(args.exact or opts.get("exact", False))
        try:
            tol = float(_number(tol))
            if has_gamma:
                gamma = _vector(doc, "gamma")
            else:
                if "beta" not in doc or "energies" not in doc:
                    raise InputError("'beta' and 'energies' must be given together")
                gamma = gibbs_distribution(float(_number(doc["beta"])),
                                           [float(e) for e in _vector(doc, "energies")]).tolist()
            if not exact:
                gamma = [float(x) for x in gamma]
            self.ctx = ThermalContext(gamma, tol, "exact" if exact else "float")
            self.p = as_dist(_vector(doc, "p"), self.ctx)
            self.q = as_dist(_vector(doc, "q"), self.ctx) if "q" in doc else None
        except InputError:
            raise
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise InputError(str(e)) from None
        self.exact = exact
        self.alpha_grid = _grid(args.alpha_grid if args.alpha_grid is not None else opts.get("alpha_grid"))
        self.a_grid = _grid(args.a_grid if args.a_grid is not None else opts.get("a_grid"))

    def monotones(self):
        if self.alpha_grid is None and self.a_grid is None:
            return default_monotones()
        specs = [MonotoneSpec.renyi(a) for a in self.alpha_grid or ()]
        specs += [MonotoneSpec.sigma(a) for a in self.a_grid or ()]
        return specs


def _load_protocol(path, ctx):
    doc = _load_json(path)
    if isinstance(doc, dict):
        doc = doc.get("steps", doc.get("witness"))
    if not isinstance(doc, list):
        raise InputError("protocol file must be a list of steps or hold 'steps'/'witness'")
    steps = []
    try:
        for s in doc:
            if isinstance(s, dict):
                i, j, lam = s["i"], s["j"], s["lambda"]
            else:
                i, j, lam = s
            lam = _number(lam)
            if not ctx.exact:
                lam = float(lam)
            if int(i) > ctx.d or int(j) > ctx.d:
                raise InputError(f"step ({i},{j}) out of range for d={ctx.d}")
            steps.append(ElementaryStep(int(i), int(j), lam))
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed protocol step: {e}") from None
    return Protocol(tuple(steps))


def _load_trajectory(path, d):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    if not rows:
        raise InputError("empty trajectory file")
    header = [h.strip() for h in rows[0]]
    if header != ["t"] + [f"p{k}" for k in range(1, d + 1)]:
        raise InputError(f"trajectory header must be t,p1..p{d}")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)
    except ValueError as e:
        raise InputError(f"bad trajectory row: {e}") from None
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] != d + 1:
        raise InputError("trajectory has no rows or ragged rows")
    states = data[:, 1:]
    sums = states.sum(axis=1)
    # printed populations carry 12 significant digits, so allow for that before renormalizing
    if np.any(states < -1e-9) or np.any(np.abs(sums - 1) > 1e-9):
        raise InputError("trajectory rows are not probability distributions")
    return Trajectory(data[:, 0], np.clip(states, 0, None) / sums[:, None])


# -- formatting ------------------------------------------------------------------


def _fmt(x, exact=False):
    if exact and isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    return float(f"{float(x):.12g}")


def _csv_num(x):
    return f"{float(x):.12g}"


def _steps_doc(proto, exact):
    return [{"i": s.i, "j": s.j, "lambda": _fmt(s.lam, exact)} for s in proto]


# -- subcommands -----------------------------------------------------------------


def cmd_check(prob, args):
    if prob.q is None:
        raise InputError("'check' needs a target 'q'")
    dec = check_continuous(prob.p, prob.q, prob.ctx)
    doc = {
        "reachable": dec.reachable,
        "static_thermomajorization": thermomajorizes(prob.p, prob.q, prob.ctx),
        "witness": _steps_doc(dec.witness or (), prob.exact),
        "N": dec.crossings,
        "M": dec.partial,
    }
    return json.dumps(doc, indent=2) + "\n", EXIT_OK if dec.reachable else EXIT_UNREACHABLE


def cmd_protocol(prob, args):
    if prob.q is None:
        raise InputError("'protocol' needs a target 'q'")
    dec = check_continuous(prob.p, prob.q, prob.ctx)
    if not dec.reachable:
        return json.dumps({"steps": None}, indent=2) + "\n", EXIT_UNREACHABLE
    return json.dumps({"steps": _steps_doc(dec.witness, prob.exact)}, indent=2) + "\n", EXIT_OK


def cmd_reachable(prob, args):
    rs = reachable_set(prob.p, prob.ctx)
    buckets = []
    for o in rs.orderings():
        buckets.append({
            "ordering": list(o),
            "states": [[_fmt(x, prob.exact) for x in s] for s, _ in rs[o]],
            "protocols": [_steps_doc(h, prob.exact) for _, h in rs[o]],
        })
    return json.dumps({"buckets": buckets}, indent=2) + "\n", EXIT_OK


def _write_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_simulate(prob, args):
    if args.protocol is None:
        raise InputError("'simulate' needs a protocol file")
    proto = _load_protocol(args.protocol, prob.ctx)
    try:
        traj = integrate_populations(prob.p, schedule_from_protocol(proto), prob.ctx, method=args.method,
                                     samples_per_segment=args.samples_per_segment)
    except ValueError as e:
        raise InputError(str(e)) from None
    times, states = traj.times, traj.states
    if len(times) == 1:
        # an empty schedule still reports start and end
        times, states = np.repeat(times, 2), np.repeat(states, 2, axis=0)
    header = ["t"] + [f"p{k}" for k in range(1, prob.ctx.d + 1)]
    rows = [[_csv_num(t)] + [_csv_num(x) for x in s] for t, s in zip(times, states)]
    return _write_csv(header, rows), EXIT_OK


def cmd_entropy(prob, args):
    if args.trajectory is None:
        raise InputError("'entropy' needs a trajectory CSV")
    traj = _load_trajectory(args.trajectory, prob.ctx.d)
    try:
        report = audit_trajectory(traj, prob.ctx, prob.monotones())
    except ValueError as e:
        raise InputError(str(e)) from None
    labels = list(report.values)
    rows = [[_csv_num(t)] + [_csv_num(report.values[lb][k]) for lb in labels]
            for k, t in enumerate(traj.times)]
    out = _write_csv(["t"] + labels, rows)
    out += "# violations\n"
    out += _write_csv(["monotone", "t_start", "t_end", "decrease"],
                      [[v.monotone, _csv_num(v.t_start), _csv_num(v.t_end), _csv_num(v.decrease)]
                       for v in report.violations])
    return out, EXIT_OK


def cmd_lorenz(prob, args):
    def block(dist):
        c = lorenz_curve(dist, prob.ctx)
        return [[_csv_num(x), _csv_num(y)] for x, y in zip(c.x, c.y)]

    out = _write_csv(["x", "y"], block(prob.p))
    if prob.q is not None:
        out += "\n" + _write_csv(["x", "y"], block(prob.q))
    return out, EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "reachable": cmd_reachable,
    "protocol": cmd_protocol,
    "simulate": cmd_simulate,
    "entropy": cmd_entropy,
    "lorenz": cmd_lorenz,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermomaj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("problem", help="JSON problem file")
        if name == "simulate":
            sp.add_argument("protocol", nargs="?", help="JSON protocol file")
        if name == "entropy":
            sp.add_argument("trajectory", nargs="?", help="trajectory CSV (t,p1..pd)")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--exact", action="store_true")
        sp.add_argument("--alpha-grid", default=None, help="comma-separated Renyi orders")
        sp.add_argument("--a-grid", default=None, help="comma-separated shifts a in [0, 1]")
        sp.add_argument("--samples-per-segment", type=int, default=10)
        sp.add_argument("--method", choices=("analytic", "rk4"), default="analytic")
        sp.add_argument("--output", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        prob = Problem(_load_json(args.problem), args)
        text, status = COMMANDS[args.command](prob, args)
    except InputError as e:
        print(f"thermomaj {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
