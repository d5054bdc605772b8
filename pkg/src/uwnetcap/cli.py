"""Command-line front end: tables behind the figures and the solvers.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 a simulated
feasible schedule broke the sum inequality or beat its bound.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import bands, bounds, channel, netsim, waterfill
from .errors import DerivationViolation, DomainError, NumericalError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VIOLATION = 0, 2, 3, 4

REFERENCE_A_VALUES = [1.0, 10.0, 100.0, 1000.0, 10000.0]


class InputError(DomainError):
    pass


def fmt(x):
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def write_table(header, rows, fmt_name, stream):
    if fmt_name == "json":
        for row in rows:
            stream.write(json.dumps(_jsonable(dict(zip(header, row)))) + "\n")
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment, repeated keys accumulate."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out.setdefault(key.replace("-", "_"), []).append(value)
    return out


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--alpha", type=float)
    common.add_argument("--shipping", type=float, default=0.5)
    common.add_argument("--wind", type=float, default=0.0)
    common.add_argument("--f-lo", type=_positive_float, default=0.1)
    common.add_argument("--f-hi", type=_positive_float, default=200.0)

    parser = argparse.ArgumentParser(prog="uwnetcap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("absorption", parents=[common], help="Thorp absorption over a frequency grid")
    p.add_argument("--f-points", type=int, default=512)
    p.add_argument("--f", type=_positive_float, action="append", dest="f_values", help="explicit frequency, kHz")

    p = sub.add_parser("noise", parents=[common], help="ambient noise psd over a frequency grid")
    p.add_argument("--f-points", type=int, default=512)
    p.add_argument("--f", type=_positive_float, action="append", dest="f_values")

    p = sub.add_parser("fc-curve", parents=[common], help="optimal center frequency against distance")
    p.add_argument("--distance", type=_positive_float, action="append", dest="distances", help="km")
    p.add_argument("--l-min", type=_positive_float, default=0.1)
    p.add_argument("--l-max", type=_positive_float, default=100.0)
    p.add_argument("--l-points", type=int, default=64)

    p = sub.add_parser("waterfill", parents=[common], help="waterfilling solution for one link")
    p.add_argument("--distance", type=_positive_float, required=False, dest="distance")
    target = p.add_mutually_exclusive_group()
    target.add_argument("--capacity", type=float, help="target rate, bps")
    target.add_argument("--power", type=float, help="power budget")

    for name, helptext in (("bound", "per-pair and transport bounds against n"), ("simulate", "seeded network runs")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--beta", type=_positive_float, default=2.0)
        p.add_argument("--w-rate", type=_positive_float, default=1.0)
        p.add_argument("--a-f", type=float, action="append", dest="a_f")
        p.add_argument("--n-min", type=int)
        p.add_argument("--n-max", type=int)
        p.add_argument("--n-points", type=int, default=61)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--slots", type=int, default=20)
    p.add_argument("--delta-f", type=_positive_float, help="band width, kHz; enables distance-based band assignment")
    p.add_argument("--mode", choices=netsim.DEPLOY_MODES, default="uniform-random")
    p.add_argument("--workers", type=int, default=1)
    return parser


_LIST_KEYS = {"a_f", "f_values", "distances"}


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        for a in sub._actions:
            for opt in a.option_strings:
                known.setdefault(opt.lstrip("-").replace("-", "_"), a)
        defaults = {}
        for key, values in cfg.items():
            if key not in known or key == "config":
                raise InputError(f"unknown config key {key!r} for {args.command}")
            action = known[key]
            conv = action.type or str
            try:
                vals = [conv(v) for v in values]
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"bad value for {key}: {exc}") from None
            dest = action.dest
            if dest in _LIST_KEYS:
                defaults.setdefault(dest, []).extend(vals)
            else:
                defaults[dest] = vals[-1]
        # append actions extend a list default instead of replacing it
        lists = {k: defaults.pop(k) for k in _LIST_KEYS & set(defaults)}
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
        for key, vals in lists.items():
            if getattr(args, key) is None:
                setattr(args, key, vals)
    return args


def _params(args, alpha_default):
    alpha = args.alpha if args.alpha is not None else alpha_default
    return channel.ChannelParams(alpha=alpha, shipping=args.shipping, wind=args.wind, f_lo=args.f_lo, f_hi=args.f_hi)


def _f_grid(args):
    if args.f_values:
        return np.array(args.f_values, dtype=float)
    if args.f_points < 1:
        raise InputError("--f-points must be >= 1")
    return np.geomspace(args.f_lo, args.f_hi, args.f_points)


def cmd_absorption(args, out):
    f = _f_grid(args)
    rows = zip(f, np.atleast_1d(channel.absorption_db_per_km(f)), np.atleast_1d(channel.absorption_linear(f)))
    write_table(["f_khz", "a_db_per_km", "a_linear"], list(rows), args.format or "csv", out)


def cmd_noise(args, out):
    params = _params(args, 1.5)
    f = _f_grid(args)
    rows = zip(f, np.atleast_1d(channel.noise_psd_db(f, params)), np.atleast_1d(channel.noise_psd(f, params)))
    write_table(["f_khz", "noise_db", "noise_psd"], list(rows), args.format or "csv", out)


def cmd_fc_curve(args, out):
    params = _params(args, 1.5)
    if args.distances:
        ls = sorted(args.distances)
    else:
        if args.l_points < 1 or not args.l_min <= args.l_max:
            raise InputError("need l_points >= 1 and l_min <= l_max")
        ls = np.geomspace(args.l_min, args.l_max, args.l_points)
    rows = []
    for l in ls:
        info = channel.center_frequency_info(l, params)
        rows.append((float(l), info.f_c, info.an_min))
    write_table(["l_km", "f_c_khz", "an_min"], rows, args.format or "csv", out)


def cmd_waterfill(args, out):
    params = _params(args, 1.5)
    if args.distance is None:
        raise InputError("waterfill needs --distance")
    if args.power is not None:
        sol = waterfill.solve_for_power(args.distance, args.power, params)
    else:
        sol = waterfill.solve_for_capacity(args.distance, args.capacity if args.capacity is not None else 0.0, params)
    rec = sol.to_dict()
    rec["f_c_khz"] = channel.optimal_center_frequency(args.distance, params)
    if (args.format or "json") == "json":
        out.write(json.dumps(_jsonable(rec)) + "\n")
    else:
        rec["bands"] = ";".join(f"{fmt(a)}:{fmt(b)}" for a, b in rec["bands"])
        write_table(list(rec), [list(rec.values())], "csv", out)


def _n_grid(args, lo_default, hi_default):
    n_min = args.n_min if args.n_min is not None else lo_default
    n_max = args.n_max if args.n_max is not None else hi_default
    if not 1 <= n_min <= n_max:
        raise InputError("need 1 <= n_min <= n_max")
    return n_min, n_max


def cmd_bound(args, out):
    alpha = args.alpha if args.alpha is not None else 1.0
    a_values = args.a_f or REFERENCE_A_VALUES
    if min(a_values) < 1:
        raise InputError("--a-f values must be >= 1")
    n_min, n_max = _n_grid(args, 1, 10**6)
    if args.n_points < 1:
        raise InputError("--n-points must be >= 1")
    n_values = sorted({int(round(v)) for v in np.geomspace(n_min, n_max, args.n_points)})
    table = bounds.bound_curve(a_values, n_values, alpha=alpha, beta=args.beta, w_rate=args.w_rate)
    rows = [(r.a_f, int(r.n), r.per_pair_bound, r.transport_bound, r.n ** (-1.0 / alpha)) for r in table]
    write_table(["a_f", "n", "per_pair_bound", "transport_bound", "n_pow_neg_inv_alpha"], rows, args.format or "csv", out)


def _simulate_one(job):
    config, params = job
    return netsim.run_simulation(config, params)


def simulation_configs(args):
    alpha = args.alpha if args.alpha is not None else 1.0
    params = _params(args, alpha)
    n_min, n_max = _n_grid(args, 4, 64)
    if n_min < 2:
        raise InputError("simulate needs n_min >= 2")
    if args.runs < 1 or args.slots < 1:
        raise InputError("--runs and --slots must be >= 1")
    a_values = args.a_f or [None]
    if args.delta_f is not None:
        plan = bands.make_plan(args.f_lo, args.f_hi, args.delta_f)
    else:
        plan = bands.make_plan(10.0, 12.0, 2.0)
    jobs = []
    for k in range(args.runs):
        seed = args.seed + k
        n = int(np.random.default_rng([seed, 1]).integers(n_min, n_max + 1))
        cfg = netsim.SimConfig(
            n=n, alpha=alpha, beta=args.beta, plan=plan, slots=args.slots, seed=seed,
            w_rate=args.w_rate, a_f=a_values[k % len(a_values)], mode=args.mode,
            multiband=args.delta_f is not None,
        )
        jobs.append((cfg, params))
    return jobs


def cmd_simulate(args, out):
    jobs = simulation_configs(args)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            records = list(pool.map(_simulate_one, jobs))
    else:
        records = [_simulate_one(j) for j in jobs]
    header = ["seed", "n", "alpha", "beta", "a_f", "margin_min", "transport_achieved", "transport_bound"]
    if (args.format or "json") == "json":
        for rec in records:
            out.write(json.dumps(_jsonable({k: rec[k] for k in header})) + "\n")
    else:
        write_table(header, [[rec[k] for k in header] for rec in records], "csv", out)
    bad = [r for r in records if r["margin_min"] < 0 or r["transport_achieved"] > r["transport_bound"]]
    if bad:
        raise DerivationViolation(f"{len(bad)} run(s) broke the bound, first seed {bad[0]['seed']}")


COMMANDS = {
    "absorption": cmd_absorption,
    "noise": cmd_noise,
    "fc-curve": cmd_fc_curve,
    "waterfill": cmd_waterfill,
    "bound": cmd_bound,
    "simulate": cmd_simulate,
}


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    buf = io.StringIO()
    try:
        COMMANDS[args.command](args, buf)
        code = EXIT_OK
    except DerivationViolation as exc:
        print(f"derivation violation: {exc}", file=sys.stderr)
        code = EXIT_VIOLATION
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
