"""Command-line front end: ``symmetro {solve,sweep,figure1,simulate}``.

Every command reads a TOML configuration file. Data goes to ``--out`` (or
stdout); diagnostics go to stderr. Reals are written with 17 significant
digits so that files round-trip exactly.
"""
import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bayes import credible_interval, run_protocol
from .blend import BlochDirection, blend_family, figure1_sweep
from .config import DEFAULT_TOLERANCES
from .exceptions import ConfigError, SymmetroError
from .maps import make_fmap
from .personick import StateFamily, build_moments, solve_optimal
from .priors import gauss_legendre, haldane_prior, table_prior, uniform_prior

SCHEMA = {
    "model": {"kind", "alpha", "beta", "file", "theta", "states"},
    "fmap": {"kind", "z0", "domain", "anchor", "fisher_theta", "fisher_values"},
    "prior": {"kind", "a", "support", "theta", "density"},
    "quadrature": {"order"},
    "tolerances": {"merge"},
    "sweep": {"a", "alpha", "beta"},
    "figure1": {"a", "beta", "alpha", "eta0", "eta0_range", "conjugate_pom"},
    "simulate": {"theta_true", "mu", "seed", "policy", "candidates"},
}

SWEEP_HEADER = ["a", "alpha", "beta", "prior_error", "gain", "min_error", "gain_ratio"]
FIGURE1_HEADER = ["alpha", "eta0", "mhe", "prior_error", "min_error"]
SIMULATE_HEADER = ["shot", "outcome", "posterior_var_f", "estimate"]


def fmt(x):
    """17 significant digits, enough for an exact float round-trip."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _exact(obj):
    """Recursively round-trip floats through the 17-digit representation."""
    if isinstance(obj, dict):
        return {k: _exact(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_exact(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _matrix_to_json(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _matrix_from_json(rows, where):
    try:
        m = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: matrices must be nested [re, im] pairs") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"{where}: matrix is not square")
    return m


# ---------------------------------------------------------------- config


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        cfg = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section, body in cfg.items():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"{path}: [{section}] must be a table")
        unknown = set(body) - SCHEMA[section]
        if unknown:
            raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)} in [{section}]")
    cfg["_dir"] = path.parent
    return cfg


def _get(cfg, section, key, default=None, kind=float):
    body = cfg.get(section, {})
    if key not in body:
        if default is None:
            raise ConfigError(f"missing required field {section}.{key}")
        return default
    value = body[key]
    try:
        if kind is list:
            return [float(v) for v in value]
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {section}.{key}: cannot interpret {value!r}") from exc


def make_rule(cfg, override=None):
    order = override or _get(cfg, "quadrature", "order", 200, int)
    if order < 1:
        raise ConfigError("field quadrature.order must be positive")
    return gauss_legendre(order)


def make_fmap_from(cfg):
    body = cfg.get("fmap", {"kind": "weight"})
    kind = body.get("kind", "weight")
    try:
        if kind == "scale":
            return make_fmap("scale", z0=_get(cfg, "fmap", "z0", 1.0))
        if kind == "fisher":
            t = np.array(_get(cfg, "fmap", "fisher_theta", kind=list))
            v = np.array(_get(cfg, "fmap", "fisher_values", kind=list))
            if t.shape != v.shape:
                raise ConfigError("fmap.fisher_theta and fmap.fisher_values differ in length")
            domain = tuple(_get(cfg, "fmap", "domain", [t[0], t[-1]], list))
            return make_fmap("fisher", fisher_info=lambda z: float(np.interp(z, t, v)),
                             domain=domain, anchor=body.get("anchor"))
        if kind in ("location", "weight"):
            return make_fmap(kind)
    except SymmetroError as exc:
        raise ConfigError(f"[fmap]: {exc}") from exc
    raise ConfigError(f"field fmap.kind: unknown kind {kind!r}")


def make_prior(cfg, a=None):
    body = cfg.get("prior", {"kind": "haldane"})
    kind = body.get("kind", "haldane")
    try:
        if kind == "haldane":
            return haldane_prior(a if a is not None else _get(cfg, "prior", "a", 0.01))
        if kind == "uniform":
            lo, hi = _get(cfg, "prior", "support", kind=list)
            return uniform_prior(lo, hi)
        if kind == "table":
            return table_prior(_get(cfg, "prior", "theta", kind=list), _get(cfg, "prior", "density", kind=list))
    except SymmetroError as exc:
        raise ConfigError(f"[prior]: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"[prior]: {exc}") from exc
    raise ConfigError(f"field prior.kind: unknown kind {kind!r}")


def _table_family(cfg):
    body = cfg["model"]
    if "file" in body:
        path = cfg["_dir"] / body["file"]
        if not path.is_file():
            raise ConfigError(f"field model.file: {path} does not exist")
        data = json.loads(path.read_text(encoding="utf-8"))
        theta, states = data.get("theta"), data.get("states")
    else:
        theta, states = body.get("theta"), body.get("states")
    if theta is None or states is None:
        raise ConfigError("table model needs theta and states (inline or in model.file)")
    theta = np.asarray(theta, dtype=float)
    mats = np.array([_matrix_from_json(s, f"model.states[{k}]") for k, s in enumerate(states)])
    if len(theta) != len(mats) or len(theta) < 2 or np.any(np.diff(theta) <= 0):
        raise ConfigError("table model needs >= 2 strictly increasing theta values, one matrix each")

    def locate(t):
        k = int(np.clip(np.searchsorted(theta, t, side="right") - 1, 0, len(theta) - 2))
        return k, (t - theta[k]) / (theta[k + 1] - theta[k])

    def state_of(t, y):
        k, s = locate(t)
        return (1 - s) * mats[k] + s * mats[k + 1]

    def derivative_of(t, y):
        k, _ = locate(t)
        return (mats[k + 1] - mats[k]) / (theta[k + 1] - theta[k])

    return StateFamily(mats.shape[1], state_of, derivative_of)


def make_family(cfg, alpha=None, beta=None):
    kind = cfg.get("model", {}).get("kind", "blend")
    if kind == "blend":
        try:
            d = BlochDirection(
                alpha if alpha is not None else _get(cfg, "model", "alpha", 0.0),
                beta if beta is not None else _get(cfg, "model", "beta", math.pi / 2),
            )
        except SymmetroError as exc:
            raise ConfigError(f"[model]: {exc}") from exc
        return blend_family(d)
    if kind == "table":
        return _table_family(cfg)
    raise ConfigError(f"field model.kind: unknown kind {kind!r}")


# ---------------------------------------------------------------- commands


def cmd_solve(cfg, args):
    family, prior, fm = make_family(cfg), make_prior(cfg), make_fmap_from(cfg)
    merge = _get(cfg, "tolerances", "merge", DEFAULT_TOLERANCES.merge)
    sol = solve_optimal(build_moments(family, prior, fm, rule=make_rule(cfg, args.quad_order)), fm, merge)
    report = {
        "s_matrix": _matrix_to_json(sol.S),
        "eigenvalues": [float(v) for v in sol.eigenvalues],
        "pom": [{"label": float(l), "projector": _matrix_to_json(p)}
                for l, p in zip(sol.pom.labels, sol.pom.projectors)],
        "estimates": [float(e) for e in sol.estimates],
        "prior_error": sol.prior_error,
        "gain": sol.gain,
        "min_error": sol.min_error,
        "gain_ratio": sol.gain_ratio,
    }
    _emit(json.dumps(_exact(report), indent=2) + "\n", args.out)


def _sweep_cell(cfg, rule, a, alpha, beta):
    try:
        family = make_family(cfg, alpha, beta)
        prior, fm = make_prior(cfg, a), make_fmap_from(cfg)
        sol = solve_optimal(build_moments(family, prior, fm, rule=rule), fm)
        return [a, alpha, beta, sol.prior_error, sol.gain, sol.min_error, sol.gain_ratio], ""
    except SymmetroError as exc:
        return [a, alpha, beta] + [float("nan")] * 4, str(exc)


def cmd_sweep(cfg, args):
    if cfg.get("model", {}).get("kind", "blend") != "blend":
        raise ConfigError("sweep runs over (a, alpha, beta) and needs the blend model")
    axes = [
        sorted(_get(cfg, "sweep", "a", [_get(cfg, "prior", "a", 0.01)], list)),
        sorted(_get(cfg, "sweep", "alpha", [_get(cfg, "model", "alpha", 0.0)], list)),
        sorted(_get(cfg, "sweep", "beta", [_get(cfg, "model", "beta", math.pi / 2)], list)),
    ]
    rule = make_rule(cfg, args.quad_order)
    cells = list(itertools.product(*axes))
    run = lambda c: _sweep_cell(cfg, rule, *c)
    with ThreadPoolExecutor(max(1, args.threads)) as pool:
        results = list(pool.map(run, cells))
    header = SWEEP_HEADER + (["error"] if any(err for _, err in results) else [])
    rows = [[fmt(v) for v in vals] + ([err] if len(header) > len(SWEEP_HEADER) else [])
            for vals, err in results]
    _emit(_csv(header, rows), args.out)


def _eta0_grid(cfg):
    body = cfg.get("figure1", {})
    if "eta0" in body:
        return _get(cfg, "figure1", "eta0", kind=list)
    rng = body.get("eta0_range", {"start": 0.01, "stop": 0.99, "num": 99})
    try:
        return list(np.linspace(float(rng["start"]), float(rng["stop"]), int(rng["num"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("field figure1.eta0_range needs start, stop and num") from exc


def cmd_figure1(cfg, args):
    a = _get(cfg, "figure1", "a", 0.01)
    beta = _get(cfg, "figure1", "beta", math.pi / 2)
    alphas = _get(cfg, "figure1", "alpha", [0.0, math.pi / 4, math.pi / 2], list)
    conj = bool(cfg.get("figure1", {}).get("conjugate_pom", True))
    try:
        rows = figure1_sweep(a, beta, alphas, _eta0_grid(cfg), make_rule(cfg, args.quad_order),
                             conjugate_pom=conj, threads=max(1, args.threads))
    except SymmetroError as exc:
        raise ConfigError(f"[figure1]: {exc}") from exc
    failed = any(r.error for r in rows)
    header = FIGURE1_HEADER + (["error"] if failed else [])
    out = [[fmt(r.alpha), fmt(r.eta0), fmt(r.mhe), fmt(r.prior_error), fmt(r.min_error)]
           + ([r.error] if failed else []) for r in rows]
    _emit(_csv(header, out), args.out)


def cmd_simulate(cfg, args):
    family, prior, fm = make_family(cfg), make_prior(cfg), make_fmap_from(cfg)
    seed = args.seed if args.seed is not None else _get(cfg, "simulate", "seed", kind=int)
    mu = _get(cfg, "simulate", "mu", kind=int)
    theta_true = _get(cfg, "simulate", "theta_true")
    policy = cfg.get("simulate", {}).get("policy", "fixed")
    if mu < 1:
        raise ConfigError("field simulate.mu must be at least 1")
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if policy not in ("fixed", "adaptive"):
        raise ConfigError(f"field simulate.policy: unknown policy {policy!r}")
    candidates = cfg.get("simulate", {}).get("candidates")
    if candidates is not None:
        if not isinstance(candidates, list) or not all(isinstance(c, dict) for c in candidates):
            raise ConfigError("field simulate.candidates must be a list of tables")
        candidates = [{k: float(v) for k, v in c.items()} for c in candidates]
    res = run_protocol(family, prior, fm, policy, mu, theta_true, seed,
                       candidates=candidates, rule=make_rule(cfg, args.quad_order))
    rows = [[fmt(i + 1), fmt(o), fmt(v), fmt(e)]
            for i, (o, v, e) in enumerate(zip(res.outcomes, res.error_trace, res.estimates))]
    _emit(_csv(SIMULATE_HEADER, rows), args.out)
    lo, hi = credible_interval(res.posterior, 0.95)
    summary = {"estimate": res.estimate, "credible_interval": [lo, hi], "level": 0.95,
               "mu": mu, "seed": seed, "theta_true": theta_true, "policy": policy}
    summary_path = args.summary or (Path(args.out).with_suffix(".summary.json") if args.out else None)
    if summary_path:
        Path(summary_path).write_text(json.dumps(_exact(summary), indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- plumbing


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "figure1": cmd_figure1, "simulate": cmd_simulate}


def build_parser():
    parser = argparse.ArgumentParser(prog="symmetro", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML configuration file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, help="override simulate.seed")
        p.add_argument("--quad-order", type=int, help="override quadrature.order")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
        if name == "simulate":
            p.add_argument("--summary", help="summary JSON path (default: <out>.summary.json)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"symmetro {args.command}: config error: {exc}", file=sys.stderr)
        return 2
    except (SymmetroError, ValueError) as exc:
        print(f"symmetro {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
