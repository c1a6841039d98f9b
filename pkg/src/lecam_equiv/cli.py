"""Batch front-end: ``bound``, ``rates``, ``transform`` and ``verify``.

Configuration is a flat ``key = value`` file (``#`` starts a comment) with
``key=value`` overrides on the command line. Comma separated values form a
grid; grid points are evaluated in the order given. Every run writes
``results.csv``, ``results.json`` and ``manifest.json`` into ``--out``, and
nothing at all when validation fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from lecam_equiv import __version__, verify
from lecam_equiv.basis import FourierBasis, PiecewiseConstantBasis, SplineBasis
from lecam_equiv.design import Design, equidistant_grid, grid_size, uniform_random_design
from lecam_equiv.emp import EmpiricalGeometry
from lecam_equiv.errors import PreconditionError
from lecam_equiv.funclass import HoelderBall, SobolevBall, sample_from_sobolev_ball
from lecam_equiv.lecam import holder_design_bound, multidim_bound, random_design_bound, fit_rate_slope
from lecam_equiv.rng import STREAM_DESIGN, STREAM_SIGNAL, derive_int
from lecam_equiv import transform as tr

DEFAULT_SEED = 42
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


BOUND_KEYS = {
    "kind": str, "n": int, "m": int, "d": int, "s": float, "R": float, "sigma": float,
    "n0": int, "alpha": float, "design": str, "K": int,
}
BOUND_DEFAULTS = {"kind": "multidim", "d": 1, "s": 1.0, "R": 1.0, "sigma": 1.0, "alpha": 1.0, "design": "equidistant"}
TRANSFORM_KEYS = {
    "basis": str, "design": str, "n": int, "m": int, "p": int, "d": int, "transform": str, "sigma": float,
    "n0": int, "signal": str, "s": float, "R": float, "cutoff": int,
}
TRANSFORM_DEFAULTS = {
    "basis": "fourier", "design": "equidistant", "d": 1, "transform": "Z3", "sigma": 1.0,
    "signal": "zero", "s": 1.0, "R": 1.0, "cutoff": 4,
}
BOUND_KINDS = ("multidim", "random", "holder")
TRANSFORMS = ("isometric", "Z1", "Z2", "Z3", "Z5", "Zr")


# ---------------------------------------------------------------------------
# configuration


def parse_config_text(text: str, source: str = "config") -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}", "empty key")
        out[key] = value
    return out


def _convert(key: str, value: str, kind):
    try:
        items = [kind(v.strip()) for v in value.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(key, f"cannot parse {value!r} as {kind.__name__}") from None
    if not items:
        raise ConfigError(key, "empty value")
    return items


def resolve(raw: dict, keys: dict, defaults: dict) -> dict:
    """Typed config; every value is a list of grid entries."""
    out = {k: [v] for k, v in defaults.items()}
    for key, value in raw.items():
        if key not in keys:
            raise ConfigError(key, f"unknown key (allowed: {', '.join(sorted(keys))})")
        out[key] = _convert(key, value, keys[key])
    return out


def grid_points(cfg: dict) -> list[dict]:
    keys = list(cfg)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(cfg[k] for k in keys))]


def _positive(point: dict, *keys):
    for k in keys:
        if k in point and not point[k] > 0:
            raise ConfigError(k, f"must be positive, got {point[k]}")


def validate_bound_point(pt: dict) -> None:
    if pt["kind"] not in BOUND_KINDS:
        raise ConfigError("kind", f"must be one of {BOUND_KINDS}, got {pt['kind']!r}")
    _positive(pt, "s", "sigma", "d", "alpha")
    if pt["R"] < 0:
        raise ConfigError("R", "must be nonnegative")
    if ("n" in pt) == ("m" in pt):
        raise ConfigError("n", "give exactly one of n and m")
    if "m" in pt:
        if pt["kind"] == "multidim" and (pt["m"] < 1 or pt["m"] % 2 == 0):
            raise ConfigError("m", f"the Fourier grid needs odd m, got {pt['m']}")
        if pt["m"] < 1:
            raise ConfigError("m", "must be positive")
    n = point_n(pt)
    if n < 1:
        raise ConfigError("n", "must be positive")
    if pt["kind"] == "multidim":
        m = grid_size(n, pt["d"])
        if m % 2 == 0:
            raise ConfigError("n", f"n = {n} gives even m = {m}; the Fourier grid needs odd m")
    if pt.get("n0") is not None and not 1 <= pt["n0"] <= n:
        raise ConfigError("n0", f"must lie in 1..n = {n}, got {pt['n0']}")
    if pt["kind"] == "holder":
        if pt["d"] != 1:
            raise ConfigError("d", "the Hoelder bound is one-dimensional")
        if pt["design"] not in ("equidistant", "uniform_random"):
            raise ConfigError("design", "must be equidistant or uniform_random")


def point_n(pt: dict) -> int:
    return pt["m"] ** pt["d"] if "m" in pt else pt["n"]


def validate_transform_point(pt: dict) -> None:
    _positive(pt, "sigma", "d", "s", "cutoff")
    if pt["transform"] not in TRANSFORMS:
        raise ConfigError("transform", f"must be one of {TRANSFORMS}, got {pt['transform']!r}")
    if pt["basis"] not in ("fourier", "spline", "piecewise"):
        raise ConfigError("basis", f"unknown basis {pt['basis']!r}")
    if pt["design"] not in ("equidistant", "uniform_random"):
        raise ConfigError("design", f"unknown design {pt['design']!r}")
    if pt["signal"] not in ("zero", "sobolev"):
        raise ConfigError("signal", "must be zero or sobolev")
    if pt["basis"] == "fourier" and pt["design"] == "equidistant":
        if "m" not in pt or pt["m"] < 1 or pt["m"] % 2 == 0:
            raise ConfigError("m", f"the Fourier grid needs odd m, got {pt.get('m')}")
    if pt["basis"] == "spline" and ("m" not in pt or pt["m"] < 3):
        raise ConfigError("m", "spline bases need m >= 3")
    if pt["basis"] == "piecewise" and pt["d"] != 1:
        raise ConfigError("d", "piecewise constants are one-dimensional")
    if pt["design"] == "uniform_random" and "n" not in pt:
        raise ConfigError("n", "a random design needs n")
    n = _transform_n(pt)
    if n < 1:
        raise ConfigError("n", "must be positive")
    if pt.get("n0") is not None and not 1 <= pt["n0"] <= n:
        raise ConfigError("n0", f"must lie in 1..n = {n}, got {pt['n0']}")
    if pt["transform"] == "Zr" and pt.get("n0") is None:
        raise ConfigError("n0", "the two-level transform needs n0")


def _transform_n(pt: dict) -> int:
    if "n" in pt:
        return pt["n"]
    return pt.get("m", 0) ** pt["d"]


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_outputs(out: Path, command: str, config: dict, seed: int, csv_body: str, payload) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(csv_body)
    (out / "results.json").write_text(json.dumps(_jsonable(payload), indent=1, sort_keys=True) + "\n")
    manifest = {
        "command": command,
        "config": _jsonable(config),
        "seed": seed,
        "version": __version__,
        "outputs": ["results.csv", "results.json"],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _map(fn, items, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands


def evaluate_bound(pt: dict, seed: int):
    n = point_n(pt)
    if pt["kind"] == "multidim":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return multidim_bound(pt["s"], pt["d"], pt["R"], pt["sigma"], n, pt.get("K"))
    if pt["kind"] == "random":
        return random_design_bound(pt["s"], pt["d"], pt["R"], pt["sigma"], n, pt.get("n0"))
    if pt["design"] == "equidistant":
        design = equidistant_grid(n, 1)
    else:
        # the construction attaches the i-th order statistic to the i-th cell
        raw = uniform_random_design(n, 1, derive_int(seed, STREAM_DESIGN, n))
        design = Design(np.sort(raw.points, axis=0), kind=raw.kind, seed=raw.seed)
    return holder_design_bound(design, HoelderBall(pt["alpha"], pt["R"]), pt["sigma"])


BOUND_COMPONENTS = ("bias_sup", "classical_bias", "aliasing_bound", "hs_term", "bias_term", "rate_reference")


def _bound_rows(points, reports):
    header = ["kind", "n", "d", "s", "alpha", "R", "sigma", "n0", "form", "value", *BOUND_COMPONENTS]
    rows = []
    for pt, rep in zip(points, reports):
        comps = rep.components
        rows.append([
            pt["kind"], point_n(pt), pt["d"], pt["s"], pt["alpha"], pt["R"], pt["sigma"],
            rep.inputs.get("n0"), rep.form, rep.value,
            *[comps.get(c) if isinstance(comps.get(c), (int, float)) else None for c in BOUND_COMPONENTS],
        ])
    return header, rows


def run_bound(raw: dict, seed: int, threads: int = 1):
    cfg = resolve(raw, BOUND_KEYS, BOUND_DEFAULTS)
    points = grid_points(cfg)
    for pt in points:
        validate_bound_point(pt)
    reports = _map(lambda pt: evaluate_bound(pt, seed), points, threads)
    header, rows = _bound_rows(points, reports)
    payload = [{"point": pt, "report": rep.as_dict()} for pt, rep in zip(points, reports)]
    return cfg, csv_text(header, rows), payload, EXIT_OK


def expected_slope(pt: dict) -> float | None:
    if pt["kind"] == "multidim":
        return -(pt["s"] / pt["d"] - 0.5)
    if pt["kind"] == "random":
        return -(pt["s"] / pt["d"] - 0.5) * pt["d"] / (2 * pt["s"] + pt["d"])
    return -pt["alpha"] + 0.5


def run_rates(raw: dict, seed: int, threads: int = 1):
    cfg = resolve(raw, BOUND_KEYS, BOUND_DEFAULTS)
    size_key = "m" if "m" in cfg else "n"
    others = {k: v for k, v in cfg.items() if k != size_key and len(v) > 1}
    if others:
        raise ConfigError(next(iter(others)), "rates sweep only the sample size; give a single value")
    if len(cfg.get(size_key, [])) < 3:
        raise ConfigError(size_key, "a rate fit needs at least 3 sample sizes")
    cfg_, csv_body, payload, _ = run_bound(raw, seed, threads)
    pairs = [(point_n(item["point"]), item["report"]["value"]) for item in payload]
    slope, intercept, resid = fit_rate_slope(pairs)
    fit = {"slope": slope, "intercept": intercept, "residual": resid, "expected_slope": expected_slope(payload[0]["point"])}
    lines = csv_body.splitlines()
    extra = ",".join(_fmt(v) for v in (slope, intercept, resid, fit["expected_slope"]))
    csv_body = "".join(
        [lines[0] + ",fit_slope,fit_intercept,fit_residual,expected_slope\n"]
        + [line + "," + extra + "\n" for line in lines[1:]]
    )
    return cfg_, csv_body, {"rows": payload, "fit": fit}, EXIT_OK


def _transform_setup(pt: dict, seed: int):
    d = pt["d"]
    n = _transform_n(pt)
    if pt["design"] == "equidistant":
        design = equidistant_grid(pt.get("m", n) if d == 1 else pt["m"], d)
    else:
        design = uniform_random_design(n, d, derive_int(seed, STREAM_DESIGN, n))
    if pt["basis"] == "fourier":
        basis = FourierBasis.grid(pt["m"], d) if pt["design"] == "equidistant" else FourierBasis.leading(d, n)
    elif pt["basis"] == "spline":
        basis = SplineBasis(pt["m"], d)
    else:
        basis = PiecewiseConstantBasis(design.n)
    return EmpiricalGeometry(basis, design, pt.get("p"))


def run_transform(raw: dict, seed: int, threads: int = 1):
    cfg = resolve(raw, TRANSFORM_KEYS, TRANSFORM_DEFAULTS)
    points = grid_points(cfg)
    for pt in points:
        validate_transform_point(pt)

    def one(pt):
        geom = _transform_setup(pt, seed)
        f = None
        if pt["signal"] == "sobolev":
            f = sample_from_sobolev_ball(SobolevBall(pt["d"], pt["s"], pt["R"]), pt["cutoff"],
                                         derive_int(seed, STREAM_SIGNAL, geom.n))
        sample = tr.simulate_sample(geom.design, f, pt["sigma"], seed)
        name = pt["transform"]
        if name == "isometric":
            return tr.isometric_shift(sample, geom)
        if name == "Zr":
            return tr.two_level_transform(sample, geom, pt["n0"])
        if name == "Z5":
            return tr.z5_randomize(tr.z3(sample, geom), geom, seed)
        return {"Z1": tr.z1, "Z2": tr.z2, "Z3": tr.z3}[name](sample, geom)

    outputs = _map(one, points, threads)
    header = ["point", "transform", "index", "re", "im"]
    rows = []
    payload = []
    for i, (pt, out) in enumerate(zip(points, outputs)):
        for j, c in enumerate(out.coeffs, 1):
            rows.append([i, out.transform, j, float(np.real(c)), float(np.imag(c))])
        payload.append({"point": pt, "output": json.loads(out.to_json())})
    return cfg, csv_text(header, rows), payload, EXIT_OK


def resolve_verify(raw: dict, reps: int | None) -> tuple[dict, dict]:
    """Selected checks with their parameters; ``checks = none`` selects nothing."""
    sel = raw.get("checks", "all").strip()
    if sel == "none":
        names = []
    elif sel == "all":
        names = list(verify.DEFAULT_SUITE)
    else:
        names = [s.strip() for s in sel.split(",") if s.strip()]
        for nm in names:
            if nm not in verify.DEFAULT_SUITE:
                raise ConfigError("checks", f"unknown check {nm!r}")
    suite = {nm: dict(verify.DEFAULT_SUITE[nm]) for nm in names}
    for key, value in raw.items():
        if key == "checks":
            continue
        if "." not in key:
            raise ConfigError(key, "verify keys are 'checks' or '<check>.<parameter>'")
        check, param = key.split(".", 1)
        if check not in verify.DEFAULT_SUITE:
            raise ConfigError(key, f"unknown check {check!r}")
        defaults = verify.DEFAULT_SUITE[check]
        if param not in defaults:
            raise ConfigError(key, f"unknown parameter (allowed: {', '.join(sorted(defaults))})")
        if check not in suite:
            continue
        proto = defaults[param]
        kind = type(proto[0]) if isinstance(proto, list) else type(proto)
        vals = _convert(key, value, kind)
        suite[check][param] = vals if isinstance(proto, list) else vals[0]
    for check, params in suite.items():
        if reps is not None:
            params["trials" if check == "trig_discretization" else "reps"] = reps
        for k in ("n", "reps", "trials", "sigma", "s"):
            if k in params and not params[k] > 0:
                raise ConfigError(f"{check}.{k}", f"must be positive, got {params[k]}")
        if "n0" in params and not 1 <= params["n0"] < params["n"]:
            raise ConfigError(f"{check}.n0", f"must lie in 1..n-1, got {params['n0']}")
    return {"checks": names}, suite


def run_verify(raw: dict, seed: int, threads: int = 1, reps: int | None = None):
    sel, suite = resolve_verify(raw, reps)
    results = verify.run_suite(suite, seed, threads)
    header = ["check", "quantity", "estimate", "mc_error", "threshold", "verdict", "replicates", "seed"]
    rows = []
    for r in results:
        for q, v in r.estimates.items():
            rows.append([r.name, q, v, r.mc_errors.get(q), r.thresholds.get(q), r.verdict, r.replicates, r.seed])
    print(verify.format_table(results))
    code = EXIT_FAIL if any(r.verdict == verify.FAIL for r in results) else EXIT_OK
    config = {**sel, "suite": suite}
    return config, csv_text(header, rows), [r.as_dict() for r in results], code


COMMANDS = {"bound": run_bound, "rates": run_rates, "transform": run_transform, "verify": run_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lecam-equiv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("bound", "Le Cam distance bounds over a parameter grid"),
        ("rates", "bounds over a sample-size sweep with a log-log slope fit"),
        ("transform", "apply an equivalence transform to a simulated sample"),
        ("verify", "run the Monte Carlo checks"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("overrides", nargs="*", metavar="KEY=VALUE", help="config overrides")
        sp.add_argument("--config", type=Path, help="flat key = value file")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out", type=Path, default=Path("results"))
        sp.add_argument("--reps", type=int, default=None, help="replicates per check (verify)")
        sp.add_argument("--threads", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = parse_config_text(args.config.read_text(), str(args.config)) if args.config else {}
        for item in args.overrides:
            raw.update(parse_config_text(item, "command line"))
        if not 0 <= args.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise ConfigError("threads", "must be at least 1")
        if args.reps is not None and args.reps < 2:
            raise ConfigError("reps", "need at least 2 replicates")
        kwargs = {"reps": args.reps} if args.command == "verify" else {}
        config, csv_body, payload, code = COMMANDS[args.command](raw, args.seed, args.threads, **kwargs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_outputs(args.out, args.command, config, args.seed, csv_body, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
