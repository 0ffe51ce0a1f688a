"""Batch front-end.

    bilinear spectrum      --q 2 --dimv 2 --dimw 2 --function builtin:sharpness:1
    bilinear check-hyp     --q 2 --dimv 2 --dimw 2 --d 1 --function builtin:random-boolean:0.5,7
    bilinear check-cube    --p 2 --n 3 --d 2 --function builtin:random-low-degree:2,1
    bilinear expansion     --q 2 --dimv 2 --dimw 2 --set builtin:rank-threshold:1
    bilinear verify-lemmas --q 2 --dimv 2 --dimw 2
    bilinear sharpness     --q 2 --dimv 3 --dimw 3

Exit codes: 0 when every check passes, 1 when one fails (the failing
records go to stderr), 2 on usage errors.  Options may also come from an
INI file given with --config; keys in the section named after the command
(or in [common]) act as defaults for the flags.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import cube as cube_mod
from . import expansion as exp_mod
from . import fourier, globalness, laplacians, oracles
from .errors import ContractError, DomainError
from .field import FieldParams, get_field
from .spaces import bilinear_space

DESK_Q = (2, 3)
DESK_DIMS = (3, 3)


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- parsing


def _common(p: argparse.ArgumentParser, bilinear: bool = True) -> None:
    if bilinear:
        p.add_argument("--q", type=int, default=2)
        p.add_argument("--dimv", type=int, default=2)
        p.add_argument("--dimw", type=int, default=2)
        p.add_argument("--modulus", default=None, help="field modulus coefficients, constant term first: 1,1,1")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="directory for report files")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--profile", choices=("desk", "none"), default="none")
    p.add_argument("--config", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bilinear", description="Fourier analysis on spaces of linear maps over GF(q)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="rank-mass table of a function")
    _common(p)
    p.add_argument("--function", required=True)

    p = sub.add_parser("check-hyp", help="globalness certificates and hypercontractive inequalities")
    _common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--function", required=True)

    p = sub.add_parser("check-cube", help="the product-space warm-up inequalities")
    _common(p, bilinear=False)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--function", required=True)

    p = sub.add_parser("expansion", help="small-set expansion in the shortcode graph")
    _common(p)
    p.add_argument("--set", dest="vertex_set", required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--C0", type=float, default=1.0)

    p = sub.add_parser("verify-lemmas", help="structural identities and linear-algebra lemmas")
    _common(p)
    p.add_argument("--mode", choices=("auto", "exhaustive", "sample"), default="auto")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("sharpness", help="observed exponents for the rank-d character sums")
    _common(p)
    p.add_argument("--d", type=int, default=None)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in COMMANDS), None)
    if known.config is not None and command is not None:
        cp = configparser.ConfigParser()
        if not cp.read(known.config):
            raise UsageError(f"cannot read config file {known.config}")
        defaults = {}
        for section in ("common", command):
            if cp.has_section(section):
                defaults.update({k.replace("-", "_"): v for k, v in cp.items(section)})
        # config values become defaults, so explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[command]
        for action in sub._actions:
            if action.dest in defaults:
                raw = defaults.pop(action.dest)
                try:
                    action.default = action.type(raw) if action.type else raw
                except ValueError:
                    raise UsageError(f"bad value {raw!r} for {action.dest} in config")
                action.required = False
        defaults.pop("config", None)
        if defaults:
            raise UsageError(f"unknown config keys: {', '.join(sorted(defaults))}")
    return parser.parse_args(argv)


def _threads() -> int:
    raw = os.environ.get("BF_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"BF_THREADS must be a positive integer, not {raw!r}")
    if n < 1:
        raise UsageError("BF_THREADS must be a positive integer")
    return n


def _space(args):
    if args.profile == "desk":
        if args.q not in DESK_Q or args.dimv > DESK_DIMS[0] or args.dimw > DESK_DIMS[1]:
            raise UsageError("desk profile allows q in {2,3} and dims up to 3x3")
    if args.dimv < 1 or args.dimw < 1:
        raise UsageError("dimensions must be positive")
    if args.q ** (args.dimv * args.dimw) > 4096:
        raise UsageError("L(V,W) has more than 4096 points; pick smaller dimensions")
    try:
        if args.modulus:
            params = FieldParams.parse(f"q={args.q},modulus={args.modulus}")
            F = get_field(params.q, params.modulus)
        else:
            F = get_field(args.q)
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc))
    return bilinear_space(F, args.dimv, args.dimw)


def _split_spec(spec: str) -> tuple[str, list[str]]:
    if not spec.startswith("builtin:"):
        return "file", [spec]
    parts = spec.split(":")
    return parts[1], parts[2:]


def _need_seed(args, seed):
    if seed is None and args.seed is None:
        raise UsageError("sampled runs need a seed")
    return int(seed if seed is not None else args.seed)


def _load_file(path: str, N: int) -> np.ndarray:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such function file {path}")
    if p.suffix == ".npy":
        vals = np.load(p)
    else:
        vals = np.array([complex(tok) for tok in p.read_text().split()])
    vals = np.asarray(vals).reshape(-1)
    if vals.size != N:
        raise UsageError(f"function file has {vals.size} values, expected {N}")
    if np.allclose(np.imag(vals), 0):
        vals = np.real(vals).astype(float)
    return vals


def make_function(space, spec: str, args) -> tuple[str, np.ndarray]:
    """builtin:sharpness:d | builtin:rank-threshold:r | builtin:random-boolean:density,seed | builtin:dictator | file."""
    kind, rest = _split_spec(spec)
    try:
        if kind == "file":
            return Path(rest[0]).name, _load_file(rest[0], space.N)
        if kind == "sharpness":
            d = int(rest[0].replace("d=", "")) if rest else 1
            return f"sharpness:{d}", np.real(fourier.sharpness_function(space, d))
        if kind == "rank-threshold":
            r = int(rest[0])
            return f"rank-threshold:{r}", exp_mod.rank_threshold_set(space, r)
        if kind == "random-boolean":
            dens, _, seed = rest[0].partition(",")
            seed = _need_seed(args, int(seed) if seed else None)
            rng = np.random.default_rng(seed)
            return f"random-boolean:{float(dens):g},{seed}", (rng.random(space.N) < float(dens)).astype(float)
        if kind == "dictator":
            v = np.zeros(space.n, dtype=np.int64)
            v[0] = 1
            return "dictator", exp_mod.dictator_slab(space, v, np.zeros(space.m, dtype=np.int64))
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad function spec {spec!r}: {exc}")
    raise UsageError(f"unknown function spec {spec!r}")


def make_set(space, spec: str, args) -> tuple[str, np.ndarray]:
    """builtin:rank-threshold:r | random:density,seed | builtin:dictator | file."""
    if spec.startswith("random:"):
        dens, _, seed = spec[len("random:"):].partition(",")
        try:
            seed = _need_seed(args, int(seed) if seed else None)
            return f"random:{float(dens):g},{seed}", exp_mod.random_set(space, float(dens), seed)
        except ValueError as exc:
            raise UsageError(f"bad set spec {spec!r}: {exc}")
    name, vals = make_function(space, spec, args)
    if not np.all((vals == 0) | (vals == 1)):
        raise UsageError("a vertex set must be 0/1 valued")
    return name, vals


# ---------------------------------------------------------------- output


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _render(rows: list[dict], fmt: str) -> str:
    rows = [_clean(r) for r in rows]
    if fmt == "json":
        return "".join(json.dumps(r, sort_keys=False) + "\n" for r in rows)
    keys = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def _emit(args, rows: list[dict], default_fmt: str = "json") -> int:
    fmt = args.format or default_fmt
    text = _render(rows, fmt)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.{fmt}").write_text(text)
    failed = [r for r in rows if r.get("pass") is False]
    if failed:
        sys.stderr.write(_render(failed, "json"))
        if args.out:
            (Path(args.out) / "failures.json").write_text(_render(failed, "json"))
        return 1
    return 0


def _header(space, name: str | None = None) -> dict:
    out = {"q": space.q, "n": space.n, "m": space.m}
    if name is not None:
        out["function"] = name
    return out


# --------------------------------------------------------------- commands


def cmd_spectrum(args) -> int:
    space = _space(args)
    name, f = make_function(space, args.function, args)
    mass = fourier.rank_mass(space, f)
    rows = [{**_header(space, name), "degree": d, "mass": float(mass[d])} for d in range(len(mass))]
    return _emit(args, rows)


def cmd_check_hyp(args) -> int:
    space = _space(args)
    name, f = make_function(space, args.function, args)
    d = args.d
    if d < 0 or d > min(space.n, space.m):
        raise UsageError("d must lie in [0, min(dimv, dimw)]")
    head = _header(space, name)
    rows = []
    cert = globalness.certify_restriction_global(space, f, d)
    rows.append({**head, "check": "restriction_certificate", **cert.as_dict()})
    g = fourier.degree_truncate(space, f, d)
    hyp = globalness.check_bilinear_hypercontractivity(space, g, d, extras=space.N <= 512)
    rows.append({**head, **hyp.as_dict()})
    for r in globalness.check_restriction_global_bonami(space, f, d):
        rows.append({**head, **r.as_dict()})
    if np.all((f == 0) | (f == 1)):
        rows.append({**head, **globalness.check_level_d(space, f, d).as_dict()})
    for r in globalness.check_globalness_transfer(space, f, d):
        rows.append({**head, **r.as_dict()})
    return _emit(args, rows)


def _cube_function(cube, spec: str, args):
    kind, rest = _split_spec(spec)
    try:
        if kind == "random-low-degree":
            deg, _, seed = rest[0].partition(",")
            seed = _need_seed(args, int(seed) if seed else None)
            rng = np.random.default_rng(seed)
            return f"random-low-degree:{deg},{seed}", cube_mod.random_low_degree(cube, int(deg), rng, real=True).real
        if kind == "dictator":
            return "dictator", (cube_mod.points(cube)[:, 0] == 0).astype(float)
        if kind == "subcube":
            k = int(rest[0]) if rest else 1
            return f"subcube:{k}", np.all(cube_mod.points(cube)[:, :k] == 0, axis=1).astype(float)
        if kind == "file":
            return Path(rest[0]).name, _load_file(rest[0], cube.N)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad function spec {spec!r}: {exc}")
    raise UsageError(f"unknown cube function spec {spec!r}")


def cmd_check_cube(args) -> int:
    if args.p < 2 or any(args.p % k == 0 for k in range(2, int(args.p**0.5) + 1)):
        raise UsageError("--p must be prime")
    if args.profile == "desk" and (args.p not in DESK_Q or args.n > 4):
        raise UsageError("desk profile allows p in {2,3} and n <= 4")
    if args.n < 1 or args.p**args.n > 4096:
        raise UsageError("cube too large")
    cube = cube_mod.Cube(args.p, args.n)
    name, f = _cube_function(cube, args.function, args)
    head = {"p": args.p, "n": args.n, "function": name, "d": args.d}
    rows = []
    g = cube_mod.low_degree(cube, f, args.d)
    rows.append({**head, "check": "hypercontractivity", **cube_mod.check_cube_hypercontractivity(cube, g, args.d).as_dict()})
    rows.append({**head, "check": "global_bonami", **cube_mod.check_global_bonami(cube, f, args.d).as_dict()})
    ok, worst = cube_mod.check_influence_from_restrictions(cube, f, args.d)
    rows.append({**head, "check": "influence_from_restrictions", "ratio": worst, "pass": ok})
    ok, worst = cube_mod.check_restriction_from_influences(cube, f, args.d)
    rows.append({**head, "check": "restriction_from_influences", "ratio": worst, "pass": ok})
    if np.all((f == 0) | (f == 1)) and f.any():
        rows.append({**head, "check": "small_set_expansion", "rho": args.rho,
                     **cube_mod.check_cube_sse(cube, f, args.rho, args.d).as_dict()})
    return _emit(args, rows)


def cmd_expansion(args) -> int:
    space = _space(args)
    name, s = make_set(space, args.vertex_set, args)
    rep = exp_mod.check_sse_theorem(space, s, args.r, args.C0, set_id=name)
    d = rep.as_dict()
    row = {**_header(space), "set_id": name, "globalness_order": d["globalness_order"],
           "globalness_level": d["globalness_level"], "stay_prob": d["stay_prob"], "bound": d["bound"],
           "hypothesis": d["hypothesis"], "spectral_identity_err": d["spectral_identity_err"], "pass": d["pass"]}
    return _emit(args, [row], default_fmt="csv")


def cmd_verify_lemmas(args) -> int:
    space = _space(args)
    mode = args.mode
    seed = args.seed
    if mode == "sample":
        seed = _need_seed(args, None)
    seed = 0 if seed is None else seed
    kw = dict(mode=mode, samples=args.samples, seed=seed)
    reports = []
    exhaustive_calc = mode != "sample" and space.N <= 64
    for r in laplacians.verify_composition_calculus(space, exhaustive=exhaustive_calc, samples=args.samples, seed=seed):
        reports.append(r.as_dict())
    for r in oracles.operator_suite(space, **kw):
        reports.append(r.as_dict())
    for r in oracles.check_averaging_multipliers(space):
        if r.instances:
            reports.append(r.as_dict())
    for r in oracles.lemma_suite(space, **kw):
        reports.append(r.as_dict())
    rng = np.random.default_rng(seed)
    f = rng.normal(size=space.N) + 1j * rng.normal(size=space.N)
    err = float(np.max(np.abs(fourier.transform(space, f) - oracles.naive_transform_oracle(space, f))))
    reports.append({"lemma_id": "fast_transform", "instances_checked": 1, "max_err": err, "pass": err < 1e-10})
    return _emit(args, reports)


def cmd_sharpness(args) -> int:
    space = _space(args)
    top = min(space.n, space.m)
    ds = range(1, top + 1) if args.d is None else [args.d]
    rows = []
    for d in ds:
        if d < 1 or d > top:
            raise UsageError("d must lie in [1, min(dimv, dimw)]")
        f = fourier.sharpness_function(space, d)
        hyp = globalness.check_bilinear_hypercontractivity(space, f, d, extras=False)
        delta = float(globalness.restriction_level(space, f, d))
        f4 = float(np.mean(np.abs(f) ** 4))
        f2 = float(np.mean(np.abs(f) ** 2))
        bonami_exp = math.log(f4 / (delta * f2), space.q) / d**2
        rows.append({**_header(space, f"sharpness:{d}"), "d": d, "norm4_4": f4, "norm2_2": f2,
                     "restriction_level": delta, "influence_sum": hyp.extra["influence_sum"],
                     "observed_exponent": hyp.extra["observed_exponent"], "global_bonami_exponent": bonami_exp,
                     "pass": hyp.passed})
    return _emit(args, rows)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "check-hyp": cmd_check_hyp,
    "check-cube": cmd_check_cube,
    "expansion": cmd_expansion,
    "verify-lemmas": cmd_verify_lemmas,
    "sharpness": cmd_sharpness,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        _threads()
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"bilinear: error: {exc}\n")
        return 2
    except (ContractError, DomainError) as exc:
        sys.stderr.write(f"bilinear: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
