"""Command-line front end.

Subcommands: classify, ts, ray, conjugate, param-ray, diff-endpoint,
escape-address, itinerary, escape-image.  Tabular results (rays) are CSV with
'#'-prefixed comment lines; scalar results are JSON.  Floating point numbers
are printed with Python's shortest-roundtrip repr, so identical inputs and
configuration produce byte-identical output.

Configuration precedence: command-line flags override the key=value file
named by the EXPRAY_CONFIG environment variable, which overrides defaults
(tol=1e-9, horizon=64, t_max_cap=50, format per command).

Exit codes: 0 ok, 2 parse error, 3 precondition violated, 4 numeric failure,
5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import combinatorics, conjugacy, endpoint, model, paramspace, ray
from .address import ExternalAddress, parse as parse_address
from .errors import ExprayError, ParseError
from .model import ModelPoint

_EXIT_IO = 5


@dataclass
class RunConfig:
    tol: float = 1e-9
    horizon: int = 64
    t_max_cap: float = 50.0
    out_format: str = ""
    out_path: str = ""

    def validated(self) -> "RunConfig":
        if not self.tol > 0.0:
            raise ParseError("tol must be positive")
        if self.horizon < 8:
            raise ParseError("horizon must be >= 8")
        return self


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    path = os.environ.get("EXPRAY_CONFIG", "")
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise ParseError(f"cannot read EXPRAY_CONFIG file: {exc}") from None
        for ln in lines:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            key, sep, val = ln.partition("=")
            if not sep:
                raise ParseError(f"bad config line {ln!r}")
            key = key.strip()
            val = val.strip()
            if key == "tol":
                cfg.tol = float(val)
            elif key == "horizon":
                cfg.horizon = int(val)
            elif key == "t_max_cap":
                cfg.t_max_cap = float(val)
            elif key == "format":
                cfg.out_format = val
            else:
                raise ParseError(f"unknown config key {key!r}")
    if getattr(args, "tol", None) is not None:
        cfg.tol = args.tol
    if getattr(args, "horizon", None) is not None:
        cfg.horizon = args.horizon
    if getattr(args, "format", None):
        cfg.out_format = args.format
    if getattr(args, "out", None):
        cfg.out_path = args.out
    return cfg.validated()


# -- formatting ---------------------------------------------------------------


def _fnum(x: float) -> str:
    return repr(float(x))


def _fcomplex(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    sign = "+" if im >= 0 or math.isnan(im) else "-"
    return f"{_fnum(re)}{sign}{_fnum(abs(im))}i"


def _jsonify(obj):
    if isinstance(obj, complex):
        return _fcomplex(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    return obj


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, cfg: RunConfig) -> None:
    _emit(json.dumps(_jsonify(payload), sort_keys=True) + "\n", cfg)


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' / 'a-bi' / 'a' / 'bi' with a literal trailing i."""
    src = text.strip().replace(" ", "")
    if not src:
        raise ParseError("empty complex literal")
    body, imag_part = src, None
    if src.endswith(("i", "I", "j", "J")):
        core = src[:-1]
        for pos in range(len(core) - 1, 0, -1):
            if core[pos] in "+-" and core[pos - 1] not in "eE":
                body, imag_part = core[:pos], core[pos:]
                break
        else:
            body, imag_part = "0", core if core not in ("", "+", "-") else core + "1"
    try:
        re = float(body)
        im = float(imag_part) if imag_part is not None else 0.0
    except ValueError:
        raise ParseError(f"bad complex literal {text!r}") from None
    return complex(re, im)


# -- subcommands ---------------------------------------------------------------


def _cmd_classify(args, cfg: RunConfig) -> None:
    s = parse_address(args.address)
    star = model.t_star(s, cfg.horizon)
    ts_val = model.t_s(s, cfg.tol)
    _emit_json(
        {
            "address": s.to_text(),
            "class": model.classify(s).value,
            "t_star": star,
            "t_s": ts_val,
            "bracket": [star, star + 1.0],
        },
        cfg,
    )


def _cmd_ts(args, cfg: RunConfig) -> None:
    s = parse_address(args.address)
    star = model.t_star(s, cfg.horizon)
    _emit_json(
        {
            "address": s.to_text(),
            "t_star": star,
            "t_s": model.t_s(s, cfg.tol),
            "bracket": [star, star + 1.0],
        },
        cfg,
    )


def _ray_context(kappa: complex, cfg: RunConfig) -> ray.RayContext:
    return ray.RayContext(kappa, tol=cfg.tol, t_max=cfg.t_max_cap)


def _cmd_ray(args, cfg: RunConfig) -> None:
    s = parse_address(args.address)
    ctx = _ray_context(parse_complex(args.kappa), cfg)
    sample = ray.ray_sample(ctx, s, args.t_lo, args.t_hi, args.samples)
    lines = ["t,re,im,err_bound,broken_flag"]
    for t, z, err in sample.samples:
        flag = 1 if sample.broken else 0
        lines.append(
            f"{_fnum(t)},{_fnum(z.real)},{_fnum(z.imag)},{_fnum(err)},{flag}"
        )
    if not sample.endpoint_included and args.t_lo == 0.0:
        lines.append("# no escaping endpoint")
    if sample.broken:
        lines.append(f"# broken at t={_fnum(sample.broken_below)}")
    _emit("\n".join(lines) + "\n", cfg)


def _cmd_conjugate(args, cfg: RunConfig) -> None:
    k1 = parse_complex(args.kappa1)
    k2 = parse_complex(args.kappa2)
    z = parse_complex(args.point)
    ctx1, ctx2 = conjugacy.contexts_for(k1, k2, t_max=cfg.t_max_cap)
    rep = conjugacy.conjugacy_report(ctx1, ctx2, z, cfg.tol)
    _emit_json(
        {
            "phi": rep["phi"],
            "conjugacy_residual": rep["residual"],
            "potential": rep["potential"],
            "prefix": list(rep["prefix"]),
            "speed_table": [
                {"n": i, "distance": v} for i, v in enumerate(rep["speed_table"])
            ],
        },
        cfg,
    )


def _cmd_param_ray(args, cfg: RunConfig) -> None:
    s = parse_address(args.address)
    if args.t is not None:
        sol = paramspace.parameter_ray_point(s, args.t, min(cfg.tol, 1e-10))
        _emit_json(
            {
                "address": s.to_text(),
                "t": sol.t,
                "kappa": sol.kappa,
                "residual": sol.residual,
                "iterations": sol.iterations,
            },
            cfg,
        )
        return
    sols = paramspace.parameter_ray_sample(
        s, args.t_lo, args.t_hi, args.samples, min(cfg.tol, 1e-10)
    )
    lines = ["t,re,im,residual,iterations,jump_flag"]
    for sol in sols:
        lines.append(
            f"{_fnum(sol.t)},{_fnum(sol.kappa.real)},{_fnum(sol.kappa.imag)},"
            f"{_fnum(sol.residual)},{sol.iterations},{1 if sol.jump_flagged else 0}"
        )
    _emit("\n".join(lines) + "\n", cfg)


def _cmd_diff_endpoint(args, cfg: RunConfig) -> None:
    s = parse_address(args.address)
    rep = endpoint.differentiability_series(s, args.n_terms)
    _emit_json(
        {
            "address": s.to_text(),
            "verdict": rep.verdict.value,
            "n_terms": rep.n_terms,
            "truncated": rep.truncated,
            "terms": list(rep.terms),
            "partial_sums": list(rep.partial_sums),
        },
        cfg,
    )


def _cmd_escape_address(args, cfg: RunConfig) -> None:
    s = model.escape_speed_address(args.speed, args.n_terms)
    _emit_json(
        {
            "speed": args.speed,
            "address": s.to_text(),
            "entries": s.entries(min(args.n_terms + 1, 64)),
        },
        cfg,
    )


def _cmd_itinerary(args, cfg: RunConfig) -> None:
    s = parse_address(args.address)
    r = parse_address(args.ref)
    itin = combinatorics.itinerary(s, r, args.n, cfg.horizon)
    _emit_json(
        {
            "address": s.to_text(),
            "ref": r.to_text(),
            "entries": list(itin.entries),
        },
        cfg,
    )


def _cmd_escape_image(args, cfg: RunConfig) -> None:
    kappa = parse_complex(args.kappa)
    try:
        xmin, xmax, ymin, ymax = (float(v) for v in args.bounds.split(","))
    except ValueError:
        raise ParseError(f"bad bounds {args.bounds!r}, want xmin,xmax,ymin,ymax") from None
    w, h = args.width, args.height
    if w < 1 or h < 1:
        raise ParseError("width and height must be >= 1")
    data = bytearray()
    for row in range(h):
        # row 0 is the top of the image (largest imaginary part)
        im = ymax - (ymax - ymin) * (row + 0.5) / h
        for col in range(w):
            re = xmin + (xmax - xmin) * (col + 0.5) / w
            n = _escape_steps(complex(re, im), kappa, args.max_iter,
                              args.escape_radius)
            val = 0 if args.max_iter == 0 else (255 * n) // args.max_iter
            data.append(val)
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    payload = header + bytes(data)
    if cfg.out_path:
        with open(cfg.out_path, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)


def _escape_steps(z: complex, kappa: complex, max_iter: int,
                  radius: float) -> int:
    for n in range(max_iter + 1):
        if z.real > radius or z.real > 700.0:
            return min(n, max_iter)
        if n == max_iter:
            break
        try:
            z = ray.E(kappa, z)
        except ExprayError:
            return min(n + 1, max_iter)
    return max_iter


# -- driver ---------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="expray",
        description=(
            "Escaping-set dynamics of exponential maps exp(z) + kappa: "
            "dynamic rays, the symbolic model, parameter rays."
        ),
        epilog=(
            "Addresses use the grammar '[prefix|tail]', e.g. '[0,1|per:2,3]', "
            "'[|tower:1.0]', '[|poly:1,1,+]'. Complex numbers are 'a+bi'. "
            "Exit codes: 0 ok, 2 parse error, 3 precondition violated, "
            "4 numeric failure (no convergence / broken ray / horizon), "
            "5 I/O error."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, address=True):
        if address:
            p.add_argument("--address", required=True, help="external address")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", default=None, choices=("csv", "json"))

    p = sub.add_parser("classify", help="address class with t_star and t_s")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("ts", help="minimal potential report")
    common(p)
    p.set_defaults(func=_cmd_ts)

    p = sub.add_parser("ray", help="sample a dynamic ray to CSV")
    common(p)
    p.add_argument("--kappa", required=True)
    p.add_argument("--t-lo", type=float, required=True, dest="t_lo")
    p.add_argument("--t-hi", type=float, required=True, dest="t_hi")
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(func=_cmd_ray)

    p = sub.add_parser("conjugate", help="map a point between two parameters")
    common(p, address=False)
    p.add_argument("--kappa1", required=True)
    p.add_argument("--kappa2", required=True)
    p.add_argument("--point", required=True)
    p.set_defaults(func=_cmd_conjugate)

    p = sub.add_parser("param-ray", help="parameter ray point or sample")
    common(p)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--t-lo", type=float, default=None, dest="t_lo")
    p.add_argument("--t-hi", type=float, default=None, dest="t_hi")
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=_cmd_param_ray)

    p = sub.add_parser("diff-endpoint", help="endpoint differentiability series")
    common(p)
    p.add_argument("--n-terms", type=int, default=40, dest="n_terms")
    p.set_defaults(func=_cmd_diff_endpoint)

    p = sub.add_parser("escape-address", help="address with prescribed escape speed")
    common(p, address=False)
    p.add_argument("--speed", required=True,
                   help="sqrt | log | linear:<rate>")
    p.add_argument("--n-terms", type=int, default=40, dest="n_terms")
    p.set_defaults(func=_cmd_escape_address)

    p = sub.add_parser("itinerary", help="itinerary against a reference address")
    common(p)
    p.add_argument("--ref", required=True, help="reference external address")
    p.add_argument("--n", type=int, default=12)
    p.set_defaults(func=_cmd_itinerary)

    p = sub.add_parser("escape-image", help="escape-time raster (binary PGM)")
    common(p, address=False)
    p.add_argument("--kappa", required=True)
    p.add_argument("--bounds", required=True, help="xmin,xmax,ymin,ymax")
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--max-iter", type=int, default=32, dest="max_iter")
    p.add_argument("--escape-radius", type=float, default=50.0,
                   dest="escape_radius")
    p.set_defaults(func=_cmd_escape_image)

    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = _load_config(args)
        args.func(args, cfg)
    except ExprayError as exc:
        sys.stdout.write(
            json.dumps(
                {"error": type(exc).__name__, "message": str(exc)},
                sort_keys=True,
            )
            + "\n"
        )
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return _EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
