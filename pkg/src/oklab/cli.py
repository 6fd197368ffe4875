"""Command line front end.

Exit status: 0 success, 1 property violation, 2 bad input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from oklab.bodies import body_chain, delta_k, domain_membership, seshadri_param, simplex_body
from oklab.errors import InputError, OklabError, PropertyViolation
from oklab.order import DEGLEX, LEX, Order
from oklab.polytope import RatPolytope, format_polytope, read_polytope
from oklab.render import bodies_svg, points_csv, points_svg, polytope_csv, write_atomic
from oklab.sections import ModelSpec, conic_flag, leading_set, read_sections

SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def fmt_q(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ------------------------------------------------------------------ argument parsing


def _options(text: str) -> dict[str, str]:
    """'a=1,b=2,3,c=x' -> {'a': '1', 'b': '2,3', 'c': 'x'}: bare tokens extend the previous value."""
    out: dict[str, str] = {}
    last = None
    for tok in filter(None, text.split(",")):
        if "=" in tok:
            key, val = tok.split("=", 1)
            out[key.strip()] = val.strip()
            last = key.strip()
        elif last is not None:
            out[last] += "," + tok.strip()
        else:
            raise InputError(f"model option {tok!r} has no name")
    return out


def _int(opts, key, default=None) -> int:
    if key not in opts:
        if default is None:
            raise InputError(f"model needs {key}=")
        return default
    try:
        return int(opts[key])
    except ValueError:
        raise InputError(f"{key} must be an integer, got {opts[key]!r}") from None


def parse_model(text: str) -> ModelSpec:
    """Model strings: p2:d=2, projective:n=3,d=2, curve:d=5, toric:file=P.poly,
    toric:simplex=1,1,4, custom:file=S.sec; add flag=conic for the conic flag."""
    family, _, rest = text.partition(":")
    opts = _options(rest)
    flag = None
    if "flag" in opts:
        if opts["flag"] != "conic":
            raise InputError(f"unknown flag {opts['flag']!r}; only 'conic' is built in")
    family = family.strip().lower()
    if family.startswith("p") and family[1:].isdigit():
        n = int(family[1:])
        family, opts["n"] = "projective", str(n)
    if family == "projective":
        n, d = _int(opts, "n"), _int(opts, "d", 1)
        if n < 1 or d < 1:
            raise InputError("projective space needs n >= 1 and d >= 1")
        flag = conic_flag(n) if "flag" in opts else None
        return ModelSpec.projective_space(n, d, flag=flag)
    if family == "curve":
        d = _int(opts, "d")
        if d < 1:
            raise InputError("curve degree must be positive")
        return ModelSpec.curve(d)
    if family == "toric":
        if "file" in opts:
            P = read_polytope(opts["file"])
        elif "simplex" in opts:
            P = simplex_body([Fraction(x) for x in opts["simplex"].split(",")])
        else:
            raise InputError("toric model needs file= or simplex=")
        flag = conic_flag(P.n) if "flag" in opts else None
        return ModelSpec.toric(P, flag=flag)
    if family == "custom":
        if "file" not in opts:
            raise InputError("custom model needs file=")
        space = read_sections(opts["file"])
        flag = conic_flag(space.n) if "flag" in opts else None
        return ModelSpec("custom", n=space.n, path=opts["file"], flag=flag, label=f"custom:{opts['file']}")
    raise InputError(f"unknown model family {family!r}")


def parse_levels(text: str) -> list[int]:
    try:
        levels = sorted(set(int(x) for x in text.split(",") if x.strip()))
    except ValueError:
        raise InputError(f"bad level list {text!r}") from None
    if not levels or levels[0] < 1:
        raise InputError("levels must be positive integers")
    return levels


def parse_order(text: str) -> Order:
    try:
        return Order.parse(text)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None


def parse_box(text: str):
    """'lo1,lo2:hi1,hi2' -> Box."""
    from oklab.moment import Box

    try:
        lo, hi = text.split(":")
        return Box(tuple(float(v) for v in lo.split(",")), tuple(float(v) for v in hi.split(",")))
    except ValueError:
        raise InputError(f"bad box {text!r}; expected lo1,..:hi1,..") from None


def _positive(text: str) -> float:
    try:
        v = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _level_of(model: ModelSpec, args) -> int:
    if model.family == "custom":
        return read_sections(model.path).level
    return parse_levels(args.k)[0]


# ------------------------------------------------------------------ commands


def cmd_body(args) -> int:
    model = parse_model(args.model)
    order = parse_order(args.order)
    levels = parse_levels(args.k)
    chain = body_chain(model, levels, order)
    out = Path(args.out)
    for k, P in chain.levels:
        write_atomic(out / f"delta_{k}.poly", format_polytope(P))
        print(f"Δ{str(k).translate(SUB)}: {len(P.vertices)} vertices, vol={fmt_q(P.volume())} -> {out / f'delta_{k}.poly'}")
    if model.n <= 2:
        labels = [(f"k={k}", P) for k, P in chain.levels]
        write_atomic(out / "bodies.svg", bodies_svg(labels))
    else:
        for k, P in chain.levels:
            write_atomic(out / f"delta_{k}.csv", polytope_csv(P))
    names = [f"Δ{str(k).translate(SUB)}" for k, _ in chain.levels]
    required_ok = all(ok for _, _, ok in chain.inclusions())
    steps = []
    for (k, P), (m, Q) in zip(chain.levels, chain.levels[1:]):
        steps.append((k, m, Q.contains_polytope(P)))
    if all(ok for _, _, ok in steps):
        print(" ⊆ ".join(names) + ": OK")
    else:
        for k, m, ok in steps:
            if not ok:
                note = "required" if m % k == 0 else f"not required since {k} does not divide {m}"
                print(f"Δ{str(k).translate(SUB)} ⊄ Δ{str(m).translate(SUB)} ({note})")
    if not required_ok:
        bad = [(k, m) for k, m, ok in chain.inclusions() if not ok]
        print(f"inclusion violated for k | m: {bad}")
        return 1
    return 0


def _describe(P: RatPolytope, k: int) -> str:
    if P.n == 1:
        lo, hi = P.vertices[0][0], P.vertices[-1][0]
        return f"Δ=[{fmt_q(lo)},{fmt_q(hi)}]"
    verts = " ".join("(" + ",".join(fmt_q(c) for c in v) + ")" for v in P.vertices)
    return f"Δ{str(k).translate(SUB)}={{{verts}}}"


def cmd_volume(args) -> int:
    model = parse_model(args.model)
    order = parse_order(args.order)
    k = _level_of(model, args)
    P = delta_k(leading_set(model, k, order))
    n = P.n
    vol = P.volume()
    scaled = math.factorial(n) * vol
    line = f"{_describe(P, k)}, vol={fmt_q(vol)}, {n}!·vol={fmt_q(scaled)}"
    known = model.self_intersection()
    status = 0
    if known is not None:
        name = "deg L" if n == 1 else f"(L{str(n).translate(SUP)})"
        if scaled == known:
            line += f"={name}"
        else:
            line += f" {'<' if scaled < known else '>'} {name}={known}"
            if scaled > known:
                status = 1
    print(line)
    return status


def _polytope_arg(args, default_order: Order) -> RatPolytope:
    if args.polytope:
        return read_polytope(args.polytope)
    if not args.model:
        raise InputError("pass --polytope or --model")
    model = parse_model(args.model)
    order = parse_order(args.order) if args.order else default_order
    return delta_k(leading_set(model, _level_of(model, args), order))


def cmd_seshadri(args) -> int:
    P = _polytope_arg(args, DEGLEX)
    print(f"t*={fmt_q(seshadri_param(P))}")
    return 0


def _complex_point(text: str):
    out = []
    for tok in text.split(";"):
        try:
            re, im = (tok.split(",") + ["0"])[:2]
            out.append((Fraction(re), Fraction(im)))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad complex coordinate {tok!r}; expected re,im") from None
    return out


def cmd_domain(args) -> int:
    P = _polytope_arg(args, LEX)
    if not args.z and not args.mu:
        raise InputError("pass at least one --z or --mu point")
    for text in args.z or []:
        inside = domain_membership(P, z=_complex_point(text))
        print(f"z={text}: {'inside' if inside else 'outside'}")
    for text in args.mu or []:
        try:
            mu = [Fraction(x) for x in text.split(",")]
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad moment point {text!r}") from None
        inside = domain_membership(P, mu=mu)
        print(f"mu={text}: {'inside' if inside else 'outside'}")
    return 0


def _moment_model(args):
    from oklab.moment import MomentModel

    model = parse_model(args.model)
    order = parse_order(args.order)
    return MomentModel(leading_set(model, _level_of(model, args), order).exponents)


def cmd_moment(args) -> int:
    from oklab.moment import capped_potential, image_hausdorff, moment_map, symplectic_volume

    mm = _moment_model(args)
    if args.action == "image":
        if mm.n > 2:
            raise InputError("moment image is available for n <= 2")
        dist = image_hausdorff(mm, args.R)
        print(f"hausdorff(mu([-{args.R:g},{args.R:g}]^{mm.n}), Conv(A))={dist:.6g}")
        if args.out:
            rng = np.random.default_rng(args.seed)
            x = rng.uniform(-args.R, args.R, size=(args.samples, mm.n))
            y = moment_map(mm, x)
            text = points_svg(y, mm.hull, "moment image") if args.out.endswith(".svg") else points_csv(y)
            write_atomic(args.out, text)
        return 0
    if args.action == "volume":
        region = parse_box(args.box) if args.box else "all"
        value = symplectic_volume(mm, region, rtol=args.rtol)
        n = mm.n
        line = f"int det Hess u_A={value:.6g}, {n}!·int={math.factorial(n) * value:.6g}"
        if region == "all":
            exact = mm.hull.volume()
            rel = abs(value - float(exact)) / float(exact)
            line += f", vol(Conv A)={fmt_q(exact)}, relative error={rel:.3g}"
            print(line)
            return 0 if rel <= max(10 * args.rtol, 1e-2) else 1
        print(line)
        return 0
    if args.action == "cap":
        if not args.u_box:
            raise InputError("moment cap needs --u-box lo1,..:hi1,..")
        field_ = capped_potential(mm, parse_box(args.u_box), margin=args.margin, delta=args.delta)
        res = field_.verify(args.grid ** mm.n)
        for key, val in res.items():
            print(f"{key}={val}")
        ok = res["equal_on_U"] <= 1e-9 and res["max_outside_window"] == 0 and res["min_hessian_eigenvalue"] >= -1e-9
        return 0 if ok else 1
    raise InputError(f"unknown moment action {args.action!r}")


def cmd_degenerate(args) -> int:
    from oklab.degeneration import (
        CertificateFailure,
        DegenerationRun,
        audited_constant,
        degeneration_error,
        gluing_certificate,
        rescale_basis,
        shrink_box,
    )
    from oklab.moment import MomentModel
    from oklab.sections import format_section

    model = parse_model(args.model)
    order = parse_order(args.order)
    basis = leading_set(model, _level_of(model, args), order)
    if args.action == "check":
        tau = Fraction(args.tau)
        run = DegenerationRun.for_basis(basis, tau, args.ball_radius)
        print(f"gamma={','.join(map(str, run.gamma))}")
        print(f"tau={fmt_q(tau)}")
        for alpha, r in zip(basis.exponents, rescale_basis(run)):
            print(f"r_{','.join(map(str, alpha))} = {format_section(r)}")
        err, C = degeneration_error(run), audited_constant(run)
        print(f"error bound={err:.6g}, C={C:.6g}, C*tau={C * float(tau):.6g}")
        return 0 if err <= C * float(tau) * (1 + 1e-12) else 1
    if args.action == "certify":
        mm = MomentModel(basis.exponents)
        U = parse_box(args.u_box) if args.u_box else shrink_box(mm, args.u_shrink)
        K = parse_box(args.k_box) if args.k_box else shrink_box(mm, args.k_shrink)
        try:
            cert = gluing_certificate(basis, None, U, K, args.delta, args.grid)
        except CertificateFailure as exc:
            print(f"gluing certificate: FAILED ({exc})")
            for key, val in exc.report.items():
                if key != "certificate":
                    print(f"{key}={val}")
            return 1
        text = cert.report()
        sys.stdout.write(text)
        if args.out:
            write_atomic(args.out, text)
        return 0
    raise InputError(f"unknown degenerate action {args.action!r}")


def cmd_verify(args) -> int:
    from oklab.verify import run_suite

    results = run_suite(seed=args.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    failed = sum(1 for _, ok, _ in results if not ok)
    print(f"{len(results) - failed}/{len(results)} properties hold")
    return 1 if failed else 0


# ------------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oklab", description="Okounkov bodies, moment maps and toric degenerations.")
    parser.add_argument("--seed", type=int, default=0, help="seed for all sampling (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_args(p, order_default="lex", k_default="1"):
        p.add_argument("--model", help="model string, e.g. p2:d=2,flag=conic or curve:d=5")
        p.add_argument("--order", default=order_default, help="lex, deglex or weight:w1,..,wn")
        p.add_argument("--k", default=k_default, help="level, or comma list of levels")

    p = sub.add_parser("body", help="Delta_k chain and inclusion report")
    model_args(p, k_default="1,2,3")
    p.add_argument("--out", default=".", help="directory for polytope files")
    p.set_defaults(func=cmd_body)

    p = sub.add_parser("volume", help="exact volume and n!·vol against (L^n)")
    model_args(p)
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("seshadri", help="largest simplex t*Sigma inside a body")
    p.add_argument("--polytope", help="polytope file")
    model_args(p, order_default=None)
    p.set_defaults(func=cmd_seshadri)

    p = sub.add_parser("domain", help="membership in the Okounkov domain")
    p.add_argument("--polytope", help="polytope file")
    model_args(p)
    p.add_argument("--z", action="append", help="point as re,im;re,im;...")
    p.add_argument("--mu", action="append", help="moment coordinates |z_1|^2,...")
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("moment", help="moment map images, volumes and capped potentials")
    p.add_argument("action", choices=["image", "volume", "cap"])
    model_args(p)
    p.add_argument("--R", type=_positive, default=40.0, help="half-width of the x-box for images")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--box", help="x-region lo1,..:hi1,.. for volume (default: all of R^n)")
    p.add_argument("--rtol", type=_positive, default=1e-3)
    p.add_argument("--u-box", help="box U for cap, lo1,..:hi1,.. (write --u-box=... for negative bounds)")
    p.add_argument("--margin", type=float, default=0.1)
    p.add_argument("--delta", type=_positive, default=0.5)
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--out", help="SVG or CSV file for image samples")
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("degenerate", help="tau^gamma degeneration checks and gluing certificates")
    p.add_argument("action", choices=["check", "certify"])
    model_args(p)
    p.add_argument("--tau", default="1/2", help="rational tau in (0,1) for check")
    p.add_argument("--ball-radius", type=_positive, default=1.0)
    p.add_argument("--delta", type=_positive, default=1e-2)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--u-shrink", type=_positive, default=0.8)
    p.add_argument("--k-shrink", type=_positive, default=0.95)
    p.add_argument("--u-box", help="explicit box U, lo1,..:hi1,.. (write --u-box=... for negative bounds)")
    p.add_argument("--k-box", help="explicit box K, lo1,..:hi1,..")
    p.add_argument("--out", help="write the certificate report here")
    p.set_defaults(func=cmd_degenerate)

    p = sub.add_parser("verify", help="run the internal property suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PropertyViolation as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return exc.exit_code
    except OklabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
