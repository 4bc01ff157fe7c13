"""Command line front end: configuration, subcommands, verification suites,
caching and JSON serialization.

Exit codes: 0 success, 1 verification failure, 2 usage error.
Config precedence: flags > environment (CHEB_*) > config file > defaults.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass


class UsageError(ValueError):
    pass


@dataclass
class Config:
    n_max: int = 4
    depth: int = 8
    cache_dir: str | None = None
    output_format: str = "json"
    parallelism: int = 1

    def validate(self) -> None:
        if self.n_max < 1:
            raise UsageError("n_max must be at least 1")
        if self.depth < 2:
            raise UsageError("depth must be at least 2")
        if self.output_format not in ("json", "text"):
            raise UsageError("output_format must be json or text")
        if self.parallelism < 1:
            raise UsageError("parallelism must be positive")


_ENV_FIELDS = {
    "CHEB_N_MAX": ("n_max", int),
    "CHEB_DEPTH": ("depth", int),
    "CHEB_CACHE_DIR": ("cache_dir", str),
    "CHEB_OUTPUT_FORMAT": ("output_format", str),
    "CHEB_PARALLELISM": ("parallelism", int),
}


def load_config(args: argparse.Namespace) -> Config:
    cfg = Config()
    path = getattr(args, "config", None) or os.environ.get("CHEB_CONFIG")
    if path:
        if not os.path.exists(path):
            raise UsageError(f"config file not found: {path}")
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip()
                if key in ("n_max", "depth", "parallelism"):
                    setattr(cfg, key, int(value))
                elif key in ("cache_dir", "output_format"):
                    setattr(cfg, key, value)
    for env, (field_name, conv) in _ENV_FIELDS.items():
        if env in os.environ:
            setattr(cfg, field_name, conv(os.environ[env]))
    for field_name in ("n_max", "depth", "cache_dir", "output_format", "parallelism"):
        val = getattr(args, field_name, None)
        if val is not None:
            setattr(cfg, field_name, val)
    cfg.validate()
    if cfg.cache_dir:
        from .tl import set_cache_dir

        set_cache_dir(cfg.cache_dir)
    return cfg


def _emit(data, cfg: Config, out_path: str | None) -> None:
    if cfg.output_format == "json":
        text = json.dumps(data, indent=2)
    else:
        text = _render_text(data)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _render_text(data, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(data, dict):
        lines = []
        for k, v in data.items():
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(data, list):
        return "\n".join(_render_text(v, indent) for v in data)
    return f"{pad}{data}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_jw(args, cfg: Config) -> int:
    from .tl import jones_wenzl

    el = jones_wenzl(args.n)
    _emit(el.to_json(), cfg, args.output)
    return 0


def cmd_idempotents(args, cfg: Config) -> int:
    from .tl import (
        admissible_sequences,
        central_idempotent,
        primitive_idempotent,
    )

    n = args.n
    if args.central:
        data = {
            f"p_{n},{k}": central_idempotent(n, k).to_json()
            for k in range(n % 2, n + 1, 2)
        }
    elif args.primitive:
        data = {}
        for eps in admissible_sequences(n):
            name = "".join("+" if e > 0 else "-" for e in eps.entries)
            data[f"p_eps[{name}]"] = primitive_idempotent(eps).to_json()
    else:
        raise UsageError("choose --central or --primitive")
    _emit(data, cfg, args.output)
    return 0


def cmd_colored(args, cfg: Config) -> int:
    from . import chebyshev as ch

    n = args.n
    if args.model == "khovanov":
        sys_ = ch.khovanov_system(n)
    elif args.model == "jw":
        sys_ = ch.jw_system(n)
    else:
        raise UsageError("model must be khovanov or jw")
    data = {"model": args.model, "n": n, "complex": sys_.v(n).to_json()}
    code = 0
    if args.triangle:
        try:
            ch.triangle_check(sys_, n)
            data["triangle"] = "verified"
        except ch.NotATriangle as exc:
            data["triangle"] = f"FAILED: {exc}"
            code = 1
    if args.theta_against:
        other = (
            ch.khovanov_system(n)
            if args.theta_against == "khovanov"
            else ch.jw_system(n)
        )
        try:
            td = ch.build_theta(sys_, other, n)
            data["theta"] = {str(k): bool(v) for k, v in td.verified.items()}
            if not all(td.verified.values()):
                code = 1
        except ch.CompletionFailed as exc:
            data["theta"] = f"FAILED: {exc}"
            code = 1
    _emit(data, cfg, args.output)
    return code


def _build_projector(n: int, depth: int):
    from . import projector as pr

    if n == 2:
        return pr.p2_complex(depth)
    if n == 3:
        p2 = pr.p2_complex(depth + 4)
        qn = pr.build_qn(3, p2, depth)
        copies = depth // (2 * 3 - 2) + 1
        return pr.splice_pn(3, qn, copies, depth)
    raise UsageError("projectors are built for n = 2 or 3")


def cmd_projector(args, cfg: Config) -> int:
    from . import annulus as ann

    n = args.n
    depth = args.depth if args.depth is not None else cfg.depth
    p = _build_projector(n, depth)
    data = {
        "n": n,
        "depth": depth,
        "safe_window": list(p.safe_window),
        "complex": p.complex.to_json(),
    }
    code = 0
    if args.check == "turnbacks":
        from .projector import kills_turnbacks

        res = kills_turnbacks(p)
        data["turnbacks"] = {
            str(i): {k: v.to_json() for k, v in d.items()} for i, d in res.items()
        }
        if not all(v.contractible for d in res.values() for v in d.values()):
            code = 1
    elif args.check == "euler":
        el, cutoff = ann.trace_euler_truncated(p)
        rep = ann.chebyshev_indicator_below_cutoff(el, n, cutoff)
        data["euler"] = {
            "trace": el.to_json(),
            "cutoff": cutoff,
            "matches_S_n": rep["S_n_coefficient_is_1"] and rep["other_coefficients_vanish"],
        }
        if not data["euler"]["matches_S_n"]:
            code = 1
    _emit(data, cfg, args.output)
    return code


def cmd_qn(args, cfg: Config) -> int:
    from . import projector as pr

    depth = args.depth if args.depth is not None else cfg.depth
    if args.n == 2:
        qn = pr.q2_complex()
    elif args.n == 3:
        p2 = pr.p2_complex(depth + 4)
        qn = pr.build_qn(3, p2, depth)
    else:
        raise UsageError("Q_n is built for n = 2 or 3")
    data = {
        "n": args.n,
        "depth": qn.depth,
        "groups": {k: sorted(v) for k, v in qn.groups.items()},
        "homotopy_entry_counts": {k: len(v.entries) for k, v in qn.solved.items()},
        "complex": qn.complex.to_json(),
    }
    _emit(data, cfg, args.output)
    return 0


def cmd_simplify(args, cfg: Config) -> int:
    from .complexes import GradedComplex, simplify

    with open(args.input) as fh:
        cx = GradedComplex.from_json(json.load(fh))
    out = simplify(cx)
    _emit(out.to_json(), cfg, args.output)
    return 0


def cmd_trace_euler(args, cfg: Config) -> int:
    from .annulus import trace_euler
    from .complexes import GradedComplex
    from .tl import field_to_json

    with open(args.input) as fh:
        cx = GradedComplex.from_json(json.load(fh))
    el = trace_euler(cx)
    if args.chebyshev:
        data = {
            f"S_{k}": field_to_json(c)
            for k, c in sorted(el.in_chebyshev_basis().items())
        }
    else:
        data = el.to_json()
    _emit(data, cfg, args.output)
    return 0


def cmd_arc(args, cfg: Config) -> int:
    from . import arc as arcmod
    from .tangle import catalan

    n = args.n
    alg = arcmod.arc_algebra(n)
    data = {
        "n": n,
        "dimension": alg.dim(),
        "graded_dimension": {str(k): v for k, v in alg.graded_dimension().items()},
    }
    code = 0
    if args.hh0:
        rank, spanning = arcmod.quantum_coinvariants_rank(n)
        data["HH0_q"] = {
            "rank": rank,
            "catalan": catalan(n),
            "idempotents_span": spanning,
        }
        if rank != catalan(n) or not spanning:
            code = 1
    if args.hh:
        hh = arcmod.quantum_hochschild_bar(n, args.imax)
        data["HH_q"] = {str(i): r for i, r in sorted(hh.items())}
        if any(r != 0 for i, r in hh.items() if i > 0):
            code = 1
    _emit(data, cfg, args.output)
    return code


def cmd_verify(args, cfg: Config) -> int:
    from .verify import verify_suite

    n_max = args.n_max if args.n_max is not None else cfg.n_max
    depth = args.depth if args.depth is not None else cfg.depth
    report = verify_suite(
        args.suite, n_max=n_max, depth=depth,
        parallelism=cfg.parallelism, quick=args.quick,
    )
    _emit(report.to_json(), cfg, args.output)
    return 0 if report.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chebtl",
        description="Exact Temperley-Lieb / Bar-Natan categorical computations",
    )
    ap.add_argument("--config", help="key=value config file")
    ap.add_argument("--cache-dir", dest="cache_dir", help="projector cache directory")
    ap.add_argument(
        "--output-format", dest="output_format", choices=("json", "text")
    )
    ap.add_argument("--parallelism", type=int, dest="parallelism")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jw", help="Jones-Wenzl projector as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_jw)

    p = sub.add_parser("idempotents", help="central or primitive idempotents")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--central", action="store_true")
    p.add_argument("--primitive", action="store_true")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_idempotents)

    p = sub.add_parser("colored", help="colored complexes and their triangles")
    p.add_argument("--model", choices=("khovanov", "jw"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--triangle", action="store_true")
    p.add_argument("--theta-against", dest="theta_against", choices=("khovanov", "jw"))
    p.add_argument("--output")
    p.set_defaults(fn=cmd_colored)

    p = sub.add_parser("projector", help="truncated categorified projectors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--check", choices=("turnbacks", "euler"))
    p.add_argument("--output")
    p.set_defaults(fn=cmd_projector)

    p = sub.add_parser("qn", help="the four-term complex Q_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_qn)

    p = sub.add_parser("simplify", help="deloop and eliminate a complex")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_simplify)

    p = sub.add_parser("trace-euler", help="annular trace Euler characteristic")
    p.add_argument("--input", required=True)
    p.add_argument("--chebyshev", action="store_true")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_trace_euler)

    p = sub.add_parser("arc", help="arc algebras and quantum Hochschild homology")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--hh0", action="store_true")
    p.add_argument("--hh", action="store_true")
    p.add_argument("--imax", type=int, default=2)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_arc)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument(
        "--suite",
        required=True,
        choices=("coeff", "tl", "cob", "chebyshev", "projector", "annulus", "arc", "all"),
    )
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--quick", action="store_true", help="smaller randomized batteries")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_verify)
    return ap


def run_command(argv: list[str]) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = load_config(args)
        return args.fn(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
