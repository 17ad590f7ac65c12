"""Command-line front end: geometry queries, single solves, convolutions, rearrangements and verification runs."""

import argparse
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pconcave_app.batch import load_experiment, read_batch_file, run_batch
from pconcave_app.config import AppConfig
from pconcave_app.convex_geom import (
    area,
    centroid,
    hausdorff_distance,
    mean_width,
    mean_width_disc,
    minimal_width,
    minkowski_combine,
    parse_body_literal,
    perimeter,
    rotation_mean,
)
from pconcave_app.convolve import convolve_binary
from pconcave_app.errors import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    ArgumentError,
    ConfigError,
    PConcaveError,
    ResolutionError,
    UsageError,
)
from pconcave_app.experiments import run_experiment
from pconcave_app.field import lq_norm
from pconcave_app.gridio import read_grid_csv, write_argmax_csv, write_grid_csv
from pconcave_app.metrics import publish_report
from pconcave_app.pde_solve import POISSON, PUCCI_MINUS, OperatorSpec, SolveParams, SourceTerm, solve, torsional_rigidity
from pconcave_app.rearrange import run_rearrangement, sharp_rearrangement


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 3 instead of 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage()
        raise UsageError(message)


def _exponent(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _int_list(text: str) -> List[int]:
    return [int(item) for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--h", type=_exponent, help="grid spacing")
    common.add_argument("--p", type=_exponent, help="concavity exponent")
    common.add_argument("--mu", type=float, help="combination weight in (0, 1)")
    common.add_argument("--m", type=int, help="number of rotations")
    common.add_argument("--out", help="output directory (default PCONCAVE_OUT_DIR)")
    common.add_argument("--seed", type=int, help="seed for randomized sweeps")
    common.add_argument("--format", choices=("json", "csv"), help="report format")

    operator = argparse.ArgumentParser(add_help=False)
    operator.add_argument("--operator", choices=(POISSON, PUCCI_MINUS), default=POISSON)
    operator.add_argument("--lambda", dest="lam", type=float, default=1.0)
    operator.add_argument("--Lambda", dest="Lam", type=float, default=1.0)
    operator.add_argument("--source", default="constant 1", help="e.g. 'constant 1', 'radial beta_cap 2 2', 'affine 1 0.5 0'")
    operator.add_argument("--K", type=int, default=8, help="rotated frames of the Pucci stencil")
    operator.add_argument("--tol", type=float, default=1e-8)
    operator.add_argument("--stencil-radius", type=float, help="arm length of the rotated Pucci frames in grid units (default max(2, sqrt(1/h)))")

    parser = _Parser(prog="pconcave", description="p-concavity and mean-width rearrangement verifier")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    geom = sub.add_parser("geom", parents=[common], help="geometric quantities of a body")
    geom.add_argument("body", help="'square a', 'disc cx cy r', 'polygon x1 y1 ...' or a polygon file")
    geom.add_argument("--body1", help="second body; adds the mu-combination and the Hausdorff distance")

    solve_cmd = sub.add_parser("solve", parents=[common, operator], help="solve the Dirichlet problem on a body")
    solve_cmd.add_argument("body")

    conv = sub.add_parser("convolve", parents=[common, operator], help="(p, mu)-convolution of two solutions")
    conv.add_argument("body0", nargs="?")
    conv.add_argument("body1", nargs="?")
    conv.add_argument("--field0", help="grid CSV to use instead of solving on body0")
    conv.add_argument("--field1", help="grid CSV to use instead of solving on body1")

    rearr = sub.add_parser("rearrange", parents=[common, operator], help="mean-width rearrangement of a solution")
    rearr.add_argument("body", nargs="?")
    rearr.add_argument("--field", help="grid CSV to use instead of solving on body")
    rearr.add_argument("--m-list", type=_int_list, help="comma separated rotation counts; writes a manifest")

    verify = sub.add_parser("verify", parents=[common], help="run an experiment preset or config file")
    verify.add_argument("target", nargs="?", help="preset name or key=value config file")
    verify.add_argument("--batch", help="file listing presets or config files, one per line")
    return parser


def _out_dir(args: argparse.Namespace, app: AppConfig) -> Path:
    out = Path(args.out or app.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _operator(args: argparse.Namespace) -> OperatorSpec:
    return OperatorSpec(kind=args.operator, lam=args.lam, Lam=args.Lam, source=SourceTerm.parse(args.source), directions=args.K)


def _params(args: argparse.Namespace) -> SolveParams:
    return SolveParams(h=args.h if args.h is not None else 1.0 / 32.0, tol=args.tol, stencil_radius=args.stencil_radius)


def _body_summary(text: str) -> Dict[str, object]:
    body = parse_body_literal(text)
    xmin, ymin, xmax, ymax = body.bounding_box()
    return {
        "kind": body.kind,
        "area": area(body),
        "perimeter": perimeter(body),
        "mean_width": mean_width(body),
        "minimal_width": minimal_width(body),
        "centroid": [float(c) for c in centroid(body)],
        "bounding_box": [xmin, ymin, xmax, ymax],
    }


def _cmd_geom(args: argparse.Namespace, app: AppConfig) -> int:
    summary: Dict[str, object] = {"body": _body_summary(args.body)}
    body = parse_body_literal(args.body)
    if args.body1:
        mu = args.mu if args.mu is not None else 0.5
        other = parse_body_literal(args.body1)
        combined = minkowski_combine(body, other, mu)
        summary["body1"] = _body_summary(args.body1)
        summary["combination"] = {"mu": mu, "area": area(combined), "mean_width": mean_width(combined)}
        summary["hausdorff"] = hausdorff_distance(body, other)
    if args.m:
        domain = rotation_mean(body, args.m)
        summary["rotation_mean"] = {
            "m": args.m,
            "mean_width": mean_width(domain),
            "hausdorff_to_ball": hausdorff_distance(domain, mean_width_disc(body, centroid(domain))),
        }
    text = json.dumps(summary, indent=2)
    print(text)
    if args.out:
        path = _out_dir(args, app) / "geom.json"
        path.write_text(text + "\n")
        logging.info("Wrote geometry summary to %s", path)
    return EXIT_PASS


def _cmd_solve(args: argparse.Namespace, app: AppConfig) -> int:
    u = solve(parse_body_literal(args.body), _operator(args), _params(args))
    path = write_grid_csv(u, _out_dir(args, app) / "solution.csv")
    print(
        f"max={lq_norm(u, math.inf)!r} integral={torsional_rigidity(u)!r} "
        f"residual={u.meta['residual']!r} iterations={u.meta['iterations']} csv={path}"
    )
    return EXIT_PASS


def _field_or_solve(field_path: Optional[str], body_text: Optional[str], args: argparse.Namespace, name: str):
    if field_path:
        return read_grid_csv(field_path)
    if not body_text:
        raise UsageError(f"{name}: give a body or --field")
    return solve(parse_body_literal(body_text), _operator(args), _params(args))


def _cmd_convolve(args: argparse.Namespace, app: AppConfig) -> int:
    u0 = _field_or_solve(args.field0, args.body0, args, "body0")
    u1 = _field_or_solve(args.field1, args.body1, args, "body1")
    mu = args.mu if args.mu is not None else 0.5
    p = args.p if args.p is not None else 0.5
    result = convolve_binary(u0, u1, mu, p, args.h, workers=app.workers, chunk_size=app.chunk_size)
    out = _out_dir(args, app)
    write_grid_csv(result.field, out / "convolution.csv")
    write_argmax_csv(result, out / "argmax.csv")
    print(f"max={lq_norm(result.field, math.inf)!r} csv={out / 'convolution.csv'}")
    return EXIT_PASS


def _cmd_rearrange(args: argparse.Namespace, app: AppConfig) -> int:
    u = _field_or_solve(args.field, args.body, args, "body")
    p = args.p if args.p is not None else 0.5
    out = _out_dir(args, app)
    if args.m_list:
        run = run_rearrangement(u, p, args.m_list, args.h, app.workers)
        for m, gf in run.fields.items():
            write_grid_csv(gf, out / f"rearranged_m{m}.csv")
        path = run.write_manifest(out / "manifest.txt")
        print(f"manifest={path}")
        return EXIT_PASS
    m = args.m if args.m is not None else 8
    rearranged = sharp_rearrangement(u, p, m, args.h, workers=app.workers, chunk_size=app.chunk_size)
    path = write_grid_csv(rearranged, out / f"rearranged_m{m}.csv")
    print(f"max={lq_norm(rearranged, math.inf)!r} csv={path}")
    return EXIT_PASS


def _cmd_verify(args: argparse.Namespace, app: AppConfig, client) -> int:
    overrides = {"h": args.h, "p": args.p, "mu": args.mu, "m": args.m, "seed": args.seed}
    if args.batch:
        entries = read_batch_file(args.batch)
        return run_batch(entries, app, client, args.out, args.format, base_dir=Path(args.batch).parent, **overrides)
    if not args.target:
        raise UsageError("verify needs a preset, a config file or --batch")
    config = load_experiment(args.target).with_overrides(**overrides)
    report = run_experiment(config, app)
    stem = Path(args.target).stem if Path(args.target).suffix else args.target
    path = report.write(args.out or app.out_dir, args.format or app.report_format, stem=stem)
    publish_report(client, app, report)
    print(f"{report.experiment}: {report.verdict} (min slack {report.min_slack:.3e}, eps {report.epsilon:.3e}) -> {path}")
    return report.exit_code


def main(argv: Optional[Sequence[str]] = None, app: Optional[AppConfig] = None, client=None) -> int:
    app = app or AppConfig.from_env()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "geom":
            return _cmd_geom(args, app)
        if args.command == "solve":
            return _cmd_solve(args, app)
        if args.command == "convolve":
            return _cmd_convolve(args, app)
        if args.command == "rearrange":
            return _cmd_rearrange(args, app)
        return _cmd_verify(args, app, client)
    except UsageError as exc:
        logging.error("Usage error: %s", exc)
        return EXIT_USAGE
    except (ConfigError, ArgumentError, ResolutionError) as exc:
        logging.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        logging.error("File error: %s", exc)
        return EXIT_USAGE
    except PConcaveError as exc:
        logging.error("%s", exc)
        return EXIT_FAIL
    except Exception:
        logging.exception("Unexpected error")
        return EXIT_FAIL
