"""Command-line entry point: one subcommand per toolkit operation.

Every subcommand is a thin shell over one library call: it loads JSON
inputs, invokes the operation, and prints the result as canonical JSON (or
a small table with ``--format table``).  Exit codes: 0 on success, 2 when
an audit's verdict is "violated" (so pipelines can branch on it), 1 on any
error, including usage errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import adversarial, fortifiers, fortify, regularize, repetition, serialize, spectral
from .errors import ToolkitError
from .games import Game, game_value, solve_game, symmetrize
from .serialize import TOOL_VERSION

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors print help and exit 1 (2 is reserved for audit verdicts)."""

    def error(self, message: str):  # noqa: D401 - argparse contract
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_ERROR)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part != ""]


def _emit(args, doc: dict) -> None:
    if getattr(args, "format", "json") == "table":
        for key in sorted(doc):
            print(f"{key}\t{doc[key]}")
    else:
        sys.stdout.write(serialize.canonical_json(doc))


def _write_manifest(args, command: str, inputs: dict, outputs: dict, started: float) -> None:
    path = getattr(args, "manifest", None)
    if not path:
        return
    manifest = {
        "command": command,
        "version": TOOL_VERSION,
        "seed": getattr(args, "seed", None),
        "inputs": inputs,
        "outputs": outputs,
        "wall_time_s": round(time.monotonic() - started, 6),
    }
    serialize.save_json(path, manifest)


def _mode_from_args(args) -> fortifiers.CheckMode:
    if getattr(args, "sampled_trials", None):
        return fortifiers.sampled(args.sampled_trials, args.seed or 0)
    return fortifiers.EXHAUSTIVE


def _cmd_gen(args) -> int:
    started = time.monotonic()
    if args.target_lambda is not None:
        graph, cert = spectral.generate_expander(
            args.n_left, args.n_right, args.degree, args.seed,
            target_lambda=args.target_lambda, max_retries=args.retries,
        )
    else:
        graph = spectral.random_biregular(args.n_left, args.n_right, args.degree, args.seed)
        cert = spectral.spectral_lambda(graph, seed=args.seed)
    digest = serialize.save_json(args.out, graph.to_json_dict())
    doc = cert.to_json_dict()
    doc["out"] = args.out
    if args.cert:
        serialize.save_json(args.cert, cert.to_json_dict())
    _emit(args, doc)
    _write_manifest(args, "gen", {}, {args.out: digest}, started)
    return EXIT_OK


def _cmd_lambda(args) -> int:
    graph = serialize.load_graph(args.graph)
    cert = spectral.spectral_lambda(graph, method=args.method, tolerance=args.tolerance)
    _emit(args, cert.to_json_dict())
    return EXIT_OK


def _cmd_value(args) -> int:
    game = serialize.load_game(args.game)
    result = solve_game(game, enumerate_side=args.side)
    _emit(
        args,
        {
            "value": str(result.value),
            "value_float": float(result.value),
            "satisfied": result.satisfied,
            "total": result.total,
        },
    )
    return EXIT_OK


def _cmd_symmetrize(args) -> int:
    started = time.monotonic()
    game = serialize.load_game(args.game)
    folded = symmetrize(game)
    digest = serialize.save_json(args.out, folded.to_json_dict())
    _emit(args, {"out": args.out, "edges": len(folded.graph.edges)})
    _write_manifest(args, "symmetrize", {args.game: serialize.file_digest(args.game)}, {args.out: digest}, started)
    return EXIT_OK


def _cmd_fortify(args) -> int:
    started = time.monotonic()
    game = serialize.load_game(args.game)
    h1 = serialize.load_graph(args.h1)
    h2 = serialize.load_graph(args.h2)
    cg = fortify.concatenate(h1, game, h2)
    digest = serialize.save_json(args.out, serialize.concatenated_to_json(cg))
    _emit(
        args,
        {
            "out": args.out,
            "derived_edges": len(cg.derived.graph.edges),
            "sigma_w": cg.derived.sigma_x,
            "sigma_z": cg.derived.sigma_y,
        },
    )
    inputs = {p: serialize.file_digest(p) for p in (args.game, args.h1, args.h2)}
    _write_manifest(args, "fortify", inputs, {args.out: digest}, started)
    return EXIT_OK


def _cmd_audit(args) -> int:
    cg = serialize.load_concatenated(args.cg)
    mode = _mode_from_args(args)
    if args.mode == "exact":
        report = fortify.audit_exact(
            cg, args.delta, args.epsilon, mode=mode, jobs=args.jobs
        )
    else:
        report = fortify.audit_distance(cg, args.delta, args.epsilon, mode=mode)
    doc = report.to_json_dict()
    if args.out:
        serialize.save_json(args.out, doc)
    _emit(args, doc)
    return EXIT_VIOLATED if report.verdict == "violated" else EXIT_OK


def _cmd_certify(args) -> int:
    graph = serialize.load_graph(args.graph)
    mode = _mode_from_args(args)
    if args.kind == "extractor":
        outcome = fortifiers.check_extractor(graph, args.delta, args.eps, mode)
    else:
        if args.eps2 is None:
            raise ToolkitError("fortifier certification needs --eps2")
        outcome = fortifiers.check_fortifier(graph, args.delta, args.eps, args.eps2, mode)
    doc = outcome.to_json_dict()
    if isinstance(outcome, fortifiers.CounterexampleSubset):
        doc["verdict"] = "violated"
        _emit(args, doc)
        return EXIT_VIOLATED
    doc["verdict"] = "certified"
    doc["version"] = TOOL_VERSION
    _emit(args, doc)
    return EXIT_OK


def _cmd_product(args) -> int:
    started = time.monotonic()
    h1 = serialize.load_graph(args.h1)
    h2 = serialize.load_graph(args.h2)
    measured = fortifiers.measure_subsets(h1, args.delta)
    ext_cert = fortifiers.ExtractorCertificate(
        args.delta, measured.worst_l1.l1, measured.mode.label(), measured.worst_l1
    )
    exp_cert = spectral.spectral_lambda(h2)
    graph, cert = fortifiers.product_fortifier(h1, ext_cert, h2, exp_cert)
    outputs = {}
    if args.out:
        outputs[args.out] = serialize.save_json(args.out, graph.to_json_dict())
    doc = cert.to_json_dict()
    doc["version"] = TOOL_VERSION
    doc["extractor_eps_measured"] = measured.worst_l1.l1
    _emit(args, doc)
    inputs = {p: serialize.file_digest(p) for p in (args.h1, args.h2)}
    _write_manifest(args, "product", inputs, outputs, started)
    return EXIT_OK


def _cmd_counterexample(args) -> int:
    started = time.monotonic()
    graph = serialize.load_graph(args.graph)
    if args.kind == "skew":
        skewed, report = adversarial.skew_extractor(graph, _int_list(args.subset), args.eps)
        outputs = {}
        if args.out:
            outputs[args.out] = serialize.save_json(args.out, skewed.to_json_dict())
        _emit(args, report.to_json_dict())
        inputs = {args.graph: serialize.file_digest(args.graph)}
        _write_manifest(args, "counterexample skew", inputs, outputs, started)
        return EXIT_OK
    subset, achieved = adversarial.find_bad_subset(graph, args.delta, args.eps, args.c)
    doc = {
        "subset": list(subset),
        "achieved_l2_scaled": achieved,
        "fortifier_threshold": args.eps,
        "violates": achieved > args.eps,
    }
    _emit(args, doc)
    return EXIT_VIOLATED if achieved > args.eps else EXIT_OK


def _cmd_repeat(args) -> int:
    game = serialize.load_game(args.game)
    report = repetition.verify_recursion(
        game, args.k, args.delta, args.epsilon,
        underlying_sigma_y=args.underlying_sigma_y,
    )
    _emit(args, report.to_json_dict())
    return EXIT_OK


def _cmd_regularize(args) -> int:
    started = time.monotonic()
    game = serialize.load_game(args.game)
    out_game, manifest = regularize.biregularize(game, args.eps, args.seed)
    digest = serialize.save_json(args.out, out_game.to_json_dict())
    doc = manifest.to_json_dict()
    doc["out"] = args.out
    if args.transform_manifest:
        serialize.save_json(args.transform_manifest, manifest.to_json_dict())
    _emit(args, doc)
    inputs = {args.game: serialize.file_digest(args.game)}
    _write_manifest(args, "regularize", inputs, {args.out: digest}, started)
    return EXIT_OK


def _cmd_mixing(args) -> int:
    graph = serialize.load_graph(args.graph)
    value = spectral.mixing_discrepancy(graph, _int_list(args.left_set), _int_list(args.right_set))
    _emit(args, {"discrepancy": value})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twoprover", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=["json", "table"], default="json")
        p.add_argument("--manifest", help="write a run manifest to this path")

    p = sub.add_parser("gen", help="seeded bi-regular graph with spectral certificate")
    p.add_argument("--n-left", type=int, required=True)
    p.add_argument("--n-right", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--target-lambda", type=float, default=None)
    p.add_argument("--retries", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--cert", default=None)
    common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("lambda", help="expansion coefficient of a bi-regular graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=["exact-svd", "power-iteration"], default="exact-svd")
    p.add_argument("--tolerance", type=float, default=spectral.DEFAULT_TOLERANCE)
    common(p)
    p.set_defaults(func=_cmd_lambda)

    p = sub.add_parser("value", help="exact game value by exhaustive enumeration")
    p.add_argument("--game", required=True)
    p.add_argument("--side", choices=["auto", "left", "right"], default="auto")
    common(p)
    p.set_defaults(func=_cmd_value)

    p = sub.add_parser("symmetrize", help="fold a projection game onto its left side")
    p.add_argument("--game", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_symmetrize)

    p = sub.add_parser("fortify", help="concatenate gadget graphs onto a game")
    p.add_argument("--game", required=True)
    p.add_argument("--h1", required=True)
    p.add_argument("--h2", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_fortify)

    p = sub.add_parser("audit", help="rectangle robustness audit of a concatenated game")
    p.add_argument("--cg", required=True, help="concatenated game JSON (from fortify)")
    p.add_argument("--mode", choices=["exact", "distance"], required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--sampled-trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("certify", help="extractor/fortifier subset certification")
    p.add_argument("--graph", required=True)
    p.add_argument("--kind", choices=["extractor", "fortifier"], required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--eps2", type=float, default=None)
    p.add_argument("--sampled-trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("product", help="extractor x expander product fortifier")
    p.add_argument("--h1", required=True)
    p.add_argument("--h2", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=_cmd_product)

    p = sub.add_parser("counterexample", help="adversarial constructions")
    kind = p.add_subparsers(dest="kind", required=True)
    ps = kind.add_parser("skew", help="rewire a dense subset to concentrate mass")
    ps.add_argument("--graph", required=True)
    ps.add_argument("--subset", required=True, help="comma-separated left indices")
    ps.add_argument("--eps", type=float, required=True)
    ps.add_argument("--out", default=None)
    common(ps)
    ps.set_defaults(func=_cmd_counterexample)
    pl = kind.add_parser("lowdeg", help="dense subset far from uniform for low degree")
    pl.add_argument("--graph", required=True)
    pl.add_argument("--delta", type=float, required=True)
    pl.add_argument("--eps", type=float, required=True)
    pl.add_argument("--c", type=float, required=True)
    common(pl)
    pl.set_defaults(func=_cmd_counterexample)

    p = sub.add_parser("repeat", help="k-fold repetition bounds and recursion check")
    p.add_argument("--game", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--underlying-sigma-y", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_repeat)

    p = sub.add_parser("regularize", help="make a game bi-regular, value inflation <= eps")
    p.add_argument("--game", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--transform-manifest", default=None)
    common(p)
    p.set_defaults(func=_cmd_regularize)

    p = sub.add_parser("mixing", help="edge-count discrepancy of a set pair")
    p.add_argument("--graph", required=True)
    p.add_argument("--left-set", required=True)
    p.add_argument("--right-set", required=True)
    common(p)
    p.set_defaults(func=_cmd_mixing)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
