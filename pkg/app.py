"""
Polygram command-line interface
===============================

Reproducible experiments on real polynomial Gramians and their spectral
factors, with JSON artifacts and CSV reports.

Subcommands:
------------
- generate:    sample an H-representation, write hrep.json, factor.json, gram.json
- classify:    decide whether a factor's Gramian has a real spectral factor
- recover:     canonicalize a factor and recover its H-representation
- scan:        dimension scan of the complex-only and real strata
- solve-skew:  particular solution of X^T A - A^T X = C
- roundtrip:   generate, recover and compare in one shot

Exit codes:
-----------
0 success, 1 usage/parse, 2 sampling, 3 validation, 4 non-real Gramian,
5 rank/spectrum/structure, 6 infeasible, 7 not representable,
10 ComplexOnly verdict.

Environment Variables (via .env):
---------------------------------
- POLYGRAM_TOL, POLYGRAM_LOG_LEVEL, POLYGRAM_LOG_FILE, POLYGRAM_WORKERS
  (see common/config.py)
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from artifacts.manifest import RunManifest, manifest_path_for, write_manifest
from artifacts.schemas import (
    MatrixModel,
    PolyMatrixModel,
    SkewSolutionModel,
    from_model,
    read_json,
    to_model,
    write_json,
)
from common.config import Config, Tolerances
from common.exceptions import DimensionError, PolygramError, ValidationFailed
from common.logging_setup import configure_logging
from conjecture.scan_service import ScanConfig, ScanService
from factor import Verdict, canonicalize_factor, classify, recover_hrep, skew_residual, solve_skew_particular
from hrep import canonicalize_hrep, hrep_distance, sample, to_factor, validate

logger = logging.getLogger(__name__)

EXIT_COMPLEX_ONLY = 10
ROUNDTRIP_TOL = 1e-7
SKEW_FAMILY = "X + W A for any symmetric d x d matrix W"


def _echo(args: argparse.Namespace) -> dict:
    return {key: value for key, value in vars(args).items() if key != "handler"}


def _print_json(model) -> None:
    print(json.dumps(model.model_dump(mode="json"), indent=2, ensure_ascii=False))


def cmd_generate(args: argparse.Namespace, tolerances: Tolerances) -> int:
    """
    Samples h, writes h, its factor and its Gramian, and checks realness.

    Raises:
        ValidationFailed: If the Gramian is not real or h fails validation
            (the files are still written for inspection).
    """
    manifest = RunManifest(command="generate", config=_echo(args), seed=args.seed)
    h = sample(args.d, args.N, args.P, seed=args.seed, scale=args.scale, tolerances=tolerances)
    X = to_factor(h, tolerances)
    G = X.gram()
    is_real, max_imag = G.is_real(tolerances.eps_real)
    report = validate(h, tolerances)

    os.makedirs(args.out, exist_ok=True)
    outputs = [os.path.join(args.out, name) for name in ("hrep.json", "factor.json", "gram.json")]
    for path, obj in zip(outputs, (h, X, G)):
        write_json(path, to_model(obj))
    write_manifest(os.path.join(args.out, "manifest.json"), manifest.finish(outputs))

    print(f"relative imaginary magnitude: {G.relative_imag():.3e} (max |Im B_k| = {max_imag:.3e})")
    print(f"validation: {report.summary()}")
    if not report.passed:
        raise ValidationFailed(f"Sampled representation failed validation: {report.summary()}")
    if not is_real:
        raise ValidationFailed(f"Gramian is not real: relative imaginary magnitude {G.relative_imag():.3e}")
    return 0


def cmd_classify(args: argparse.Namespace, tolerances: Tolerances) -> int:
    X = from_model(read_json(args.input, PolyMatrixModel))
    result = classify(X, tolerances)
    model = to_model(result)
    if args.out:
        write_json(args.out, model)
        write_manifest(manifest_path_for(args.out),
                       RunManifest(command="classify", config=_echo(args)).finish([args.out]))
    else:
        _print_json(model)
    logger.info(f"Verdict {result.verdict.value}: w_norm = {result.w_norm:.3e}")
    return EXIT_COMPLEX_ONLY if result.verdict is Verdict.COMPLEX_ONLY else 0


def cmd_recover(args: argparse.Namespace, tolerances: Tolerances) -> int:
    X = from_model(read_json(args.input, PolyMatrixModel))
    h = recover_hrep(canonicalize_factor(X, tolerances), tolerances)
    write_json(args.out, to_model(h))
    write_manifest(manifest_path_for(args.out),
                   RunManifest(command="recover", config=_echo(args)).finish([args.out]))
    print(f"recovered: d={h.d}, N={h.N}, P={h.P}, max ||W_k|| = {h.w_norm():.3e}")
    return 0


def _scan_config(args: argparse.Namespace, config: Config, tolerances: Tolerances) -> ScanConfig:
    """
    ScanConfig from --config, or from the command-line lists. --fd-step and
    --rank-tol fall back to the (scaled) tolerances when omitted.
    """
    try:
        if args.config:
            return read_json(args.config, ScanConfig)
        fd_step = args.fd_step if args.fd_step is not None else tolerances.fd_step
        rank_tol = args.rank_tol if args.rank_tol is not None else tolerances.jacobian_rank_tol
        return ScanConfig.from_lists(args.d, args.P, args.N, trials=args.trials, seed=args.seed,
                                     fd_step=fd_step, rank_tol=rank_tol, scale=args.scale,
                                     workers=args.workers or config.workers)
    except ValidationError as e:
        raise DimensionError(f"Invalid scan configuration: {e}") from e


def cmd_scan(args: argparse.Namespace, tolerances: Tolerances, config: Config) -> int:
    """
    Runs the dimension scan, prints the margin table and writes the CSV.

    Raises:
        ValidationFailed: If not a single grid triple completed a trial.
    """
    scan_config = _scan_config(args, config, tolerances)
    manifest = RunManifest(command="scan", config=scan_config.model_dump(mode="json"), seed=scan_config.seed)
    service = ScanService(scan_config, tolerances)
    service.run()

    print(service.margin_table().to_string(index=False))
    service.write_csv(args.out)
    write_manifest(manifest_path_for(args.out), manifest.finish([args.out]))
    if not service.any_completed():
        raise ValidationFailed("No grid triple completed a single trial")
    return 0


def cmd_solve_skew(args: argparse.Namespace, tolerances: Tolerances) -> int:
    A = from_model(read_json(args.A, MatrixModel))
    C = from_model(read_json(args.C, MatrixModel))
    X = solve_skew_particular(A, C, tolerances.skew_tol)
    residual = skew_residual(A, X, C)
    model = SkewSolutionModel(X=X.tolist(), residual=residual, family=SKEW_FAMILY)

    print(f"residual ||X^T A - A^T X - C|| = {residual:.3e}")
    print(f"every solution: {SKEW_FAMILY}")
    if args.out:
        write_json(args.out, model)
        write_manifest(manifest_path_for(args.out),
                       RunManifest(command="solve-skew", config=_echo(args)).finish([args.out]))
    else:
        _print_json(model)
    return 0


def cmd_roundtrip(args: argparse.Namespace, tolerances: Tolerances) -> int:
    """
    generate -> to_factor -> canonicalize_factor -> recover_hrep, compared with
    canonicalize_hrep of the sample.

    Raises:
        ValidationFailed: If the recovered representation differs by more than 1e-7 relative.
    """
    h = sample(args.d, args.N, args.P, seed=args.seed, scale=args.scale, tolerances=tolerances)
    recovered = recover_hrep(canonicalize_factor(to_factor(h, tolerances), tolerances), tolerances)
    distance = hrep_distance(recovered, canonicalize_hrep(h, tolerances))
    print(f"round-trip distance: {distance:.3e}")
    if distance > ROUNDTRIP_TOL:
        raise ValidationFailed(f"Recovered representation differs from the canonical sample: {distance:.3e}")
    return 0


def _int_list(raw: str) -> List[int]:
    try:
        return [int(value) for value in raw.split(",") if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from None


def _add_sizes(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--d", type=int, required=True, help="rank of the Gramian")
    parser.add_argument("--N", type=int, required=True, help="size of the Gramian")
    parser.add_argument("--P", type=int, required=True, help="degree of the factor")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--scale", type=float, default=1.0, help="standard deviation of the W entries")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polygram", description=__doc__.split("\n")[1])
    parser.add_argument("--tol", type=float, default=None, help="multiplicative tolerance scale (overrides POLYGRAM_TOL)")
    parser.add_argument("--log-level", default=None, help="logging level (overrides POLYGRAM_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", help="sample an H-representation and its factor")
    _add_sizes(generate)
    generate.add_argument("--out", required=True, help="output directory")
    generate.set_defaults(handler=cmd_generate)

    classify_cmd = sub.add_parser("classify", help="real-factorable or complex-only")
    classify_cmd.add_argument("--input", required=True, help="factor.json")
    classify_cmd.add_argument("--out", default=None, help="classification.json (stdout when omitted)")
    classify_cmd.set_defaults(handler=cmd_classify)

    recover = sub.add_parser("recover", help="recover the canonical H-representation of a factor")
    recover.add_argument("--input", required=True, help="factor.json")
    recover.add_argument("--out", required=True, help="hrep.json")
    recover.set_defaults(handler=cmd_recover)

    scan = sub.add_parser("scan", help="dimension scan of the complex-only and real strata")
    scan.add_argument("--config", default=None, help="scan.json holding a ScanConfig")
    scan.add_argument("--d", type=_int_list, default=[1])
    scan.add_argument("--P", type=_int_list, default=[1])
    scan.add_argument("--N", type=_int_list, default=[2, 3, 4])
    scan.add_argument("--trials", type=int, default=8)
    scan.add_argument("--seed", type=int, default=0)
    scan.add_argument("--fd-step", type=float, default=None, help="relative finite-difference step (default 1e-5)")
    scan.add_argument("--rank-tol", type=float, default=None,
                      help="Jacobian rank tolerance (default 1e-6, scaled by --tol)")
    scan.add_argument("--scale", type=float, default=1.0)
    scan.add_argument("--workers", type=int, default=None, help="worker processes (default POLYGRAM_WORKERS)")
    scan.add_argument("--out", default="scan.csv")
    scan.set_defaults(handler=cmd_scan)

    skew = sub.add_parser("solve-skew", help="solve X^T A - A^T X = C")
    skew.add_argument("--A", required=True, help="A as a JSON nested list")
    skew.add_argument("--C", required=True, help="C as a JSON nested list")
    skew.add_argument("--out", default=None, help="solution.json (stdout when omitted)")
    skew.set_defaults(handler=cmd_solve_skew)

    roundtrip = sub.add_parser("roundtrip", help="generate, recover and compare")
    _add_sizes(roundtrip)
    roundtrip.set_defaults(handler=cmd_roundtrip)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1

    try:
        config = Config()
        configure_logging(args.log_level or config.log_level, config.log_file)
        tolerances = config.tolerances(args.tol)
    except ValueError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1

    try:
        if args.command == "scan":
            return cmd_scan(args, tolerances, config)
        return args.handler(args, tolerances)
    except PolygramError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
