"""Command line: decompose, oracle, gap, series, image, gen-testimage.

Exit status 0 on success, 1 when a numerical procedure does not converge,
2 for unusable input (including unreadable files).
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from services.api.schemas import RunConfig
from services.cli.matrix_io import atomic_write, read_input, read_matrix
from services.config import configure_logging, get_settings
from services.imaging.layers import emit_reconstructions
from services.imaging.pgm import binarize, parse_pgm, write_pgm
from services.imaging.testimage import synthetic_image
from services.svd import runs
from services.svd.errors import ConvergenceError, InputError
from services.svd.two_level import TwoLevelParams

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_BAD_INPUT = 2
DEFAULT_TRACE_STRIDE = 100


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        atomic_write(path, text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _trace_stride(config: RunConfig) -> int:
    if not config.trace:
        return 0
    return config.trace_stride or DEFAULT_TRACE_STRIDE


def _require_input(config: RunConfig) -> str:
    if not config.input:
        raise InputError("--input is required for {0}".format(config.subcommand))
    return config.input


def _decompose(config: RunConfig) -> None:
    a = read_matrix(_require_input(config))
    result = runs.run_decompose(a, config, trace_stride=_trace_stride(config))
    if config.trace and result.traces:
        atomic_write(config.trace, result.traces[0].to_csv().encode("utf-8"))
    _emit(runs.result_json(result), config.output)


def _oracle(config: RunConfig) -> None:
    a = read_matrix(_require_input(config))
    _emit(runs.result_json(runs.run_oracle(a, config)), config.output)


def _gap(config: RunConfig) -> None:
    if config.K is None or config.alpha is None:
        raise InputError("gap needs --K and --alpha")
    p = TwoLevelParams(K=config.K, alpha=config.alpha, lambda0=config.lambda0)
    prefactor = config.prefactor if config.prefactor is not None else 1.0
    summary, table = runs.gap_report(p, config.grid, config.oracle_grid, prefactor)
    if config.output:
        atomic_write(config.output, table.encode("utf-8"))
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")


def _series(config: RunConfig) -> None:
    a = read_matrix(_require_input(config))
    if config.T is None:
        raise InputError("series needs --T")
    payload = runs.run_series(a, config.T, runs.initial_hamiltonian(config),
                              scale=config.scale, max_order=config.max_order,
                              tail_tol=config.tail_tol)
    _emit(json.dumps(payload, indent=2) + "\n", config.output)


def _image(config: RunConfig) -> None:
    img = parse_pgm(read_input(_require_input(config)))
    a = binarize(img, config.threshold)
    if config.use_oracle:
        result = runs.run_oracle(a, config)
    else:
        result = runs.run_decompose(a, config, trace_stride=_trace_stride(config))
    out_dir = config.out_dir or "."
    emit_reconstructions(a, result, out_dir, binary=config.binary)
    _emit(runs.result_json(result), config.output or os.path.join(out_dir, "result.json"))


def _gen_testimage(config: RunConfig) -> None:
    data = write_pgm(synthetic_image(config.size), binary=config.binary)
    if config.output:
        atomic_write(config.output, data)
    else:
        sys.stdout.buffer.write(data)


DISPATCH = {
    "decompose": _decompose,
    "oracle": _oracle,
    "gap": _gap,
    "series": _series,
    "image": _image,
    "gen-testimage": _gen_testimage,
}


def run(config: RunConfig) -> int:
    try:
        DISPATCH[config.subcommand](config)
    except ConvergenceError as e:
        sys.stderr.write("error: {0}\n".format(e))
        return EXIT_NOT_CONVERGED
    except InputError as e:
        sys.stderr.write("error: {0}\n".format(e))
        return EXIT_BAD_INPUT
    except OSError as e:
        sys.stderr.write("error: {0}\n".format(e))
        return EXIT_BAD_INPUT
    logger.debug("[CLI] %s finished", config.subcommand)
    return EXIT_OK


def _anneal_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, help="number of components (default 1)")
    p.add_argument("--T", type=float, help="anneal time in hbar/epsilon (default from the gap model)")
    p.add_argument("--steps", type=int, help="step count (default automatic)")
    p.add_argument("--integrator", choices=["euler", "euler-renorm", "midpoint"])
    p.add_argument("--scale", help="gram scaling: rowsum, none or a positive number")
    p.add_argument("--gram-mode", dest="gram_mode", choices=["explicit", "implicit", "auto"])
    p.add_argument("--normalize", action="store_true", default=None,
                   help="center and scale columns to unit variance")
    p.add_argument("--tol", type=float, help="relative residual tolerance")
    p.add_argument("--lambda0", type=float, help="initial ground-state depth")
    p.add_argument("--lambda-exc", dest="lambda_exc", type=float, help="initial excited level")
    p.add_argument("--ground-index", dest="ground_index", type=int)
    p.add_argument("--max-restarts", dest="max_restarts", type=int)
    p.add_argument("--compare-oracle", dest="compare_oracle", action="store_true", default=None)
    p.add_argument("--trace", help="write the anneal trace CSV of the first component here")
    p.add_argument("--trace-stride", dest="trace_stride", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svd-anneal",
                                     description="SVD and PCA by simulated quantum annealing")
    parser.add_argument("-v", "--verbose", action="store_true", default=None)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("decompose", help="top-k singular triplets by annealing")
    p.add_argument("--input", required=True, help="matrix text file, '-' for stdin")
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int)
    _anneal_flags(p)

    p = sub.add_parser("oracle", help="top-k singular triplets by Jacobi diagonalization")
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--k", type=int)
    p.add_argument("--normalize", action="store_true", default=None)

    p = sub.add_parser("gap", help="two-level model energies and minimum gap")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda0", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--oracle-grid", dest="oracle_grid", type=int)
    p.add_argument("--prefactor", type=float)
    p.add_argument("-o", "--output", help="CSV table x,E_minus,E_plus,gap,a,b")

    p = sub.add_parser("series", help="power-series propagator at t = T")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--scale")
    p.add_argument("--lambda0", type=float)
    p.add_argument("--lambda-exc", dest="lambda_exc", type=float)
    p.add_argument("--ground-index", dest="ground_index", type=int)
    p.add_argument("--max-order", dest="max_order", type=int)
    p.add_argument("--tail-tol", dest="tail_tol", type=float)
    p.add_argument("-o", "--output")

    p = sub.add_parser("image", help="binarize a PGM image and emit its layers")
    p.add_argument("--input", required=True, help="PGM file (P2 or P5)")
    p.add_argument("--threshold", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--oracle", dest="use_oracle", action="store_true", default=None)
    p.add_argument("--ascii", dest="binary", action="store_false", default=None)
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int)
    _anneal_flags(p)

    p = sub.add_parser("gen-testimage", help="write the synthetic hierarchical test image")
    p.add_argument("--size", type=int)
    p.add_argument("--ascii", dest="binary", action="store_false", default=None)
    p.add_argument("-o", "--output")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if v is not None}
    try:
        config = RunConfig(**fields)
    except ValidationError as e:
        first = e.errors()[0]
        sys.stderr.write("error: {0}: {1}\n".format(
            ".".join(str(x) for x in first["loc"]), first["msg"]))
        return EXIT_BAD_INPUT
    configure_logging("DEBUG" if config.verbose else get_settings().log_level)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
