import json
import logging
import sys
from argparse import ArgumentParser
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from bounds import bounds_csv, bounds_table, format_number, lemma1_rho_bound
from config import RunConfig
from enumeration import (
    class_file_payload,
    enumerate_classes,
    load_classes,
    rho_by_matrix_search,
    save_classes,
    volume_bound,
)
from errors import LPError, SimplexityError
from models import ConstraintClass, EnumerationSummary, format_rational
from verifier import load_dissection, verify_dissection
from weights import analytic_weights, build_lp, h_function_analysis, solve_lp, verify_analytic_bound

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def build_parser() -> ArgumentParser:
    """
    Builds the `simplexity` argument parser with one subparser per capability.
    """
    parser = ArgumentParser(prog='simplexity', description='Lower bounds for the simplexity of the n-cube')
    subparsers = parser.add_subparsers(dest='subcommand', required=True)

    common = ArgumentParser(add_help=False)
    common.add_argument('-o', '--output', dest='output_path', help='Write the machine-readable result here')
    common.add_argument('--format', dest='output_format', choices=['json', 'csv', 'text'], default='text',
                        help='Console output format')
    common.add_argument('--threads', type=int, help='Worker budget (default: $SIMPLEXITY_THREADS or 1)')
    common.add_argument('--long-running', action='store_true', help='Allow n=6 runs that take hours')
    common.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    common.add_argument('-q', '--quiet', action='store_true', help='Warnings only, no progress bars')

    dimension = ArgumentParser(add_help=False)
    dimension.add_argument('-n', type=int, required=True, help='Cube dimension')

    classes = ArgumentParser(add_help=False)
    classes.add_argument('--classes', dest='classes_path', help='Class file from a previous enumerate run')

    subparsers.add_parser('enumerate', parents=[common, dimension], help='Enumerate 0/1-simplex constraint classes')
    rho_parser = subparsers.add_parser('rho', parents=[common, dimension], help='Maximal 0/1 determinant')
    rho_parser.add_argument('--oracle', action='store_true', help='Cross-check against all n x n 0/1 matrices')
    subparsers.add_parser('bounds', parents=[common, dimension], help='Closed-form bounds for n = 1..N')
    subparsers.add_parser('lp', parents=[common, dimension, classes], help='Solve the exact weight program')
    subparsers.add_parser('weights', parents=[common, dimension, classes],
                          help='Analytic log-weights and the asymptotic bound check')
    verify_parser = subparsers.add_parser('verify', parents=[common], help='Verify a dissection file')
    verify_parser.add_argument('input_path', help='Dissection JSON file')
    verify_parser.add_argument('--all-checks', action='store_true', help='Every axis, section identity, proposition table')
    verify_parser.add_argument('--axis', type=int, help='Prismoid direction (default: from the file)')
    return parser


def _write_output(config: RunConfig, payload: dict, csv_text: Optional[str] = None) -> None:
    if config.output_path is None:
        return
    if config.output_format == 'csv' and csv_text is not None:
        config.output_path.write_text(csv_text)
    else:
        config.output_path.write_text(json.dumps(payload, indent=2) + '\n')
    logger.info(f"Wrote {config.output_path}.")


def _emit(config: RunConfig, payload: dict, text: List[str], csv_text: Optional[str] = None) -> None:
    _write_output(config, payload, csv_text)
    if config.output_format == 'json':
        print(json.dumps(payload, indent=2))
    elif config.output_format == 'csv' and csv_text is not None:
        print(csv_text, end='')
    else:
        print('\n'.join(text))


def _class_key(c: ConstraintClass) -> dict:
    return {'volume': format_rational(c.volume), 'folded': list(c.folded)}


def _load_or_enumerate(config: RunConfig) -> Sequence[ConstraintClass]:
    if config.classes_path is None:
        return enumerate_classes(config.n, config.threads, config.long_running, config.show_progress).classes
    n, classes, _ = load_classes(config.classes_path)
    if n != config.n:
        raise ValueError(f'{config.classes_path} holds classes for n={n}, not n={config.n}.')
    return classes


def _summary_text(summary: EnumerationSummary) -> List[str]:
    lines = [
        f"n={summary.n}: {summary.subsets_scanned:,} subsets, {summary.degenerate:,} degenerate, "
        f"{summary.non_degenerate:,} non-degenerate",
        f"rho({summary.n}) = {summary.rho}, max volume = {summary.max_volume}, "
        f"n!/rho = {volume_bound(summary)}",
        f"Refined Hadamard violations: {summary.lemma5_violations}",
        f"{len(summary.classes)} constraint classes:",
    ]
    lines.extend(f"  {c.describe()}" for c in summary.classes)
    return lines


def _classes_csv(summary: EnumerationSummary) -> str:
    rows = ['volume,folded,count,witness']
    for c in summary.classes:
        rows.append(f"{format_rational(c.volume)},{' '.join(map(str, c.folded))},{c.count},{' '.join(c.witness.vertices)}")
    return '\n'.join(rows) + '\n'


def run_enumerate(config: RunConfig) -> int:
    summary = enumerate_classes(config.n, config.threads, config.long_running, config.show_progress)
    payload = class_file_payload(summary)
    if config.output_path is not None and config.output_format != 'csv':
        save_classes(summary, config.output_path)
        config = config.model_copy(update={'output_path': None})
    _emit(config, payload, _summary_text(summary), _classes_csv(summary))
    return EXIT_INTERNAL if summary.lemma5_violations else EXIT_OK


def run_rho(config: RunConfig) -> int:
    summary = enumerate_classes(config.n, config.threads, config.long_running, config.show_progress)
    ceiling = lemma1_rho_bound(config.n)
    payload = {
        'n': config.n,
        'rho': summary.rho,
        'max_volume': format_rational(summary.max_volume),
        'euclidean_lower_bound': format_rational(volume_bound(summary)),
        'lemma1_rho_bound': format_number(ceiling),
    }
    text = [
        f"rho({config.n}) = {summary.rho}",
        f"max simplex volume = {summary.max_volume}",
        f"n!/rho = {volume_bound(summary)}",
        f"Hadamard-type ceiling 2(sqrt(n+1)/2)^(n+1) = {format_number(ceiling)}",
    ]
    status = EXIT_OK
    if summary.rho > ceiling:
        logger.error(f"rho({config.n}) = {summary.rho} exceeds its ceiling {format_number(ceiling)}.")
        status = EXIT_INTERNAL
    if config.oracle:
        oracle = rho_by_matrix_search(config.n, config.show_progress)
        payload['oracle_rho'] = oracle
        text.append(f"matrix search rho({config.n}) = {oracle}")
        if oracle != summary.rho:
            logger.error(f"Enumerator rho {summary.rho} disagrees with matrix search {oracle}.")
            status = EXIT_INTERNAL
    _emit(config, payload, text)
    return status


def run_bounds(config: RunConfig) -> int:
    rows = bounds_table(config.n)
    payload = {'rows': [row.model_dump(mode='json') for row in rows]}
    text = []
    for row in rows:
        known = '' if row.known_dis_reference is None else f"  known dis >= {row.known_dis_reference}"
        text.append(f"n={row.n}  E={format_number(row.e_n)}  F={format_number(row.f_n)}  "
                    f"H_lower={format_number(row.h_n_lower)}  rho_bound={format_number(row.lemma1_rho_bound)}{known}")
    _emit(config, payload, text, bounds_csv(rows))
    return EXIT_OK


def run_lp(config: RunConfig) -> int:
    classes = _load_or_enumerate(config)
    solution = solve_lp(build_lp(classes, config.n))
    anchor = 1 / max(c.volume for c in classes)
    if solution.bound < anchor:
        raise LPError(f'LP bound {solution.bound} is below the volume bound {anchor}.')
    payload = {
        'n': config.n,
        'g_star': format_rational(solution.g_star),
        'bound': format_rational(solution.bound),
        'alpha': [format_rational(a) for a in solution.alpha_star.alpha],
        'tight_classes': [_class_key(c) for c in solution.tight_classes],
    }
    text = [
        f"bound = {solution.bound}",
        f"g* = {solution.g_star}",
        f"alpha* = ({', '.join(str(a) for a in solution.alpha_star.alpha)})",
        f"{len(solution.tight_classes)} tight classes:",
    ]
    text.extend(f"  {c.describe()}" for c in solution.tight_classes)
    _emit(config, payload, text)
    return EXIT_OK


def run_weights(config: RunConfig) -> int:
    weights = analytic_weights(config.n)
    peak = h_function_analysis(config.n)
    report = verify_analytic_bound(config.n, _load_or_enumerate(config))
    payload = {
        'n': config.n,
        'alpha': weights.model_dump(mode='json')['alpha'],
        'h_function': peak.model_dump(mode='json'),
        'threshold': report.threshold,
        'max_weighted_volume': report.max_weighted_volume,
        'classes_checked': report.classes_checked,
        'violations': [_class_key(c) for c in report.violations],
        'implied_bound': format_number(report.implied_bound),
    }
    text = [f"alpha_{m} = {format_number(a)}" for m, a in enumerate(weights.alpha, start=1)]
    text += [
        f"h(t) peaks at t = ln n! = {format_number(peak.t_max)} with h = {format_number(peak.h_max)}"
        f" (n! = {peak.factorial}, sampled {'ok' if peak.sampled_ok else 'FAILED'})",
        f"max V^alpha over {report.classes_checked} classes = {report.max_weighted_volume:.12g}"
        f" <= (n+1)^((1-n)/2) = {report.threshold:.12g}: {'yes' if report.holds else 'NO'}",
        f"implied bound F({config.n}) = {format_number(report.implied_bound)}",
    ]
    _emit(config, payload, text)
    return EXIT_OK if report.holds and peak.sampled_ok else EXIT_FAILED


def run_verify(config: RunConfig) -> int:
    dissection = load_dissection(config.input_path)
    report = verify_dissection(dissection, config.axis, config.all_checks, config.threads, config.show_progress)
    text = [
        f"{report.simplex_count} simplices, volume sum = {report.volume_sum} (expected {report.expected_volume})",
        f"partition: {'ok' if report.partition_ok else 'FAILED'}",
    ]
    if report.overlap_witness is not None:
        w = report.overlap_witness
        text.append(f"  simplices #{w.first} and #{w.second} overlap at "
                    f"({', '.join(str(x) for x in w.point)}), margin {w.margin}")
    for vector, coefficients in zip(report.class_volumes, report.bernstein):
        text.append(f"axis {vector.axis}: V(i) = ({', '.join(str(v) for v in vector.volumes)}), "
                    f"c = ({', '.join(str(c) for c in coefficients.coefficients)})")
    for name, value in report.checks().items():
        if value is not None and name != 'partition':
            text.append(f"{name}: {'ok' if value else 'FAILED'}")
    if report.proposition_table is not None:
        text.append('V_{k,m} table (rows k, columns m):')
        text.extend('  ' + ' '.join(str(entry) for entry in row) for row in report.proposition_table)
    _emit(config, report.model_dump(mode='json'), text)
    return EXIT_OK if report.all_passed() else EXIT_FAILED


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'enumerate': run_enumerate,
    'rho': run_rho,
    'bounds': run_bounds,
    'lp': run_lp,
    'weights': run_weights,
    'verify': run_verify,
}


def run(argv: Optional[List[str]] = None) -> int:
    """
    Executes exactly one subcommand.

    :param argv: Arguments without the program name (default: sys.argv[1:])
    :return: 0 success, 1 verification failed, 2 usage error, 3 internal invariant violation
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        config = RunConfig(**vars(args))
    except ValidationError as e:
        print(f"Input validation error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=config.log_level, format='%(levelname)s: %(message)s')
    try:
        return COMMANDS[config.subcommand](config)
    except LPError as e:
        logger.error(f"Internal invariant violated: {e}")
        return EXIT_INTERNAL
    except OSError as e:
        logger.error(f"Cannot write output: {e}")
        return EXIT_USAGE
    except ValueError as e:
        print(f"Input error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SimplexityError as e:
        logger.error(f"Internal error: {e}")
        return EXIT_INTERNAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
