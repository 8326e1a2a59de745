#!/usr/bin/env python3
"""
Command-line runner for entangling-perturbation experiments.

Usage:
    python main.py perturb state.txt --epsilon 0.1 --seed 0
    python main.py witness state.txt
    python main.py sweep --config sweep.cfg --out results.csv --no-timestamp
    python main.py contrast --max-d 4 --points 301
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from config import MAX_SEED, load_config
from exceptions import DomainError, InputError
from genericity import entangling_perturbation, sample_density, sample_separable
from matrix_io import read_matrix_file
from metrics import calculate_sweep_metrics, summarize_sweep
from records import FLOAT_FORMAT, SweepResults
from separability import (Verdict, isotropic_state, separable_ball_check,
                          separable_ball_radius, witness)
from states import DensityOperator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3

# stdout report rows; CSV output keeps FLOAT_FORMAT
REPORT_FORMAT = '%.12g'


def fmt(x):
    return REPORT_FORMAT % x


def load_density(path):
    """Parse a matrix file (InputError) and validate it as a density operator (DomainError)"""
    dims, matrix = read_matrix_file(path)
    return DensityOperator(matrix, dims)


def cmd_perturb(matrix_file, epsilon=0.1, seed=0, enlarge='first', as_json=False):
    d = load_density(matrix_file)
    d_prime, record = entangling_perturbation(d, epsilon, seed=seed, enlarge=enlarge)

    if as_json:
        print(json.dumps(record.to_dict(), indent=2))
    else:
        report = record.verdict
        enlarged = 'x'.join(str(x) for x in record.enlarged_dims)
        print(f"distance={fmt(record.achieved_trace_distance)} "
              f"verdict={report.verdict.value} "
              f"negativity={fmt(report.negativity)} "
              f"min_pt_eig={fmt(report.min_pt_eigenvalue)} "
              f"enlarged_dims={enlarged}")
    return EXIT_OK


def cmd_witness(matrix_file):
    report = witness(load_density(matrix_file))
    print(f"{report.verdict.value} negativity={fmt(report.negativity)} "
          f"min_pt_eig={fmt(report.min_pt_eigenvalue)}")
    return EXIT_OK


def _sample_input(config, seed):
    if config.input_kind == 'density':
        return sample_density(config.dims, rank=config.rank, seed=seed)
    return sample_separable(config.dims, config.components, seed=seed)


def run_sample(config, index):
    """All sweep rows for one input sample, one per epsilon"""
    seed = config.sample_seed(index)
    d = _sample_input(config, seed)
    ball = separable_ball_check(d)

    results = SweepResults()
    for epsilon in config.epsilons:
        _, record = entangling_perturbation(d, epsilon, seed=seed, enlarge=config.enlarge)
        results.add(record, ball)
    return results.rows


def run_sweep(config):
    """
    Run every (sample, epsilon) pair of a configuration.

    Parameters:
    -----------
    config : ExperimentConfig
        Sweep configuration; workers > 1 spreads samples over processes

    Returns:
    --------
    results : SweepResults
        Rows are sorted by (seed, epsilon) when written, so the number of
        workers never changes the output
    """
    indices = range(config.samples)
    results = SweepResults()

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for rows in pool.map(run_sample, [config] * config.samples, indices):
                results.extend(rows)
    else:
        for index in indices:
            if index % 50 == 0:
                logger.info("Progress: %d/%d", index, config.samples)
            results.extend(run_sample(config, index))

    return results


def cmd_sweep(config_path, out=None, timestamp=True):
    config = load_config(config_path)
    if out is not None:
        config = config.with_output(out)

    print(f"Running {config.samples} samples x {len(config.epsilons)} epsilons "
          f"on {config.dims[0]}x{config.dims[1]} ({config.input_kind} inputs)")
    results = run_sweep(config)
    results.save_csv(config.output_path, timestamp=timestamp)

    summarize_sweep(calculate_sweep_metrics(results.to_frame()))
    return EXIT_OK


def isotropic_sweep(d, points=301):
    """Ball check and witness along p * P_phi + (1 - p) * I / d^2 for p on a grid"""
    rows = []
    for p in np.linspace(0.0, 1.0, points):
        rho = isotropic_state(d, p)
        report = witness(rho)
        rows.append({
            'p': p,
            'ball_check': separable_ball_check(rho),
            'verdict': report.verdict.value,
            'min_pt_eig': report.min_pt_eigenvalue,
        })
    return pd.DataFrame(rows)


def contrast_table(max_d=4, points=301):
    """
    Size of the separable neighbourhood of I/n on d x d, for d = 2..max_d.

    p_ball_max is the largest isotropic weight certified by the purity
    ball and p_npt_min the smallest certified entangled; in between lie
    PPT states the ball does not cover.
    """
    rows = []
    for d in range(2, max_d + 1):
        sweep = isotropic_sweep(d, points)
        in_ball = sweep[sweep['ball_check']]
        npt = sweep[sweep['verdict'] == Verdict.ENTANGLED.value]
        p_ball_max = in_ball['p'].max() if len(in_ball) else np.nan
        p_npt_min = npt['p'].min() if len(npt) else np.nan
        rows.append({
            'd': d,
            'n': d * d,
            'ball_radius_hs': separable_ball_radius((d, d)),
            'p_ball_max': p_ball_max,
            'p_ball_exact': 1.0 / (d * d - 1),
            'p_npt_min': p_npt_min,
            'p_npt_exact': 1.0 / (d + 1),
            'gap': p_npt_min - p_ball_max,
            'entangled_in_ball': int((in_ball['verdict'] == Verdict.ENTANGLED.value).sum()),
        })
    return pd.DataFrame(rows)


def cmd_contrast(max_d=4, points=301, out=None):
    table = contrast_table(max_d, points)

    print("=" * 60)
    print("SEPARABLE NEIGHBOURHOOD OF THE MAXIMALLY MIXED STATE")
    print("=" * 60)
    print(table.to_string(index=False))

    if out is not None:
        table.to_csv(out, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        print(f"\nSaved to {out}")
    return EXIT_OK


def _seed(value):
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {value!r}") from None
    if not 0 <= seed < MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _positive_float(value):
    try:
        x = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {value!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return x


def build_parser():
    parser = argparse.ArgumentParser(
        description='Entangling perturbations of bipartite density operators',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py perturb state.txt --epsilon 0.1 --seed 0
  python main.py perturb state.txt --epsilon 0.02 --json
  python main.py witness state.txt
  python main.py sweep --config sweep.cfg --out results.csv --no-timestamp
  python main.py contrast --max-d 5 --out contrast.csv

Exit codes: 0 success, 2 input/config error, 3 domain invariant violation.
        """
    )
    parser.add_argument('--verbose', action='store_true', help='Enable debug logging')
    subparsers = parser.add_subparsers(dest='command', required=True)

    perturb = subparsers.add_parser('perturb', help='Entangle one state within epsilon')
    perturb.add_argument('matrix_file', help='Matrix file (dims header + complex rows)')
    perturb.add_argument('--epsilon', type=_positive_float, default=0.1,
                         help='Trace-norm budget (default: 0.1)')
    perturb.add_argument('--seed', type=_seed, default=0,
                         help='Seed recorded with the result (default: 0)')
    perturb.add_argument('--enlarge', choices=['first', 'second'], default='first',
                         help='Which factor to enlarge (default: first)')
    perturb.add_argument('--json', action='store_true', help='Print the full record as JSON')

    sweep = subparsers.add_parser('sweep', help='Run a seeded sweep and write CSV')
    sweep.add_argument('--config', required=True, help='Sweep configuration file')
    sweep.add_argument('--out', help='Output CSV (overrides the config output)')
    sweep.add_argument('--no-timestamp', action='store_true',
                       help='Omit the timestamp comment line')

    witness_cmd = subparsers.add_parser('witness', help='Partial-transpose verdict for a state')
    witness_cmd.add_argument('matrix_file', help='Matrix file (dims header + complex rows)')

    contrast = subparsers.add_parser('contrast', help='Finite-dimensional separable ball table')
    contrast.add_argument('--max-d', type=int, default=4, help='Largest local dimension (default: 4)')
    contrast.add_argument('--points', type=int, default=301, help='Grid points in p (default: 301)')
    contrast.add_argument('--out', help='Also save the table as CSV')

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)

    try:
        if args.command == 'perturb':
            return cmd_perturb(args.matrix_file, args.epsilon, args.seed,
                               enlarge=args.enlarge, as_json=args.json)
        if args.command == 'sweep':
            return cmd_sweep(args.config, out=args.out, timestamp=not args.no_timestamp)
        if args.command == 'witness':
            return cmd_witness(args.matrix_file)
        return cmd_contrast(args.max_d, args.points, out=args.out)

    except InputError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as e:
        logger.exception("unexpected failure")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == '__main__':
    sys.exit(main())
