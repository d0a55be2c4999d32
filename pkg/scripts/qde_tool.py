# quaternion_de/scripts/qde_tool.py

"""
Command line tool for running quaternion-valued DE experiments and analyzing them.

Exit codes: 0 success, 1 partial failures or runtime error, 2 configuration error.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

# Add project root to Python path
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, PROJECT_ROOT)

from qde.benchmarks import list_functions
from qde.config import (
    BOUND_POLICIES,
    FORMATS,
    GROUPS,
    HYPOTHESES,
    METRICS,
    RUNS_FILE,
    TIERS,
)
from qde.errors import ConfigError, DegenerateInput, IncompleteMatrix, QDEError
from qde.experiment import run_matrix
from qde.plan import default_algorithm_ids, parse_config
from qde.report import analyze, build_provenance, export_results, write_analysis
from qde.utils import load_records, load_trace, trace_ref

EXIT_PARTIAL = 1
EXIT_CONFIG = 2

logger = logging.getLogger("qde_tool")

# CLI flag -> config key path
FLAG_KEYS = {
    'master_seed': 'master_seed',
    'np': 'engine.population_size',
    'cr': 'engine.crossover_rate',
    'alpha': 'mutation.alpha',
    'beta': 'mutation.beta',
    'generations': 'engine.max_generations',
    'dim': 'dimension',
    'functions': 'functions',
    'algorithms': 'algorithms',
    'seeds': 'seeds',
    'tier': 'tier',
    'out': 'output.dir',
    'jobs': 'execution.jobs',
    'batch_size': 'execution.batch_size',
    'format': 'output.format',
    'zero_shift': 'instances.zero_shift',
    'mutant_first': 'engine.mutant_first',
    'bound_policy': 'engine.bound_policy',
    'significance': 'analysis.alpha',
}


def add_plan_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", type=str, help="YAML experiment config")
    parser.add_argument("--master-seed", type=int, help="Master seed for per-run seed derivation")
    parser.add_argument("--np", type=int, help="Population size")
    parser.add_argument("--cr", type=float, help="Crossover rate")
    parser.add_argument("--alpha", type=float, help="Scale factor for every strategy and Real-DE")
    parser.add_argument("--beta", type=float, help="Angle factor of the polar rotors")
    parser.add_argument("--generations", "-g", type=int, help="Generation budget")
    parser.add_argument("--dim", type=int, help="Problem dimension (3 or a multiple of 4)")
    parser.add_argument("--functions", "-f", type=str,
                        help=f"Function ids (comma separated), 'all', 'smoke' or a group: {', '.join(GROUPS)}")
    parser.add_argument("--algorithms", "-a", type=str, help="Algorithm ids, comma separated")
    parser.add_argument("--seeds", "-n", type=int, help="Replicates per cell")
    parser.add_argument("--tier", choices=TIERS, help="Function tier when --functions is not given")
    parser.add_argument("--out", "-o", type=str, help="Output directory")
    parser.add_argument("--jobs", "-j", type=int, help="Number of processes")
    parser.add_argument("--batch-size", "-b", type=int, help="Cells per batch")
    parser.add_argument("--format", choices=FORMATS, help="Export format")
    parser.add_argument("--zero-shift", action='store_const', const=True, help="Put shifted optima at the origin")
    parser.add_argument("--mutant-first", action='store_const', const=True,
                        help="Build the full mutant before crossover")
    parser.add_argument("--bound-policy", choices=BOUND_POLICIES, help="Bound repair policy")
    parser.add_argument("--verbose", "-v", action='store_true', help="Debug logging")


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        description="Quaternion-valued differential evolution experiments.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    # run
    run_parser = subparsers.add_parser('run', help='Run the experiment matrix')
    add_plan_arguments(run_parser)
    run_parser.add_argument("--no-progress", action='store_true', help="Hide the progress bar")

    # analyze
    analyze_parser = subparsers.add_parser('analyze', help='Friedman/Nemenyi analysis of finished runs')
    add_plan_arguments(analyze_parser)
    analyze_parser.add_argument("--hypothesis", choices=HYPOTHESES + ('every',), default='all',
                                help="Granularity of the comparison")
    analyze_parser.add_argument("--metric", choices=METRICS, default='fitness', help="Compared quantity")
    analyze_parser.add_argument("--significance", type=float, help="Significance level (0.05 or 0.10)")

    # list
    list_parser = subparsers.add_parser('list', help='List benchmark functions and algorithm ids')
    list_parser.add_argument("--group", choices=GROUPS, help="Only functions of this group")

    # show
    show_parser = subparsers.add_parser('show', help="Print one run's trace")
    show_parser.add_argument("--out", "-o", type=str, default='results', help="Output directory")
    show_parser.add_argument("--algorithm", "-a", type=str, required=True, help="Algorithm id")
    show_parser.add_argument("--function", "-f", type=int, required=True, help="Function id")
    show_parser.add_argument("--replicate", "-r", type=int, default=0, help="Replicate index")

    return parser.parse_args(argv)


def collect_overrides(args) -> dict:
    values = vars(args)
    return {key: values[flag] for flag, key in FLAG_KEYS.items() if values.get(flag) is not None}


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def load_plan(args):
    try:
        return parse_config(args.config, collect_overrides(args))
    except ConfigError as e:
        print(f"Configuration error: {e}")
        sys.exit(EXIT_CONFIG)


def run_command(args):
    """Handle run command"""
    configure_logging(args.verbose)
    plan = load_plan(args)
    try:
        print("\nStarting experiment:")
        print(f"- Algorithms: {len(plan.algorithms)}")
        print(f"- Functions: {', '.join(str(f) for f in plan.functions)}")
        print(f"- Seeds per cell: {len(plan.replicates)}")
        print(f"- Dimension: {plan.dimension}")
        print(f"- Population size: {plan.engine.population_size}")
        print(f"- Crossover rate: {plan.engine.crossover_rate}")
        print(f"- Generations: {plan.engine.max_generations}")
        print(f"- Processes: {plan.jobs}")
        print(f"- Output directory: {plan.output_dir}")

        result = run_matrix(plan, progress=not args.no_progress)

        cells = set(plan.cells())
        records = [r for r in result.records if r.key in cells]
        paths = export_results(records, plan.output_format, plan.output_dir,
                               build_provenance(plan), plan.algorithm_ids)

        print("\nSummary:")
        print(f"- New runs: {result.new_runs}")
        print(f"- Skipped (already done): {result.skipped}")
        print(f"- Failed cells: {len(result.failures)}")
        print(f"- Records in plan: {len(records)}/{len(cells)}")
        for name, path in paths.items():
            print(f"- {name}: {path}")
        print(f"- Total time: {result.duration:.6f}s")

        if result.failures:
            sys.exit(EXIT_PARTIAL)

    except KeyboardInterrupt:
        print("\nInterrupted by user")
        sys.exit(EXIT_PARTIAL)
    except QDEError as e:
        print(f"\nError while running experiment: {e}")
        sys.exit(EXIT_CONFIG)
    except (OSError, TimeoutError) as e:
        print(f"\nError while running experiment: {e}")
        sys.exit(EXIT_PARTIAL)


def analyze_command(args):
    """Handle analyze command"""
    configure_logging(args.verbose)
    plan = load_plan(args)
    try:
        runs_file = Path(plan.output_dir) / RUNS_FILE
        if not runs_file.exists():
            print(f"Error: Runs file does not exist: {runs_file}")
            sys.exit(EXIT_PARTIAL)

        cells = set(plan.cells())
        records = [r for r in load_records(str(runs_file)) if r.key in cells]
        print(f"\nLoaded {len(records)} records from {runs_file}")

        hypotheses = list(HYPOTHESES) if args.hypothesis == 'every' else [args.hypothesis]
        analyses = []
        for hypothesis in hypotheses:
            try:
                analyses.extend(analyze(records, hypothesis, args.metric, plan.alpha,
                                        plan.algorithm_ids, plan.functions))
            except DegenerateInput as e:
                if args.hypothesis != 'every':
                    raise
                logger.warning("Skipping hypothesis %s: %s", hypothesis, e)
        if not analyses:
            raise DegenerateInput("No hypothesis could be tested on these records")

        for analysis in analyses:
            print(f"\n[{analysis.name}] metric={analysis.metric} "
                  f"chi2={analysis.friedman.statistic:.4f} p={analysis.friedman.p_value:.4g} "
                  f"CD={analysis.nemenyi.critical_difference:.4f}")
            for label, rank in analysis.diagram.ranking:
                print(f"  {rank:6.3f}  {label}")
            print(f"  cliques: {analysis.diagram.cliques}")

        written = write_analysis(analyses, plan.output_dir)
        print(f"\nWrote {len(written)} files to {plan.output_dir}")

    except IncompleteMatrix as e:
        print(f"\nIncomplete results: {e}")
        sys.exit(EXIT_PARTIAL)
    except DegenerateInput as e:
        print(f"\nNot enough data to analyze: {e}")
        sys.exit(EXIT_PARTIAL)
    except KeyboardInterrupt:
        print("\nInterrupted by user")
        sys.exit(EXIT_PARTIAL)
    except QDEError as e:
        print(f"\nError while analyzing: {e}")
        sys.exit(EXIT_CONFIG)


def list_command(args):
    """Handle list command"""
    print("Functions:")
    for info in list_functions(args.group):
        print(f"  f{info.id:<3} {info.group:<10} {info.name}")
    print("\nAlgorithms:")
    for alg_id in default_algorithm_ids():
        print(f"  {alg_id}")


def show_command(args):
    """Handle show command"""
    path = Path(args.out) / trace_ref(args.algorithm, args.function, args.replicate)
    try:
        trace = load_trace(str(path))
    except FileNotFoundError as e:
        print(f"Error: {e}")
        sys.exit(EXIT_PARTIAL)

    print(f"{args.algorithm} f{args.function} r{args.replicate}: {len(trace)} entries")
    for generation, value in enumerate(trace):
        print(f"{generation:5d}  {value:.6e}")


def main(argv=None):
    args = parse_args(argv)

    if args.command == 'run':
        run_command(args)
    elif args.command == 'analyze':
        analyze_command(args)
    elif args.command == 'list':
        list_command(args)
    elif args.command == 'show':
        show_command(args)
    else:
        print("Error: No command specified")
        sys.exit(EXIT_PARTIAL)

if __name__ == '__main__':
    main()
