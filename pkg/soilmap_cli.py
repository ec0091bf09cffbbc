#!/usr/bin/env python3
"""
Soil Mapping Pipeline - Command-Line Interface

Batch front end for covariate realignment, design expansion, ensemble
selection, configuration sweeps and full-cover prediction rasters.
"""

import argparse
import os
import sys
import traceback
from dataclasses import fields
from pathlib import Path

# Add src directory to path for imports
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from src.config import RunConfig, close_logging, load_run_config, setup_logging
from src.errors import ConfigError, SoilMapError
from src.workflow import SoilMapPipeline

CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def setup_common_args(parser):
    """Add common arguments to all subcommands"""
    parser.add_argument('--config',
                        help='Flat key=value run configuration file')
    parser.add_argument('--manifest',
                        help='Dataset manifest (YAML) naming the response and covariate files')
    parser.add_argument('--response-column',
                        help='Response column to read instead of the manifest value_column')
    parser.add_argument('--output-dir',
                        help='Directory for outputs, logs and run metadata (default: output)')
    parser.add_argument('--seed', type=int,
                        help='Master seed (required for select, sweep and predict)')
    parser.add_argument('--threads', type=int,
                        help='Worker threads (default: available parallelism)')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Console log level (the log file always records DEBUG)')
    parser.add_argument('--verbose', '-v',
                        action='store_true',
                        help='Print tracebacks for unexpected errors')


def setup_realign_args(parser):
    parser.add_argument('--block-side', type=float, help='Block side length in map units (default: 25)')
    parser.add_argument('--grid-n', type=int, help='Lattice points per block axis (default: 100)')
    parser.add_argument('--ridge', type=float, help='TPS smoothing ridge (default: 0, exact interpolation)')
    parser.add_argument('--neighbours', type=int, help='Samples per local TPS fit (default: 200)')
    parser.add_argument('--realigned-table', help='Reuse a realigned CSV instead of realigning again')


def setup_design_args(parser):
    parser.add_argument('--max-order', type=int, help='Highest power per covariate (default: 4)')
    parser.add_argument('--pairwise', choices=['true', 'false'],
                        help='Include pairwise interactions of linear terms (default: true)')
    parser.add_argument('--mccm', type=float, help='Maximum correlation magnitude kept (default: 0.95)')


def setup_selection_args(parser):
    parser.add_argument('--selector',
                        help='lasso_lar, lar, exhaustive, forward, backward or seqrep (default: lasso_lar)')
    parser.add_argument('--train-size', type=int, help='Training observations per split (default: 35)')
    parser.add_argument('--n-splits', type=int, help='Number of random splits (default: 500)')
    parser.add_argument('--corr-tol', type=float, help='LAR stopping correlation (default: 0)')
    parser.add_argument('--max-steps', type=int, help='LAR step cap')
    parser.add_argument('--max-subset-size', type=int, help='Largest subset size for OLS selectors')
    parser.add_argument('--allow-large-exhaustive', choices=['true', 'false'],
                        help='Permit exhaustive search above 40 columns')
    parser.add_argument('--allow-collinear-baselines', choices=['true', 'false'],
                        help='Permit OLS selectors on designs filtered above MCCM 0.4')
    parser.add_argument('--sse-floor', type=float, help='Floor on validation SSE for weighting (default: 1e-12)')


def config_from_args(args) -> RunConfig:
    """Merge the config file, environment and command-line values."""
    overrides = {k: v for k, v in vars(args).items() if k in CONFIG_KEYS and v is not None}
    return load_run_config(args.config, overrides)


def run_command(args, command, action):
    """Shared wrapper: config, logging, banner, the command itself and metadata."""
    try:
        config = config_from_args(args)
        log_file = setup_logging(config.log_level, os.path.join(config.output_dir, 'logs'))
        pipeline = SoilMapPipeline(config)
        pipeline.banner(command, log_file)

        print(f"🔧 Running soilmap {command}...")
        if args.verbose:
            print(f"   Config hash: {config.config_hash()}")
            print(f"   Seed: {config.seed}")
            print(f"   Worker threads: {config.workers}")

        action(pipeline)
        metadata = pipeline.write_metadata(command)

        print(f"✅ {command} completed")
        for key, path in sorted(pipeline.outputs.items()):
            print(f"   {key}: {path}")
        print(f"   Run metadata: {metadata}")
        print(f"📝 Log File: {log_file}")
        return 0

    except ConfigError as e:
        print(f"❌ Configuration error: {e.message}")
        for error in e.errors:
            print(f"   - {error}")
        return e.exit_code
    except SoilMapError as e:
        print(f"❌ {type(e).__name__}: {e.message}")
        return e.exit_code
    except KeyboardInterrupt:
        print("\n⚠️  Interrupted by user")
        return 130
    except Exception as e:
        print(f"❌ Unexpected error: {str(e)}")
        if args.verbose:
            traceback.print_exc()
        return 1
    finally:
        close_logging()


def cmd_realign(args):
    """Realign every covariate to the response locations"""
    return run_command(args, 'realign', lambda p: p.run_realign())


def cmd_expand(args):
    """Expand and pre-filter the design matrix"""
    return run_command(args, 'expand', lambda p: p.run_expand())


def cmd_select(args):
    """Fit the cross-validation model-averaging ensemble"""
    return run_command(args, 'select', lambda p: p.run_select())


def cmd_sweep(args):
    """Sweep training-set sizes and MCCM thresholds"""
    return run_command(args, 'sweep', lambda p: p.run_sweep())


def cmd_predict(args):
    """Write full-cover prediction and uncertainty rasters"""
    return run_command(args, 'predict', lambda p: p.run_predict())


def build_parser():
    parser = argparse.ArgumentParser(
        prog='soilmap',
        description='Covariate-assisted soil mapping with LASSO model-averaging ensembles',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Realign covariates to the response locations
  python soilmap_cli.py realign --manifest data/manifest.yaml

  # Fit the default ensemble (lasso_lar, 35-observation training sets, 500 splits)
  python soilmap_cli.py select --manifest data/manifest.yaml --seed 42

  # Sweep training sizes and MCCM thresholds
  python soilmap_cli.py sweep --manifest data/manifest.yaml --seed 42 --sweep-train-sizes 35,45,55

  # Prediction and uncertainty rasters
  python soilmap_cli.py predict --config config/soilmap.env --seed 42 --threads 4

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical error.
        """
    )

    # Create subparsers
    subparsers = parser.add_subparsers(dest='command', help='Available commands')
    subparsers.required = True

    realign_parser = subparsers.add_parser('realign', help='Block-realign covariates to response locations')
    setup_common_args(realign_parser)
    setup_realign_args(realign_parser)
    realign_parser.set_defaults(func=cmd_realign)

    expand_parser = subparsers.add_parser('expand', help='Build the expanded, MCCM-filtered design')
    setup_common_args(expand_parser)
    setup_realign_args(expand_parser)
    setup_design_args(expand_parser)
    expand_parser.set_defaults(func=cmd_expand)

    select_parser = subparsers.add_parser('select', help='Fit the model-averaging ensemble')
    setup_common_args(select_parser)
    setup_realign_args(select_parser)
    setup_design_args(select_parser)
    setup_selection_args(select_parser)
    select_parser.set_defaults(func=cmd_select)

    sweep_parser = subparsers.add_parser('sweep', help='Summarise ensembles over a configuration grid')
    setup_common_args(sweep_parser)
    setup_realign_args(sweep_parser)
    setup_design_args(sweep_parser)
    setup_selection_args(sweep_parser)
    sweep_parser.add_argument('--sweep-train-sizes', help='Comma-separated training sizes (default: 35,45,55)')
    sweep_parser.add_argument('--sweep-mccm', help='Comma-separated MCCM thresholds (default: 0.95,0.8,0.6,0.4)')
    sweep_parser.set_defaults(func=cmd_sweep)

    predict_parser = subparsers.add_parser('predict', help='Write prediction and uncertainty rasters')
    setup_common_args(predict_parser)
    setup_realign_args(predict_parser)
    setup_design_args(predict_parser)
    setup_selection_args(predict_parser)
    predict_parser.add_argument('--spatial-single-max', type=int, help='Highest single-axis power (default: 12)')
    predict_parser.add_argument('--spatial-inter-total-max', type=int,
                                help='Highest total order of E:N interactions (default: 6)')
    predict_parser.add_argument('--spatial-mccm', type=float, help='MCCM for the spatial design (default: 0.95)')
    predict_parser.add_argument('--central', type=float, help='Central interval probability (default: 0.95)')
    predict_parser.add_argument('--pairing', choices=['matched', 'cross'],
                                help='How covariate and spatial members combine (default: matched)')
    predict_parser.add_argument('--prediction-grid', help='ASCII grid defining the output geometry')
    predict_parser.add_argument('--dump-members', choices=['true', 'false'],
                                help='Also write member_stack.csv')
    predict_parser.set_defaults(func=cmd_predict)

    return parser


def main(argv=None):
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, 'func'):
        return args.func(args)
    parser.print_help()
    return 1


if __name__ == "__main__":
    sys.exit(main())
