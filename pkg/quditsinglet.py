#!/usr/bin/env python3
"""quditsinglet - N-singlet ground states, measurement cascades and persistency experiments"""

import argparse
import json
import signal
import sys
import traceback
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from core.errors import (BudgetError, ConvergenceError, DomainError, PreconditionError,
                         RegimeError, ValidationError)
from core.output_excel import ExcelOutput
from core.output_html import HTMLOutput
from core.output_terminal import TerminalOutput
from core.scenario import COMMANDS, ScenarioConfig, run_scenario
from utils.helpers import error, status, warn
from utils.serialization import dumps, to_csv

EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_INTERRUPTED = 130

INVALID_INPUT = (ValidationError, DomainError, PreconditionError)
NUMERICAL_LIMIT = (ConvergenceError, RegimeError, BudgetError)

EPILOG = """
╔══════════════════════════════════════════════════════════╗
║                    quditsinglet v1.0                     ║
║        N-singlets of permutation Hamiltonians            ║
╠══════════════════════════════════════════════════════════╣
║  COMMANDS:                                               ║
║    ground-state     : low spectrum of H = Σ J P_ij       ║
║    measure-cascade  : successive single-site measurement ║
║    block-entropy    : entropy of an L-site block         ║
║    localize         : A|B entanglement after measuring   ║
║    persistency      : disentangling measurement count    ║
║    hubbard-check    : Hubbard exchange limit J = 4t²/U   ║
║    verify-all       : the whole verification suite       ║
║                                                          ║
║  OUTPUT:                                                 ║
║    --format : json (default) | csv | table               ║
║    --out    : write the report to a file                 ║
║    --html   : HTML report into --output-dir              ║
║    --excel  : Excel workbook into --output-dir           ║
║                                                          ║
║  EXIT STATUS:                                            ║
║    0 pass · 1 fail · 2 invalid input · 3 numerical limit ║
║                                                          ║
╠══════════════════════════════════════════════════════════╣
║  EXAMPLES:                                               ║
║    quditsinglet.py ground-state --topology ring --n 4    ║
║    quditsinglet.py measure-cascade --n 5 --m 3           ║
║    quditsinglet.py persistency --state ghz --n 3         ║
║    quditsinglet.py verify-all --level quick --format table║
╚══════════════════════════════════════════════════════════╝
"""


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors raise ValidationError instead of exiting"""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _common_options():
    parent = ArgumentParser(add_help=False)
    output_group = parent.add_argument_group('Output')
    output_group.add_argument('--format', choices=('json', 'csv', 'table'), default='json',
                              help='Report format on stdout (default: json)')
    output_group.add_argument('--out', help='Write the report to this file instead of stdout')
    output_group.add_argument('--html', action='store_true', help='Generate an HTML report')
    output_group.add_argument('--excel', action='store_true', help='Generate an Excel workbook')
    output_group.add_argument('-o', '--output-dir', help='Directory for --html/--excel (default: ./output/)')

    other = parent.add_argument_group('Other')
    other.add_argument('--config', help='Scenario configuration file (JSON)')
    other.add_argument('-v', '--verbose', action='store_true', help='Progress lines on stderr')
    other.add_argument('-d', '--debug', action='store_true', help='Debug mode (tracebacks)')
    return parent


def parse_arguments(argv=None):
    """Parse command line arguments"""
    parser = ArgumentParser(
        prog='quditsinglet',
        description='quditsinglet - qudit singlet simulation and verification',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    common = _common_options()
    commands = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    def add(name, help_text):
        return commands.add_parser(name, parents=[common], help=help_text,
                                   formatter_class=argparse.RawDescriptionHelpFormatter)

    ground = add('ground-state', 'Ground state of the permutation Hamiltonian')
    ground.add_argument('--topology', help='chain | ring | star | complete | random_connected | file')
    ground.add_argument('--network', help='Network JSON file {"num_qudits": N, "edges": [[i, j, J], ...]}')
    ground.add_argument('--n', type=int, help='Number of qudits')
    ground.add_argument('--d', type=int, help='Local dimension (default: N)')
    ground.add_argument('--coupling', type=float, help='Uniform coupling J for generated topologies')
    ground.add_argument('--random-couplings', action='store_true', default=None,
                        help='Redraw every J uniformly from (0, 2]')
    ground.add_argument('--seed', type=int)
    ground.add_argument('--tol', type=float, help='Eigensolver tolerance')
    ground.add_argument('--k', type=int, help='Number of lowest levels')
    ground.add_argument('--dense-limit', type=int, help='Largest dimension solved densely')
    ground.add_argument('--max-iter', type=int, help='Lanczos iteration cap')

    measure = add('measure-cascade', 'Successive single-site measurements of the N-singlet')
    measure.add_argument('--n', type=int)
    measure.add_argument('--m', type=int, help='Number of measured sites')
    measure.add_argument('--sites', help='Measured sites, 1-based, e.g. 1,3')
    measure.add_argument('--policy', help='restricted | arbitrary | fixed')
    measure.add_argument('--trials', type=int)
    measure.add_argument('--seed', type=int)

    block = add('block-entropy', 'Entropy of an L-site block of the N-singlet')
    block.add_argument('--n', type=int)
    block.add_argument('--l', type=int, help='Block size (first L sites)')
    block.add_argument('--block', help='Explicit 1-based block, e.g. 1,3')
    block.add_argument('--rank-tol', type=float)
    block.add_argument('--seed', type=int)

    localize = add('localize', 'Two-block localisable entanglement')
    localize.add_argument('--n', type=int)
    localize.add_argument('--block-a', help='1-based sites of block A')
    localize.add_argument('--block-b', help='1-based sites of block B')
    localize.add_argument('--policy', help='restricted | arbitrary | fixed')
    localize.add_argument('--trials', type=int)
    localize.add_argument('--rank-tol', type=float)
    localize.add_argument('--seed', type=int)

    persist = add('persistency', 'Persistency bound and random certificate')
    persist.add_argument('--state', help='singlet | ghz | w | cluster')
    persist.add_argument('--n', type=int)
    persist.add_argument('--budget', type=int, help='Maximum configurations searched')
    persist.add_argument('--trials', type=int, help='Random cascades per M')
    persist.add_argument('--dictionary-haar', type=int, help='Haar bases per site in the dictionary')
    persist.add_argument('--rank-tol', type=float)
    persist.add_argument('--seed', type=int)

    hubbard = add('hubbard-check', 'Hubbard model against the exchange model')
    hubbard.add_argument('--d', type=int, help='Number of species (= sites)')
    hubbard.add_argument('--t', type=float, help='Hopping amplitude')
    hubbard.add_argument('--u', type=float, help='On-site interaction')
    hubbard.add_argument('--max-ratio', type=float, help='Largest accepted t/U')
    hubbard.add_argument('--fit-t', type=float, nargs='+', help='t values for the gap scaling fit')
    hubbard.add_argument('--seed', type=int)

    verify = add('verify-all', 'Run the verification suite')
    verify.add_argument('--level', choices=('quick', 'full'))
    verify.add_argument('--seed', type=int)

    return parser.parse_args(argv)


GLOBAL_OPTIONS = {'command', 'format', 'out', 'html', 'excel', 'output_dir', 'config', 'verbose', 'debug'}


def load_config(config_path):
    """Load configuration from JSON file"""
    if not config_path:
        return {}
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"could not load config file {config_path}: {e}") from e


def error_document(exc, command):
    document = {'error': type(exc).__name__, 'message': str(exc), 'command': command}
    for attribute in ('iterations', 'best_so_far', 'evaluated', 'ratio', 'separation'):
        if hasattr(exc, attribute):
            document[attribute] = getattr(exc, attribute)
    return document


def emit(text, out):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def run(args):
    """Resolve, run and emit one scenario; returns the exit status"""
    total = 3
    if args.verbose:
        status("Resolving parameters...", 1, total)
    overrides = {k: v for k, v in vars(args).items() if k not in GLOBAL_OPTIONS}
    config = ScenarioConfig.resolve(args.command, load_config(args.config), overrides)

    if args.verbose:
        status(f"Running {config.command}...", 2, total)
    report = run_scenario(config).to_dict()

    if args.verbose:
        status("Writing report...", 3, total)
    if args.format == 'table':
        if args.out:
            with open(args.out, 'w', encoding='utf-8') as f:
                TerminalOutput(args.verbose, stream=f).display(report)
        else:
            TerminalOutput(args.verbose).display(report)
    elif args.format == 'csv':
        emit(to_csv(report), args.out)
    else:
        emit(dumps(report), args.out)

    output_dir = Path(args.output_dir) if args.output_dir else Path.cwd() / 'output'
    if args.html:
        status(f"HTML report: {HTMLOutput(output_dir).generate(report)}")
    if args.excel:
        status(f"Excel report: {ExcelOutput(output_dir).generate(report)}")

    if not report['pass']:
        failed = [a['name'] for a in report['results']['assertions'] if not a['passed']]
        warn(f"assertions failed: {', '.join(failed)}")
        return EXIT_FAIL
    return 0


def requested_command(argv):
    """First recognised subcommand on the command line, if any"""
    argv = sys.argv[1:] if argv is None else argv
    return next((token for token in argv if token in COMMANDS), None)


def main(argv=None):
    """Main entry point for quditsinglet"""
    try:
        args = parse_arguments(argv)
    except ValidationError as e:
        error(str(e))
        sys.stdout.write(dumps(error_document(e, requested_command(argv))))
        return EXIT_INVALID

    try:
        return run(args)
    except INVALID_INPUT as e:
        error(str(e))
        sys.stdout.write(dumps(error_document(e, args.command)))
        return EXIT_INVALID
    except NUMERICAL_LIMIT as e:
        error(str(e))
        sys.stdout.write(dumps(error_document(e, args.command)))
        return EXIT_NUMERICAL


def graceful_exit(message, code=0):
    """Clean exit handler"""
    print(f"\n{message}", file=sys.stderr)
    print("quditsinglet exited safely.", file=sys.stderr)
    sys.exit(code)


def signal_handler(sig, frame):
    """Handle Ctrl+C (SIGINT)"""
    graceful_exit("Execution interrupted by user (SIGINT).", EXIT_INTERRUPTED)


def cli():
    """Console-script entry: signal handling and last-resort error reporting"""
    signal.signal(signal.SIGINT, signal_handler)

    try:
        sys.exit(main())

    except KeyboardInterrupt:
        graceful_exit("Execution interrupted by user.", EXIT_INTERRUPTED)

    except Exception as e:
        error(f"Unexpected Error: {e}")

        if '--debug' in sys.argv or '-d' in sys.argv:
            traceback.print_exc()

        sys.exit(EXIT_FAIL)


if __name__ == '__main__':
    cli()
