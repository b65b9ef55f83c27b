"""Terminal rendering of run reports"""

import sys

from colorama import Fore, Style, init
from tabulate import tabulate

from utils.helpers import colorize_verdict
from utils.serialization import format_float

# Initialize colorama for Windows
if sys.platform == 'win32':
    init(autoreset=True)

MAX_CELL = 48


def _cell(value):
    if isinstance(value, float):
        text = f"{value:.10g}"
    elif isinstance(value, (list, tuple)):
        text = ', '.join(_cell(v) for v in value)
    elif value is None:
        text = '—'
    else:
        text = str(value)
    return text[:MAX_CELL - 1] + '…' if len(text) > MAX_CELL else text


class TerminalOutput:
    """Render a RunReport as colored banners and tabulate grids"""

    def __init__(self, verbose=False, stream=None):
        self.verbose = verbose
        self.stream = stream or sys.stdout

    def _print(self, text=''):
        print(text, file=self.stream)

    def display(self, report):
        """Banner, scalar results, assertions, then the per-trial table"""
        self._display_banner(report)
        self._display_parameters(report['params'])
        self._display_results(report['results'])
        self._display_assertions(report['results'].get('assertions', []))
        rows = report['results'].get('trials')
        if rows:
            self._display_trials(rows)
        self._display_summary(report)

    def _display_banner(self, report):
        self._print(f"{Fore.CYAN}{Style.BRIGHT}╔══════════════════════════════════════════════════════════╗")
        self._print(f"║  quditsinglet : {report['command']:<41}║")
        self._print(f"╚══════════════════════════════════════════════════════════╝{Style.RESET_ALL}")

    def _display_parameters(self, params):
        if not self.verbose:
            return
        rows = [[key, _cell(value)] for key, value in params.items()]
        self._print(f"{Fore.MAGENTA}{Style.BRIGHT}PARAMETERS{Style.RESET_ALL}")
        self._print(tabulate(rows, headers=['Parameter', 'Value'], tablefmt="simple"))
        self._print()

    def _display_results(self, results):
        rows = [
            [key, _cell(value)] for key, value in results.items()
            if key not in ('assertions', 'trials') and not isinstance(value, dict)
        ]
        if rows:
            headers = [f"{Fore.CYAN}Result{Style.RESET_ALL}", f"{Fore.CYAN}Value{Style.RESET_ALL}"]
            self._print(tabulate(rows, headers=headers, tablefmt="grid"))
            self._print()

    def _display_assertions(self, assertions):
        if not assertions:
            self._print(f"{Fore.YELLOW}  ⚠ No assertions declared for this scenario{Style.RESET_ALL}\n")
            return
        headers = [f"{Fore.CYAN}{h}{Style.RESET_ALL}" for h in ('Check', 'Value', 'Threshold', 'Verdict')]
        rows = [
            [a['name'], _cell(a['value']), _cell(a['threshold']), colorize_verdict(a['passed'])]
            for a in assertions
        ]
        self._print(tabulate(rows, headers=headers, tablefmt="grid"))
        self._print()

    def _display_trials(self, rows):
        columns = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)
        shown = rows if self.verbose else rows[:20]
        table = [[_cell(row.get(c)) for c in columns] for row in shown]
        self._print(tabulate(table, headers=columns, tablefmt="grid"))
        if len(shown) < len(rows):
            self._print(f"{Fore.WHITE}  … {len(rows) - len(shown)} more rows (use -v){Style.RESET_ALL}")
        self._print()

    def _display_summary(self, report):
        failed = [a['name'] for a in report['results'].get('assertions', []) if not a['passed']]
        self._print(f"{Fore.WHITE}━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━{Style.RESET_ALL}")
        self._print(f"  Verdict: {colorize_verdict(report['pass'])}   "
                    f"wall time {format_float(report['wall_time_ms'])} ms")
        if failed:
            self._print(f"{Fore.RED}  Failed: {', '.join(failed)}{Style.RESET_ALL}")
