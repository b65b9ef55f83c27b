"""Helper utilities: console status lines, rng plumbing and parameter parsing"""

import json
import sys
from pathlib import Path

import numpy as np
from colorama import Fore, Style, init

# Initialize colorama for Windows
if sys.platform == 'win32':
    init(autoreset=True)

UTILS_DIR = Path(__file__).parent


def load_json_resource(filename, default=None):
    """Load a JSON file bundled in the utils directory"""
    filepath = UTILS_DIR / filename
    if filepath.exists():
        with open(filepath, 'r', encoding='utf-8') as f:
            return json.load(f)
    return default


def status(message, step=None, total=None):
    """Print a progress line to stderr (stdout carries the report)"""
    prefix = f"[{step}/{total}] " if step is not None and total is not None else ""
    print(f"{Fore.CYAN}{prefix}{Style.RESET_ALL}{message}", file=sys.stderr)


def warn(message):
    """Print a yellow warning to stderr"""
    print(f"{Fore.YELLOW}⚠ {message}{Style.RESET_ALL}", file=sys.stderr)


def error(message):
    """Print a red error line to stderr"""
    print(f"{Fore.RED}{Style.BRIGHT}✗ {message}{Style.RESET_ALL}", file=sys.stderr)


def colorize_verdict(passed):
    """Return a coloured PASS/FAIL string"""
    if passed:
        return f"{Fore.GREEN}{Style.BRIGHT}PASS{Style.RESET_ALL}"
    return f"{Fore.RED}{Style.BRIGHT}FAIL{Style.RESET_ALL}"


def make_rng(seed):
    """Seeded generator; every sampled basis and outcome flows from one of these"""
    return np.random.default_rng(int(seed))


def parse_site_list(value):
    """Parse 1-based site lists ("1,2" or [1, 2]) into sorted 0-based indices"""
    if value is None:
        return None
    if isinstance(value, str):
        items = [part.strip() for part in value.split(',') if part.strip()]
    else:
        items = list(value)
    return sorted(int(item) - 1 for item in items)
