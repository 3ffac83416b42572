#!/usr/bin/env python3
"""
Closed-curve criterion from the project root:
    python3 main.py closure --config config/examples/circle.json
See `python3 main.py --help` for the other commands.
"""
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.main import main as run_cli  # noqa: E402

if __name__ == "__main__":
    sys.exit(run_cli(sys.argv[1:]))
