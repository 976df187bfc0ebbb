#!/usr/bin/env python3
"""
Capillary droplet waves - command-line entry point
Run `python capwaves.py --help` for the available reports
"""

import sys
from pathlib import Path

# Make the src package importable when run from any directory
script_dir = Path(__file__).parent.absolute()
sys.path.insert(0, str(script_dir))

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
