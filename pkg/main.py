"""
geo-sublinear Command-Line Entry Point.

Generates synthetic instances, runs the sublinear geometric solvers, and
verifies or benchmarks their results.

Author: Lucien (lucien-6@qq.com)
License: MIT License
"""

import sys
from pathlib import Path

src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path.parent))

from src.controllers import CliController


def main():
    """Main entry point for the command-line tools."""
    return CliController().run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
