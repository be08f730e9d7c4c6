"""Command-line interface entry point for direct module execution."""

import sys

from deepqna.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
