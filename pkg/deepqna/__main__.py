"""Entry point for the deepqna module."""

import sys

from deepqna.cli import main

if __name__ == "__main__":
    sys.exit(main())
