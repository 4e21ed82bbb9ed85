"""Allow running the pipeline as ``python -m hcat``."""

import sys

from hcat.cli import main

if __name__ == "__main__":
    sys.exit(main())
