"""Module entry point: python -m counterwalk."""

import sys

from .cli import main

sys.exit(main())
