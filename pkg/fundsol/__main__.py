"""Allow running as `python -m fundsol`."""

import sys

from .cli import main

sys.exit(main())
