"""Allow ``python -m hcycles``."""
import sys

from hcycles.cli import main

sys.exit(main())
