import sys

from rtafv.cli import main

sys.exit(main())
