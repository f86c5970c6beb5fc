import sys

from backlund_junction.cli import main

sys.exit(main())
