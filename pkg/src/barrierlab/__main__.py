import sys

from barrierlab.cli import main

sys.exit(main())
