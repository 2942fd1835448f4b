import sys

from qmonitor.cli import main

sys.exit(main())
