import sys

from kofn_reliability.cli import main

sys.exit(main())
