import sys

from triq.cli import main

sys.exit(main())
