import sys

from effode.cli import main

sys.exit(main())
