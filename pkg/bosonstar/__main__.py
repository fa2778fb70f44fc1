import sys

from bosonstar.cli import main


sys.exit(main())
