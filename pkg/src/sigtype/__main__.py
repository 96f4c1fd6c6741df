import sys

from sigtype.cli import main

sys.exit(main())
