import sys

from dpenc.cli import main

sys.exit(main())
