import sys

from qca.cli import main

sys.exit(main())
