import sys

from multibudget.cli import main

sys.exit(main())
