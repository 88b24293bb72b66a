import sys

from singkit.cli import main

sys.exit(main())
