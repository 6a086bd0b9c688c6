import sys

from dark_zeno.cli import main

sys.exit(main())
