import sys

from rauzy.cli import main

sys.exit(main())
