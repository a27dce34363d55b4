import sys

from uavland.cli import main

sys.exit(main())
