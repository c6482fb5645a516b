import sys

from hotstove.cli import main

sys.exit(main())
