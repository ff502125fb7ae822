import sys

from swarmguard.cli import main

sys.exit(main())
