import sys

from hubcover.cli import main

sys.exit(main())
