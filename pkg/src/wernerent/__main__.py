import sys

from wernerent.cli import main

sys.exit(main())
