import sys

from hdct.cli import main

sys.exit(main())
