import sys

from switchset.cli import main

sys.exit(main())
