import sys

from lecam_equiv.cli import main

sys.exit(main())
