import sys

from doobtransport.cli import main

sys.exit(main())
