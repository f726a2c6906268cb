import sys

from failprop.cli import main

sys.exit(main())
