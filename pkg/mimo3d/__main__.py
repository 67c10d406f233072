import sys

from mimo3d.cli import main

sys.exit(main())
