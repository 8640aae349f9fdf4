import sys

from voxlog.control.main import main

sys.exit(main())
