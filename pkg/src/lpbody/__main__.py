import sys

from lpbody.cli import main

sys.exit(main())
