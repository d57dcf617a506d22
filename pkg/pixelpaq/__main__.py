import sys

from pixelpaq.cli import main

sys.exit(main())
