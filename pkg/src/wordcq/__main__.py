import sys

from wordcq.cli import main

sys.exit(main())
