import sys

from hybridsr.cli import main

sys.exit(main())
