"""Refutation toolkit for semirandom and smoothed Boolean CSPs.

The heavy lifting lives in the C++ extension `_kikref`; this package re-exports
its surface. In a development tree the extension is found through the
KIKREF_EXT_DIR environment variable (the ctest harness sets it to the build
directory).
"""

import os
import sys

try:
    from ._kikref import *  # noqa: F401,F403
    from ._kikref import __version__  # noqa: F401
except ImportError:  # development layout: extension lives in the build tree
    _ext_dir = os.environ.get("KIKREF_EXT_DIR")
    if not _ext_dir:
        raise
    sys.path.insert(0, _ext_dir)
    from _kikref import *  # noqa: F401,F403
    from _kikref import __version__  # noqa: F401

from fractions import Fraction


def as_fraction(s):
    """Parse the exact rational strings returned by the extension."""
    return Fraction(s)
