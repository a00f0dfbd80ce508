"""Python facade over the fusekit C++ core.

When running against an uninstalled build tree, point FUSEKIT_CORE_DIR at the
directory containing the compiled _core module.
"""

import os
import sys

_core_dir = os.environ.get("FUSEKIT_CORE_DIR")
if _core_dir and _core_dir not in sys.path:
    sys.path.insert(0, _core_dir)

try:
    from fusekit._core import *  # noqa: F401,F403
    from fusekit import _core
except ImportError:
    import _core  # type: ignore  # build-tree layout, module next to FUSEKIT_CORE_DIR
    from _core import *  # noqa: F401,F403

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "1.0.0"
