"""Pick the compiled Elo kernel if it was built, else the pure-Python loop.

Set ``ELOTOPE_PURE=1`` to force the fallback.
"""

import os

from . import _chain_pure

pure_run_updates = _chain_pure.run_updates

try:
    if os.environ.get("ELOTOPE_PURE"):
        raise ImportError("pure backend requested")
    from ._chain_kernel import run_updates as compiled_run_updates
except ImportError:
    compiled_run_updates = None

run_updates = compiled_run_updates or pure_run_updates
BACKEND = "compiled" if compiled_run_updates is not None else "pure"
