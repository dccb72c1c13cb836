"""Selects the compiled kernels when built, else the pure-Python fallback.

Set ``ONTOSEARCH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py as python_backend

compiled_backend = None
if not os.environ.get("ONTOSEARCH_PURE_PYTHON"):
    try:
        from . import _kernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:
        compiled_backend = None

active = compiled_backend or python_backend
BACKEND: str = active.BACKEND

term_weights = active.term_weights
doc_norms = active.doc_norms
accumulate = active.accumulate

available = [b for b in (compiled_backend, python_backend) if b is not None]
