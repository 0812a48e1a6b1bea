"""Kernel backend selection.

The hot inner loops (DFA minimization, transformation-monoid closure) have
a compiled Cython implementation and a pure-Python twin.  The compiled one
is preferred when importable; set ``REGDUAL_BACKEND=pure`` to force the
fallback (used by the benchmark and the backend-agreement tests).
"""

import os

from . import pure

if os.environ.get("REGDUAL_BACKEND", "") == "pure":
    _impl = pure
else:
    try:
        from . import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
minimize_dfa = _impl.minimize_dfa
close_transformations = _impl.close_transformations
