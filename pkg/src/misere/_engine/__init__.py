"""Engine selection: compiled kernel when available, pure Python otherwise.

Set ``MISERE_PURE=1`` to force the fallback. ``KIND`` reports which one is
active; both expose the same ``OutcomeEngine`` and ``octal_grundy``.
"""

import os

from misere._engine import pure as _pure

if os.environ.get("MISERE_PURE"):
    _impl = _pure
else:
    try:
        from misere._engine import _kernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

KIND = _impl.KIND
OutcomeEngine = _impl.OutcomeEngine
octal_grundy = _impl.octal_grundy


def available_engines():
    """Importable engine modules keyed by kind, for tests and benchmarks."""
    engines = {"pure": _pure}
    try:
        from misere._engine import _kernel

        engines["compiled"] = _kernel
    except ImportError:
        pass
    return engines


__all__ = ["KIND", "OutcomeEngine", "octal_grundy", "available_engines"]
