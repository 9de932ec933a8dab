"""Chooses the compiled kernel when it imports, the numpy one otherwise."""
from __future__ import annotations

from . import _fallback

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

COMPILED = _kernel is not None
_active = "compiled" if COMPILED else "python"


def set_backend(name: str) -> None:
    global _active
    if name not in ("compiled", "python"):
        raise ValueError("backend must be 'compiled' or 'python'")
    if name == "compiled" and not COMPILED:
        raise RuntimeError("compiled kernel is not available")
    _active = name


def active() -> str:
    return _active


def eval_ghv(exps, coefs, pts):
    if _active == "compiled":
        return _kernel.eval_ghv(exps, coefs, pts)
    return _fallback.eval_ghv(exps, coefs, pts)
