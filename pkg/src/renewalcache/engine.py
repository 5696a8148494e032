"""Kernel selection: compiled extension when built, numpy fallback otherwise.

Both kernels honor the same contract (see ``_kernel_py``) and produce
bit-identical trajectories, so callers never need to care which one ran;
``HAVE_COMPILED`` is exposed for benchmarks and diagnostics.
"""

try:
    from . import _kernel as kernel

    HAVE_COMPILED = True
except ImportError:  # extension not built; fall back to pure Python
    from . import _kernel_py as kernel

    HAVE_COMPILED = False


def get_kernel(compiled: bool | None = None):
    """Default kernel, or force a specific one (compiled=True/False)."""
    if compiled is None:
        return kernel
    if compiled:
        from . import _kernel

        return _kernel
    from . import _kernel_py

    return _kernel_py
