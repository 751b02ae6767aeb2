"""Parallel-beam tomography laboratory.

Six projector/backprojector discretizations (pd, rd, dd, ss, wf, kb), FBP
with four windowed ramp filters, four iterative solvers, and the coupling
audit utilities. All heavy lifting lives in the _core extension.
"""

try:
    from tomolab._core import *  # noqa: F401,F403
    from tomolab import _core as _impl
except ImportError:  # in-tree build: extension sits directly on sys.path
    from _core import *  # noqa: F401,F403
    import _core as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.3.0"
