"""Variance-constrained sparse coding toolkit."""

try:
    from gvcsr._gvcsr import *  # noqa: F401,F403
    from gvcsr._gvcsr import __doc__ as _core_doc  # noqa: F401
except ImportError:  # running against a module built outside the package tree
    from _gvcsr import *  # noqa: F401,F403
