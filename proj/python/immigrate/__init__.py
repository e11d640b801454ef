"""Hypothesis-margin feature selection with interaction weights.

Thin re-export of the compiled extension. Installed wheels place the
extension inside this package; a plain CMake build leaves it on
PYTHONPATH instead, so both locations are tried.
"""

try:
    from ._immigrate import *  # noqa: F401,F403
    from ._immigrate import __version__  # noqa: F401
except ImportError:
    from _immigrate import *  # noqa: F401,F403
    from _immigrate import __version__  # noqa: F401
