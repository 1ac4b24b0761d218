"""Trust-domain modeling toolkit.

Python surface over the C++ core: parse .tdm configurations, validate them
against the relational axiom catalog, derive the trust domains induced by
policy agreements, query flow reachability, run request scripts through the
decision/enforcement pipeline, and verify audit chains.
"""

try:
    from ._core import (
        Model,
        ModelError,
        axiom_catalog,
        diagnostics,
        fmt,
        verify_store,
    )
except ImportError:  # running against a CMake build tree with _core on sys.path
    from _core import (
        Model,
        ModelError,
        axiom_catalog,
        diagnostics,
        fmt,
        verify_store,
    )

__all__ = [
    "Model",
    "ModelError",
    "axiom_catalog",
    "diagnostics",
    "fmt",
    "verify_store",
    "load",
    "loads",
]


def loads(text: str) -> "Model":
    """Build a model from .tdm text."""
    return Model.loads(text)


def load(path) -> "Model":
    """Build a model from a .tdm file."""
    with open(path, "r", encoding="utf-8") as fh:
        return Model.loads(fh.read())
