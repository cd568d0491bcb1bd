"""Morphology-aware word embeddings."""

try:
    from ._morphvec import *  # noqa: F401,F403
    from ._morphvec import __doc__  # noqa: F401
except ImportError:  # in-tree build: extension sits next to the package
    from _morphvec import *  # noqa: F401,F403

__version__ = "0.1.0"
