"""Communication lower bounds and communication-optimal tilings for
projective loop nests.

Nests may be given as a dict in the loop-nest JSON schema, as JSON text, as a
path to a JSON file, or as ``"fixture:<name>"``. Every function except
:func:`codegen` returns the same report dict the ``tileopt`` tool prints with
``--format json``.
"""

import json
import os

from . import _tileopt
from ._tileopt import InputError, InternalError, LimitError, SCHEMA_VERSION

__all__ = [
    "InputError",
    "InternalError",
    "LimitError",
    "SCHEMA_VERSION",
    "bound",
    "certify",
    "codegen",
    "fixture",
    "simulate",
    "tile",
    "verify",
]


def _nest_text(nest):
    if isinstance(nest, dict):
        return json.dumps(nest)
    if isinstance(nest, (str, os.PathLike)):
        text = os.fspath(nest)
        if text.startswith("fixture:"):
            return _tileopt.fixture(text[len("fixture:"):])
        if text.lstrip().startswith("{"):
            return text
        with open(text, encoding="utf-8") as f:
            return f.read()
    raise TypeError("nest must be a dict, JSON text, a path or 'fixture:<name>'")


def fixture(name):
    """Built-in example nest as a dict."""
    return json.loads(_tileopt.fixture(name))


def bound(nest, cache_words, mode="float"):
    return json.loads(_tileopt.bound(_nest_text(nest), cache_words, mode))


def tile(nest, cache_words, mode="float", strict_footprint=False):
    return json.loads(_tileopt.tile(_nest_text(nest), cache_words, mode, strict_footprint))


def certify(nest, cache_words, mode="float"):
    return json.loads(_tileopt.certify(_nest_text(nest), cache_words, mode))


def verify(nest, cache_words, oracle="rect", cap=None, mode="float"):
    return json.loads(_tileopt.verify(_nest_text(nest), cache_words, oracle, cap, mode))


def simulate(nest, cache_words, tile=None):
    """Traffic of a tiling; uses the realized LP tile when ``tile`` is None."""
    return json.loads(_tileopt.simulate(_nest_text(nest), cache_words, tile))


def codegen(nest, tile):
    """Tiled loop program text for the given tile sizes."""
    return _tileopt.codegen(_nest_text(nest), list(tile))
