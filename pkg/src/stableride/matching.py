"""Entry point to the blossom solver, compiled or exact.

Small graphs run the pure-Python solver over Python integers, which allows
tie-break bonuses of any size. Large graphs run the numba-compiled copy of the
same code over ``int64``.
"""

from __future__ import annotations

import importlib.util
import logging
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _blossom

log = logging.getLogger(__name__)

_JIT_FUNCS = ("blossom_leaves", "slack", "assign_label", "scan_blossom", "add_blossom",
              "_index_of", "expand_blossom", "augment_blossom", "augment_matching", "solve")


@lru_cache(maxsize=None)
def _compiled_solver():
    """Load a private copy of the solver module and jit every function in it.

    numba resolves calls between jitted functions through the module globals,
    so replacing them in the copy compiles the whole call graph while the
    original module stays plain Python.
    """
    import numba

    spec = importlib.util.find_spec(_blossom.__name__)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    for name in _JIT_FUNCS:
        setattr(mod, name, numba.njit(cache=True)(getattr(mod, name)))
    return mod.solve


def max_weight_matching(n: int, edges: Sequence[tuple[int, int, int]], exact: bool = True) -> list[int]:
    """Maximum-weight matching on vertices ``0..n-1``.

    ``edges`` are ``(u, v, weight)`` with positive integer weights and no
    duplicates. Returns ``mate`` with -1 for unmatched vertices. With
    ``exact=False`` weights must fit comfortably in int64 (below 2**61).
    """
    if n == 0 or not edges:
        return [-1] * n
    eu = np.fromiter((e[0] for e in edges), np.int64, len(edges))
    ev = np.fromiter((e[1] for e in edges), np.int64, len(edges))
    if exact:
        w = np.empty(len(edges), dtype=object)
        w[:] = [int(e[2]) for e in edges]
        dual = np.empty(2 * n, dtype=object)
        dual[:] = 0
        mate = _blossom.solve(n, eu, ev, w, dual)
    else:
        if max(e[2] for e in edges) >= 2**61:
            raise OverflowError("weights too large for the compiled solver")
        w = np.fromiter((e[2] for e in edges), np.int64, len(edges))
        dual = np.zeros(2 * n, np.int64)
        mate = _compiled_solver()(n, eu, ev, w, dual)
    return [int(x) for x in mate]
