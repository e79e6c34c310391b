"""Kernel backend selection and array-level wrappers.

The compiled extension (``incentives._core._speedups``) is preferred when it
imports; otherwise the pure-Python twin in :mod:`incentives._core.pure` is
used.  Override with the environment variable ``INCENTIVES_BACKEND``:
``auto`` (default), ``c`` (require the extension) or ``python``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import pure as _pure

_requested = os.environ.get("INCENTIVES_BACKEND", "auto").lower()
_compiled = None
if _requested in ("auto", "c"):
    try:
        from . import _speedups as _compiled  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "c":
            raise ImportError(
                "INCENTIVES_BACKEND=c but the compiled extension is not built; "
                "run `python setup.py build_ext --inplace` or reinstall"
            )
        _compiled = None
elif _requested != "python":
    raise ValueError(f"unknown INCENTIVES_BACKEND={_requested!r}")

_impl = _compiled if _compiled is not None else _pure


def backend_name() -> str:
    return "c" if _impl is not _pure else "python"


def raw_extremes(*args):
    return _impl.raw_extremes(*args)


def greedy_walk(*args):
    return _impl.greedy_walk(*args)


def extreme_positions(offsets, alt_ids, weights, gains, default_pos,
                      cross_tol, threads=1):
    """Run the hull kernel over all individuals; returns (ext_offsets, positions).

    ``threads`` > 1 splits individuals into contiguous chunks processed by a
    thread pool; chunk results land in disjoint preallocated regions, so the
    output does not depend on scheduling.
    """
    n = len(default_pos)
    m = len(alt_ids)
    out_pos = np.empty(m, dtype=np.int64)
    out_counts = np.zeros(n, dtype=np.int64)

    if n > 0:
        if threads <= 1 or n < 2048:
            raw_extremes(offsets, alt_ids, weights, gains, default_pos,
                         cross_tol, out_pos, out_counts, 0, n)
        else:
            bounds = np.linspace(0, n, threads + 1).astype(np.int64)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(raw_extremes, offsets, alt_ids, weights, gains,
                                default_pos, cross_tol, out_pos, out_counts,
                                int(bounds[k]), int(bounds[k + 1]))
                    for k in range(threads)
                    if bounds[k] < bounds[k + 1]
                ]
                for f in futures:
                    f.result()

    ext_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(out_counts, out=ext_offsets[1:])
    total = int(ext_offsets[-1])
    take = (np.repeat(offsets[:-1], out_counts)
            + np.arange(total, dtype=np.int64)
            - np.repeat(ext_offsets[:-1], out_counts))
    return ext_offsets, out_pos[take]
