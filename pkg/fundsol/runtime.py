"""
Worker pool sizing and resource sampling.

CPU count and memory come from psutil (cross-platform); without psutil the
pool falls back to os.cpu_count(). Work is dispatched on threads (numpy
releases the GIL in the heavy kernels) and results are always returned in
input order, so reductions happen in a fixed order and repeated runs are
bit-identical.
"""

import concurrent.futures
import os

try:
    import psutil
    _HAS_PSUTIL = True
except ImportError:
    _HAS_PSUTIL = False

from .log import warn as _log_warn

_warned = False


def worker_count(requested=0):
    """Number of worker threads: `requested` if positive, else physical cores."""
    global _warned
    if requested and requested > 0:
        return int(requested)
    if _HAS_PSUTIL:
        count = psutil.cpu_count(logical=False) or psutil.cpu_count()
    else:
        if not _warned:
            _log_warn("Runtime", "psutil not installed; sizing pool from os.cpu_count(). "
                      "Install with: pip install psutil")
            _warned = True
        count = os.cpu_count()
    return max(1, int(count or 1))


def map_ordered(fn, items, workers=1):
    """Apply fn to every item; results come back in input order."""
    items = list(items)
    workers = min(worker_count(workers), len(items)) if items else 1
    if workers <= 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def resource_snapshot():
    """CPU percent and resident memory of this process, or None without psutil."""
    if not _HAS_PSUTIL:
        return None
    proc = psutil.Process()
    return {
        'cpu_percent': proc.cpu_percent(interval=None),
        'rss_mb': proc.memory_info().rss / (1024.0 * 1024.0),
        'cpu_count': psutil.cpu_count(),
    }
