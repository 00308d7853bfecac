"""Worker-thread helpers.

The heavy kernels release the GIL, so plain threads give real parallelism
without pickling.  Work is always split into the same fixed chunks no
matter how many workers run, and every chunk's result depends only on its
own inputs, so results are bit-identical for any worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "RADONSOURCE_THREADS"


def resolve_threads(threads=None) -> int:
    """Explicit argument, else the RADONSOURCE_THREADS variable, else all cores."""
    if threads is None:
        env = os.environ.get(ENV_THREADS)
        if env is not None:
            try:
                threads = int(env)
            except ValueError as exc:
                raise ValueError(f"{ENV_THREADS} must be an integer, got {env!r}") from exc
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return threads


def run_tasks(fn, args_list, threads):
    """Apply fn to each argument tuple, in order; parallel when threads > 1."""
    if threads <= 1 or len(args_list) <= 1:
        return [fn(*args) for args in args_list]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *args) for args in args_list]
        return [f.result() for f in futures]
