import functools

import jacoframe as jf


@functools.lru_cache(maxsize=None)
def cached_table(alpha: float, beta: float, max_degree: int) -> jf.RecurrenceTable:
    """Recurrence tables are immutable; share them across tests."""
    return jf.build_recurrence(jf.JacobiParams(alpha, beta), max_degree)
