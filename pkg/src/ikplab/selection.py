"""Linear-time selection (median of medians)."""

from __future__ import annotations


def _median5(group, key):
    return sorted(group, key=key)[(len(group) - 1) // 2]


def select(items, k, key=lambda v: v):
    """Return the element of rank ``k`` (0-based) of ``items`` under ``key``.

    Ties are allowed; worst-case linear time.
    """
    items = list(items)
    if not 0 <= k < len(items):
        raise IndexError(f"rank {k} out of range for {len(items)} items")
    while True:
        if len(items) <= 5:
            return sorted(items, key=key)[k]
        medians = [_median5(items[i:i + 5], key) for i in range(0, len(items), 5)]
        pivot = select(medians, (len(medians) - 1) // 2, key)
        pk = key(pivot)
        lo = [v for v in items if key(v) < pk]
        if k < len(lo):
            items = lo
            continue
        eq = sum(1 for v in items if key(v) == pk)
        if k < len(lo) + eq:
            return pivot
        k -= len(lo) + eq
        items = [v for v in items if key(v) > pk]


def median_partition(items, key=lambda v: v):
    """Split ``items`` around their lower median.

    Returns ``(low, high)`` where ``low`` holds the ``ceil(len/2)`` smallest
    elements (order preserved) and ``high`` the rest.  Keys must be distinct
    for the split sizes to be exact.
    """
    items = list(items)
    if len(items) < 2:
        return items, []
    m = (len(items) - 1) // 2
    mk = key(select(items, m, key))
    low = [v for v in items if key(v) <= mk]
    high = [v for v in items if key(v) > mk]
    return low, high
