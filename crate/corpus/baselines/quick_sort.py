"""Quicksort with a median-of-three pivot."""


def _median_of_three(values, lo, hi):
    mid = (lo + hi) // 2
    a, b, c = values[lo], values[mid], values[hi]
    if a <= b <= c or c <= b <= a:
        return mid
    if b <= a <= c or c <= a <= b:
        return lo
    return hi


def _partition(values, lo, hi):
    p = _median_of_three(values, lo, hi)
    values[p], values[hi] = values[hi], values[p]
    pivot = values[hi]
    store = lo
    for i in range(lo, hi):
        if values[i] < pivot:
            values[i], values[store] = values[store], values[i]
            store += 1
    values[store], values[hi] = values[hi], values[store]
    return store


def quick_sort(values):
    """Return a sorted copy of ``values``."""
    result = list(values)
    stack = [(0, len(result) - 1)]
    while stack:
        lo, hi = stack.pop()
        if lo >= hi:
            continue
        p = _partition(result, lo, hi)
        stack.append((lo, p - 1))
        stack.append((p + 1, hi))
    return result
