"""Formatting, unpacking and slicing."""


def describe(values, *rest, **options):
    """Summarise values as text."""
    first, *middle, last = values
    merged = {**options, "count": len(values)}
    combined = [*values, *rest]
    window = values[1:-1:2]
    bounded = 0 < first <= last < 100
    label = f"{first=} {last:>8.2f} {len(middle)!s} {{literal}}"
    text = "a" "b" f"{merged['count']}"
    matrix = values[0, 1] if isinstance(values, dict) else values[::-1]
    return label, text, combined, window, bounded, matrix, ~first, -last, +first, not bounded


def bits(x, y):
    """Bit operations and power."""
    return (x & y) | (x ^ y) << 2 >> 1, x ** -y, x // y % 3, x @ y if hasattr(x, "__matmul__") else None
