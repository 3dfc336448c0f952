"""Rabin-Karp substring search."""

BASE = 256
MODULUS = 1_000_000_007


def rabin_karp(text, pattern):
    """Return every index where ``pattern`` starts in ``text``."""
    m, n = len(pattern), len(text)
    if m == 0 or m > n:
        return []
    high = pow(BASE, m - 1, MODULUS)
    target = 0
    window = 0
    for i in range(m):
        target = (target * BASE + ord(pattern[i])) % MODULUS
        window = (window * BASE + ord(text[i])) % MODULUS
    hits = []
    for start in range(n - m + 1):
        if window == target and text[start:start + m] == pattern:
            hits.append(start)
        if start + m < n:
            window = (window - ord(text[start]) * high) % MODULUS
            window = (window * BASE + ord(text[start + m])) % MODULUS
    return hits
