"""Huffman encoding of a text."""
import heapq
from collections import Counter


def _code_table(text):
    heap = [[weight, [symbol, ""]] for symbol, weight in sorted(Counter(text).items())]
    heapq.heapify(heap)
    if len(heap) == 1:
        return {heap[0][1][0]: "0"}
    while len(heap) > 1:
        lo = heapq.heappop(heap)
        hi = heapq.heappop(heap)
        for pair in lo[1:]:
            pair[1] = "0" + pair[1]
        for pair in hi[1:]:
            pair[1] = "1" + pair[1]
        heapq.heappush(heap, [lo[0] + hi[0]] + lo[1:] + hi[1:])
    return dict(heap[0][1:])


def huffman_encode(text):
    """Return the Huffman bit string for ``text``."""
    if not text:
        return ""
    table = _code_table(text)
    return "".join(table[ch] for ch in text)
