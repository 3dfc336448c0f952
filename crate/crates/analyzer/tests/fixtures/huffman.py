"""Huffman coding."""
import heapq
from collections import Counter


class Node:
    """A node of the Huffman tree."""

    def __init__(self, freq, symbol=None, left=None, right=None):
        self.freq = freq
        self.symbol = symbol
        self.left = left
        self.right = right

    def __lt__(self, other):
        return self.freq < other.freq


def build_codes(node, prefix="", codes=None):
    """Walk the tree and collect the code of each leaf."""
    if codes is None:
        codes = {}
    if node.symbol is not None:
        codes[node.symbol] = prefix or "0"
    else:
        build_codes(node.left, prefix + "0", codes)
        build_codes(node.right, prefix + "1", codes)
    return codes


def huffman_coding(text):
    """Return (codes, encoded bit string) for `text`."""
    if not text:
        return {}, ""
    heap = [Node(f, s) for s, f in Counter(text).items()]
    heapq.heapify(heap)
    while len(heap) > 1:
        a = heapq.heappop(heap)
        b = heapq.heappop(heap)
        heapq.heappush(heap, Node(a.freq + b.freq, left=a, right=b))
    codes = build_codes(heap[0])
    encoded = "".join(codes[ch] for ch in text)
    return codes, encoded
