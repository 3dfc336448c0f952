"""Scaled dot-product attention on plain lists."""
import math


def _softmax(row):
    top = max(row)
    exps = [math.exp(v - top) for v in row]
    total = sum(exps)
    return [e / total for e in exps]


def scaled_dot_product_attention(query, key, value):
    """softmax(Q K^T / sqrt(d)) V."""
    d = len(query[0])
    scale = 1.0 / math.sqrt(d)
    value_cols = list(zip(*value))
    out = []
    for q in query:
        scores = [scale * sum(qi * ki for qi, ki in zip(q, k)) for k in key]
        weights = _softmax(scores)
        out.append([sum(w * v for w, v in zip(weights, col)) for col in value_cols])
    return out
