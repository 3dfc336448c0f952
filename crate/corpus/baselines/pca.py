"""Principal component analysis by power iteration with deflation."""
import math

ITERATIONS = 200


def _covariance(centered):
    n = len(centered)
    cols = list(zip(*centered))
    return [[sum(a * b for a, b in zip(ci, cj)) / (n - 1) for cj in cols] for ci in cols]


def _leading_vector(matrix):
    size = len(matrix)
    vec = [1.0 / math.sqrt(size)] * size
    for _ in range(ITERATIONS):
        nxt = [sum(m * v for m, v in zip(row, vec)) for row in matrix]
        norm = math.sqrt(sum(x * x for x in nxt))
        if norm == 0.0:
            break
        vec = [x / norm for x in nxt]
    value = sum(v * sum(m * w for m, w in zip(row, vec)) for v, row in zip(vec, matrix))
    return value, vec


def pca(data, components):
    """Project ``data`` onto its leading ``components`` principal axes."""
    means = [sum(col) / len(col) for col in zip(*data)]
    centered = [[x - m for x, m in zip(row, means)] for row in data]
    cov = _covariance(centered)
    axes = []
    for _ in range(min(components, len(cov))):
        value, vec = _leading_vector(cov)
        axes.append(vec)
        cov = [[c - value * vi * vj for c, vj in zip(row, vec)] for row, vi in zip(cov, vec)]
    return [[sum(x * a for x, a in zip(row, axis)) for axis in axes] for row in centered]
