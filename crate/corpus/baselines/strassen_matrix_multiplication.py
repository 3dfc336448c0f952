"""Strassen matrix multiplication for square power-of-two matrices."""

LEAF_SIZE = 8


def _add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _naive(a, b):
    n = len(a)
    cols = list(zip(*b))
    return [[sum(a[i][k] * cols[j][k] for k in range(n)) for j in range(n)] for i in range(n)]


def _split(m):
    h = len(m) // 2
    top, bottom = m[:h], m[h:]
    return ([r[:h] for r in top], [r[h:] for r in top],
            [r[:h] for r in bottom], [r[h:] for r in bottom])


def _join(c11, c12, c21, c22):
    top = [l + r for l, r in zip(c11, c12)]
    bottom = [l + r for l, r in zip(c21, c22)]
    return top + bottom


def strassen_multiply(a, b):
    """Multiply two n x n matrices, n a power of two."""
    if len(a) <= LEAF_SIZE:
        return _naive(a, b)
    a11, a12, a21, a22 = _split(a)
    b11, b12, b21, b22 = _split(b)
    m1 = strassen_multiply(_add(a11, a22), _add(b11, b22))
    m2 = strassen_multiply(_add(a21, a22), b11)
    m3 = strassen_multiply(a11, _sub(b12, b22))
    m4 = strassen_multiply(a22, _sub(b21, b11))
    m5 = strassen_multiply(_add(a11, a12), b22)
    m6 = strassen_multiply(_sub(a21, a11), _add(b11, b12))
    m7 = strassen_multiply(_sub(a12, a22), _add(b21, b22))
    c11 = _add(_sub(_add(m1, m4), m5), m7)
    c12 = _add(m3, m5)
    c21 = _add(m2, m4)
    c22 = _add(_add(_sub(m1, m2), m3), m6)
    return _join(c11, c12, c21, c22)
