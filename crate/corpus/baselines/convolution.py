"""Valid 2D convolution (cross-correlation, as in CNN layers)."""


def convolve2d(image, kernel):
    """Slide ``kernel`` over ``image`` with stride 1 and no padding."""
    kh, kw = len(kernel), len(kernel[0])
    oh = len(image) - kh + 1
    ow = len(image[0]) - kw + 1
    if oh <= 0 or ow <= 0:
        return []
    out = [[0.0] * ow for _ in range(oh)]
    for i in range(oh):
        for j in range(ow):
            acc = 0.0
            for u in range(kh):
                row = image[i + u]
                krow = kernel[u]
                for v in range(kw):
                    acc += row[j + v] * krow[v]
            out[i][j] = acc
    return out
