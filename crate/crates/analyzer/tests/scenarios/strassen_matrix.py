"""Strassen matrix multiplication."""


def add(A, B):
    return [[A[i][j] + B[i][j] for j in range(len(A))] for i in range(len(A))]


def sub(A, B):
    """Element-wise difference."""
    return [[A[i][j] - B[i][j] for j in range(len(A))] for i in range(len(A))]


def strassen(A, B):
    """Multiply two square matrices whose size is a power of two."""
    n = len(A)
    if n == 1:
        return [[A[0][0] * B[0][0]]]
    mid = n // 2
    A_11 = [row[:mid] for row in A[:mid]]
    A_12 = [row[mid:] for row in A[:mid]]
    A_21 = [row[:mid] for row in A[mid:]]
    A_22 = [row[mid:] for row in A[mid:]]
    B_11 = [row[:mid] for row in B[:mid]]
    B_12 = [row[mid:] for row in B[:mid]]
    B_21 = [row[:mid] for row in B[mid:]]
    B_22 = [row[mid:] for row in B[mid:]]
    M1 = strassen(add(A_11, A_22), add(B_11, B_22))
    M2 = strassen(add(A_21, A_22), B_11)
    M3 = strassen(A_11, sub(B_12, B_22))
    M4 = strassen(A_22, sub(B_21, B_11))
    M5 = strassen(add(A_11, A_12), B_22)
    M6 = strassen(sub(A_21, A_11), add(B_11, B_12))
    M7 = strassen(sub(A_12, A_22), add(B_21, B_22))
    C_11 = add(sub(add(M1, M4), M5), M7)
    C_12 = add(M3, M5)
    C_21 = add(M2, M4)
    C_22 = add(sub(add(M1, M3), M2), M6)
    top = [a + b for a, b in zip(C_11, C_12)]
    bottom = [a + b for a, b in zip(C_21, C_22)]
    return top + bottom
