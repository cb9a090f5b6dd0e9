"""Tiny exact linear algebra over a field (Fractions or rational functions).

Matrices are lists of rows.  Elements only need ``+ - * /`` and equality
with zero.
"""

from __future__ import annotations

from typing import Any, Callable

from .errors import SingularSystem


def _is_zero(x) -> bool:
    z = getattr(x, "is_zero", None)
    if callable(z):
        return z()
    return x == 0


def identity(n: int, one: Any, zero: Any) -> list[list]:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(A, B, zero):
    n, k, m = len(A), len(B), len(B[0])
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = zero
            for t in range(k):
                if not _is_zero(A[i][t]) and not _is_zero(B[t][j]):
                    acc = acc + A[i][t] * B[t][j]
            out[i][j] = acc
    return out


def mat_vec(A, v, zero):
    return [sum((A[i][j] * v[j] for j in range(len(v)) if not _is_zero(A[i][j])), zero)
            for i in range(len(A))]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def det(A, one, zero):
    """Determinant by Gaussian elimination."""
    M = [list(r) for r in A]
    n = len(M)
    d = one
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(M[r][c])), None)
        if piv is None:
            return zero
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d = d * M[c][c]
        inv = one / M[c][c]
        for r in range(c + 1, n):
            if _is_zero(M[r][c]):
                continue
            f = M[r][c] * inv
            M[r] = [M[r][j] - f * M[c][j] for j in range(n)]
    return d


def solve(A, b, one, zero):
    """Solve ``A x = b`` for square invertible ``A``."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(M[r][c])), None)
        if piv is None:
            raise SingularSystem("singular linear system")
        M[c], M[piv] = M[piv], M[c]
        inv = one / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and not _is_zero(M[r][c]):
                f = M[r][c]
                M[r] = [M[r][j] - f * M[c][j] for j in range(n + 1)]
    return [M[i][n] for i in range(n)]


def inverse(A, one, zero):
    n = len(A)
    cols = [solve(A, [one if i == j else zero for i in range(n)], one, zero) for j in range(n)]
    return transpose(cols)


def apply(A, fn: Callable):
    return [[fn(a) for a in row] for row in A]
