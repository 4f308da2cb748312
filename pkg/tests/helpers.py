"""Random brackets for tests."""

import numpy as np
from scipy.linalg import expm

from nilgeom import BracketTensor, gl_act


def random_tensor(n, rng):
    """Antisymmetric tensor with no Jacobi or nilpotency guarantee."""
    c = rng.standard_normal((n, n, n))
    return BracketTensor(c - c.transpose(1, 0, 2))


def random_graded(n, rng, density=1.0):
    """Nilpotent tensor: mu(X_i, X_j) only has components along X_k with k > max(i, j)."""
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if rng.random() < density:
                    c[i, j, k] = rng.standard_normal()
                    c[j, i, k] = -c[i, j, k]
    return BracketTensor(c)


def random_two_step(n, q, rng):
    """Lie bracket with image in the last ``q`` coordinates (always 2-step nilpotent)."""
    p = n - q
    c = np.zeros((n, n, n))
    for i in range(p):
        for j in range(i + 1, p):
            c[i, j, p:] = rng.standard_normal(q)
            c[j, i, p:] = -c[i, j, p:]
    return BracketTensor(c)


def filiform(n):
    """[X1, Xi] = X(i+1) for 2 <= i < n."""
    return BracketTensor.from_brackets(n, [(1, i, i + 1, 1.0) for i in range(2, n)])


def random_nilpotent_lie(n, rng):
    """A Lie nilpotent bracket in dimension ``n`` moved by a random well-conditioned matrix."""
    kind = rng.integers(3)
    if kind == 0 and n >= 3:
        mu = filiform(n)
    elif kind == 1 and n >= 3:
        mu = random_two_step(n, int(rng.integers(1, n - 1)), rng)
    else:
        mu = BracketTensor.from_brackets(n, [(1, 2, 3, 1.0)]) if n >= 3 else BracketTensor.zero(n)
    g = expm(0.4 * rng.standard_normal((n, n)))
    return gl_act(g, mu)
