"""Small dataset builders shared by the tests."""
import numpy as np


def orthonormal_rows(k, d=None, seed=0):
    """k mutually orthogonal unit vectors in dimension d (default k)."""
    d = k if d is None else d
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((d, k)))
    return q.T.copy()


def repeated_orthonormal(k, m, d=None, seed=0):
    return np.repeat(orthonormal_rows(k, d, seed), m, axis=0)


def pair_at_similarity(g, sigma=1.0, d=3):
    """Two points whose Gaussian(sigma) similarity is g."""
    dist = sigma * np.sqrt(-2.0 * np.log(g))
    x = np.zeros((2, d))
    x[1, 0] = dist
    return x


# acceptance outcomes, printed in the terminal summary by conftest
ACCEPTANCE = {}


def report(number, ok, detail):
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
