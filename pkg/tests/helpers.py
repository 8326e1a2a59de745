"""Small builders shared by the test modules."""

import numpy as np


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_hermitian(rng, n):
    g = random_complex(rng, (n, n))
    return (g + g.conj().T) / 2


def random_density_matrix(rng, n, rank=None):
    g = random_complex(rng, (n, n if rank is None else rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unit(rng, n):
    x = random_complex(rng, (n,))
    return x / np.linalg.norm(x)


def basis(n, i):
    e = np.zeros(n, dtype=complex)
    e[i] = 1
    return e


def projector(x):
    x = np.asarray(x, dtype=complex)
    return np.outer(x, x.conj())


def bell_vector():
    return (np.kron(basis(2, 0), basis(2, 0)) + np.kron(basis(2, 1), basis(2, 1))) / np.sqrt(2)


def bell_projector():
    return projector(bell_vector())


def hermitian_basis(n):
    """n^2 Hermitian matrices spanning all n x n matrices"""
    out = []
    for j in range(n):
        for k in range(j, n):
            e = np.zeros((n, n), dtype=complex)
            if j == k:
                e[j, j] = 1
                out.append(e)
            else:
                e[j, k] = e[k, j] = 1
                out.append(e)
                f = np.zeros((n, n), dtype=complex)
                f[j, k], f[k, j] = 1j, -1j
                out.append(f)
    return out
