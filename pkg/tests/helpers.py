"""Random generators shared by the test modules."""

import numpy as np
from scipy.stats import ortho_group

from sympolar.symplectic import random_symplectic


def random_pd(dim, rng, cond=100.0):
    """Symmetric PD matrix with log-uniform spectrum in ``[1, cond]`` and random eigenbasis."""
    Q = ortho_group.rvs(dim, random_state=rng) if dim > 1 else np.eye(1)
    w = np.exp(rng.uniform(0.0, np.log(cond), size=dim))
    return (Q * w) @ Q.T


def random_sym(dim, rng, scale=1.0):
    G = rng.standard_normal((dim, dim)) * scale
    return 0.5 * (G + G.T)


def random_blob_shape(n, rng, scale=1.0):
    """``S^T S`` with S random symplectic: the shape of ``S^{-1}(B)``, a quantum blob."""
    S = random_symplectic(n, rng, scale)
    return S.T @ S


def random_lagrangian_frame_matrix(n, rng, scale=1.0):
    """A random symplectic matrix; its column blocks span a random Lagrangian frame."""
    return random_symplectic(n, rng, scale)
