import numpy as np
import scipy.linalg as la

from delaybounds.errors import DimensionMismatch, NotSquare


def he(A):
    """He(A) = A + Aᵀ."""
    A = np.asarray(A, dtype=float)
    return A + A.T


def symmetrize(A):
    A = np.asarray(A, dtype=float)
    return 0.5 * (A + A.T)


def require_square(A, name="matrix"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSquare(f"{name} must be square, got shape {A.shape}")
    return A


def require_shape(A, shape, name="matrix"):
    A = np.asarray(A, dtype=float)
    if A.shape != tuple(shape):
        raise DimensionMismatch(f"{name} has shape {A.shape}, expected {tuple(shape)}")
    return A


def sym_sqrt(A):
    """Principal square root of a symmetric PSD matrix."""
    vals, vecs = la.eigh(symmetrize(A))
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def weight_block(rho, W):
    """diag{1/rho_0, ..., 1/rho_nu} ⊗ W."""
    return np.kron(np.diag(1.0 / np.asarray(rho, dtype=float)), W)


def scale_of(*values):
    """max(1, largest magnitude among the operands)."""
    scale = 1.0
    for v in values:
        arr = np.asarray(v, dtype=float)
        if arr.size:
            scale = max(scale, float(np.max(np.abs(arr))))
    return scale


def relative_gap(x, y):
    return abs(float(x) - float(y)) / scale_of(x, y)


def trial_rng(seed, trial=0):
    """Independent generator per (seed, trial) so parallel runs reproduce serial ones."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def random_spd(rng, n, shift=0.1):
    """AᵀA + shift·I with A uniform in [-1, 1]."""
    A = rng.uniform(-1.0, 1.0, size=(n, n))
    return A.T @ A + shift * np.eye(n)
