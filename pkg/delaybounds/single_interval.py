"""Single-interval lower bounds for ⟨f, Wf⟩ and the constructions linking them.

GFMB, IFB-GFMB, S-GFMB, S-FMB and BBI all bound the same energy from below.
The functions here evaluate each bound and build the parameter transforms that
show the weaker-looking forms reach BBI.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from delaybounds import logger
from delaybounds.config import TOL_PSD
from delaybounds.errors import (
    AsymmetricMatrix,
    DimensionMismatch,
    InfeasiblePsi,
    SingularBasisChange,
    ZeroChi,
    ZeroMoment,
)
from delaybounds.function_spaces import MomentVector, inner_product
from delaybounds.utils import he, relative_gap, require_square, scale_of, symmetrize, weight_block

SINGULAR_CONDITION = 1e12


@dataclass(frozen=True)
class PsdCertificate:
    min_eigenvalue: float
    passed: bool
    tolerance: float
    scale: float

    @property
    def margin(self):
        """Distance above the failure threshold; negative means failed."""
        return self.min_eigenvalue + self.tolerance * self.scale


def psd_check(A, tol=TOL_PSD):
    """Pass iff λ_min(A) >= -tol·max(1, ‖A‖)."""
    A = require_square(A)
    scale = scale_of(A)
    asymmetry = float(np.max(np.abs(A - A.T))) if A.size else 0.0
    if asymmetry > tol * scale:
        raise AsymmetricMatrix(f"asymmetry {asymmetry:.3e} exceeds {tol:.1e}·{scale:.3g}")
    if A.size == 0:
        return PsdCertificate(0.0, True, tol, 1.0)
    eigenvalues = la.eigh(symmetrize(A), eigvals_only=True)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    lam = float(eigenvalues[0])
    return PsdCertificate(lam, lam >= -tol * scale, tol, scale)


def _selected(w, selector):
    """w^i as a flat vector for selector i (None means the only interval)."""
    if isinstance(w, MomentVector):
        if selector is None:
            if w.intervals != 1:
                raise DimensionMismatch("two-interval moments need a selector")
            return w.interval(1)
        return w.interval(selector)
    return np.asarray(w, dtype=float)


def _stacked(w):
    return w.stacked if isinstance(w, MomentVector) else np.asarray(w, dtype=float)


@dataclass(frozen=True, eq=False)
class WeightBlockMatrix:
    """𝒲 = diag{1/ρ_0, ..., 1/ρ_ν} ⊗ W, optionally padded for interval 1 or 2."""

    rho: np.ndarray
    W: np.ndarray
    selector: int = None

    def __post_init__(self):
        W = require_square(self.W, "W")
        if not np.all(np.asarray(self.rho) > 0):
            raise DimensionMismatch("norm-squares must be positive")
        if self.selector not in (None, 1, 2):
            raise DimensionMismatch(f"selector must be 1, 2 or None, got {self.selector}")
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=float))
        object.__setattr__(self, "W", W)

    @classmethod
    def from_basis(cls, basis, W, selector=None):
        return cls(basis.rho, W, selector)

    @property
    def block_size(self):
        return len(self.rho) * self.W.shape[0]

    @property
    def matrix(self):
        return weight_block(self.rho, self.W)

    @property
    def inverse(self):
        return weight_block(1.0 / self.rho, np.linalg.inv(self.W))

    def _pad(self, block):
        if self.selector is None:
            return block
        zero = np.zeros_like(block)
        return la.block_diag(block, zero) if self.selector == 1 else la.block_diag(zero, block)

    @property
    def padded(self):
        """Ŵ_i = diag(𝒲_i, 0) or diag(0, 𝒲_i)."""
        return self._pad(self.matrix)

    @property
    def padded_inverse(self):
        return self._pad(self.inverse)

    @property
    def size(self):
        return self.block_size * (1 if self.selector is None else 2)


@dataclass(frozen=True, eq=False)
class PsiMatrix:
    """Blocks of Ψ = [[Z_kl, N_k], [N_kᵀ, W]].

    z has shape (ν+1, ν+1, M, M), n_blocks has shape (ν+1, M, n).
    """

    z: np.ndarray
    n_blocks: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        nb = np.asarray(self.n_blocks, dtype=float)
        W = require_square(self.W, "W")
        if z.ndim != 4 or z.shape[0] != z.shape[1] or z.shape[2] != z.shape[3]:
            raise DimensionMismatch(f"Z blocks have shape {z.shape}")
        if nb.shape != (z.shape[0], z.shape[2], W.shape[0]):
            raise DimensionMismatch(f"N blocks {nb.shape} do not fit Z {z.shape} and W {W.shape}")
        for k in range(z.shape[0]):
            for l in range(k, z.shape[0]):
                if not np.allclose(z[l, k], z[k, l].T, rtol=0.0, atol=TOL_PSD * scale_of(z[k, l])):
                    raise AsymmetricMatrix(f"Z_{l}{k} is not Z_{k}{l}ᵀ")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "n_blocks", nb)
        object.__setattr__(self, "W", W)

    @property
    def order(self):
        return self.z.shape[0] - 1

    @property
    def block_size(self):
        return self.z.shape[2]

    @property
    def dimension(self):
        return self.W.shape[0]

    @classmethod
    def from_residual(cls, phi, n_hat, W):
        """Z_kl = φ_kl + N_k W⁻¹ N_lᵀ; feasible exactly when Φ ⪰ 0."""
        W = require_square(W, "W")
        n = W.shape[0]
        n_hat = np.asarray(n_hat, dtype=float)
        M = n_hat.shape[0]
        if n_hat.shape[1] % n:
            raise DimensionMismatch(f"N̂ width {n_hat.shape[1]} is not a multiple of n={n}")
        size = n_hat.shape[1] // n
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (size * M, size * M):
            raise DimensionMismatch(f"Φ has shape {phi.shape}, expected {(size * M, size * M)}")
        n_blocks = np.stack([n_hat[:, k * n:(k + 1) * n] for k in range(size)])
        W_inv = np.linalg.inv(W)
        z = np.empty((size, size, M, M))
        for k in range(size):
            for l in range(size):
                z[k, l] = phi[k * M:(k + 1) * M, l * M:(l + 1) * M] + n_blocks[k] @ W_inv @ n_blocks[l].T
        z = 0.5 * (z + z.transpose(1, 0, 3, 2))
        return cls(z, n_blocks, W)

    @classmethod
    def schur_optimal(cls, n_hat, W):
        """The choice Z_kl = N_k W⁻¹ N_lᵀ (Schur complement zero)."""
        n_hat = np.asarray(n_hat, dtype=float)
        size = n_hat.shape[0] * (n_hat.shape[1] // np.asarray(W).shape[0])
        return cls.from_residual(np.zeros((size, size)), n_hat, W)

    def assemble(self):
        size = self.order + 1
        rows = [[self.z[k, l] for l in range(size)] + [self.n_blocks[k]] for k in range(size)]
        rows.append([self.n_blocks[k].T for k in range(size)] + [self.W])
        return np.block(rows)

    def schur_residual(self):
        """Φ with blocks φ_kl = Z_kl - N_k W⁻¹ N_lᵀ."""
        W_inv = np.linalg.inv(self.W)
        size = self.order + 1
        return np.block([
            [self.z[k, l] - self.n_blocks[k] @ W_inv @ self.n_blocks[l].T for l in range(size)]
            for k in range(size)
        ])

    @property
    def free_matrix(self):
        """N̂ = (N_0, ..., N_ν), shape M × M1."""
        return np.hstack(list(self.n_blocks))

    def padded_free_matrix(self, selector=None):
        """N¹ = (N̂, 0) or N² = (0, N̂)."""
        n_hat = self.free_matrix
        if selector is None:
            return n_hat
        zero = np.zeros_like(n_hat)
        return np.hstack([n_hat, zero] if selector == 1 else [zero, n_hat])

    def certify(self, tol=TOL_PSD):
        return psd_check(self.assemble(), tol)


@dataclass(frozen=True, eq=False)
class FreeParams:
    chi: np.ndarray
    selector: int = None


def _require_feasible(psi, tol):
    cert = psi.certify(tol)
    if not cert.passed:
        raise InfeasiblePsi(f"Ψ has λ_min = {cert.min_eigenvalue:.3e}")
    return cert


def _check_chi(psi, chi):
    chi = np.asarray(chi, dtype=float)
    if chi.shape != (psi.block_size,):
        raise DimensionMismatch(f"χ has shape {chi.shape}, Z blocks are {psi.block_size}-square")
    return chi


def gfmb_bound(psi, rho, params, w, tol=TOL_PSD):
    """-χᵀ(Σ_k ρ_k Z_kk)χ - He(χᵀ N^i w)."""
    _require_feasible(psi, tol)
    chi = _check_chi(psi, params.chi)
    rho = np.asarray(rho, dtype=float)
    wi = _selected(w, params.selector).reshape(psi.order + 1, psi.dimension)
    if len(rho) != psi.order + 1:
        raise DimensionMismatch(f"{len(rho)} norm-squares for order {psi.order}")
    quad = sum(rho[k] * (chi @ psi.z[k, k] @ chi) for k in range(psi.order + 1))
    linear = sum(chi @ psi.n_blocks[k] @ wi[k] for k in range(psi.order + 1))
    return float(-quad - 2.0 * linear)


def fmb_bound(psi, rho, w, selector=None, tol=TOL_PSD):
    """GFMB with χ = w."""
    return gfmb_bound(psi, rho, FreeParams(_stacked(w), selector), w, tol)


@dataclass(frozen=True, eq=False)
class BasisChange:
    """p_k = Σ_j c_kj Π_j over an orthogonal system with norm-squares ρ."""

    C: np.ndarray
    rho: np.ndarray
    functions: tuple = None

    def __post_init__(self):
        C = require_square(self.C, "C")
        rho = np.asarray(self.rho, dtype=float)
        if C.shape[0] != len(rho):
            raise DimensionMismatch(f"C is {C.shape}, basis has {len(rho)} functions")
        if self.condition > SINGULAR_CONDITION:
            raise SingularBasisChange(f"cond(C) = {self.condition:.3e}")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_basis(cls, basis, C):
        C = require_square(C, "C")
        functions = tuple(
            sum((C[k, j] * basis.functions[j] for j in range(len(basis.functions))), 0 * basis.functions[0])
            for k in range(C.shape[0])
        )
        return cls(C, basis.rho, functions)

    @property
    def condition(self):
        return float(np.linalg.cond(np.asarray(self.C, dtype=float)))

    @property
    def gamma(self):
        """γ_kl = Σ_j c_kj c_lj ρ_j."""
        return self.C @ np.diag(self.rho) @ self.C.T

    def gram(self, space):
        """⟨p_k, p_l⟩ evaluated directly; needs the functions."""
        size = len(self.functions)
        return np.array([
            [inner_product(space, self.functions[k], self.functions[l]) for l in range(size)]
            for k in range(size)
        ])

    def transform_moments(self, w):
        """w̃_k = ⟨f, p_k⟩ = Σ_j c_kj w_j for each interval block."""
        blocks = np.einsum("kj,ijn->ikn", self.C, w.blocks)
        return MomentVector(blocks)


def ifb_gfmb_bound(psi, bc, params, w_tilde, tol=TOL_PSD):
    """-χᵀ(Σ γ_kk Z_kk + ΣΣ_{k<l} He(γ_kl Z_kl))χ - Σ_k He(χᵀ N_k w̃_k)."""
    _require_feasible(psi, tol)
    chi = _check_chi(psi, params.chi)
    size = psi.order + 1
    if bc.C.shape[0] != size:
        raise DimensionMismatch(f"basis change of size {bc.C.shape[0]} for order {psi.order}")
    gamma = bc.gamma
    wt = _selected(w_tilde, params.selector).reshape(size, psi.dimension)
    quad = sum(gamma[k, k] * (chi @ psi.z[k, k] @ chi) for k in range(size))
    quad += sum(
        chi @ he(gamma[k, l] * psi.z[k, l]) @ chi for k in range(size) for l in range(k + 1, size)
    )
    linear = sum(chi @ psi.n_blocks[k] @ wt[k] for k in range(size))
    return float(-quad - 2.0 * linear)


@dataclass(frozen=True, eq=False)
class BasisChangeCertificate:
    transformed: PsiMatrix
    residual: np.ndarray
    psd: PsdCertificate
    gfmb_value: float = None
    ifb_value: float = None

    @property
    def value_gap(self):
        if self.gfmb_value is None:
            return None
        return relative_gap(self.gfmb_value, self.ifb_value)


def transform_ifb_to_gfmb(psi, bc, params=None, w=None, tol=TOL_PSD):
    """Build Ψ̃ for the orthogonal basis reproducing an IFB-GFMB bound.

    Z̃_jj = Σ_k Σ_l c_kj c_lj Z_kl, Ñ_j = Σ_k c_kj N_k and Z̃_kl = Ñ_k W⁻¹ Ñ_lᵀ
    off the diagonal. ``w`` are the moments in the orthogonal basis; when
    given with ``params`` both bound values are evaluated for comparison.
    """
    _require_feasible(psi, tol)
    C = bc.C
    size = psi.order + 1
    if C.shape[0] != size:
        raise DimensionMismatch(f"basis change of size {C.shape[0]} for order {psi.order}")
    n_tilde = np.einsum("kj,kmn->jmn", C, psi.n_blocks)
    W_inv = np.linalg.inv(psi.W)
    z_tilde = np.empty_like(psi.z)
    for j in range(size):
        for l in range(size):
            if j == l:
                z_tilde[j, j] = np.einsum("k,l,klab->ab", C[:, j], C[:, j], psi.z)
            else:
                z_tilde[j, l] = n_tilde[j] @ W_inv @ n_tilde[l].T
    z_tilde[range(size), range(size)] = 0.5 * (
        z_tilde[range(size), range(size)] + z_tilde[range(size), range(size)].transpose(0, 2, 1)
    )
    transformed = PsiMatrix(z_tilde, n_tilde, psi.W)
    certificate = psd_check(transformed.assemble(), tol)

    gfmb_value = ifb_value = None
    if params is not None and w is not None:
        gfmb_value = gfmb_bound(transformed, bc.rho, params, w, tol)
        ifb_value = ifb_gfmb_bound(psi, bc, params, bc.transform_moments(w), tol)
        logger.debug(f"Basis change: GFMB {gfmb_value:.12g} vs IFB-GFMB {ifb_value:.12g}")
    return BasisChangeCertificate(transformed, psi.schur_residual(), certificate, gfmb_value, ifb_value)


def _check_free_matrix(N, chi, w, weight):
    N = np.asarray(N, dtype=float)
    if N.ndim != 2 or N.shape != (len(chi), weight.size) or len(w) != weight.size:
        raise DimensionMismatch(
            f"N {N.shape}, χ {len(chi)}, w {len(w)} incompatible with weight of size {weight.size}"
        )
    if weight.selector is not None:
        m1 = weight.block_size
        idle = N[:, m1:] if weight.selector == 1 else N[:, :m1]
        if np.any(idle):
            raise DimensionMismatch(f"N must vanish outside the columns of interval {weight.selector}")
    return N


def sgfmb_bound(N, chi, w, weight):
    """-He(χᵀ N w) - χᵀ N Ŵ₋ Nᵀ χ."""
    chi = np.asarray(chi, dtype=float)
    w = _stacked(w)
    N = _check_free_matrix(N, chi, w, weight)
    Nt_chi = N.T @ chi
    return float(-2.0 * (Nt_chi @ w) - Nt_chi @ weight.padded_inverse @ Nt_chi)


def bbi_bound(w, weight):
    """wᵀ Ŵ w, i.e. w^iᵀ 𝒲_i w^i."""
    w = _stacked(w)
    if len(w) != weight.size:
        raise DimensionMismatch(f"w has length {len(w)}, weight is {weight.size}-square")
    return float(w @ weight.padded @ w)


def sfmb_bound(N, w, weight):
    """S-GFMB at χ = w: -wᵀ(He(N) + N Ŵ₋ Nᵀ)w."""
    w = _stacked(w)
    return sgfmb_bound(N, w, w, weight)


def optimal_bbi_params(w, weight, chi):
    """N = -χ(Ŵw)ᵀ/(χᵀχ), so that Nᵀχ = -Ŵw and S-GFMB reaches BBI."""
    chi = np.asarray(chi, dtype=float)
    w = _stacked(w)
    if not np.any(chi):
        raise ZeroChi("the optimal free matrix needs χ ≠ 0")
    if len(w) != weight.size:
        raise DimensionMismatch(f"w has length {len(w)}, weight is {weight.size}-square")
    return -np.outer(chi, weight.padded @ w) / (chi @ chi)


def reflector(x):
    x = np.asarray(x, dtype=float)
    return np.eye(len(x)) - 2.0 * np.outer(x, x) / (x @ x)


def rotation_between(u, v, tol=1e-12):
    """Orthogonal Q with Q u = v for unit vectors u, v."""
    if np.linalg.norm(u - v) <= tol:
        return np.eye(len(u))
    if np.linalg.norm(u + v) <= tol:
        return reflector(u)
    # H_{u+v} sends u to -v, H_v sends -v to v
    return reflector(v) @ reflector(u + v)


@dataclass(frozen=True, eq=False)
class RotationCertificate:
    eta: float
    Q: np.ndarray
    n_tilde: np.ndarray
    sgfmb_value: float
    sfmb_value: float

    @property
    def orthogonality_error(self):
        return float(np.max(np.abs(self.Q.T @ self.Q - np.eye(len(self.Q)))))

    @property
    def value_gap(self):
        return relative_gap(self.sgfmb_value, self.sfmb_value)


def _rotation_parameters(chi, w):
    chi_norm, w_norm = np.linalg.norm(chi), np.linalg.norm(w)
    if len(chi) != len(w):
        raise DimensionMismatch(f"χ has length {len(chi)}, w has {len(w)}")
    if w_norm == 0.0:
        if chi_norm != 0.0:
            raise ZeroMoment("χ = ηQw has no solution for w = 0 and χ ≠ 0")
        return 0.0, np.eye(len(w))
    if chi_norm == 0.0:
        return 0.0, np.eye(len(w))
    return chi_norm / w_norm, rotation_between(w / w_norm, chi / chi_norm)


def sfmb_from_sgfmb(chi, N, w, weight):
    """Write χ = ηQw and take Ñ = ηQᵀN so that S-FMB(Ñ) equals S-GFMB(N, χ)."""
    chi = np.asarray(chi, dtype=float)
    w = _stacked(w)
    eta, Q = _rotation_parameters(chi, w)
    n_tilde = eta * Q.T @ np.asarray(N, dtype=float)
    return RotationCertificate(
        eta, Q, n_tilde, sgfmb_bound(N, chi, w, weight), sfmb_bound(n_tilde, w, weight)
    )


@dataclass(frozen=True, eq=False)
class FmbRotationCertificate:
    eta: float
    Q: np.ndarray
    transformed: PsiMatrix
    psd: PsdCertificate
    gfmb_value: float
    fmb_value: float

    @property
    def value_gap(self):
        return relative_gap(self.gfmb_value, self.fmb_value)


def fmb_from_gfmb(psi, rho, params, w, tol=TOL_PSD):
    """Same rotation on the full Ψ: Z̃_kl = η²QᵀZ_klQ, Ñ_k = ηQᵀN_k (a congruence)."""
    chi = _check_chi(psi, params.chi)
    wi = _stacked(w)
    eta, Q = _rotation_parameters(chi, wi)
    R = eta * Q
    z = np.einsum("ai,klab,bj->klij", R, psi.z, R)
    n_blocks = np.einsum("ai,kab->kib", R, psi.n_blocks)
    transformed = PsiMatrix(z, n_blocks, psi.W)
    return FmbRotationCertificate(
        eta,
        Q,
        transformed,
        transformed.certify(tol),
        gfmb_bound(psi, rho, params, w, tol),
        fmb_bound(transformed, rho, w, params.selector, tol),
    )
