"""Two-interval estimates on [a, b] = [a, c) ∪ [c, b].

The Bessel bound over the split is Ω_B(α) = diag(𝒲/α, 𝒲/β), which is not
affine in α. Ω_1..Ω_5 are the convexifying lower bounds (M-LSR, ERC, SERC,
MERC, RCC); Ω_F is the simplified free-matrix bound written on the same scale.
Every matrix here acts on w = col{w¹, w²} and the bound is (1/h)·wᵀΩw.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from delaybounds import logger
from delaybounds.config import ALPHA_MIN, SEARCH_BUDGET, SWEEP_SIZE, TOL_IDENTITY, TOL_PSD
from delaybounds.errors import (
    AlphaOutOfRange,
    BudgetExhausted,
    DimensionMismatch,
    InfeasibleParams,
    UnsupportedSpace,
)
from delaybounds.function_spaces import build_basis, split_moments, split_space
from delaybounds.single_interval import psd_check
from delaybounds.utils import (
    he,
    require_shape,
    require_square,
    scale_of,
    sym_sqrt,
    symmetrize,
    trial_rng,
    weight_block,
)

MIN_WITNESS_MAGNITUDE = 1e-6
BOUNDARY_EQUALITY = 1e-10


@dataclass(frozen=True)
class SplitGeometry:
    h: float
    h1: float
    h2: float

    def __post_init__(self):
        if not (self.h > 0 and self.h1 > 0 and self.h2 > 0):
            raise AlphaOutOfRange(f"interval lengths must be positive: {self.h}, {self.h1}, {self.h2}")
        if abs(self.h1 + self.h2 - self.h) > 1e-12 * self.h:
            raise DimensionMismatch(f"h1 + h2 = {self.h1 + self.h2} differs from h = {self.h}")

    @classmethod
    def from_space(cls, space, c):
        return cls(space.length, float(c - space.lower), float(space.upper - c))

    @classmethod
    def from_alpha(cls, alpha, h=1.0):
        return cls(h, alpha * h, h - alpha * h)

    @property
    def alpha(self):
        return self.h1 / self.h

    @property
    def beta(self):
        return self.h2 / self.h


@dataclass(frozen=True, eq=False)
class WeightLadder:
    """𝒲 = diag{1, 3, ..., 2ν+1} ⊗ W."""

    W: np.ndarray
    order: int

    def __post_init__(self):
        W = require_square(self.W, "W")
        if np.min(la.eigh(symmetrize(W), eigvals_only=True)) <= 0:
            raise DimensionMismatch("W must be positive definite")
        object.__setattr__(self, "W", W)

    @property
    def size(self):
        """M1 = (ν+1)n."""
        return (self.order + 1) * self.W.shape[0]

    @property
    def odd(self):
        """1, 3, ..., 2ν+1."""
        return 2.0 * np.arange(self.order + 1) + 1.0

    @property
    def matrix(self):
        return weight_block(1.0 / self.odd, self.W)

    @property
    def inverse(self):
        return weight_block(self.odd, np.linalg.inv(self.W))

    @property
    def sqrt(self):
        return np.kron(np.diag(np.sqrt(self.odd)), sym_sqrt(self.W))


# Parameter sets, one per convexifier

@dataclass(frozen=True, eq=False)
class FMBParams:
    n1: np.ndarray
    n2: np.ndarray


@dataclass(frozen=True, eq=False)
class MLSRParams:
    V1: np.ndarray
    V2: np.ndarray


@dataclass(frozen=True, eq=False)
class ERCParams:
    X1: np.ndarray
    X2: np.ndarray
    Y1: np.ndarray
    Y2: np.ndarray


@dataclass(frozen=True, eq=False)
class SERCParams:
    Y1: np.ndarray
    Y2: np.ndarray


@dataclass(frozen=True, eq=False)
class MERCParams:
    Y: np.ndarray


@dataclass(frozen=True, eq=False)
class RCCParams:
    Y: np.ndarray


def _check_open_alpha(alpha):
    if not ALPHA_MIN <= alpha <= 1.0 - ALPHA_MIN:
        raise AlphaOutOfRange(f"α = {alpha} outside [{ALPHA_MIN}, {1.0 - ALPHA_MIN}]")


def _check_closed_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"α = {alpha} outside [0, 1]")


def omega_B(alpha, ladder):
    _check_open_alpha(alpha)
    Wl = ladder.matrix
    return la.block_diag(Wl / alpha, Wl / (1.0 - alpha))


def omega_F(geometry, params, ladder):
    """Sum of the two per-interval S-FMB forms, scaled by h.

    On interval i the block weight is 𝒲/h_i, so its padded inverse contributes
    h_i·N̂^i 𝒲⁻¹ N̂^iᵀ.
    """
    _check_open_alpha(geometry.alpha)
    m1 = ladder.size
    n1 = require_shape(params.n1, (2 * m1, m1), "N̂¹")
    n2 = require_shape(params.n2, (2 * m1, m1), "N̂²")
    h = geometry.h
    Wi = ladder.inverse
    N = np.hstack([n1, n2])
    return (
        -h * he(N)
        - h * geometry.h1 * (n1 @ Wi @ n1.T)
        - h * geometry.h2 * (n2 @ Wi @ n2.T)
    )


def omega_mlsr(alpha, params, ladder):
    """Ω_1 = He([V1 0] + [0 V2]) - αV1𝒲⁻¹V1ᵀ - βV2𝒲⁻¹V2ᵀ."""
    _check_closed_alpha(alpha)
    m1 = ladder.size
    V1 = require_shape(params.V1, (2 * m1, m1), "V1")
    V2 = require_shape(params.V2, (2 * m1, m1), "V2")
    Wi = ladder.inverse
    return he(np.hstack([V1, V2])) - alpha * (V1 @ Wi @ V1.T) - (1.0 - alpha) * (V2 @ Wi @ V2.T)


@dataclass(frozen=True, eq=False)
class FeasibilityCertificate:
    at_zero: object
    at_one: object

    @property
    def passed(self):
        return self.at_zero.passed and self.at_one.passed

    @property
    def min_eigenvalue(self):
        return min(self.at_zero.min_eigenvalue, self.at_one.min_eigenvalue)


def _as_erc(params, m1):
    if isinstance(params, RCCParams):
        zero = np.zeros((m1, m1))
        return ERCParams(zero, zero, params.Y, params.Y)
    return params


def endpoint_matrix(alpha, params, ladder):
    """diag(𝒲,𝒲) - α[[X1, Y1], [Y1ᵀ, 0]] - β[[0, Y2], [Y2ᵀ, X2]]."""
    m1 = ladder.size
    p = _as_erc(params, m1)
    X1 = require_shape(p.X1, (m1, m1), "X1")
    X2 = require_shape(p.X2, (m1, m1), "X2")
    Y1 = require_shape(p.Y1, (m1, m1), "Y1")
    Y2 = require_shape(p.Y2, (m1, m1), "Y2")
    zero = np.zeros((m1, m1))
    Wl = ladder.matrix
    return (
        la.block_diag(Wl, Wl)
        - alpha * np.block([[X1, Y1], [Y1.T, zero]])
        - (1.0 - alpha) * np.block([[zero, Y2], [Y2.T, X2]])
    )


def erc_feasible(params, ladder, tol=TOL_PSD):
    """Endpoint test at α = 0 and α = 1; affineness in α covers the interval."""
    return FeasibilityCertificate(
        psd_check(symmetrize(endpoint_matrix(0.0, params, ladder)), tol),
        psd_check(symmetrize(endpoint_matrix(1.0, params, ladder)), tol),
    )


def _require_feasible(params, ladder, tol):
    cert = erc_feasible(params, ladder, tol)
    if not cert.passed:
        raise InfeasibleParams(f"endpoint condition fails, λ_min = {cert.min_eigenvalue:.3e}")
    return cert


def omega_erc(alpha, params, ladder, tol=TOL_PSD):
    """Ω_2 = [[𝒲 + βX1, αY1 + βY2], [∗, 𝒲 + αX2]]."""
    _check_closed_alpha(alpha)
    _require_feasible(params, ladder, tol)
    beta = 1.0 - alpha
    Wl = ladder.matrix
    off = alpha * params.Y1 + beta * params.Y2
    return np.block([[Wl + beta * params.X1, off], [off.T, Wl + alpha * params.X2]])


def serc_boundary(Y1, Y2, ladder):
    """X̂1 = 𝒲 - Y1𝒲⁻¹Y1ᵀ, X̂2 = 𝒲 - Y2ᵀ𝒲⁻¹Y2."""
    Wl, Wi = ladder.matrix, ladder.inverse
    return Wl - Y1 @ Wi @ Y1.T, Wl - Y2.T @ Wi @ Y2


def omega_serc(alpha, params, ladder):
    _check_closed_alpha(alpha)
    m1 = ladder.size
    Y1 = require_shape(params.Y1, (m1, m1), "Y1")
    Y2 = require_shape(params.Y2, (m1, m1), "Y2")
    beta = 1.0 - alpha
    X1, X2 = serc_boundary(Y1, Y2, ladder)
    Wl = ladder.matrix
    off = alpha * Y1 + beta * Y2
    return np.block([[Wl + beta * X1, off], [off.T, Wl + alpha * X2]])


def omega_merc(alpha, params, ladder):
    """Ω_4 with X̄1 = 𝒲 - Y𝒲⁻¹Yᵀ, X̄2 = 𝒲 - Yᵀ𝒲⁻¹Y."""
    _check_closed_alpha(alpha)
    m1 = ladder.size
    Y = require_shape(params.Y, (m1, m1), "Y")
    Wl, Wi = ladder.matrix, ladder.inverse
    return np.block([
        [Wl + (1.0 - alpha) * (Wl - Y @ Wi @ Y.T), Y],
        [Y.T, Wl + alpha * (Wl - Y.T @ Wi @ Y)],
    ])


def omega_rcc(alpha, params, ladder, tol=TOL_PSD):
    """Ω_5 = [[𝒲, Y], [Yᵀ, 𝒲]], constant in α."""
    _check_closed_alpha(alpha)
    m1 = ladder.size
    Y = require_shape(params.Y, (m1, m1), "Y")
    _require_feasible(params, ladder, tol)
    Wl = ladder.matrix
    return np.block([[Wl, Y], [Y.T, Wl]])


_CONVEXIFIERS = {
    MLSRParams: omega_mlsr,
    ERCParams: omega_erc,
    SERCParams: omega_serc,
    MERCParams: omega_merc,
    RCCParams: omega_rcc,
}


def omega(alpha, params, ladder):
    """Dispatch to the convexifier matching the parameter type."""
    try:
        builder = _CONVEXIFIERS[type(params)]
    except KeyError:
        raise DimensionMismatch(f"no convexifier for {type(params).__name__}") from None
    return builder(alpha, params, ladder)


def _quadratic(w, Omega, h):
    w = w.stacked if hasattr(w, "stacked") else np.asarray(w, dtype=float)
    Omega = np.asarray(Omega, dtype=float)
    if Omega.shape != (len(w), len(w)):
        raise DimensionMismatch(f"Ω is {Omega.shape}, w has length {len(w)}")
    return float(w @ Omega @ w) / h


def dsfmb_bound(w, Omega_F, h):
    return _quadratic(w, Omega_F, h)


def dbbi_bound(w, Omega_B, h):
    return _quadratic(w, Omega_B, h)


def convexified_bound(w, Omega_k, h):
    return _quadratic(w, Omega_k, h)


def two_interval_moments(space, c, order, f):
    """Geometry and stacked moments of f over [a, c) ∪ [c, b]."""
    if not space.is_continuous:
        raise UnsupportedSpace("the ladder 𝒲 assumes shifted Legendre norms on intervals")
    parts = split_space(space, c)
    bases = tuple(build_basis(part, order) for part in parts)
    return SplitGeometry.from_space(space, c), split_moments(parts, bases, f)


# Parameters that maximize wᵀΩ_k w for a fixed moment vector

def _energies(w, ladder):
    m1 = ladder.size
    w = w.stacked if hasattr(w, "stacked") else np.asarray(w, dtype=float)
    w1, w2 = w[:m1], w[m1:]
    Wl = ladder.matrix
    return w, w1, w2, float(w1 @ Wl @ w1), float(w2 @ Wl @ w2)


def optimal_mlsr(w, alpha, ladder):
    """V_i with V_iᵀw = 𝒲w^i/α_i; Ω_1 then reproduces the Bessel value."""
    _check_open_alpha(alpha)
    w, w1, w2, _, _ = _energies(w, ladder)
    m1 = ladder.size
    norm2 = float(w @ w)
    if norm2 == 0.0:
        zero = np.zeros((2 * m1, m1))
        return MLSRParams(zero, zero)
    Wl = ladder.matrix
    return MLSRParams(
        np.outer(w, Wl @ w1 / alpha) / norm2,
        np.outer(w, Wl @ w2 / (1.0 - alpha)) / norm2,
    )


def optimal_fmb(w, geometry, ladder):
    """N̂^i = -V_i/h for the optimal M-LSR choice."""
    p = optimal_mlsr(w, geometry.alpha, ladder)
    return FMBParams(-p.V1 / geometry.h, -p.V2 / geometry.h)


def optimal_serc(w, alpha, ladder):
    _check_open_alpha(alpha)
    _, w1, w2, A, B = _energies(w, ladder)
    m1 = ladder.size
    if A == 0.0 or B == 0.0:
        zero = np.zeros((m1, m1))
        return SERCParams(zero, zero)
    Wl = ladder.matrix
    outer = np.outer(Wl @ w1, Wl @ w2)
    beta = 1.0 - alpha
    return SERCParams(alpha / (beta * A) * outer, beta / (alpha * B) * outer)


def optimal_erc(w, alpha, ladder):
    """SERC-optimal Y's with X's on their boundary, which satisfies the endpoint test."""
    p = optimal_serc(w, alpha, ladder)
    X1, X2 = serc_boundary(p.Y1, p.Y2, ladder)
    return ERCParams(symmetrize(X1), symmetrize(X2), p.Y1, p.Y2)


def optimal_merc(w, alpha, ladder):
    _check_open_alpha(alpha)
    _, w1, w2, A, B = _energies(w, ladder)
    m1 = ladder.size
    if A == 0.0 or B == 0.0:
        return MERCParams(np.zeros((m1, m1)))
    Wl = ladder.matrix
    return MERCParams(np.outer(Wl @ w1, Wl @ w2) / ((1.0 - alpha) * A + alpha * B))


def optimal_rcc(w, ladder):
    """Y = 𝒲w¹w²ᵀ𝒲/(‖a‖‖b‖): the scaled cross term has unit spectral norm."""
    _, w1, w2, A, B = _energies(w, ladder)
    m1 = ladder.size
    if A == 0.0 or B == 0.0:
        return RCCParams(np.zeros((m1, m1)))
    Wl = ladder.matrix
    return RCCParams(np.outer(Wl @ w1, Wl @ w2) / np.sqrt(A * B))


# Relations between (DS-FMB) and the convexified Bessel bounds

@dataclass(frozen=True, eq=False)
class Witness:
    kind: str
    alpha: float
    y1: np.ndarray
    y2: np.ndarray
    negative_value: float
    positive_value: float
    parameters: dict
    eigenvalues: np.ndarray
    trials: int
    sweep_size: int

    def to_record(self):
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "y1": self.y1.tolist(),
            "y2": self.y2.tolist(),
            "negative_value": self.negative_value,
            "positive_value": self.positive_value,
            "eigenvalues": self.eigenvalues.tolist(),
            "trials": self.trials,
            "sweep_size": self.sweep_size,
            "parameters": {name: value.tolist() for name, value in self.parameters.items()},
        }


@dataclass(frozen=True, eq=False)
class RelationReport:
    relation: str
    holds: bool
    residual: float = 0.0
    min_eigenvalue: float = None
    witness: Witness = None
    detail: str = ""

    def to_record(self):
        return {
            "relation": self.relation,
            "holds": self.holds,
            "residual": self.residual,
            "min_eigenvalue": self.min_eigenvalue,
            "witness": self.witness.to_record() if self.witness else None,
            "detail": self.detail,
        }


def _residual(A, B):
    return float(np.max(np.abs(np.asarray(A) - np.asarray(B)))) / scale_of(A, B)


def mlsr_from_serc(params, ladder):
    """V1 = [𝒲; Y2ᵀ], V2 = [Y1; 𝒲] turns Ω_1 into Ω_3."""
    Wl = ladder.matrix
    return MLSRParams(np.vstack([Wl, params.Y2.T]), np.vstack([params.Y1, Wl]))


def check_relation(relation, params, alpha, ladder, budget=SEARCH_BUDGET, h=1.0, seed=0,
                   sweep_size=SWEEP_SIZE, tol=TOL_PSD, identity_tol=TOL_IDENTITY, search=True):
    """Check relation A..E at one α.

    With ``search`` off, B and D verify only their forward constructions and
    the report carries no witness.
    """
    relation = relation.upper()
    if relation == "A":
        geometry = SplitGeometry.from_alpha(alpha, h)
        forward = _residual(
            omega_F(geometry, params, ladder),
            omega_mlsr(alpha, MLSRParams(-h * params.n1, -h * params.n2), ladder),
        )
        V = MLSRParams(-h * params.n1, -h * params.n2)
        reverse = _residual(
            omega_mlsr(alpha, V, ladder),
            omega_F(geometry, FMBParams(-V.V1 / h, -V.V2 / h), ladder),
        )
        residual = max(forward, reverse)
        return RelationReport("A", residual <= identity_tol, residual,
                              detail="Ω_F(α, N̂) = Ω_1(α, -hN̂) in both directions")

    if relation == "B":
        residual = _residual(omega_mlsr(alpha, mlsr_from_serc(params, ladder), ladder),
                             omega_serc(alpha, params, ladder))
        witness = counterexample_search("B", seed, budget, ladder, sweep_size) if search else None
        return RelationReport("B", residual <= identity_tol, residual, witness=witness,
                              detail="Ω_3 is a special case of Ω_1; the converse fails")

    if relation == "C":
        _require_feasible(params, ladder, tol)
        Omega3 = omega_serc(alpha, SERCParams(params.Y1, params.Y2), ladder)
        gap = psd_check(symmetrize(Omega3 - omega_erc(alpha, params, ladder, tol)), tol)
        X1, X2 = serc_boundary(params.Y1, params.Y2, ladder)
        boundary = ERCParams(symmetrize(X1), symmetrize(X2), params.Y1, params.Y2)
        residual = _residual(Omega3, omega_erc(alpha, boundary, ladder, tol))
        return RelationReport("C", gap.passed and residual <= BOUNDARY_EQUALITY, residual,
                              gap.min_eigenvalue, detail="Ω_2 ⪯ Ω_3, equal at the boundary X's")

    if relation == "D":
        residual = _residual(omega_merc(alpha, params, ladder),
                             omega_serc(alpha, SERCParams(params.Y, params.Y), ladder))
        witness = counterexample_search("D", seed, budget, ladder, sweep_size) if search else None
        return RelationReport("D", residual <= identity_tol, residual, witness=witness,
                              detail="Ω_4 = Ω_3(Y, Y); the converse fails")

    if relation == "E":
        gap = psd_check(
            symmetrize(omega_merc(alpha, MERCParams(params.Y), ladder) - omega_rcc(alpha, params, ladder, tol)),
            tol,
        )
        return RelationReport("E", gap.passed, 0.0, gap.min_eigenvalue, detail="Ω_5 ⪯ Ω_4")

    raise ValueError(f"unknown relation {relation!r}")


def _search_b(rng, ladder, sweep_size, trials):
    m1 = ladder.size
    Wl, Wi = ladder.matrix, ladder.inverse
    scale = float(np.max(np.abs(Wl)))
    xi1 = scale * rng.normal(size=(m1, m1))
    v12 = scale * rng.normal(size=(m1, m1))
    v21 = scale * rng.normal(size=(m1, m1))
    skew = rng.normal(size=(m1, m1))
    base = v12 @ Wi @ v12.T
    # He(Ξ2) - V12𝒲⁻¹V12ᵀ = s·I ≻ 0
    xi2 = 0.5 * (base + scale * rng.uniform(0.1, 1.0) * np.eye(m1)) + scale * 0.5 * (skew - skew.T)
    V = MLSRParams(np.vstack([Wl + xi1, v12]), np.vstack([v21, Wl + xi2]))

    zero = np.zeros(m1)
    _, vecs = la.eigh(symmetrize(xi1 @ Wi @ xi1.T))
    y1 = np.concatenate([vecs[:, -1], zero])
    _, vecs = la.eigh(symmetrize(he(xi2) - base))
    y2 = np.concatenate([zero, vecs[:, -1]])

    sweep = [SERCParams(np.zeros((m1, m1)), np.zeros((m1, m1)))]
    sweep += [SERCParams(scale * rng.normal(size=(m1, m1)), scale * rng.normal(size=(m1, m1)))
              for _ in range(sweep_size - 1)]

    delta = 1e-3
    while delta >= 1e-6:
        alpha = 1.0 - delta
        Omega1 = omega_mlsr(alpha, V, ladder)
        q1, q2 = [], []
        for p in sweep:
            D = Omega1 - omega_serc(alpha, p, ladder)
            q1.append(float(y1 @ D @ y1))
            q2.append(float(y2 @ D @ y2))
        if max(q1) <= -MIN_WITNESS_MAGNITUDE and min(q2) >= MIN_WITNESS_MAGNITUDE:
            D = Omega1 - omega_serc(alpha, sweep[0], ladder)
            return Witness("B", alpha, y1, y2, max(q1), min(q2),
                           {"V1": V.V1, "V2": V.V2, "Xi1": xi1, "Xi2": xi2},
                           la.eigh(symmetrize(D), eigvals_only=True), trials, len(sweep))
        delta /= 2.0
    return None


def _search_d(rng, ladder, sweep_size, trials):
    m1 = ladder.size
    scale = float(np.max(np.abs(ladder.matrix)))
    upsilon1 = scale * rng.normal(size=(m1, m1))
    upsilon2 = scale * rng.normal(size=(m1, m1))
    U, _, Vt = np.linalg.svd(upsilon1)
    u, v = U[:, 0], Vt[0]

    sweep = [np.zeros((m1, m1))] + [scale * rng.normal(size=(m1, m1)) for _ in range(sweep_size - 1)]
    differences = [
        omega_serc(1.0, SERCParams(Y + upsilon1, Y + upsilon2), ladder) - omega_merc(1.0, MERCParams(Y), ladder)
        for Y in sweep
    ]

    t = 1.0
    while t >= 1e-6:
        y1 = np.concatenate([u, -t * v])
        y2 = np.concatenate([u, t * v])
        q1 = [float(y1 @ D @ y1) for D in differences]
        q2 = [float(y2 @ D @ y2) for D in differences]
        if max(q1) <= -MIN_WITNESS_MAGNITUDE and min(q2) >= MIN_WITNESS_MAGNITUDE:
            return Witness("D", 1.0, y1, y2, max(q1), min(q2),
                           {"Upsilon1": upsilon1, "Upsilon2": upsilon2},
                           la.eigh(symmetrize(differences[0]), eigvals_only=True), trials, len(sweep))
        t /= 2.0
    return None


def counterexample_search(kind, seed, budget, ladder=None, sweep_size=SWEEP_SIZE):
    """Find parameters for which Ω_1 - Ω_3 (kind B) or Ω_3 - Ω_4 (kind D) is
    indefinite for every parameter in a randomized sweep of the other side.

    The sweep is finite, so a witness shows indefiniteness against the sampled
    family only.
    """
    kind = kind.upper()
    if kind not in ("B", "D"):
        raise ValueError(f"counterexample kind must be B or D, got {kind!r}")
    ladder = ladder or WeightLadder(np.eye(1), 0)
    search = _search_b if kind == "B" else _search_d
    for trial in range(budget):
        witness = search(trial_rng(seed, trial), ladder, max(1, sweep_size), trial + 1)
        if witness is not None:
            logger.debug(f"{kind} witness after {trial + 1} trials at α = {witness.alpha}")
            return witness
    raise BudgetExhausted(kind, budget)
