"""Inner-product spaces over intervals and integer ranges.

Everything here is exact up to floating rounding: functions are polynomials,
integrals come from the antiderivative and sums are evaluated point by point.
Polynomials are carried in the centred variable x = (2t - a - b)/h of the
space they are integrated over, so short or far-off intervals keep
well-scaled coefficients.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial import Legendre, Polynomial
from numpy.polynomial.legendre import leg2poly

from delaybounds import logger
from delaybounds.config import MAX_DEGREE, TOL_ORTH
from delaybounds.errors import (
    DegenerateBasis,
    DimensionMismatch,
    InvalidInterval,
    InvalidSplit,
)


class SpaceKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class Space:
    kind: SpaceKind
    lower: float
    upper: float

    @property
    def is_continuous(self):
        return self.kind is SpaceKind.CONTINUOUS

    @property
    def length(self):
        """h = b - a."""
        return float(self.upper - self.lower)

    @property
    def measure(self):
        """⟨1, 1⟩ on this domain."""
        if self.is_continuous:
            return self.length
        return float(self.upper - self.lower + 1)

    @property
    def domain(self):
        """Interval mapped onto [-1, 1]; integer ranges get half a step of margin."""
        if self.is_continuous:
            return np.array([self.lower, self.upper], dtype=float)
        return np.array([self.lower - 0.5, self.upper + 0.5], dtype=float)

    def points(self):
        if self.is_continuous:
            raise TypeError("a continuous space has no point set")
        return np.arange(int(self.lower), int(self.upper) + 1, dtype=float)

    def local(self, p):
        """p re-expressed in the centred variable of this space."""
        if isinstance(p, Polynomial) and np.array_equal(p.domain, self.domain):
            return p
        if not isinstance(p, Polynomial):
            p = Polynomial(np.atleast_1d(np.asarray(p, dtype=float)))
        return p.convert(kind=Polynomial, domain=self.domain)

    def integrate(self, poly):
        """⟨1, poly⟩ evaluated exactly."""
        poly = self.local(poly)
        if self.is_continuous:
            # ∫_{-1}^{1} x^j dx = 2/(j+1) for even j, 0 for odd j
            j = np.arange(len(poly.coef))
            moments = np.where(j % 2 == 0, 2.0 / (j + 1), 0.0)
            return 0.5 * self.length * float(poly.coef @ moments)
        return float(np.sum(poly(self.points())))


def make_space(kind, a, b):
    kind = SpaceKind(kind)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise InvalidInterval(f"space bounds must be finite, got [{a}, {b}]")
    if kind is SpaceKind.CONTINUOUS:
        if not a < b:
            raise InvalidInterval(f"continuous space needs a < b, got [{a}, {b}]")
        return Space(kind, float(a), float(b))
    if int(a) != a or int(b) != b:
        raise InvalidInterval(f"discrete bounds must be integers, got {a}, {b}")
    if not a <= b:
        raise InvalidInterval(f"discrete space needs a <= b, got {{{a}..{b}}}")
    return Space(kind, int(a), int(b))


def split_space(space, c):
    """Split D0 into D1 = [a, c) and D2 = [c, b].

    For integer ranges D1 = {a..c-1} and D2 = {c..b}; both must be non-empty.
    """
    a, b = space.lower, space.upper
    if space.is_continuous:
        if not a < c < b:
            raise InvalidSplit(f"split point {c} outside ({a}, {b})")
        return Space(space.kind, a, float(c)), Space(space.kind, float(c), b)
    if int(c) != c or not a < c <= b:
        raise InvalidSplit(f"split point {c} must be an integer in ({a}, {b}]")
    c = int(c)
    return Space(space.kind, a, c - 1), Space(space.kind, c, b)


def inner_product(space, phi, psi):
    return space.integrate(space.local(phi) * space.local(psi))


@dataclass(frozen=True, eq=False)
class VectorPolynomial:
    """f(t) = (f_1(t), ..., f_n(t)) with monomial coefficients per row."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
        if coeffs.ndim != 2:
            raise DimensionMismatch(f"coefficients must be 2-D, got {coeffs.shape}")
        if coeffs.shape[1] - 1 > MAX_DEGREE:
            raise DimensionMismatch(
                f"degree {coeffs.shape[1] - 1} exceeds the supported maximum {MAX_DEGREE}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_rows(cls, rows):
        """Build from ragged per-coordinate coefficient lists."""
        rows = [np.atleast_1d(np.asarray(r, dtype=float)) for r in rows]
        width = max(len(r) for r in rows)
        padded = np.zeros((len(rows), width))
        for i, r in enumerate(rows):
            padded[i, : len(r)] = r
        return cls(padded)

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((n, 1)))

    @property
    def dimension(self):
        return self.coefficients.shape[0]

    @property
    def degree(self):
        return self.coefficients.shape[1] - 1

    def coordinate(self, i):
        return Polynomial(self.coefficients[i])

    def coordinates(self):
        return [self.coordinate(i) for i in range(self.dimension)]

    def __call__(self, t):
        return np.array([p(t) for p in self.coordinates()])


@dataclass(frozen=True, eq=False)
class Basis:
    space: Space
    functions: tuple
    rho: np.ndarray

    @property
    def order(self):
        return len(self.functions) - 1

    def gram(self):
        size = len(self.functions)
        G = np.empty((size, size))
        for k in range(size):
            for l in range(k, size):
                G[k, l] = G[l, k] = inner_product(self.space, self.functions[k], self.functions[l])
        return G

    def orthogonality_defect(self):
        """max_{k,l} |⟨Π_k, Π_l⟩ / sqrt(ρ_k ρ_l) - δ_kl|.

        Covers both the off-diagonal leakage and any drift of ‖Π_k‖² from ρ_k.
        """
        G = self.gram()
        normalized = G / np.sqrt(np.outer(self.rho, self.rho))
        return float(np.max(np.abs(normalized - np.eye(len(self.rho)))))


def _legendre_basis(space, order):
    functions = tuple(
        Polynomial(leg2poly(Legendre.basis(k).coef), domain=space.domain)
        for k in range(order + 1)
    )
    rho = np.array([space.length / (2 * k + 1) for k in range(order + 1)])
    return functions, rho


def _gram_schmidt_basis(space, order):
    functions = []
    rho = []
    for k in range(order + 1):
        p = Polynomial.basis(k, domain=space.domain)
        for _ in range(2):  # second pass re-orthogonalizes
            for q, r in zip(functions, rho):
                p = p - (inner_product(space, p, q) / r) * q
        functions.append(p)
        rho.append(inner_product(space, p, p))
    return tuple(functions), np.array(rho)


@lru_cache(maxsize=256)
def build_basis(space, order):
    """Orthogonal system Π_0..Π_ν with ρ_k = ‖Π_k‖².

    Continuous spaces get Legendre polynomials shifted to [a, b]
    (ρ_k = h/(2k+1)); integer ranges get Gram-Schmidt on monomials.
    Results are cached per (space, order).
    """
    if order < 0:
        raise DegenerateBasis(f"basis order must be non-negative, got {order}")
    if space.is_continuous:
        functions, rho = _legendre_basis(space, order)
    else:
        if space.measure < order + 1:
            raise DegenerateBasis(
                f"{int(space.measure)} points cannot carry {order + 1} orthogonal polynomials"
            )
        functions, rho = _gram_schmidt_basis(space, order)

    rho.setflags(write=False)
    basis = Basis(space, functions, rho)
    defect = basis.orthogonality_defect()
    if not defect <= TOL_ORTH:
        raise DegenerateBasis(f"orthogonality lost: relative defect {defect:.3e}")
    logger.debug(f"Built order-{order} basis on {space} (defect {defect:.1e})")
    return basis


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Projections w_k^i = ⟨f_i, Π_ki⟩, shape (intervals, ν+1, n)."""

    blocks: np.ndarray

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=float)
        if blocks.ndim != 3 or blocks.shape[0] not in (1, 2):
            raise DimensionMismatch(f"moment blocks must be (1|2, ν+1, n), got {blocks.shape}")
        blocks.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def stack(cls, first, second):
        if first.blocks.shape != second.blocks.shape:
            raise DimensionMismatch("both subintervals need the same ν and n")
        return cls(np.concatenate([first.blocks, second.blocks]))

    @property
    def intervals(self):
        return self.blocks.shape[0]

    @property
    def order(self):
        return self.blocks.shape[1] - 1

    @property
    def dimension(self):
        return self.blocks.shape[2]

    @property
    def block_size(self):
        """M1 = (ν+1)n."""
        return self.blocks.shape[1] * self.blocks.shape[2]

    @property
    def stacked(self):
        """w = col{w¹, w²} with w^i = col{w_0^i, ..., w_ν^i}."""
        return self.blocks.reshape(-1).copy()

    def interval(self, i):
        """w^i for i = 1, 2."""
        return self.blocks[i - 1].reshape(-1).copy()


def moments(space, basis, f):
    if basis.space != space:
        raise DimensionMismatch(f"basis lives on {basis.space}, not on {space}")
    coords = [space.local(fi) for fi in f.coordinates()]
    blocks = np.array([[inner_product(space, fi, pk) for fi in coords] for pk in basis.functions])
    return MomentVector(blocks[np.newaxis])


def split_moments(parts, bases, f):
    """Moment vector over two subintervals, each with its own basis."""
    (s1, s2), (b1, b2) = parts, bases
    return MomentVector.stack(moments(s1, b1, f), moments(s2, b2, f))

def exact_energy(space, f, W):
    """⟨f, Wf⟩ by expanding the integrand; shares nothing with the bound formulas."""
    W = np.asarray(W, dtype=float)
    n = f.dimension
    if W.shape != (n, n):
        raise DimensionMismatch(f"W has shape {W.shape}, f has dimension {n}")
    coords = [space.local(p) for p in f.coordinates()]
    integrand = 0 * coords[0]
    for i in range(n):
        for j in range(n):
            if W[i, j] != 0.0:
                integrand = integrand + W[i, j] * coords[i] * coords[j]
    return space.integrate(integrand)
