"""Werner states, the flip operator, bipartite pure states and Schmidt forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wernerent.linalg import as_matrix, dagger, is_hermitian, svd

TRACE_TOL = 1e-10
PSD_TOL = 1e-9
NORM_TOL = 1e-12
F_IMAG_TOL = 1e-8


@dataclass(frozen=True)
class WernerSpec:
    """A Werner state given by subsystem dimension ``d`` and ``f = Tr(F rho)``."""

    d: int
    f: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if not -1.0 <= self.f <= 1.0:
            raise ValueError(f"f must lie in [-1, 1], got {self.f}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "f", float(self.f))

    def to_dict(self) -> dict:
        return {"d": self.d, "f": self.f}

    @classmethod
    def from_dict(cls, obj: dict) -> "WernerSpec":
        return cls(obj["d"], obj["f"])


@dataclass(frozen=True, eq=False)
class DensityOperator:
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        n = self.d * self.d
        if m.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix for d={self.d}, got {m.shape}")
        if not is_hermitian(m):
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise ValueError(f"density operator has trace {np.trace(m).real!r}, expected 1")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise ValueError("density operator is not positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class PureState:
    """Bipartite pure state ``sum_ij phi[i, j] |ij>``."""

    d: int
    phi: np.ndarray

    def __post_init__(self):
        phi = as_matrix(self.phi)
        if phi.shape != (self.d, self.d):
            raise ValueError(f"expected a {self.d}x{self.d} coefficient matrix, got {phi.shape}")
        norm = np.sum(np.abs(phi) ** 2)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coefficient matrix has squared norm {norm!r}, expected 1")
        phi.flags.writeable = False
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_coefficients(cls, phi, normalize: bool = False) -> "PureState":
        phi = as_matrix(phi)
        if normalize:
            phi = phi / np.linalg.norm(phi)
        return cls(phi.shape[0], phi)

    @classmethod
    def from_vector(cls, vec, d: int, normalize: bool = False) -> "PureState":
        return cls.from_coefficients(np.asarray(vec, dtype=complex).reshape(d, d), normalize)

    @property
    def vector(self) -> np.ndarray:
        return self.phi.reshape(-1)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``phi = u_a @ diag(sqrt(mu)) @ u_b.T`` with ``mu`` sorted descending."""

    mu: np.ndarray
    u_a: np.ndarray
    u_b: np.ndarray

    def reassemble(self) -> np.ndarray:
        return self.u_a @ np.diag(np.sqrt(self.mu)) @ self.u_b.T

    def rank(self, tol: float = 1e-10) -> int:
        return int(np.sum(self.mu > tol))


def flip_operator(d: int) -> np.ndarray:
    if d < 2:
        raise ValueError("d must be >= 2")
    n = d * d
    f = np.zeros((n, n), dtype=np.complex128)
    i, j = np.divmod(np.arange(n), d)
    f[i * d + j, j * d + i] = 1.0
    return f


def symmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) + flip_operator(d)) / 2


def antisymmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) - flip_operator(d)) / 2


def werner_matrix(d: int, f: float) -> np.ndarray:
    return ((d - f) * np.eye(d * d) + (d * f - 1) * flip_operator(d)) / (d**3 - d)


def werner_density(spec: WernerSpec) -> DensityOperator:
    return DensityOperator(spec.d, werner_matrix(spec.d, spec.f))


def flip_expectation(rho: DensityOperator) -> float:
    d = rho.d
    # Tr(F rho) = sum_{ij} rho_{(j,i),(i,j)}
    value = np.einsum("jiij->", rho.matrix.reshape(d, d, d, d))
    if abs(value.imag) > F_IMAG_TOL:
        raise ValueError(f"Tr(F rho) has imaginary part {value.imag!r}; input is not a valid state")
    return float(value.real)


def pure_flip_expectation(psi: PureState) -> float:
    # sum_ij phi_ij conj(phi_ji), real for any phi
    return float(np.sum(psi.phi * np.conj(psi.phi.T)).real)


def density_from_pure(psi: PureState) -> DensityOperator:
    v = psi.vector
    return DensityOperator(psi.d, np.outer(v, np.conj(v)))


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    u, s, v = svd(psi.phi)
    mu = s**2
    return SchmidtDecomposition(mu / mu.sum(), u, np.conj(v))


def reduced_state(psi: PureState) -> np.ndarray:
    """``rho_A = phi phi^dagger``."""
    return psi.phi @ dagger(psi.phi)


def random_pure_state(d: int, seed=None) -> PureState:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return PureState.from_coefficients(z, normalize=True)


def random_density(d: int, seed=None) -> DensityOperator:
    """Hilbert-Schmidt random state ``G G^dagger / Tr(G G^dagger)``."""
    rng = np.random.default_rng(seed)
    n = d * d
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ dagger(g)
    rho = (rho + dagger(rho)) / 2
    return DensityOperator(d, rho / np.trace(rho).real)
