"""Pure-state entanglement measures and closed forms for Werner states.

All entropies are in bits.  For a Werner state with flip expectation ``f``
the concurrence is ``max(0, -f)``, the tangle ``f**2`` for ``f < 0`` (else 0)
and the entanglement of formation ``H2((1 - sqrt(1 - f**2)) / 2)`` for
``f < 0`` (else 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wernerent.linalg import as_matrix, dagger, hermitian_eig
from wernerent.states import PureState, WernerSpec, reduced_state, schmidt_decompose


@dataclass(frozen=True)
class MeasureTriple:
    concurrence: float
    tangle: float
    eof: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.concurrence, self.tangle, self.eof)


def shannon_entropy(p) -> float:
    """Entropy in bits; zero-probability entries contribute nothing."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument must lie in [0, 1], got {x}")
    return shannon_entropy([x, 1.0 - x])


def tangle_from_mu(mu) -> float:
    """``2 (1 - sum mu_i^2)``."""
    mu = np.asarray(mu, dtype=float)
    return float(2.0 * (1.0 - np.sum(mu**2)))


def tangle_from_mu_pairs(mu) -> float:
    """``4 sum_{i<j} mu_i mu_j``; equal to :func:`tangle_from_mu` when ``sum mu = 1``."""
    mu = np.asarray(mu, dtype=float)
    outer = np.outer(mu, mu)
    return float(4.0 * np.sum(np.triu(outer, k=1)))


def concurrence_pure(psi: PureState) -> float:
    rho_a = reduced_state(psi)
    purity = np.sum(np.abs(rho_a) ** 2)
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - purity))))


def tangle_pure(psi: PureState) -> float:
    return tangle_from_mu(schmidt_decompose(psi).mu)


def entropy_of_entanglement_pure(psi: PureState) -> float:
    return shannon_entropy(schmidt_decompose(psi).mu)


def pure_measures(psi: PureState) -> MeasureTriple:
    return MeasureTriple(concurrence_pure(psi), tangle_pure(psi), entropy_of_entanglement_pure(psi))


def werner_concurrence(spec: WernerSpec) -> float:
    return max(0.0, -spec.f)


def werner_tangle(spec: WernerSpec) -> float:
    return spec.f**2 if spec.f < 0 else 0.0


def werner_eof(spec: WernerSpec) -> float:
    # H2(...) is nonzero for f > 0 too, but those states are separable
    if spec.f >= 0:
        return 0.0
    return binary_entropy(0.5 * (1.0 - np.sqrt(1.0 - spec.f**2)))


def eof_from_concurrence_2xN(c: float) -> float:
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"concurrence must lie in [0, 1], got {c}")
    return binary_entropy(0.5 * (1.0 - np.sqrt(1.0 - c**2)))


def werner_measures(spec: WernerSpec) -> MeasureTriple:
    return MeasureTriple(werner_concurrence(spec), werner_tangle(spec), werner_eof(spec))


_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def wootters_concurrence(rho) -> float:
    """Two-qubit concurrence from the spin-flipped state.

    ``C = max(0, l1 - l2 - l3 - l4)`` where ``l_k`` are the decreasing square
    roots of the eigenvalues of ``rho (sy x sy) rho* (sy x sy)``.  Computed
    through the Hermitian matrix ``sqrt(rho) rho~ sqrt(rho)`` for stability.
    """
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError("Wootters concurrence needs a 4x4 two-qubit state")
    w, v = hermitian_eig((rho + dagger(rho)) / 2)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)
    rho_tilde = _SIGMA_YY @ np.conj(rho) @ _SIGMA_YY
    r = sqrt_rho @ rho_tilde @ sqrt_rho
    lam = np.sqrt(np.clip(np.linalg.eigvalsh((r + dagger(r)) / 2), 0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
