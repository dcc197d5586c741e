"""The U x U twirl: exact projection onto Werner states and a Haar Monte Carlo check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wernerent.linalg import dagger, haar_unitaries
from wernerent.states import (
    DensityOperator,
    PureState,
    WernerSpec,
    density_from_pure,
    flip_expectation,
    flip_operator,
    werner_matrix,
)


@dataclass(frozen=True, eq=False)
class TwirlEstimate:
    mean: np.ndarray
    samples: int
    frob_stderr: float  # batch-means estimate; nan when only one batch

    @property
    def d(self) -> int:
        return int(round(np.sqrt(self.mean.shape[0])))

    @property
    def f_estimate(self) -> float:
        return float(np.trace(flip_operator(self.d) @ self.mean).real)


def twirl_exact(rho: DensityOperator) -> WernerSpec:
    """Werner state that ``rho`` twirls to; the twirl keeps ``Tr(F rho)``."""
    f = flip_expectation(rho)
    return WernerSpec(rho.d, min(1.0, max(-1.0, f)))


def conjugate_uu(rho: np.ndarray, unitaries: np.ndarray) -> np.ndarray:
    """``(U x U) rho (U x U)^dagger`` for each ``U`` in a ``(k, d, d)`` stack."""
    k, d, _ = unitaries.shape
    uu = np.einsum("kab,kcd->kacbd", unitaries, unitaries).reshape(k, d * d, d * d)
    return uu @ rho @ dagger(uu)


def _batch_sizes(n_samples: int, n_batches: int) -> list[int]:
    base, extra = divmod(n_samples, n_batches)
    return [base + (b < extra) for b in range(n_batches)]


def twirl_monte_carlo(
    rho: DensityOperator, n_samples: int, seed=None, n_batches: int | None = None
) -> TwirlEstimate:
    """Average ``(U x U) rho (U x U)^dagger`` over ``n_samples`` Haar draws.

    Samples are split into ``round(sqrt(n_samples))`` batches by default.  Each
    batch draws from its own child generator spawned from ``seed``, so a batch
    can be computed independently of the others; batches are summed in order.
    The standard error is the batch-means estimate of the Frobenius norm of
    the error of the mean.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if n_batches is None:
        n_batches = max(1, int(round(np.sqrt(n_samples))))
    n_batches = min(n_batches, n_samples)
    rngs = np.random.default_rng(seed).spawn(n_batches)
    d = rho.d
    batch_means = []
    total = np.zeros_like(rho.matrix)
    for rng, size in zip(rngs, _batch_sizes(n_samples, n_batches)):
        conj = conjugate_uu(rho.matrix, haar_unitaries(size, d, rng))
        s = conj.sum(axis=0)
        total += s
        batch_means.append(s / size)
    mean = total / n_samples
    if n_batches > 1:
        dev = np.array([np.sum(np.abs(b - mean) ** 2) for b in batch_means])
        stderr = float(np.sqrt(dev.sum() / (n_batches * (n_batches - 1))))
    else:
        stderr = float("nan")
    return TwirlEstimate(mean, n_samples, stderr)


def frobenius_residual(estimate: TwirlEstimate, spec: WernerSpec) -> float:
    return float(np.linalg.norm(estimate.mean - werner_matrix(spec.d, spec.f)))


def verify_pure_twirl(psi: PureState, n_samples: int = 2000, seed=None) -> tuple[WernerSpec, float]:
    """Werner spec of the twirled ``|psi><psi|`` and the Monte Carlo distance to it."""
    rho = density_from_pure(psi)
    spec = twirl_exact(rho)
    est = twirl_monte_carlo(rho, n_samples, seed)
    return spec, frobenius_residual(est, spec)
