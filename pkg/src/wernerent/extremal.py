"""Constrained pure-state extremization for Werner states.

Minimize the tangle (or concurrence) of a pure state ``phi`` subject to
``sum_ij phi_ij conj(phi_ji) = f`` and unit norm.  In a basis where the reduced
state ``phi phi^dagger`` is diagonal, its spectrum splits into two-level pieces
``S_ij`` with weights ``p_ij = |phi_ij|^2 + |phi_ji|^2`` (``i < j``) and point
masses ``p_ii = |phi_ii|^2``.  Concavity of the tangle and convexity of ``f^2``
give the chain

    tau >= sum p_ij tau(S_ij) >= sum p_ij f_ij^2 >= (f - sum_i |phi_ii|^2)^2,

which is saturated by a single antisymmetric-like pair of amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from wernerent.linalg import dagger, hermitian_eig
from wernerent.states import PureState, pure_flip_expectation, reduced_state

DIAGONAL_TOL = 1e-8


@dataclass(frozen=True)
class PairWeight:
    i: int
    j: int
    p: float
    f_component: float
    tangle_component: float  # tau(S_ij) = 4 |phi_ij|^2 |phi_ji|^2 / p^2


@dataclass(frozen=True)
class DiagonalWeight:
    i: int
    p: float


@dataclass(frozen=True)
class DistributionSplit:
    pairs: list[PairWeight] = field(default_factory=list)
    diagonal: list[DiagonalWeight] = field(default_factory=list)

    @property
    def total_weight(self) -> float:
        return sum(q.p for q in self.pairs) + sum(q.p for q in self.diagonal)

    @property
    def f_reconstruction(self) -> float:
        return sum(q.p * q.f_component for q in self.pairs) + sum(q.p for q in self.diagonal)

    @property
    def pair_f_sum(self) -> float:
        """``sum_{i<j} p_ij f_ij``."""
        return sum(q.p * q.f_component for q in self.pairs)

    @property
    def pair_f_sq_sum(self) -> float:
        """``sum_{i<j} p_ij f_ij^2``."""
        return sum(q.p * q.f_component**2 for q in self.pairs)

    @property
    def pair_abs_f_sum(self) -> float:
        return sum(q.p * abs(q.f_component) for q in self.pairs)

    @property
    def pair_tangle_sum(self) -> float:
        """``sum_{i<j} p_ij tau(S_ij)``."""
        return sum(q.p * q.tangle_component for q in self.pairs)

    @property
    def pair_concurrence_sum(self) -> float:
        return sum(q.p * np.sqrt(q.tangle_component) for q in self.pairs)


def offdiagonal_mass(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - np.diag(np.diagonal(m))))


def _require_diagonal_reduced(psi: PureState) -> None:
    mass = offdiagonal_mass(reduced_state(psi))
    if mass > DIAGONAL_TOL:
        raise ValueError(
            f"reduced state is not diagonal (off-diagonal mass {mass:.3g}); "
            "apply diagonalize_reduced first"
        )


def split_distribution(psi: PureState) -> DistributionSplit:
    _require_diagonal_reduced(psi)
    phi = psi.phi
    w = np.abs(phi) ** 2
    pairs = []
    for i in range(psi.d):
        for j in range(i + 1, psi.d):
            p = w[i, j] + w[j, i]
            if p == 0.0:
                continue
            pairs.append(
                PairWeight(
                    i,
                    j,
                    float(p),
                    float(2.0 * (phi[i, j] * np.conj(phi[j, i])).real / p),
                    float(4.0 * w[i, j] * w[j, i] / p**2),
                )
            )
    diagonal = [DiagonalWeight(i, float(w[i, i])) for i in range(psi.d)]
    return DistributionSplit(pairs, diagonal)


def diagonalize_reduced(psi: PureState) -> PureState:
    """Apply ``U x U`` (``phi -> U phi U^T``) so that ``phi phi^dagger`` is diagonal.

    The same unitary on both factors keeps ``f`` and every entanglement measure.
    Eigenvalues of the reduced state end up in descending order.
    """
    _, v = hermitian_eig(reduced_state(psi))
    u = dagger(v[:, ::-1])
    phi = u @ psi.phi @ u.T
    return PureState(psi.d, phi / np.linalg.norm(phi))


def subproblem_min(f_ij: float) -> tuple[float, float]:
    """Smallest ``|x|^2`` and tangle with ``2 Re(x y*) = f_ij``, ``|x|^2 + |y|^2 = 1``."""
    if abs(f_ij) > 1.0:
        raise ValueError(f"|f_ij| must be <= 1, got {f_ij}")
    return (1.0 - np.sqrt(1.0 - f_ij**2)) / 2.0, f_ij**2


def brute_force_subproblem(f_ij: float, n_grid: int = 401) -> tuple[float, int]:
    """Grid search for the two-amplitude subproblem.

    Feasible points are built exactly on the constraint set from two grids:
    ``|x|^2`` values with the relative phase solved from the constraint, and
    relative phases with ``|x|^2`` solved from it.  Each is swept over
    ``n_grid`` global phases, and the constraint is re-evaluated on the
    resulting complex amplitudes.  Returns ``(min 4|xy|^2, n_feasible)``.
    """
    a_grid = np.linspace(0.0, 1.0, n_grid)
    phase_grid = np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False)

    amp = 2.0 * np.sqrt(a_grid * (1.0 - a_grid))
    ok = amp >= abs(f_ij)
    cos_rel = np.divide(f_ij, amp, out=np.ones_like(amp), where=amp > 0)
    rel = np.arccos(np.clip(cos_rel[ok], -1.0, 1.0))
    a_from_grid = np.concatenate([a_grid[ok], a_grid[ok]])
    rel_from_grid = np.concatenate([rel, -rel])

    cos_phase = np.cos(phase_grid)
    ok = np.abs(cos_phase) >= abs(f_ij)
    ok &= (np.sign(cos_phase) == np.sign(f_ij)) | (f_ij == 0)
    ratio = np.divide(f_ij, cos_phase[ok], out=np.zeros(ok.sum()), where=cos_phase[ok] != 0)
    disc = np.sqrt(np.clip(1.0 - ratio**2, 0.0, None))
    a_from_phase = np.concatenate([(1 - disc) / 2, (1 + disc) / 2])
    rel_from_phase = np.concatenate([phase_grid[ok], phase_grid[ok]])

    a = np.concatenate([a_from_grid, a_from_phase])
    rel = np.concatenate([rel_from_grid, rel_from_phase])
    common = phase_grid[:, None]
    x = np.sqrt(a)[None, :] * np.exp(1j * (common + rel[None, :]))
    y = np.sqrt(1.0 - a)[None, :] * np.exp(1j * common)
    residual = np.abs(2.0 * (x * np.conj(y)).real - f_ij)
    feasible = residual <= 1e-12
    tau = 4.0 * np.abs(x * y) ** 2
    if not feasible.any():
        return float("inf"), 0
    return float(tau[feasible].min()), int(feasible.sum())


def tangle_lower_bound(psi: PureState) -> float:
    """``(f - sum_i |phi_ii|^2)^2``; requires a diagonal reduced state."""
    _require_diagonal_reduced(psi)
    gap = pure_flip_expectation(psi) - np.sum(np.abs(np.diagonal(psi.phi)) ** 2)
    return float(gap**2)


def concurrence_lower_bound(psi: PureState) -> float:
    _require_diagonal_reduced(psi)
    gap = pure_flip_expectation(psi) - np.sum(np.abs(np.diagonal(psi.phi)) ** 2)
    return float(abs(gap))


@dataclass(frozen=True)
class OptimalStateParams:
    d: int
    f: float
    i: int = 0
    j: int = 1
    theta1: float = 0.0
    theta2: float = np.pi

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if not -1.0 <= self.f < 0.0:
            raise ValueError(f"optimal pure states are defined for f in [-1, 0), got {self.f}")
        if not (0 <= self.i < self.j < self.d):
            raise ValueError(f"need 0 <= i < j < d, got i={self.i}, j={self.j}")
        turns = (self.theta1 - self.theta2 - np.pi) / (2 * np.pi)
        if abs(turns - round(turns)) * 2 * np.pi > 1e-12:
            raise ValueError("theta1 - theta2 must be an odd multiple of pi")


def optimal_pure_state(params: OptimalStateParams) -> PureState:
    root = np.sqrt(1.0 - params.f**2)
    phi = np.zeros((params.d, params.d), dtype=complex)
    phi[params.i, params.j] = np.exp(1j * params.theta1) * np.sqrt((1.0 - root) / 2.0)
    phi[params.j, params.i] = np.exp(1j * params.theta2) * np.sqrt((1.0 + root) / 2.0)
    return PureState(params.d, phi)


def min_pure_values(d: int, f: float) -> tuple[float, float]:
    """Minimal concurrence and tangle of a pure state twirling to ``rho_f``."""
    if d < 2 or not -1.0 <= f <= 1.0:
        raise ValueError(f"invalid (d, f) = ({d}, {f})")
    if f < 0:
        return -f, f * f
    return 0.0, 0.0


def separable_case_witness(d: int, f: float, i: int = 0) -> PureState:
    """Product state with ``Tr(F |psi><psi|) = f`` for ``f`` in ``[0, 1]``.

    All weight sits in row ``i``: ``phi_ii = sqrt(f)`` and
    ``phi_ik = sqrt(1 - f)`` with ``k = (i + 1) mod d``.
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"f must lie in [0, 1], got {f}")
    if d < 2:
        raise ValueError("d must be >= 2")
    phi = np.zeros((d, d), dtype=complex)
    phi[i, i] = np.sqrt(f)
    phi[i, (i + 1) % d] = np.sqrt(1.0 - f)
    return PureState(d, phi)


class PiecewiseLinear:
    """Piecewise-linear interpolant through sorted vertices."""

    def __init__(self, xs, ys):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        span = 1e-12 * max(1.0, np.abs(self.xs).max())
        if np.any(x_arr < self.xs[0] - span) or np.any(x_arr > self.xs[-1] + span):
            raise ValueError("evaluation point outside the envelope's domain")
        out = np.interp(x_arr, self.xs, self.ys)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"PiecewiseLinear({len(self.xs)} vertices on [{self.xs[0]}, {self.xs[-1]}])"


def convex_hull_lower_envelope(points) -> PiecewiseLinear:
    """Lower convex envelope of ``(f, value)`` samples (monotone chain)."""
    pts = sorted((float(x), float(y)) for x, y in points)
    dedup: list[tuple[float, float]] = []
    for x, y in pts:
        if dedup and dedup[-1][0] == x:
            continue  # sorted, so the first entry at x is the lowest
        dedup.append((x, y))
    if len(dedup) < 2:
        raise ValueError("need at least two distinct abscissae")
    hull: list[tuple[float, float]] = []
    for p in dedup:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    xs, ys = zip(*hull)
    return PiecewiseLinear(xs, ys)


def extremize_pure_numeric(d: int, f: float, kind: str = "tangle", restarts: int = 10, seed=None):
    """Numerically minimize a pure-state measure under the flip constraint.

    Direct SLSQP over the real and imaginary parts of ``phi``, with the norm
    and ``f`` constraints as equalities.  Independent of the analytic
    derivation; returns ``(best value, PureState)``.
    """
    if kind not in ("tangle", "concurrence"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)
    n = d * d

    def unpack(x):
        return (x[:n] + 1j * x[n:]).reshape(d, d)

    def tangle(x):
        phi = unpack(x)
        rho_a = phi @ dagger(phi)
        return 2.0 * (np.sum(np.abs(phi) ** 2) ** 2 - np.sum(np.abs(rho_a) ** 2))

    cons = [
        {"type": "eq", "fun": lambda x: np.sum(x**2) - 1.0},
        {"type": "eq", "fun": lambda x: np.sum(unpack(x) * np.conj(unpack(x).T)).real - f},
    ]
    best_val, best_phi = np.inf, None
    for _ in range(restarts):
        x0 = rng.standard_normal(2 * n)
        res = minimize(tangle, x0 / np.linalg.norm(x0), method="SLSQP", constraints=cons,
                       options={"maxiter": 500, "ftol": 1e-14})
        viol = max(abs(c["fun"](res.x)) for c in cons)
        if viol > 1e-8:
            continue
        if res.fun < best_val:
            best_val, best_phi = res.fun, unpack(res.x)
    if best_phi is None:
        raise ArithmeticError("no restart reached a feasible point")
    psi = PureState.from_coefficients(best_phi, normalize=True)
    value = max(0.0, float(best_val))
    return (np.sqrt(value) if kind == "concurrence" else value), psi
