"""Brute-force convex-roof minimization over ensemble decompositions.

Every size-``m`` decomposition of a rank-``r`` state arises from an ``m x r``
isometry ``V`` as ``phi_i = sum_k V_ik sqrt(lambda_k) e_k`` with weights
``p_i = <phi_i|phi_i>``.  The search moves over isometries by left-multiplying
with two-level unitaries, so every iterate reconstructs the target exactly.

The objective is a sum over ensemble members, so rotations acting on disjoint
row pairs change disjoint terms and are accepted or rejected independently.
One iteration is a round-robin sweep that touches every pair of rows once.
The step size follows a 1/5 success rule.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from wernerent import measures
from wernerent.linalg import as_matrix, dagger, haar_unitary
from wernerent.states import DensityOperator, PureState, WernerSpec, werner_density

KINDS = ("concurrence", "tangle", "eof")
RANK_TOL = 1e-10
ISOMETRY_TOL = 1e-10
MIN_STEP = 1e-8
CONVERGED_TOL = 1e-4
MAX_ROOF_D = 3


@dataclass(frozen=True, eq=False)
class Ensemble:
    members: list[tuple[float, PureState]]

    def __post_init__(self):
        ps = np.array([p for p, _ in self.members], dtype=float)
        if len(ps) == 0:
            raise ValueError("ensemble is empty")
        if np.any(ps < 0):
            raise ValueError("negative ensemble weight")
        if abs(ps.sum() - 1.0) > 1e-12:
            raise ValueError(f"ensemble weights sum to {ps.sum()!r}, expected 1")

    @property
    def d(self) -> int:
        return self.members[0][1].d

    def density_matrix(self) -> np.ndarray:
        vecs = np.array([psi.vector for _, psi in self.members])
        ps = np.array([p for p, _ in self.members])
        return (vecs.T * ps) @ np.conj(vecs)

    def reconstruction_error(self, rho: DensityOperator) -> float:
        return float(np.linalg.norm(self.density_matrix() - rho.matrix))


@dataclass(frozen=True, eq=False)
class RoofResult:
    best_value: float
    best_ensemble: Ensemble
    restarts: int
    converged_restarts: int
    target_spec: WernerSpec | None = None
    kind: str = "concurrence"
    restart_values: list[float] = field(default_factory=list)
    min_iterate_value: float = float("nan")  # lowest objective evaluated anywhere
    traces: list[np.ndarray] | None = None  # incumbent per iteration, if requested


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


def member_values(states: np.ndarray, kind: str) -> np.ndarray:
    """``p * measure(phi / sqrt(p))`` for unnormalized coefficient matrices.

    ``states`` has shape ``(..., d, d)``; the result has shape ``(...)``.
    """
    p = np.sum(np.abs(states) ** 2, axis=(-2, -1))
    rho_a = states @ dagger(states)
    if kind == "eof":
        lam = np.clip(np.linalg.eigvalsh(rho_a), 0.0, None)
        safe_p = np.where(p > 0, p, 1.0)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(lam > 0, lam * np.log2(lam / safe_p), 0.0)
        return np.maximum(-terms.sum(axis=-1), 0.0)
    purity = np.sum(np.abs(rho_a) ** 2, axis=(-2, -1))
    unnorm_tangle = np.maximum(2.0 * (p * p - purity), 0.0)
    if kind == "concurrence":
        return np.sqrt(unnorm_tangle)
    return np.divide(unnorm_tangle, p, out=np.zeros_like(p), where=p > 0)


def average_measure(e: Ensemble, kind: str) -> float:
    _check_kind(kind)
    fn = {
        "concurrence": measures.concurrence_pure,
        "tangle": measures.tangle_pure,
        "eof": measures.entropy_of_entanglement_pure,
    }[kind]
    return float(sum(p * fn(psi) for p, psi in e.members))


def _spectral_factor(rho: DensityOperator) -> np.ndarray:
    """Rows ``sqrt(lambda_k) e_k^T`` for the nonzero eigenpairs of ``rho``."""
    lam, vecs = np.linalg.eigh(rho.matrix)
    keep = lam > RANK_TOL
    return np.sqrt(lam[keep])[:, None] * vecs[:, keep].T


def rank(rho: DensityOperator) -> int:
    return int(np.sum(np.linalg.eigvalsh(rho.matrix) > RANK_TOL))


def ensemble_from_states(states: np.ndarray, d: int) -> Ensemble:
    """Ensemble from unnormalized coefficient matrices; negligible members dropped."""
    p = np.sum(np.abs(states) ** 2, axis=(-2, -1))
    keep = p > 1e-16
    p_kept = p[keep]
    members = [
        (float(q), PureState(d, s / np.linalg.norm(s)))
        for q, s in zip(p_kept / p_kept.sum(), states[keep])
    ]
    return Ensemble(members)


def decomposition_from_isometry(rho: DensityOperator, v) -> Ensemble:
    v = as_matrix(v)
    factor = _spectral_factor(rho)
    r = factor.shape[0]
    if v.shape[1] != r:
        raise ValueError(f"isometry has {v.shape[1]} columns but rank(rho) = {r}")
    if np.max(np.abs(dagger(v) @ v - np.eye(r))) > ISOMETRY_TOL:
        raise ValueError("v does not have orthonormal columns")
    states = (v @ factor).reshape(-1, rho.d, rho.d)
    return ensemble_from_states(states, rho.d)


def round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint row pairs covering every pair once (circle method)."""
    idx: list[int | None] = list(range(m)) + ([None] if m % 2 else [])
    n = len(idx)
    rounds = []
    for _ in range(n - 1):
        pairs = [(idx[k], idx[n - 1 - k]) for k in range(n // 2)]
        pairs = [pq for pq in pairs if None not in pq]
        rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return rounds


def _descend(factor, d, m, kind, rngs, budget, trace):
    """Run independent restarts side by side; one child generator per restart."""
    n_r = len(rngs)
    r = factor.shape[0]
    states = np.stack([(haar_unitary(m, g)[:, :r] @ factor).reshape(m, d, d) for g in rngs])
    vals = member_values(states, kind)
    eps = np.full(n_r, 0.5)
    active = np.ones(n_r, dtype=bool)
    rounds = round_robin(m)
    n_rounds, k = len(rounds), len(rounds[0][0])
    traces = [[vals[t].sum()] for t in range(n_r)] if trace else None
    min_seen = vals.sum(axis=1)
    iterations = np.zeros(n_r, dtype=int)

    for _ in range(budget):
        if not active.any():
            break
        gauss = np.zeros((n_r, n_rounds, k, 2))
        unif = np.zeros((n_r, n_rounds, k))
        for t in np.flatnonzero(active):
            gauss[t] = rngs[t].standard_normal((n_rounds, k, 2))
            unif[t] = rngs[t].random((n_rounds, k))
        accepted = np.zeros(n_r)
        for rd, (a_idx, b_idx) in enumerate(rounds):
            theta = eps[:, None] * gauss[:, rd, :, 0]
            alpha = eps[:, None] * gauss[:, rd, :, 1]
            phase = np.exp(2j * np.pi * unif[:, rd])
            c, s = np.cos(theta), np.sin(theta)
            ea = np.exp(1j * alpha)
            sa, sb = states[:, a_idx], states[:, b_idx]
            new_a = (c * ea)[..., None, None] * sa - (s * np.conj(phase))[..., None, None] * sb
            new_b = (s * phase)[..., None, None] * sa + (c * np.conj(ea))[..., None, None] * sb
            va, vb = member_values(new_a, kind), member_values(new_b, kind)
            delta = (va + vb) - (vals[:, a_idx] + vals[:, b_idx])
            total = vals.sum(axis=1)
            min_seen = np.minimum(min_seen, total + delta.min(axis=1))
            ok = (delta < 0) & active[:, None]
            rows, cols = np.nonzero(ok)
            states[rows, a_idx[cols]] = new_a[rows, cols]
            states[rows, b_idx[cols]] = new_b[rows, cols]
            vals[rows, a_idx[cols]] = va[rows, cols]
            vals[rows, b_idx[cols]] = vb[rows, cols]
            accepted += ok.sum(axis=1)
        iterations[active] += 1
        frac = accepted / (n_rounds * k)
        eps = np.where(active, np.minimum(eps * np.exp(0.5 * (frac - 0.2)), np.pi / 2), eps)
        if trace:
            for t in np.flatnonzero(active):
                traces[t].append(vals[t].sum())
        active &= eps >= MIN_STEP

    finals = vals.sum(axis=1)
    min_seen = np.minimum(min_seen, finals)
    out_traces = [np.array(tr) for tr in traces] if trace else None
    return states, finals, min_seen, out_traces


def _descend_chunk(args):
    return _descend(*args)


def minimize_roof(
    target,
    kind: str = "concurrence",
    m: int | None = None,
    restarts: int = 20,
    seed=None,
    budget: int = 5000,
    trace: bool = False,
    n_jobs: int = 1,
) -> RoofResult:
    """Upper bound on the convex roof of ``kind`` at ``target``.

    ``target`` is a :class:`WernerSpec` or a :class:`DensityOperator`.  ``m``
    defaults to ``rank + 2``.  Each restart starts from a Haar-random isometry
    and draws from its own generator spawned from ``seed``, so splitting the
    restarts over ``n_jobs`` processes gives the same result as one process.
    Ties between restarts go to the lowest restart index.
    """
    _check_kind(kind)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if isinstance(target, WernerSpec):
        spec, rho = target, werner_density(target)
    else:
        spec, rho = None, target
    factor = _spectral_factor(rho)
    r = factor.shape[0]
    if m is None:
        m = r + 2
    if m < r:
        raise ValueError(f"ensemble size m={m} is below rank(rho)={r}")
    if m < 2:
        m = 2
    rngs = np.random.default_rng(seed).spawn(restarts)

    if n_jobs > 1 and restarts > 1:
        chunks = [list(range(restarts))[c::n_jobs] for c in range(min(n_jobs, restarts))]
        with ProcessPoolExecutor(len(chunks)) as pool:
            parts = list(pool.map(
                _descend_chunk,
                [(factor, rho.d, m, kind, [rngs[t] for t in ch], budget, trace) for ch in chunks],
            ))
        states = np.empty((restarts, m, rho.d, rho.d), dtype=complex)
        finals, min_seen = np.empty(restarts), np.empty(restarts)
        traces = [None] * restarts if trace else None
        for ch, (st, fi, ms, tr) in zip(chunks, parts):
            states[ch], finals[ch], min_seen[ch] = st, fi, ms
            if trace:
                for t, x in zip(ch, tr):
                    traces[t] = x
    else:
        states, finals, min_seen, traces = _descend(factor, rho.d, m, kind, rngs, budget, trace)

    best = int(np.argmin(finals))  # first index on ties
    ensemble = ensemble_from_states(states[best], rho.d)
    best_value = average_measure(ensemble, kind)
    return RoofResult(
        best_value=best_value,
        best_ensemble=ensemble,
        restarts=restarts,
        converged_restarts=int(np.sum(finals <= finals[best] + CONVERGED_TOL)),
        target_spec=spec,
        kind=kind,
        restart_values=[float(x) for x in finals],
        min_iterate_value=float(min_seen.min()),
        traces=traces,
    )


def analytic_value(spec: WernerSpec, kind: str) -> float:
    _check_kind(kind)
    return {
        "concurrence": measures.werner_concurrence,
        "tangle": measures.werner_tangle,
        "eof": measures.werner_eof,
    }[kind](spec)


@dataclass(frozen=True)
class TheoremCheck:
    d: int
    f: float
    kind: str
    analytic: float
    numeric: float
    gap: float  # numeric - analytic
    restarts_converged: int
    passed: bool

    def as_row(self) -> dict:
        return {
            "d": self.d,
            "f": self.f,
            "kind": self.kind,
            "analytic": self.analytic,
            "numeric": self.numeric,
            "gap": self.gap,
            "restarts_converged": self.restarts_converged,
            "pass": self.passed,
        }


def verify_theorem(
    d: int,
    f_grid,
    kind: str,
    tolerance: float = 1e-3,
    restarts: int = 20,
    seed=0,
    budget: int = 5000,
    m_extra: int = 2,
    m: int | None = None,
    n_jobs: int = 1,
) -> list[TheoremCheck]:
    """Compare the closed-form Werner value with :func:`minimize_roof` on a grid.

    A point passes when ``|numeric - analytic| <= tolerance``; a tolerance of
    zero always fails, since exact equality is not something a numerical
    search can promise.  The roof search
    only produces upper bounds, so agreement from below is evidence that the
    optimizer found the closed-form value, not a proof of optimality.
    """
    _check_kind(kind)
    if not 2 <= d <= MAX_ROOF_D:
        raise ValueError(f"roof verification limited to d <= {MAX_ROOF_D} (got d={d})")
    f_grid = list(f_grid)
    seeds = np.random.SeedSequence(seed).spawn(len(f_grid))
    out = []
    for f, ss in zip(f_grid, seeds):
        spec = WernerSpec(d, f)
        size = m if m is not None else rank(werner_density(spec)) + m_extra
        res = minimize_roof(spec, kind, m=size, restarts=restarts, seed=ss, budget=budget, n_jobs=n_jobs)
        analytic = analytic_value(spec, kind)
        gap = res.best_value - analytic
        out.append(TheoremCheck(d, spec.f, kind, analytic, res.best_value, gap,
                                res.converged_restarts, bool(tolerance > 0 and abs(gap) <= tolerance)))
    return out
