"""Strengthened vector relaxation: solver, feasibility checker, warm starts.

The relaxation maximizes sum_{i,j} a_ij <w_i, w_j> subject to sum_i w_i^2 = 1
and |<w_i, w_j>| <= w_i^2 for all pairs, which pushes nonzero vectors toward
equal lengths.  The solver is a low-rank factorization ascent with soft pair
penalties; every integer assignment embeds exactly feasibly, so the returned
objective is never below the best warm start.  No optimality certificate is
produced or needed downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Assignment, QpRatioInstance, ValidationError, trivial_solution
from .exact import brute_force_qp_ratio
from .util import rng_for


@dataclass(frozen=True, eq=False)
class GramSolution:
    """Vectors w_i (rows), the relaxation objective, and feasibility residuals."""

    vectors: np.ndarray
    objective: float
    residual_norm1: float
    residual_pair: float

    @classmethod
    def build(cls, inst: QpRatioInstance, vectors) -> "GramSolution":
        w = np.array(vectors, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != inst.n or w.shape[1] < 1:
            raise ValidationError(f"expected an {inst.n} x d vector array, got shape {w.shape}")
        w.setflags(write=False)
        ii, jj, ww = inst._arrays
        inner = np.einsum("ed,ed->e", w[ii], w[jj]) if ww.size else np.zeros(0)
        objective = float(2.0 * np.sum(ww * inner))
        sq = np.einsum("id,id->i", w, w)
        norm1 = abs(float(np.sum(sq)) - 1.0)
        g = np.abs(w @ w.T)
        bound = np.minimum.outer(sq, sq)
        viol = g - bound
        np.fill_diagonal(viol, 0.0)
        pair = float(max(0.0, np.max(viol))) if inst.n > 1 else 0.0
        return cls(w, objective, norm1, pair)

    @property
    def rank(self) -> int:
        return int(self.vectors.shape[1])

    def squared_lengths(self) -> np.ndarray:
        return np.einsum("id,id->i", self.vectors, self.vectors)


def embed_assignment(inst: QpRatioInstance, a, dim: int = 2) -> GramSolution:
    """Rank-1 embedding w_i = (x_i / sqrt(k)) e_1 for a support-k assignment.

    Exactly feasible, with objective equal to the assignment's ratio value.
    """
    a = Assignment.coerce(a, inst.n)
    k = a.support
    if k == 0:
        raise ValidationError("cannot embed the all-zero assignment (norm constraint)")
    w = np.zeros((inst.n, max(dim, 1)))
    w[:, 0] = a.to_array() / math.sqrt(k)
    # 1/k is not exactly representable for most k; one renormalization pass
    # brings the total squared length within an ulp of 1
    w /= math.sqrt(float(np.sum(w * w)))
    return GramSolution.build(inst, w)


def sdp_feasibility(sol: GramSolution, tol: float = 1e-6) -> tuple[bool, dict]:
    report = {"residual_norm1": sol.residual_norm1, "residual_pair": sol.residual_pair}
    return (sol.residual_norm1 <= tol and sol.residual_pair <= tol), report


def _pair_penalty_grad(g: np.ndarray, sq: np.ndarray) -> np.ndarray:
    """Gradient wrt G of sum_{i != j} max(0, |G_ij| - G_ii)^2, entries independent."""
    h = np.abs(g) - sq[:, None]
    np.fill_diagonal(h, 0.0)
    h = np.maximum(h, 0.0)
    m = 2.0 * h * np.sign(g)
    np.fill_diagonal(m, -2.0 * np.sum(h, axis=1))
    return m


def _repair(a: np.ndarray, w: np.ndarray) -> tuple[float, np.ndarray] | None:
    """Exact feasibility map: orthogonal tails lift each diagonal to its row max.

    Raising G_ii to max_j |G_ij| (tails touch no off-diagonal inner product)
    satisfies every pair constraint, and the uniform renormalization to total
    squared length 1 preserves them.  Returns (objective, vectors).
    """
    g = w @ w.T
    sq = np.diag(g).copy()
    absg = np.abs(g)
    np.fill_diagonal(absg, 0.0)
    need = np.maximum(absg.max(axis=1), sq) if w.shape[0] > 1 else sq
    total = float(np.sum(need))
    if total <= 0:
        return None
    tails = np.sqrt(np.maximum(need - sq, 0.0))
    w2 = np.concatenate([w, np.diag(tails)], axis=1) / math.sqrt(total)
    return float(np.sum(a * g)) / total, w2


def _ascend(a: np.ndarray, d: int, rng, iters: int, tol: float) -> np.ndarray | None:
    """Normalized-gradient ascent with an escalating pair-constraint penalty.

    Early phases run with a weak penalty so the objective shapes the solution;
    each phase output is repaired to exact feasibility and the best repaired
    iterate wins.
    """
    n = a.shape[0]
    scale = max(1.0, float(np.max(np.abs(a))))
    w = rng.standard_normal((n, d))
    w /= np.linalg.norm(w)
    best_w = None
    best_obj = -math.inf
    mu = 0.25 * scale
    for _phase in range(6):
        for t in range(iters):
            g = w @ w.T
            sq = np.diag(g).copy()
            m = _pair_penalty_grad(g, sq)
            grad = 2.0 * (a @ w) - mu * ((m + m.T) @ w)
            gnorm = float(np.linalg.norm(grad))
            if gnorm == 0.0:
                break
            w = w + (0.05 / (1.0 + 4.0 * t / iters)) * grad / gnorm
            w /= np.linalg.norm(w)
        repaired = _repair(a, w)
        if repaired is not None and repaired[0] > best_obj:
            best_obj, best_w = repaired[0], repaired[1]
        mu *= 4.0
    return best_w


def sdp_solve(
    inst: QpRatioInstance,
    rank: int | None = None,
    tol: float = 1e-6,
    seed: int = 0,
    warm_starts=(),
    restarts: int = 3,
    iters: int = 300,
) -> GramSolution:
    """Best feasible-within-tol solution among penalized ascents and warm starts.

    `warm_starts` may hold assignments (embedded exactly) or ready-made
    GramSolutions; the single-edge baseline is always included, so the result
    is never worse than the best warm start.  Ascent outputs failing the
    feasibility tolerance are discarded.
    """
    d = rank if rank is not None else int(math.ceil(math.sqrt(2 * inst.n))) + 1
    if d < 2:
        raise ValidationError(f"rank must be at least 2, got {d}")
    candidates: list[GramSolution] = []
    base, _ = trivial_solution(inst)
    if base.support == 0:
        vals = [0] * inst.n
        vals[0] = 1
        base = Assignment(tuple(vals))
    candidates.append(embed_assignment(inst, base, dim=d))
    for ws in warm_starts:
        if isinstance(ws, GramSolution):
            sol = GramSolution.build(inst, ws.vectors)
        else:
            sol = embed_assignment(inst, ws, dim=d)
        candidates.append(sol)
    if inst.entries:
        a = inst.to_dense()
        for r in range(restarts):
            w = _ascend(a, d, rng_for(seed, 0x5D, r), iters, tol)
            if w is None:
                continue
            sol = GramSolution.build(inst, w)
            if sdp_feasibility(sol, tol)[0]:
                candidates.append(sol)
    best = candidates[0]
    for sol in candidates[1:]:
        if sol.objective > best.objective:
            best = sol
    return best


def sdp_upper_check(inst: QpRatioInstance, sol: GramSolution, cap: int = 12, tol: float = 1e-6) -> bool:
    """True iff the brute-force optimum is below the solution's objective + tol."""
    _, opt = brute_force_qp_ratio(inst, cap=cap)
    return opt.value <= sol.objective + tol
