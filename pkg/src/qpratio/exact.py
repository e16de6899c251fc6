"""Brute-force and grid-search oracles.

Deliberately unoptimized full enumerations; these anchor every other module's
tests.  Enumeration order is fixed (lexicographic with -1 < 0 < 1, grids
ascending) so ties break identically on every run.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .core import (
    Assignment,
    FractionalAssignment,
    QpIntermediateInstance,
    QpRatioInstance,
    RatioValue,
    ValidationError,
    degrees,
)


class BudgetExceeded(RuntimeError):
    """The requested enumeration is over the configured budget."""


def _assignment_grid(n: int) -> np.ndarray:
    """All of {-1,0,1}^n as rows, in lexicographic order with -1 < 0 < 1."""
    vals = np.array([-1, 0, 1], dtype=np.int8)
    grids = np.meshgrid(*([vals] * n), indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, n)


def _numerators(inst, x_rows: np.ndarray) -> np.ndarray:
    num = np.zeros(x_rows.shape[0], dtype=np.float64)
    ii, jj, ww = inst._arrays
    for i, j, w in zip(ii, jj, ww):
        num += (2.0 * w) * (x_rows[:, i].astype(np.float64) * x_rows[:, j])
    return num


def brute_force_qp_ratio(inst: QpRatioInstance, cap: int = 12) -> tuple[Assignment, RatioValue]:
    """Exact maximizer of the plain ratio over all 3^n assignments."""
    if inst.n > cap:
        raise BudgetExceeded(f"brute force refused: n={inst.n} exceeds cap={cap}")
    rows = _assignment_grid(inst.n)
    num = _numerators(inst, rows)
    den = np.count_nonzero(rows, axis=1).astype(np.float64)
    vals = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    k = int(np.argmax(vals))
    a = Assignment(tuple(int(v) for v in rows[k]))
    return a, RatioValue.of(num[k], den[k])


def brute_force_normalized(inst: QpRatioInstance, cap: int = 12) -> tuple[Assignment, RatioValue]:
    """Exact maximizer of the degree-normalized ratio."""
    if inst.n > cap:
        raise BudgetExceeded(f"brute force refused: n={inst.n} exceeds cap={cap}")
    rows = _assignment_grid(inst.n)
    num = _numerators(inst, rows)
    den = np.abs(rows).astype(np.float64) @ degrees(inst)
    vals = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    k = int(np.argmax(vals))
    a = Assignment(tuple(int(v) for v in rows[k]))
    return a, RatioValue.of(num[k], den[k])


def exact_star_optimum(leaves: int) -> float:
    """Exact plain-ratio optimum of a unit star, at any size.

    Every assignment's value depends only on the center value and the counts
    of +1/-1 leaves (leaves are exchangeable), so enumerating the O(leaves^2)
    equivalence classes is a full enumeration of the search space.  Agrees
    with the generic 3^n oracle wherever both run.
    """
    best = 0.0
    for c in (-1, 0, 1):
        for p in range(leaves + 1):
            for q in range(leaves - p + 1):
                den = abs(c) + p + q
                if den == 0:
                    continue
                best = max(best, 2.0 * c * (p - q) / den)
    return best


def grid_search_intermediate(
    inst: QpIntermediateInstance,
    eps: float,
    cap: int = 4,
    max_points: int = 2_500_000,
) -> tuple[FractionalAssignment, RatioValue]:
    """Exhaustive grid search within additive accuracy eps of the continuous optimum.

    The step is delta = min(eps / (2 ||A||_1), 1/(2n)) with 1/delta rounded up
    to an integer, which bounds the perturbation of the optimum ratio by eps.
    """
    n = inst.n
    if n > cap:
        raise BudgetExceeded(f"grid search refused: n={n} exceeds cap={cap}")
    if eps <= 0:
        raise ValidationError(f"accuracy must be positive, got {eps}")
    norm1 = inst.norm1()
    delta = 1.0 / (2 * n)
    if norm1 > 0:
        delta = min(delta, eps / (2.0 * norm1))
    steps = int(math.ceil(1.0 / delta))
    axis = (np.arange(2 * steps + 1, dtype=np.float64) - steps) / steps
    total = (2 * steps + 1) ** n
    if total > max_points:
        raise BudgetExceeded(
            f"grid search refused: {(2 * steps + 1)}^{n} = {total} points exceeds budget {max_points}"
        )
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    rows = np.stack(grids, axis=-1).reshape(-1, n)
    ii, jj, ww = inst._arrays
    num = rows * rows @ np.array(inst.diag, dtype=np.float64)
    for i, j, w in zip(ii, jj, ww):
        num += (2.0 * w) * rows[:, i] * rows[:, j]
    den = np.sum(np.abs(rows), axis=1)
    vals = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    k = int(np.argmax(vals))
    x = FractionalAssignment(tuple(float(v) for v in rows[k]))
    return x, RatioValue.of(num[k], den[k])


def brute_force_ratio_ug(ug, budget: int = 200_000):
    """Exact maximum of satisfied-edges over labeled-vertices for partial labelings.

    The all-bottom labeling has value 0 by convention.  Labelings are scanned
    with bottom ordered before label 0, so ties resolve deterministically.
    """
    from .hardness import PartialLabeling  # local import to keep layering acyclic

    v = ug.vertices
    r = ug.alphabet
    count = (r + 1) ** v
    if count > budget:
        raise BudgetExceeded(
            f"ratio-UG brute force refused: ({r}+1)^{v} = {count} labelings exceed budget {budget}"
        )
    options = [None] + list(range(r))
    best_val = 0.0
    best = tuple([None] * v)
    for labels in itertools.product(options, repeat=v):
        labeled = sum(1 for x in labels if x is not None)
        if labeled == 0:
            continue
        sat = 0
        for u, w, perm in ug.edges:
            lu, lw = labels[u], labels[w]
            if lu is not None and lw is not None and perm[lu] == lw:
                sat += 1
        val = sat / labeled
        if val > best_val:
            best_val = val
            best = labels
    return PartialLabeling(best), best_val


def brute_force_weighted_bipartite(matrix, left_weight: int, cap: int = 12) -> float:
    """max 2 x^T A y / (w ||x||_1 + ||y||_1) over x, y in {-1,0,1}; 0 if all-zero.

    The factor 2 matches the full-sum convention used by the ratio evaluators,
    so this is directly comparable with brute force on a replicated instance.
    """
    a = np.asarray(matrix, dtype=np.float64)
    nl, nr = a.shape
    if nl + nr > cap:
        raise BudgetExceeded(f"weighted brute force refused: {nl}+{nr} exceeds cap={cap}")
    xs = _assignment_grid(nl).astype(np.float64)
    ys = _assignment_grid(nr).astype(np.float64)
    inner = xs @ a @ ys.T
    den = left_weight * np.sum(np.abs(xs), axis=1)[:, None] + np.sum(np.abs(ys), axis=1)[None, :]
    vals = np.divide(2.0 * inner, den, out=np.zeros_like(inner), where=den > 0)
    return float(np.max(vals))
