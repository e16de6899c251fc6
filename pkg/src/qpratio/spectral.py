"""Symmetric eigensolver and the eigenvalue-relaxation pipelines.

The relaxation value for the plain ratio is the top eigenvalue of the weight
matrix; for the degree-normalized ratio it is the top eigenvalue of the
symmetrically normalized matrix D^{-1/2} A D^{-1/2}, whose Rayleigh quotient
matches x^T A x / x^T D x under x -> D^{1/2} x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Assignment,
    QpRatioInstance,
    RatioValue,
    ValidationError,
    degrees,
    eval_normalized_qp_ratio,
    eval_qp_ratio,
    restrict,
    trivial_solution,
)
from .util import rng_for


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class EigenResult:
    lambda_max: float
    vector: np.ndarray
    iterations: int
    residual: float


def eigen_max(matrix, tol: float = 1e-10, seed: int = 0, max_iter: int = 100_000) -> EigenResult:
    """Largest (signed) eigenvalue of a symmetric matrix by shifted power iteration.

    A Gershgorin shift makes the spectrum positive so the dominant eigenvalue
    of the shifted matrix is the signed maximum of the original.  The returned
    residual is ||A v - lambda v||_2; non-convergence raises with the best
    residual seen.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    asym = float(np.max(np.abs(a - a.T))) if n else 0.0
    scale = float(np.max(np.abs(a))) if n else 0.0
    if asym > 1e-9 * (1.0 + scale):
        raise ValidationError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    if n == 1:
        return EigenResult(float(a[0, 0]), np.array([1.0]), 0, 0.0)

    shift = 1.0 + float(np.max(np.sum(np.abs(a), axis=1)))
    rng = rng_for(seed, 0x51)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    best_res = math.inf
    lam = 0.0
    for it in range(1, max_iter + 1):
        av = a @ v
        lam = float(v @ av)
        res = float(np.linalg.norm(av - lam * v))
        best_res = min(best_res, res)
        if res <= tol:
            return EigenResult(lam, v, it, res)
        u = av + shift * v
        norm = np.linalg.norm(u)
        if norm == 0.0:  # happens only for the zero matrix with shift 0, kept defensive
            return EigenResult(0.0, v, it, 0.0)
        v = u / norm
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} iterations "
        f"(best residual {best_res:.3e})",
        best_res,
    )


def eig_relaxation_value(inst: QpRatioInstance, tol: float = 1e-10, seed: int = 0) -> float:
    """Top eigenvalue of the weight matrix; upper-bounds the integer optimum."""
    if not inst.entries:
        return 0.0
    return eigen_max(inst.to_dense(), tol=tol, seed=seed).lambda_max


def normalized_eig(inst: QpRatioInstance, tol: float = 1e-10, seed: int = 0) -> tuple[float, np.ndarray]:
    """Top eigenvalue of D^{-1/2} A D^{-1/2} plus the Rayleigh witness x.

    Zero-degree vertices are deleted before normalizing; the witness is padded
    back with zeros and satisfies x^T A x / x^T D x = lambda.
    """
    d = degrees(inst)
    keep = np.nonzero(d > 0)[0]
    if keep.size == 0:
        return 0.0, np.zeros(inst.n)
    sub, kept = restrict(inst, keep)
    dsub = degrees(sub)
    inv_sqrt = 1.0 / np.sqrt(dsub)
    s = sub.to_dense() * inv_sqrt[:, None] * inv_sqrt[None, :]
    res = eigen_max(s, tol=tol, seed=seed)
    x = np.zeros(inst.n)
    x[kept] = res.vector * inv_sqrt
    return res.lambda_max, x


def normalized_eig_value(inst: QpRatioInstance, tol: float = 1e-10, seed: int = 0) -> float:
    return normalized_eig(inst, tol=tol, seed=seed)[0]


def trevisan_round(inst: QpRatioInstance, x) -> tuple[Assignment, RatioValue]:
    """Threshold-cut rounding for the normalized ratio.

    Scans every threshold t in {|x_i| : x_i != 0}, keeps sign(x_i) where
    |x_i| >= t, and returns the best candidate under the normalized objective.
    The scan is exhaustive, so the returned value is exactly the maximum over
    the n threshold cuts.
    """
    xv = np.asarray(x, dtype=np.float64).ravel()
    if xv.size != inst.n:
        raise ValidationError(f"vector has length {xv.size}, instance has n={inst.n}")
    mags = np.abs(xv)
    thresholds = np.unique(mags[mags > 0])
    if thresholds.size == 0:
        raise ValidationError("threshold rounding needs a nonzero vector")
    signs = np.sign(xv).astype(np.int8)
    best: tuple[Assignment, RatioValue] | None = None
    for t in thresholds:
        y = np.where(mags >= t, signs, 0)
        a = Assignment(tuple(int(v) for v in y))
        val = eval_normalized_qp_ratio(inst, a)
        if best is None or val.value > best[1].value:
            best = (a, val)
    return best


def psd_polylog_round(
    inst: QpRatioInstance,
    x,
    diag=None,
    tol: float = 1e-8,
    seed: int = 0,
) -> tuple[Assignment, RatioValue]:
    """Level-bucket rounding for instances whose completed form is PSD.

    Coordinates below a poly(1/n) floor are dropped, the rest are bucketed
    into dyadic magnitude levels.  Within a level every coordinate is pushed
    to the level ceiling with the sign that does not decrease the completed
    quadratic form (coordinatewise convex since a PSD form has a nonnegative
    diagonal), then the uniform-magnitude vector is read off as signs.
    Returns the best level candidate or the single-edge baseline.
    """
    n = inst.n
    xv = np.asarray(x, dtype=np.float64).ravel()
    if xv.size != n:
        raise ValidationError(f"vector has length {xv.size}, instance has n={n}")
    dvec = np.zeros(n) if diag is None else np.asarray(diag, dtype=np.float64).ravel()
    if dvec.size != n:
        raise ValidationError(f"diagonal has length {dvec.size}, instance has n={n}")
    a_full = inst.to_dense() + np.diag(dvec)
    scale = 1.0 + float(np.max(np.abs(a_full)))
    min_eig = -eigen_max(-a_full, tol=min(tol, 1e-9), seed=seed).lambda_max
    if min_eig < -tol * scale:
        raise ValidationError(f"completed form is not PSD (min eigenvalue {min_eig:.3e})")

    best = trivial_solution(inst)
    floor = 1.0 / (n * n * scale)
    mags = np.abs(xv)
    live = mags >= floor
    if not np.any(live):
        return best
    xmax = float(np.max(mags[live]))
    levels = int(math.ceil(math.log2(xmax / floor))) + 1 if xmax > floor else 1
    for k in range(levels):
        hi = xmax / (2.0**k)
        lo = hi / 2.0
        sel = live & (mags <= hi) & (mags > lo)
        if not np.any(sel):
            continue
        y = np.where(sel, xv, 0.0)
        num_before = float(y @ a_full @ y)
        idx = np.nonzero(sel)[0]
        for _sweep in range(2):
            changed = False
            for i in idx:
                if abs(y[i]) == hi:
                    continue
                s = float(a_full[i] @ y) - a_full[i, i] * y[i]
                y_new = hi if s >= 0 else -hi
                if y_new != y[i]:
                    y[i] = y_new
                    changed = True
                num_after = float(y @ a_full @ y)
                if num_after < num_before - 1e-9 * max(1.0, abs(num_before)):
                    raise AssertionError(
                        f"convexity push decreased the completed form: {num_before} -> {num_after}"
                    )
                num_before = num_after
            if not changed:
                break
        a = Assignment(tuple(int(v) for v in np.sign(y)))
        val = eval_qp_ratio(inst, a)
        if val.value > best[1].value:
            best = (a, val)
    return best


def solve_high_opt(inst: QpRatioInstance, eps: float, seed: int = 0) -> tuple[Assignment, RatioValue]:
    """Degree filter + normalized eigenvector + threshold rounding.

    Drops vertices with d_i < (eps/2) d_max, rounds the normalized eigenvector
    of the filtered instance, and returns the better of the mapped-back
    assignment and the single-edge baseline, measured by the plain ratio.
    """
    if not 0 < eps <= 1:
        raise ValidationError(f"eps must lie in (0,1], got {eps}")
    best = trivial_solution(inst)
    d = degrees(inst)
    dmax = float(np.max(d)) if d.size else 0.0
    if dmax <= 0:
        return best
    keep = np.nonzero(d >= (eps / 2.0) * dmax)[0]
    if keep.size == 0:
        return best
    sub, kept = restrict(inst, keep)
    if not sub.entries:
        return best
    _, xsub = normalized_eig(sub, seed=seed)
    if not np.any(xsub):
        return best
    ysub, _ = trevisan_round(sub, xsub)
    vals = [0] * inst.n
    for local, v in enumerate(ysub.values):
        vals[int(kept[local])] = v
    a = Assignment(tuple(vals))
    val = eval_qp_ratio(inst, a)
    if val.value > best[1].value:
        best = (a, val)
    return best
