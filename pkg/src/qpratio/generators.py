"""Seeded instance constructors: examples, gap certificates, planted and
hard-looking distributions, gadgets.

Every generator is a pure function of (params, seed); identical inputs give
bit-identical instances.  Instances carry their construction parameters and
the RNG family tag in meta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    Assignment,
    QpRatioInstance,
    RatioValue,
    ValidationError,
)
from .exact import BudgetExceeded
from .sdp import GramSolution
from .util import RNG_TAG, rng_for


def _meta(family: str, seed=None, **params) -> dict:
    m = {"family": family, "params": params, "rng": RNG_TAG}
    if seed is not None:
        m["seed"] = int(seed)
    return m


def gen_star(leaves: int) -> QpRatioInstance:
    """Unit-weight star: center 0, edges (0, i) for i = 1..leaves."""
    if leaves < 1:
        raise ValidationError(f"a star needs at least one leaf, got {leaves}")
    entries = tuple((0, i, 1.0) for i in range(1, leaves + 1))
    return QpRatioInstance(leaves + 1, entries, meta=_meta("star", leaves=leaves))


def star_relaxation_witness(leaves: int) -> tuple[np.ndarray, float]:
    """The fractional vector x_0 = 1/2, x_i = 1/sqrt(2 leaves) and its Rayleigh value.

    Shows the eigenvalue relaxation cheats on stars: the value grows like
    (4/3) sqrt(leaves/2) while the integer optimum stays below 2.
    """
    x = np.full(leaves + 1, 1.0 / math.sqrt(2 * leaves))
    x[0] = 0.5
    num = 2.0 * leaves * x[0] * x[1]
    den = float(np.dot(x, x))
    return x, num / den


def gen_bipartite_gap(n: int, seed: int) -> QpRatioInstance:
    """Complete bipartite sign matrix with |L| = sqrt(n), |R| = n.

    Left side occupies indices [0, sqrt(n)), right side the following n; every
    cross pair gets an i.i.d. uniform +-1 weight.
    """
    s = math.isqrt(n)
    if s * s != n or n < 4:
        raise ValidationError(f"bipartite gap needs a perfect square n >= 4, got {n}")
    rng = rng_for(seed, 0xB1)
    b = rng.integers(0, 2, size=(s, n)) * 2 - 1
    entries = []
    for i in range(s):
        for j in range(n):
            entries.append((i, s + j, float(b[i, j])))
    bip = (tuple(range(s)), tuple(range(s, s + n)))
    return QpRatioInstance(s + n, tuple(entries), bip, _meta("bipartite_gap", seed, n=n))


def _gap_sign_matrix(inst: QpRatioInstance) -> np.ndarray:
    if inst.bipartition is None:
        raise ValidationError("gap certificate needs a bipartite instance")
    left, right = inst.bipartition
    s, n = len(left), len(right)
    if s * s != n or len(inst.entries) != s * n:
        raise ValidationError("instance is not a complete sqrt(n) x n bipartite sign matrix")
    lpos = {v: k for k, v in enumerate(left)}
    rpos = {v: k for k, v in enumerate(right)}
    b = np.zeros((s, n))
    for i, j, w in inst.entries:
        if abs(w) != 1.0:
            raise ValidationError(f"gap certificate needs +-1 weights, found {w}")
        if i in lpos and j in rpos:
            b[lpos[i], rpos[j]] = w
        elif j in lpos and i in rpos:
            b[lpos[j], rpos[i]] = w
        else:
            raise ValidationError(f"entry ({i},{j}) does not cross the bipartition")
    if np.any(b == 0):
        raise ValidationError("instance is missing cross pairs; not a complete bipartite matrix")
    return b


def gen_gap_sdp_certificate(inst: QpRatioInstance) -> GramSolution:
    """Closed-form feasible vector solution of objective sqrt(n) for the gap family.

    Left vertices get mutually orthogonal vectors of squared length 1/(2 sqrt(n));
    right vertex j gets sum_i B_ij v_i / sqrt(n), of squared length 1/(2n).
    """
    b = _gap_sign_matrix(inst)
    s, n = b.shape
    left, right = inst.bipartition
    w = np.zeros((inst.n, s))
    v_len = math.sqrt(1.0 / (2.0 * s))  # sqrt of 1/(2 sqrt(n))
    for k, vert in enumerate(left):
        w[vert, k] = v_len
    for j, vert in enumerate(right):
        w[vert] = b[:, j] * (v_len / math.sqrt(n))
    return GramSolution.build(inst, w)


@dataclass(frozen=True)
class PlantedParams:
    """Bipartite planted distribution: n left vertices, r right, edge prob p.

    A hidden left subset of size planted_size is correlated with the right
    side; all other edges carry fresh random signs.  Defaults: r and
    planted_size are round(n^(2/3)) and p = n^(delta - 1) with delta = 1/10.
    """

    n: int
    r: Optional[int] = None
    p: Optional[float] = None
    planted_size: Optional[int] = None
    delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"planted instance needs n >= 2, got {self.n}")
        if self.r is None:
            object.__setattr__(self, "r", max(1, round(self.n ** (2.0 / 3.0))))
        if self.planted_size is None:
            object.__setattr__(self, "planted_size", max(1, round(self.n ** (2.0 / 3.0))))
        if self.p is None:
            object.__setattr__(self, "p", self.n ** (self.delta - 1.0))
        if not (0 < self.p <= 1):
            raise ValidationError(f"edge probability must be in (0,1], got {self.p}")
        if self.r > self.n or self.planted_size > self.n:
            raise ValidationError("r and planted_size must not exceed n")


def gen_planted(params: PlantedParams) -> tuple[QpRatioInstance, Assignment]:
    """Instance plus the hidden assignment (planted left signs, all right signs)."""
    n, r, p = params.n, params.r, params.p
    rng = rng_for(params.seed, 0x70)
    mask = rng.random((n, r)) < p
    signs = rng.integers(0, 2, size=(n, r)) * 2 - 1
    planted = np.sort(rng.choice(n, size=params.planted_size, replace=False))
    rho_l = rng.integers(0, 2, size=params.planted_size) * 2 - 1
    rho_r = rng.integers(0, 2, size=r) * 2 - 1
    signs[planted] = np.outer(rho_l, rho_r)
    entries = []
    li, rj = np.nonzero(mask)
    for i, j in zip(li.tolist(), rj.tolist()):
        entries.append((i, n + j, float(signs[i, j])))
    bip = (tuple(range(n)), tuple(range(n, n + r)))
    inst = QpRatioInstance(
        n + r,
        tuple(entries),
        bip,
        _meta(
            "planted",
            params.seed,
            n=n,
            r=r,
            p=p,
            planted_size=params.planted_size,
            delta=params.delta,
        ),
    )
    vals = np.zeros(n + r, dtype=np.int64)
    vals[planted] = rho_l
    vals[n:] = rho_r
    return inst, Assignment(tuple(int(v) for v in vals))


@dataclass(frozen=True)
class LevelGraphParams:
    """Geometric level construction: m levels, level i holds n0 * M^i vertices.

    M = round(1/eps) and m = round(2/eps).  Cliques (weight 1) sit inside each
    level; complete bipartite blocks of weight 1/2 + eps join adjacent levels.
    """

    eps: float
    n0: int = 1

    def __post_init__(self):
        if not (0 < self.eps <= 0.5):
            raise ValidationError(f"eps must lie in (0, 1/2], got {self.eps}")
        if self.n0 < 1:
            raise ValidationError(f"n0 must be a positive integer, got {self.n0}")
        if self.M < 2 or self.m < 2:
            raise ValidationError(f"eps={self.eps} gives M={self.M}, m={self.m}; need both >= 2")

    @property
    def M(self) -> int:
        return round(1.0 / self.eps)

    @property
    def m(self) -> int:
        return round(2.0 / self.eps)

    def level_sizes(self) -> list[int]:
        return [self.n0 * self.M**i for i in range(1, self.m + 1)]

    def entry_count(self) -> int:
        s = self.level_sizes()
        cliques = sum(k * (k - 1) // 2 for k in s)
        cross = sum(s[i] * s[i + 1] for i in range(len(s) - 1))
        return cliques + cross


def gen_level_graph(params: LevelGraphParams, max_entries: int = 2_000_000) -> QpRatioInstance:
    """Explicit level-graph instance in cut-gain sign convention.

    Weights are negated (cliques -1, cross blocks -(1/2+eps)) so that the
    normalized evaluator applied directly yields the gain objective.
    """
    total_entries = params.entry_count()
    if total_entries > max_entries:
        raise BudgetExceeded(
            f"level graph refused: {total_entries} entries exceed cap {max_entries}"
        )
    sizes = params.level_sizes()
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    n = int(offsets[-1])
    cross_w = -(0.5 + params.eps)
    ii: list[np.ndarray] = []
    jj: list[np.ndarray] = []
    ww: list[np.ndarray] = []
    for lvl, size in enumerate(sizes):
        base = int(offsets[lvl])
        a, b = np.triu_indices(size, k=1)
        ii.append(a + base)
        jj.append(b + base)
        ww.append(np.full(a.size, -1.0))
        if lvl + 1 < len(sizes):
            nxt = int(offsets[lvl + 1])
            a = np.repeat(np.arange(size), sizes[lvl + 1]) + base
            b = np.tile(np.arange(sizes[lvl + 1]), size) + nxt
            ii.append(a)
            jj.append(b)
            ww.append(np.full(a.size, cross_w))
    entries = tuple(
        (int(i), int(j), float(w))
        for i, j, w in zip(np.concatenate(ii), np.concatenate(jj), np.concatenate(ww))
    )
    return QpRatioInstance(
        n,
        entries,
        meta=_meta(
            "level_graph",
            None,
            eps=params.eps,
            M=params.M,
            m=params.m,
            n0=params.n0,
            sign_convention="negated-gain-weights",
        ),
    )


def level_graph_witness_vector(params: LevelGraphParams) -> np.ndarray:
    """Per-vertex witness x_u = (-1)^i eps^i for level i, aligned with gen_level_graph."""
    sizes = params.level_sizes()
    parts = [
        np.full(size, ((-1.0) ** lvl) * params.eps**lvl)
        for lvl, size in enumerate(sizes, start=1)
    ]
    return np.concatenate(parts)


def level_graph_witness_value(params: LevelGraphParams) -> RatioValue:
    """Exact witness value by per-level aggregation, no explicit edge list.

    Identical arithmetic to evaluating the witness vector on the explicit
    instance: levels carry constant x, so cliques and cross blocks reduce to
    closed-form sums.
    """
    eps = params.eps
    sizes = params.level_sizes()
    m = len(sizes)
    x = [((-1.0) ** i) * eps**i for i in range(1, m + 1)]
    cross_w = -(0.5 + eps)
    num = 0.0
    den = 0.0
    for k, s in enumerate(sizes):
        i = k + 1
        pairs = s * (s - 1) / 2.0
        num += 2.0 * pairs * (-1.0) * x[k] * x[k]
        den += 2.0 * pairs * 1.0 * (x[k] * x[k])  # |w| (x_u^2 + x_v^2) within the clique
        if k + 1 < m:
            block = s * sizes[k + 1]
            num += 2.0 * block * cross_w * x[k] * x[k + 1]
            den += block * abs(cross_w) * (x[k] * x[k] + x[k + 1] * x[k + 1])
    return RatioValue.of(num, den)


def check_expr1(gammas, M: int, m: int) -> tuple[float, bool]:
    """Evaluate the level-profile ratio and compare against M^(-sqrt(m)/4).

    ratio = (-sum_i g_i^2 M^(2i) + (1+2/M) sum_i g_i g_{i+1} M^(2i+1))
            / sum_i g_i M^(2i),   i = 1..m.
    """
    g = np.asarray(gammas, dtype=np.float64).ravel()
    if g.size != m:
        raise ValidationError(f"expected {m} coefficients, got {g.size}")
    if np.any((g < 0) | (g > 1)):
        raise ValidationError("coefficients must lie in [0, 1]")
    if not np.any(g > 0):
        raise ValidationError("coefficients must not all be zero")
    i = np.arange(1, m + 1, dtype=np.float64)
    m2i = float(M) ** (2 * i)
    eps = 1.0 / M
    num = -float(np.sum(g * g * m2i))
    num += (1.0 + 2.0 * eps) * float(np.sum(g[:-1] * g[1:] * float(M) ** (2 * i[:-1] + 1)))
    den = float(np.sum(g * m2i))
    ratio = num / den
    return ratio, ratio < float(M) ** (-math.sqrt(m) / 4.0)


def gen_apx_gadget(n: int, edges: Sequence[tuple[int, int]], d: int) -> QpRatioInstance:
    """Five-track cut gadget over a d-regular graph on n vertices.

    Blocks A,B,C,D,E each hold one copy of the vertex set (A = [0,n), ...,
    E = [4n,5n)).  Each track i carries the signed 5-cycle a-b-c-d-e with
    weights +d on the path edges and -d on the chord (a_i, e_i).  Cliques of
    weight 10d/n sit on A and on E; the input graph lands on C with weight -1
    per edge so that cut edges pay off.
    """
    if n < 1:
        raise ValidationError(f"gadget needs n >= 1, got {n}")
    deg = [0] * n
    seen = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"bad input edge ({u},{v})")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(f"duplicate input edge {key}")
        seen.add(key)
        deg[u] += 1
        deg[v] += 1
    if edges and any(x != d for x in deg):
        raise ValidationError(f"input graph is not {d}-regular (degrees {sorted(set(deg))})")
    a0, b0, c0, d0, e0 = 0, n, 2 * n, 3 * n, 4 * n
    entries = []
    dw = float(d)
    for i in range(n):
        entries.append((a0 + i, b0 + i, dw))
        entries.append((b0 + i, c0 + i, dw))
        entries.append((c0 + i, d0 + i, dw))
        entries.append((d0 + i, e0 + i, dw))
        entries.append((a0 + i, e0 + i, -dw))
    clique_w = 10.0 * d / n
    if clique_w != 0.0:
        for i in range(n):
            for j in range(i + 1, n):
                entries.append((a0 + i, a0 + j, clique_w))
                entries.append((e0 + i, e0 + j, clique_w))
    for u, v in sorted(seen):
        entries.append((c0 + u, c0 + v, -1.0))
    return QpRatioInstance(
        5 * n, tuple(entries), meta=_meta("apx_gadget", None, n=n, d=d, edges=len(seen))
    )


def apx_planted_assignment(n: int, cut_signs: Sequence[int]) -> Assignment:
    """Structured gadget solution: a=+1, e=-1, c=cut sign, b/d gated by c.

    c_i = +1 turns on b_i = +1 (d_i = 0); c_i = -1 turns on d_i = -1 (b_i = 0).
    Uses 4n of the 5n variables.
    """
    if len(cut_signs) != n:
        raise ValidationError(f"need {n} cut signs, got {len(cut_signs)}")
    vals = [0] * (5 * n)
    for i, c in enumerate(cut_signs):
        if c not in (-1, 1):
            raise ValidationError(f"cut sign {c!r} must be +-1")
        vals[i] = 1
        vals[4 * n + i] = -1
        vals[2 * n + i] = c
        if c > 0:
            vals[n + i] = 1
        else:
            vals[3 * n + i] = -1
    return Assignment(tuple(vals))


def random_instance(
    n: int, seed: int, density: float = 1.0, weight_range: tuple[float, float] = (-1.0, 1.0)
) -> QpRatioInstance:
    """Seeded dense-ish random instance; harness fodder, not a structured family."""
    if not 0 < density <= 1:
        raise ValidationError(f"density must be in (0,1], got {density}")
    rng = rng_for(seed, 0x44)
    lo, hi = weight_range
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            if density >= 1.0 or rng.random() < density:
                entries.append((i, j, float(rng.uniform(lo, hi))))
    return QpRatioInstance(n, tuple(entries), meta=_meta("random", seed, n=n, density=density))
