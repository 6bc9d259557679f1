"""Multistart search for extreme sectional curvatures over 2-planes.

A curvature function takes two batches of tangent coordinates ``(a, b)`` of
shape (N, dim) and returns N curvatures.  Planes are stored as raw pairs and
re-orthonormalized after every step; the objective does not care about the
basis of the plane.

Sampling is organized in fixed-size chunks, chunk ``c`` drawn from its own
generator ``default_rng([seed, c])``.  Restart ``r`` descends from the best
sample of chunk ``r``.  Raising either the sample count or the number of
restarts therefore only adds evaluations, and results do not depend on how
chunks are spread over workers.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .metric import FLAT_TOL, GRAM_TOL

CHUNK = 1024
FD_STEP = 1e-5

CurvatureFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class BudgetError(ValueError):
    pass


class PinchingUndefined(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    samples: int = 200_000
    restarts: int = 64
    iterations: int = 500

    def __post_init__(self):
        if self.samples <= 0 or self.restarts < 0 or self.iterations < 0:
            raise BudgetError(f"invalid budget {self}")

    @property
    def chunks(self) -> int:
        return max(math.ceil(self.samples / CHUNK), self.restarts)


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class TwoPlane:
    X: np.ndarray
    Y: np.ndarray

    def as_lists(self) -> dict:
        return {"X": [float(v) for v in self.X], "Y": [float(v) for v in self.Y]}


@dataclass
class CurvatureExtrema:
    min_value: float
    max_value: float
    argmin: TwoPlane
    argmax: TwoPlane
    samples: int
    restarts: int
    seed: int
    evaluations: int = 0
    pinching: float = field(init=False)

    def __post_init__(self):
        self.pinching = pinching_ratio(self.min_value, self.max_value)

    def as_dict(self) -> dict:
        return {
            "min": self.min_value,
            "max": self.max_value,
            "pinching": self.pinching,
            "argmin": self.argmin.as_lists(),
            "argmax": self.argmax.as_lists(),
            "samples": self.samples,
            "restarts": self.restarts,
            "evaluations": self.evaluations,
            "seed": self.seed,
        }


def pinching_ratio(kmin: float, kmax: float) -> float:
    if not kmax > 0:
        return float("nan")
    if abs(kmin) < FLAT_TOL:
        return 0.0
    return kmin / kmax


def orthonormalize(Z: np.ndarray, dim: int) -> np.ndarray:
    """Euclidean Gram-Schmidt on each stacked pair Z = [X | Y] (batched)."""
    X, Y = Z[..., :dim], Z[..., dim:]
    X = X / np.linalg.norm(X, axis=-1, keepdims=True)
    Y = Y - np.sum(X * Y, axis=-1, keepdims=True) * X
    Y = Y / np.linalg.norm(Y, axis=-1, keepdims=True)
    return np.concatenate([X, Y], axis=-1)


def _evaluate(fn: CurvatureFn, Z: np.ndarray, dim: int) -> np.ndarray:
    shape = Z.shape[:-1]
    flat = Z.reshape(-1, 2 * dim)
    return np.asarray(fn(flat[:, :dim], flat[:, dim:]), dtype=float).reshape(shape)


def _chunk(fn: CurvatureFn, dim: int, seed: int, c: int, size: int):
    rng = np.random.default_rng([seed, c])
    Z = orthonormalize(rng.standard_normal((CHUNK, 2 * dim)), dim)[:size]
    vals = _evaluate(fn, Z, dim)
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    return Z[i], vals[i], Z[j], vals[j]


def _descend(fn: CurvatureFn, Z0: np.ndarray, dim: int, iterations: int, sign: float):
    """Batched finite-difference descent of sign*fn with step halving."""
    R, n = Z0.shape
    Z = orthonormalize(Z0.copy(), dim)
    f = sign * _evaluate(fn, Z, dim)
    evals = R
    eta = np.full(R, 0.1)
    active = np.ones(R, dtype=bool)
    eye = np.eye(n) * FD_STEP
    for _ in range(iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Za = Z[idx]
        pert = np.concatenate([Za[:, None, :] + eye, Za[:, None, :] - eye], axis=1)
        fp = sign * _evaluate(fn, pert, dim)
        evals += fp.size
        g = (fp[:, :n] - fp[:, n:]) / (2 * FD_STEP)
        gnorm = np.linalg.norm(g, axis=-1)
        flat = gnorm < 1e-13
        gdir = g / np.where(flat, 1.0, gnorm)[:, None]
        trial = orthonormalize(Za - eta[idx, None] * gdir, dim)
        ft = sign * _evaluate(fn, trial, dim)
        evals += ft.size
        better = (ft < f[idx]) & np.isfinite(ft)
        acc = idx[better]
        Z[acc] = trial[better]
        f[acc] = ft[better]
        eta[acc] = np.minimum(eta[acc] * 1.5, 1.0)
        rej = idx[~better]
        eta[rej] *= 0.5
        active[idx[flat]] = False
        active[eta < 1e-13] = False
    return Z, sign * f, evals


def min_sectional(curvature_fn: CurvatureFn, dim: int, budget: Budget = DEFAULT_BUDGET, seed: int = 0,
                  workers: int = 1) -> CurvatureExtrema:
    """Extreme curvatures over 2-planes of a ``dim``-dimensional tangent space.

    Dense random sampling followed by local descent (for the minimum) and
    ascent (for the maximum) from the stratified best candidates.
    """
    if dim < 2:
        raise ValueError("need at least a 2-dimensional tangent space")
    if not isinstance(budget, Budget):
        budget = Budget(*budget)
    nchunks = budget.chunks
    sizes = [CHUNK] * nchunks
    job = lambda c: _chunk(curvature_fn, dim, seed, c, sizes[c])  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(nchunks)))
    else:
        results = [job(c) for c in range(nchunks)]
    evals = CHUNK * nchunks
    zmin = np.array([r[0] for r in results])
    vmin = np.array([r[1] for r in results])
    zmax = np.array([r[2] for r in results])
    vmax = np.array([r[3] for r in results])

    cand_min, cand_max = [(vmin, zmin)], [(vmax, zmax)]
    R = budget.restarts
    if R and budget.iterations:
        Zd, fd, e1 = _descend(curvature_fn, zmin[:R], dim, budget.iterations, 1.0)
        Za, fa, e2 = _descend(curvature_fn, zmax[:R], dim, budget.iterations, -1.0)
        evals += e1 + e2
        cand_min.append((fd, Zd))
        cand_max.append((fa, Za))
    # chunk winners first, then descents: ties resolve towards the lowest index
    allmin = np.concatenate([c[0] for c in cand_min])
    allminz = np.concatenate([c[1] for c in cand_min])
    allmax = np.concatenate([c[0] for c in cand_max])
    allmaxz = np.concatenate([c[1] for c in cand_max])
    i, j = int(np.argmin(allmin)), int(np.argmax(allmax))
    return CurvatureExtrema(
        min_value=float(allmin[i]), max_value=float(allmax[j]),
        argmin=TwoPlane(allminz[i, :dim], allminz[i, dim:]),
        argmax=TwoPlane(allmaxz[j, :dim], allmaxz[j, dim:]),
        samples=CHUNK * nchunks, restarts=R, seed=seed, evaluations=evals)


def pinching(curvature_fn: CurvatureFn, dim: int, budget: Budget = DEFAULT_BUDGET, seed: int = 0,
             workers: int = 1) -> float:
    ext = min_sectional(curvature_fn, dim, budget, seed, workers)
    if not ext.max_value > 0:
        raise PinchingUndefined(f"maximal curvature {ext.max_value:.3e} is not positive")
    return ext.pinching


# ---------------------------------------------------------------- metric families


def _golden(f, lo: float, hi: float, iters: int):
    phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_family(family: Callable[[Sequence[float]], object], objective: Callable[[object], float],
                    grid: Sequence[Sequence[float]], sweeps: int = 2, golden_iters: int = 12):
    """Maximize ``objective(family(params))`` over a Cartesian grid, then refine.

    ``grid`` holds one sorted array of candidate values per parameter.  After
    the coarse scan each coordinate is refined by golden-section search inside
    the bracket formed by its neighbouring grid values.  Returns (params, value).
    """
    axes = [np.asarray(g, dtype=float) for g in grid]
    if not axes or any(a.size == 0 for a in axes):
        raise ValueError("empty grid")
    cache: dict = {}

    def value(params) -> float:
        key = tuple(round(float(p), 12) for p in params)
        if key not in cache:
            v = float(objective(family(key)))
            cache[key] = v if np.isfinite(v) else -np.inf
        return cache[key]

    best, best_val = None, -np.inf
    for params in itertools.product(*axes):
        v = value(params)
        if v > best_val:
            best, best_val = list(params), v
    if best is None:
        best = [a[0] for a in axes]
    for _ in range(sweeps):
        for i, ax in enumerate(axes):
            if ax.size < 2:
                continue
            k = int(np.argmin(np.abs(ax - best[i])))
            lo, hi = ax[max(k - 1, 0)], ax[min(k + 1, ax.size - 1)]
            if hi <= lo:
                continue

            def along(x, i=i):
                p = list(best)
                p[i] = x
                return value(p)

            x, v = _golden(along, lo, hi, golden_iters)
            if v > best_val:
                best[i], best_val = x, v
    return tuple(float(b) for b in best), float(best_val)


def gradient_consistency_check(curvature_fn: CurvatureFn, dim: int, trials: int = 20, seed: int = 0,
                               h: float = 1e-3, planes: Optional[np.ndarray] = None) -> float:
    """Worst relative gap between central differences at steps h and h/2.

    Planes whose Euclidean Gram determinant falls below the guard are skipped.
    """
    rng = np.random.default_rng(seed)
    if planes is None:
        planes = orthonormalize(rng.standard_normal((trials, 2 * dim)), dim)
    planes = np.atleast_2d(planes)
    X, Y = planes[:, :dim], planes[:, dim:]
    gram = np.sum(X * X, -1) * np.sum(Y * Y, -1) - np.sum(X * Y, -1) ** 2
    keep = gram >= GRAM_TOL
    if not np.any(keep):
        return 0.0
    Z = planes[keep]
    V = rng.standard_normal(Z.shape)
    V /= np.linalg.norm(V, axis=-1, keepdims=True)

    def deriv(step):
        up = _evaluate(curvature_fn, Z + step * V, dim)
        dn = _evaluate(curvature_fn, Z - step * V, dim)
        return (up - dn) / (2 * step)

    d1, d2 = deriv(h), deriv(h / 2)
    scale = np.maximum(np.abs(d2), 1.0)
    return float(np.max(np.abs(d1 - d2) / scale))
