"""Curvature of homogeneous quotients G/H at the identity coset."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .liealg import LieAlgebraBasis, Subalgebra, bracket, closure_defect, orthogonal_complement
from .metric import (FLAT_TOL, GRAM_TOL, DegeneratePlaneError, LeftInvariantMetric,
                     subalgebra_scaled, unnormalized_curvature)

INVARIANCE_TOL = 1e-10
HORIZONTAL_TOL = 1e-9


class HomogeneousSpaceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HomogeneousSpec:
    """Chain H < K < G with Q-orthogonal splittings g = k + m and k = h + p.

    Without K, ``m`` is the complement of h and ``p`` is empty.
    """

    G: LieAlgebraBasis
    H: Subalgebra
    K: Optional[Subalgebra] = None
    name: str = ""
    m: np.ndarray = field(init=False, repr=False)
    p: np.ndarray = field(init=False, repr=False)
    symmetric_base: bool = field(init=False)

    def __post_init__(self):
        G, H, K = self.G, self.H, self.K
        for sub in (H, K):
            if sub is not None and closure_defect(G, sub.span) > INVARIANCE_TOL:
                raise HomogeneousSpaceError(f"{sub.name} is not a subalgebra")
        if K is None:
            m = H.complement()
            p = np.zeros((G.dim, 0))
            sym = _bracket_escape(G, m, H.span) < INVARIANCE_TOL
        else:
            if np.max(np.abs(H.span - K.projector @ H.span)) > INVARIANCE_TOL:
                raise HomogeneousSpaceError(f"{H.name} is not contained in {K.name}")
            m = K.complement()
            inside = K.span.T @ H.span  # h in k-coordinates
            p = K.span @ orthogonal_complement(inside, K.dim) if K.dim > H.dim else np.zeros((G.dim, 0))
            sym = _bracket_escape(G, m, K.span) < INVARIANCE_TOL
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "symmetric_base", bool(sym))

    @property
    def tangent(self) -> np.ndarray:
        """Frame of p + m, i.e. of the tangent space at the identity coset."""
        return np.hstack([self.p, self.m])

    @property
    def tangent_dim(self) -> int:
        return self.p.shape[1] + self.m.shape[1]


def _bracket_escape(G: LieAlgebraBasis, m: np.ndarray, target: np.ndarray) -> float:
    if m.shape[1] == 0:
        return 0.0
    vecs = m.T
    br = bracket(G, vecs[:, None, :], vecs[None, :, :])
    esc = br - (br @ target) @ target.T
    return float(np.max(np.abs(esc)))


def validate_right_invariance(metric: LeftInvariantMetric, H: Subalgebra, tol: float = INVARIANCE_TOL) -> bool:
    """Infinitesimal Ad(H)-invariance: P commutes with ad_Z for Z in h."""
    P = metric.P
    for Z in H.frame():
        A = metric.alg.ad(Z)
        if np.max(np.abs(P @ A - A @ P)) > tol:
            return False
    return True


def _vertical_norm2(metric: LeftInvariantMetric, H: Subalgebra, Z: np.ndarray) -> np.ndarray:
    """|Z^v|^2_P for the P-orthogonal projection of Z onto h."""
    V = H.span
    PV = metric.P @ V
    G = V.T @ PV
    c = Z @ PV  # <Z, v_i>_P
    sol = np.linalg.solve(G, c[..., None])[..., 0] if c.ndim > 1 else np.linalg.solve(G, c)
    return np.sum(c * sol, axis=-1)


def quotient_curvature_batch(metric: LeftInvariantMetric, H: Subalgebra, X, Y) -> np.ndarray:
    """O'Neill curvature without input validation (batched hot path)."""
    k = unnormalized_curvature(metric, X, Y)
    corr = 0.75 * _vertical_norm2(metric, H, bracket(metric.alg, X, Y))
    xx = metric.inner(X, X)
    yy = metric.inner(Y, Y)
    xy = metric.inner(X, Y)
    return (k + corr) / (xx * yy - xy * xy)


def quotient_sectional(metric: LeftInvariantMetric, H: Subalgebra, x, y, *, check: bool = True):
    """Sectional curvature of G/H (quotient metric) on the plane spanned by x, y.

    x and y must be horizontal, i.e. P-orthogonal to h.  The vertical part of
    [x, y] is taken P-orthogonally.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if check:
        if not validate_right_invariance(metric, H):
            raise HomogeneousSpaceError("metric is not right-invariant under H")
        scale = np.maximum(np.linalg.norm(x, axis=-1), np.linalg.norm(y, axis=-1))
        for v in (x, y):
            vert = np.abs(v @ metric.P @ H.span)
            if np.any(np.max(vert, axis=-1) > HORIZONTAL_TOL * np.maximum(scale, 1.0)):
                raise HomogeneousSpaceError("input vector is not horizontal")
        gram = metric.inner(x, x) * metric.inner(y, y) - metric.inner(x, y) ** 2
        if np.any(gram < GRAM_TOL):
            raise DegeneratePlaneError(f"Gram determinant {np.min(gram):.3e} below {GRAM_TOL}")
    out = quotient_curvature_batch(metric, H, x, y)
    return float(out) if np.ndim(out) == 0 else out


def normal_homogeneous_sectional(spec: HomogeneousSpec, x, y) -> np.ndarray:
    """Normal homogeneous curvature: (1/4 |[x,y]_m|^2 + |[x,y]_h|^2) / Gram.

    Independent of ``quotient_sectional``; only uses brackets and the h-projector.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    Z = bracket(spec.G, x, y)
    zh = Z @ spec.H.span
    zm = Z - zh @ spec.H.span.T
    num = 0.25 * np.sum(zm * zm, axis=-1) + np.sum(zh * zh, axis=-1)
    gram = np.sum(x * x, -1) * np.sum(y * y, -1) - np.sum(x * y, -1) ** 2
    out = num / gram
    return float(out) if np.ndim(out) == 0 else out


def gt_metric(spec: HomogeneousSpec, t: float) -> LeftInvariantMetric:
    if spec.K is None:
        raise HomogeneousSpaceError("g_t needs an intermediate subalgebra K")
    return subalgebra_scaled(spec.K, t)


def g_t_quotient_sectional(spec: HomogeneousSpec, t: float, x, y):
    """Curvature of g_t = t Q|p + Q|m on G/H via the submersion (G, Q_t) -> G/H.

    Vectors in p + m are already Q_t-orthogonal to h, so they are their own
    horizontal lifts.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    metric = gt_metric(spec, t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return quotient_sectional(metric, spec.H, x, y)


def tangent_curvature_fn(metric: LeftInvariantMetric, spec: HomogeneousSpec):
    """Plane evaluator on tangent coordinates (a, b) -> curvature of (F a, F b)."""
    if not validate_right_invariance(metric, spec.H):
        raise HomogeneousSpaceError("metric is not right-invariant under H")
    F = spec.tangent
    # tangent frame must be horizontal for this metric
    if spec.H.dim and np.max(np.abs(F.T @ metric.P @ spec.H.span)) > HORIZONTAL_TOL:
        raise HomogeneousSpaceError("p + m is not horizontal for this metric")

    def fn(a, b):
        return quotient_curvature_batch(metric, spec.H, np.asarray(a) @ F.T, np.asarray(b) @ F.T)

    return fn


# ---------------------------------------------------------------- fatness


def _bracket_gram_min(G: LieAlgebraBasis, p: np.ndarray, m: np.ndarray, a: np.ndarray) -> np.ndarray:
    """min over unit Y in m of |[X, Y]|^2 with X = p a / |a| (batched over a)."""
    a = np.atleast_2d(a)
    a = a / np.linalg.norm(a, axis=-1, keepdims=True)
    X = a @ p.T
    ad = np.einsum("ni,ijk->nkj", X, G.structure)  # ad_X, columns indexed by input
    M = ad @ m  # (n, dim g, dim m)
    w = np.linalg.eigvalsh(np.swapaxes(M, -1, -2) @ M)
    return np.maximum(w[:, 0], 0.0)


def fatness_margin(spec: HomogeneousSpec, budget: int = 2000, seed: int = 0, restarts: int = 8) -> float:
    """Minimum of |[X,Y]|^2_Q over unit X in p and unit Y in m.

    The Y-minimization is exact (smallest eigenvalue); X is searched by random
    sampling on the unit sphere of p plus local refinement from the best few.
    """
    if spec.K is None:
        raise HomogeneousSpaceError("fatness needs an intermediate subalgebra K")
    p, m, G = spec.p, spec.m, spec.G
    if p.shape[1] == 0 or m.shape[1] == 0:
        return float("inf")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((budget, p.shape[1]))
    vals = _bracket_gram_min(G, p, m, A)
    best = float(np.min(vals))
    if p.shape[1] == 1:
        return best
    order = np.argsort(vals, kind="stable")[:restarts]
    for i in order:
        res = minimize(lambda a: float(_bracket_gram_min(G, p, m, a)[0]), A[i],
                       method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 4000})
        best = min(best, float(res.fun))
    return best


def fiber_curvature_fn(spec: HomogeneousSpec):
    """Normal homogeneous curvature of the fiber K/H on coordinates over p."""
    p, H, G = spec.p, spec.H, spec.G

    def fn(a, b):
        x, y = np.asarray(a) @ p.T, np.asarray(b) @ p.T
        Z = bracket(G, x, y)
        zh = Z @ H.span
        zp = Z - zh @ H.span.T
        num = 0.25 * np.sum(zp * zp, -1) + np.sum(zh * zh, -1)
        gram = np.sum(x * x, -1) * np.sum(y * y, -1) - np.sum(x * y, -1) ** 2
        return num / gram

    return fn


@dataclass
class WallachReport:
    space: str
    t: float
    symmetric_base: bool
    rank_one_base: str
    fiber_min_curvature: float
    fatness_margin: float
    sampled_min_curvature: float
    samples: int
    seed: int
    verdict: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def wallach_check(spec: HomogeneousSpec, t: float, samples: int = 20000, seed: int = 0,
                  tol: float = 1e-8) -> WallachReport:
    """Check the three hypotheses of Wallach's fibration criterion for g_t.

    Rank one of the base is not machine-checked and reported as "assumed".
    The verdict is cross-checked by sampling g_t curvature on random planes.
    """
    if spec.K is None:
        raise HomogeneousSpaceError("Wallach check needs an intermediate subalgebra K")
    rng = np.random.default_rng(seed)
    dp = spec.p.shape[1]
    if dp >= 2:
        fib = fiber_curvature_fn(spec)
        a, b = rng.standard_normal((2, samples, dp))
        fiber_min = float(np.min(fib(a, b)))
    else:
        fiber_min = float("inf")  # no 2-planes in the fiber
    margin = fatness_margin(spec, seed=seed)
    fn = tangent_curvature_fn(gt_metric(spec, t), spec)
    a, b = rng.standard_normal((2, samples, spec.tangent_dim))
    sampled = float(np.min(fn(a, b)))
    hyp = spec.symmetric_base and fiber_min > tol and margin > tol
    if hyp and 0 < t < 1:
        verdict = "positive" if sampled > 0 else "inconsistent"
    elif not hyp:
        verdict = "hypotheses-fail"
    else:
        verdict = "outside-range"
    return WallachReport(space=spec.name, t=t, symmetric_base=spec.symmetric_base, rank_one_base="assumed",
                         fiber_min_curvature=fiber_min, fatness_margin=margin,
                         sampled_min_curvature=sampled, samples=samples, seed=seed, verdict=verdict)


# ---------------------------------------------------------------- built-in spaces


def flag_w6() -> HomogeneousSpec:
    """W^6 = SU(3)/T^2 fibred over CP^2 through U(2) (upper block)."""
    from .liealg import build_algebra, named_subalgebra
    G = build_algebra("su", 3)
    return HomogeneousSpec(G, named_subalgebra(G, "torus"), named_subalgebra(G, "u2_block"), name="W6")


def aloff_wallach(p: int, q: int) -> HomogeneousSpec:
    """W_{p,q} = SU(3)/diag(z^p, z^q, z^-(p+q)) fibred through U(2)."""
    from .liealg import build_algebra, named_subalgebra
    G = build_algebra("su", 3)
    H = named_subalgebra(G, "diag_circle", vector=(p, q, -p - q))
    return HomogeneousSpec(G, H, named_subalgebra(G, "u2_block"), name=f"W({p},{q})")


def berger_b7() -> HomogeneousSpec:
    """B^7 = SO(5)/SO(3) with SO(3) acting irreducibly on R^5."""
    from .liealg import build_algebra, named_subalgebra
    G = build_algebra("so", 5)
    return HomogeneousSpec(G, named_subalgebra(G, "so3_irreducible"), name="B7")


def w6_root_frames(spec: HomogeneousSpec) -> list[np.ndarray]:
    """The three 2-dimensional root spaces of su(3) off the diagonal, (0,1), (0,2), (1,2)."""
    G = spec.G
    frames = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        E = np.zeros((3, 3), dtype=complex)
        E[a, b], E[b, a] = 1.0, -1.0
        F = np.zeros((3, 3), dtype=complex)
        F[a, b] = F[b, a] = 1j
        frames.append(np.stack([G.from_matrix(E), G.from_matrix(F)], axis=1))
    return frames


def w6_diagonal_metric(spec: HomogeneousSpec, scales) -> LeftInvariantMetric:
    """Left-invariant metric on SU(3): scale x_i on the i-th root space, Q on the torus."""
    P = spec.H.projector.copy()
    for x, Fr in zip(scales, w6_root_frames(spec)):
        if x <= 0:
            raise ValueError("diagonal scales must be positive")
        P += x * Fr @ Fr.T
    return LeftInvariantMetric(spec.G, P)
