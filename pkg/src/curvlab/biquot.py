"""Eschenburg and Bazaikin biquotients: freeness, positivity, cohomology orders."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import liealg
from .liealg import GroupElement, build_algebra, named_subalgebra
from .metric import subalgebra_scaled


class BiquotientError(ValueError):
    pass


SCALAR_KERNEL_WARNING = "scalar-kernel exception candidate"


def sigma(values, k: int) -> int:
    """Elementary symmetric polynomial of degree k."""
    return sum(math.prod(c) for c in itertools.combinations(values, k))


@dataclass(frozen=True)
class EschenburgParams:
    k: tuple
    l: tuple

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        l = tuple(int(v) for v in self.l)
        if len(k) != 3 or len(l) != 3:
            raise BiquotientError("Eschenburg parameters are two integer triples")
        if sum(k) != sum(l):
            raise BiquotientError(f"sum(k) = {sum(k)} differs from sum(l) = {sum(l)}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)

    def swapped(self) -> "EschenburgParams":
        return EschenburgParams(self.l, self.k)


@dataclass(frozen=True)
class BazaikinParams:
    q: tuple

    def __post_init__(self):
        q = tuple(int(v) for v in self.q)
        if len(q) != 5:
            raise BiquotientError("Bazaikin parameters are five integers")
        object.__setattr__(self, "q", q)


# ---------------------------------------------------------------- Eschenburg


def esch_is_free(params: EschenburgParams) -> bool:
    """gcd(k_1 - l_i, k_2 - l_j) = 1 for all i != j; gcd(0, 0) = 0 fails."""
    k, l = params.k, params.l
    return all(math.gcd(k[0] - l[i], k[1] - l[j]) == 1
               for i in range(3) for j in range(3) if i != j)


def _interval(vals):
    return min(vals), max(vals)


def esch_block_conditions(params: EschenburgParams) -> dict:
    """Positivity condition for each choice of U(2) block.

    Key ``b`` is the diagonal index outside the block.  The block condition is
    k_b outside [min l, max l] and the interval spanned by the other two k's
    disjoint from it.
    """
    k, l = params.k, params.l
    lo, hi = _interval(l)
    out = {}
    for b in range(3):
        others = [k[i] for i in range(3) if i != b]
        olo, ohi = _interval(others)
        out[b] = (not lo <= k[b] <= hi) and (ohi < lo or olo > hi)
    return out


def esch_is_positive(params: EschenburgParams) -> bool:
    """Sufficient positivity criterion: every k_i lies outside [min l, max l].

    Computed as the disjunction of the block conditions, which is the same thing.
    """
    return any(esch_block_conditions(params).values())


def esch_order_h4(params: EschenburgParams) -> int:
    """Signed r = sigma_2(k) - sigma_2(l); H^4 is cyclic of order |r|."""
    return sigma(params.k, 2) - sigma(params.l, 2)


def scalar_kernel(params: EschenburgParams) -> int:
    """Order of the ineffective kernel: z with z^{k_i} = z^{l_j} all equal."""
    vals = params.k + params.l
    g = 0
    for v in vals:
        g = math.gcd(g, v - vals[0])
    return g


def esch_warnings(params: EschenburgParams) -> list[str]:
    """Flag tuples that fail the gcd test only through an ineffective scalar kernel."""
    n = scalar_kernel(params)
    if n > 1 and not esch_is_free(params):
        c = params.l[0]
        reduced = EschenburgParams(tuple((v - c) // n for v in params.k), tuple((v - c) // n for v in params.l))
        if esch_is_free(reduced):
            return [SCALAR_KERNEL_WARNING]
    return []


def aloff_wallach_positive(p: int, q: int) -> bool:
    if math.gcd(p, q) != 1:
        raise BiquotientError(f"({p}, {q}) are not coprime")
    return p * q * (p + q) != 0


def aloff_wallach_params(p: int, q: int) -> EschenburgParams:
    return EschenburgParams((p, q, -p - q), (0, 0, 0))


_SU3 = None


def traceless_diag(alg, exps) -> np.ndarray:
    """i diag(exps) with its central part removed; the centre cancels in Ad(g)X_1 - X_2."""
    v = np.asarray(exps, dtype=float)
    return alg.from_matrix(1j * np.diag(v - v.mean()))


def su3():
    global _SU3
    if _SU3 is None:
        _SU3 = build_algebra("su", 3)
    return _SU3


def esch_vertical_vector(params: EschenburgParams, g) -> np.ndarray:
    """Ad(g^-1) X_1 - X_2 with X_1 = i diag(k), X_2 = i diag(l), in su(3) coordinates."""
    alg = su3()
    g = liealg.check_group_element(alg, g)
    X1 = traceless_diag(alg, params.k)
    X2 = traceless_diag(alg, params.l)
    return liealg.adjoint(alg, g.inverse(), X1) - X2


# ---------------------------------------------------------------- flat-plane sampler


def _weyl_generators(alg) -> np.ndarray:
    """Generator triples whose exponential products are the six Weyl representatives."""
    tau = np.zeros((3, 3), dtype=complex)
    tau[0, 1] = tau[1, 0] = 1j * np.pi / 2  # exp gives [[0,i,0],[i,0,0],[0,0,1]]
    # 3-cycle: rotation by 2pi/3 about (1,1,1)
    axis = np.ones(3) / np.sqrt(3)
    Kx = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    cyc = (2 * np.pi / 3) * Kx
    Lt, Lc = alg.from_matrix(tau), alg.from_matrix(cyc.astype(complex))
    out = []
    for a in (0, 1):
        for b in (0, 1, 2):
            out.append(np.stack([a * Lt, b * Lc, np.zeros(alg.dim)]))
    return np.array(out)


def _sphere_grid(n: int) -> np.ndarray:
    """The two poles (diagonal conjugates) followed by Fibonacci points on S^2."""
    poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    n = max(n - 2, 1)
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    phi = np.pi * (1 + 5 ** 0.5) * i
    return np.vstack([poles, np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)])


_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


def _rotated_diag_elements(alg, block, u: np.ndarray) -> np.ndarray:
    """Ad(kappa) diag(-2i, i, i) for kappa in the U(2) block, parametrized by u in S^2."""
    a, b = block
    c = 3 - a - b
    M = np.zeros(u.shape[:-1] + (3, 3), dtype=complex)
    blk = -0.5j * np.eye(2) - 1.5j * np.einsum("...s,sij->...ij", u, _PAULI)
    M[..., a, a], M[..., a, b] = blk[..., 0, 0], blk[..., 0, 1]
    M[..., b, a], M[..., b, b] = blk[..., 1, 0], blk[..., 1, 1]
    M[..., c, c] = 1j
    return alg.from_matrix(M, check=False)


@dataclass
class BlockResult:
    block: tuple
    integer_ok: bool
    center_values: tuple
    center_target: int
    rotated_values: tuple
    rotated_targets: tuple
    margin_center: float
    margin_rotated: float

    @property
    def margin(self) -> float:
        return min(self.margin_center, self.margin_rotated)


@dataclass
class SamplerReport:
    k: tuple
    l: tuple
    t: float
    samples: int
    grid: int
    seed: int
    orientation: str
    margin: float
    best_block: tuple
    integer_positive: bool
    blocks: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["blocks"] = [dict(b.__dict__, margin=b.margin) for b in self.blocks]
        return d


def integer_bound_check(a, c, excluded: int) -> tuple:
    """Exact critical-value test for the block avoiding index ``excluded``.

    ``a`` are the exponents conjugated by g, ``c`` the fixed side.  The centre
    vector needs c_r + c_s - 2 c_b outside the hull of a_r + a_s - 2 a_t; the
    rotated vectors need the hulls of -2 a_r + a_s + a_t and of
    -2 c_r + c_s + c_t (r in the block) to be disjoint.
    """
    s_a, s_c = sum(a), sum(c)
    center_vals = tuple(sorted({s_a - 3 * a[t] for t in range(3)}))
    center_target = s_c - 3 * c[excluded]
    rot_vals = tuple(sorted({s_a - 3 * a[r] for r in range(3)}))
    rot_targets = tuple(sorted({s_c - 3 * c[r] for r in range(3) if r != excluded}))
    ok_center = not center_vals[0] <= center_target <= center_vals[-1]
    ok_rot = rot_targets[-1] < rot_vals[0] or rot_targets[0] > rot_vals[-1]
    return ok_center and ok_rot, center_vals, center_target, rot_vals, rot_targets


def _bisect_zero(f, s_lo: float, s_hi: float, f_lo: float, iters: int = 80) -> float:
    best = abs(f_lo)
    for _ in range(iters):
        mid = 0.5 * (s_lo + s_hi)
        fm = f(mid)
        best = min(best, abs(fm))
        if fm == 0:
            break
        if np.sign(fm) == np.sign(f_lo):
            s_lo, f_lo = mid, fm
        else:
            s_hi = mid
    return best


def esch_horizontal_flat_sampler(params: EschenburgParams, t: float = 0.7, samples: int = 10_000,
                                 seed: int = 0, grid: int = 192) -> SamplerReport:
    """Search for horizontal zero-curvature planes of the Eschenburg metric.

    The metric is the left-invariant Q_t scaled along a U(2) block, applied to
    the inverted presentation E_{l,k} (g -> g^-1 identifies it with E_{k,l}),
    which is the orientation in which the criterion on k is the natural one.
    Every flat plane of Q_t contains either the centre of u(2) or
    Ad(kappa) diag(-2i, i, i); the plane can only be horizontal if that vector
    is Q_t-orthogonal to the vertical vector.  Both inner products are sampled
    over random g (plus the Weyl group, where the extremes sit) and a grid of
    kappa; a sign change is refined to a zero by bisection.  The reported margin
    is the best block's smallest |inner product|.
    """
    if not 0 < t < 1:
        raise BiquotientError(f"t = {t} outside (0, 1)")
    alg = su3()
    inv = params.swapped()
    a, c = inv.k, inv.l  # conjugated side, fixed side
    rng = np.random.default_rng(seed)
    gens = np.concatenate([_weyl_generators(alg), liealg.random_generators(alg, rng, samples)])
    gs = liealg.group_from_generators(alg, gens)
    X1 = traceless_diag(alg, a)
    X2 = traceless_diag(alg, c)

    def vertical(g):
        return liealg.adjoint_batch(alg, np.conj(np.swapaxes(g, -1, -2)), X1) - X2

    V = vertical(gs)
    us = _sphere_grid(grid)
    blocks = []
    for excluded in range(3):
        block = tuple(i for i in range(3) if i != excluded)
        K = named_subalgebra(alg, "u2_block", block=block)
        P = subalgebra_scaled(K, t).P
        zvec = np.ones(3)
        zvec[excluded] = -2.0
        Z = alg.from_matrix(1j * np.diag(zvec))
        W = _rotated_diag_elements(alg, block, us)
        f1 = V @ P @ Z
        f2 = V @ P @ W.T  # (N, grid)
        m1 = float(np.min(np.abs(f1)))
        m2 = float(np.min(np.abs(f2)))
        # sign change => zero on a path between the two samples
        if f1.min() < 0 < f1.max():
            i, j = int(np.argmin(f1)), int(np.argmax(f1))

            def along(s, i=i, j=j):
                g = liealg.group_from_generators(alg, (1 - s) * gens[i] + s * gens[j])
                return float(vertical(g[None])[0] @ P @ Z)

            m1 = min(m1, _bisect_zero(along, 0.0, 1.0, float(f1[i])))
        if f2.min() < 0 < f2.max():
            (i, p), (j, q) = np.unravel_index(np.argmin(f2), f2.shape), np.unravel_index(np.argmax(f2), f2.shape)

            def along2(s, i=i, j=j, p=p, q=q):
                g = liealg.group_from_generators(alg, (1 - s) * gens[i] + s * gens[j])
                u = (1 - s) * us[p] + s * us[q]
                nu = np.linalg.norm(u)
                u = u / nu if nu > 1e-12 else us[p]
                w = _rotated_diag_elements(alg, block, u)
                return float(vertical(g[None])[0] @ P @ w)

            m2 = min(m2, _bisect_zero(along2, 0.0, 1.0, float(f2[i, p])))
        ok, cv, ct, rv, rt = integer_bound_check(a, c, excluded)
        blocks.append(BlockResult(block=block, integer_ok=ok, center_values=cv, center_target=ct,
                                  rotated_values=rv, rotated_targets=rt, margin_center=m1, margin_rotated=m2))
    best = max(blocks, key=lambda b: b.margin)
    return SamplerReport(k=params.k, l=params.l, t=t, samples=samples, grid=grid, seed=seed,
                         orientation="inverted", margin=best.margin, best_block=best.block,
                         integer_positive=any(b.integer_ok for b in blocks), blocks=blocks)


# ---------------------------------------------------------------- Bazaikin


def _disjoint_pairs():
    idx = range(5)
    for p1 in itertools.combinations(idx, 2):
        rest = [i for i in idx if i not in p1]
        for p2 in itertools.combinations(rest, 2):
            if p1 < p2:
                yield p1, p2


def baz_is_free(params: BazaikinParams) -> bool:
    """All q_i odd and gcd(q_a + q_b, q_c + q_d) = 2 for disjoint pairs."""
    q = params.q
    if any(v % 2 == 0 for v in q):
        return False
    return all(math.gcd(q[a] + q[b], q[c] + q[d]) == 2 for (a, b), (c, d) in _disjoint_pairs())


def baz_is_positive(params: BazaikinParams) -> bool:
    sums = [params.q[i] + params.q[j] for i, j in itertools.combinations(range(5), 2)]
    return all(s > 0 for s in sums) or all(s < 0 for s in sums)


def baz_order_h6(params: BazaikinParams) -> int:
    """Signed r with 8r = sigma_3(q) - sigma_1(q) sigma_2(q)."""
    q = params.q
    raw = sigma(q, 3) - sigma(q, 1) * sigma(q, 2)
    if raw % 8:
        raise BiquotientError(f"sigma_3 - sigma_1 sigma_2 = {raw} is not divisible by 8")
    return raw // 8


def ps_bundle_order(r: int, s: int) -> int:
    """|r^2 - s^2| / 8 for r = s = 1 mod 4."""
    if r % 4 != 1 or s % 4 != 1:
        raise BiquotientError(f"({r}, {s}) must both be 1 mod 4")
    return abs(r * r - s * s) // 8
