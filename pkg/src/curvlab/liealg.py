"""Matrix realizations of compact Lie algebras su(n), so(n), sp(n).

Every algebra carries a basis that is orthonormal for the biinvariant form

    Q(X, Y) = -1/2 Re tr(XY)

taken in the defining representation. With this normalization SU(2) has
constant sectional curvature 1.  Algebra elements are passed around as real
coefficient vectors over that basis; matrices only appear when building the
basis, conjugating by group elements and exponentiating.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

ORTHO_TOL = 1e-12
CLOSURE_TOL = 1e-10
GROUP_TOL = 1e-10


class LieAlgebraError(ValueError):
    pass


def q_form(X: np.ndarray, Y: np.ndarray) -> float:
    return -0.5 * float(np.real(np.trace(X @ Y)))


def _gram_schmidt(mats: Sequence[np.ndarray], tol: float = ORTHO_TOL) -> list[np.ndarray]:
    """Modified Gram-Schmidt for Q with a second re-orthogonalization pass.

    Linearly dependent inputs are dropped.
    """
    out: list[np.ndarray] = []
    for M in mats:
        v = np.array(M, dtype=complex)
        for _ in range(2):
            for e in out:
                v = v - q_form(v, e) * e
        nrm2 = q_form(v, v)
        if nrm2 > tol:
            out.append(v / np.sqrt(nrm2))
    return out


def _symplectic_form(n: int) -> np.ndarray:
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def _su_spanning(n: int) -> list[np.ndarray]:
    mats = []
    # diagonal first: i*diag(1,..,1,-j,0,..)
    for j in range(1, n):
        d = np.zeros(n)
        d[:j] = 1.0
        d[j] = -j
        mats.append(1j * np.diag(d))
    for a in range(n):
        for b in range(a + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[a, b], E[b, a] = 1.0, -1.0
            mats.append(E)
            F = np.zeros((n, n), dtype=complex)
            F[a, b] = F[b, a] = 1j
            mats.append(F)
    return mats


def _so_spanning(n: int) -> list[np.ndarray]:
    mats = []
    for a in range(n):
        for b in range(a + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[a, b], E[b, a] = 1.0, -1.0
            mats.append(E)
    return mats


def _sp_spanning(n: int) -> list[np.ndarray]:
    # quaternionic matrices [[A, B], [-conj(B), conj(A)]], A in u(n), B complex symmetric
    mats = []
    blocks_a = []
    for a in range(n):
        D = np.zeros((n, n), dtype=complex)
        D[a, a] = 1j
        blocks_a.append(D)
        for b in range(a + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[a, b], E[b, a] = 1.0, -1.0
            blocks_a.append(E)
            F = np.zeros((n, n), dtype=complex)
            F[a, b] = F[b, a] = 1j
            blocks_a.append(F)
    for A in blocks_a:
        M = np.zeros((2 * n, 2 * n), dtype=complex)
        M[:n, :n] = A
        M[n:, n:] = A.conj()
        mats.append(M)
    for a in range(n):
        for b in range(a, n):
            for c in (1.0, 1j):
                B = np.zeros((n, n), dtype=complex)
                B[a, b] = B[b, a] = c
                M = np.zeros((2 * n, 2 * n), dtype=complex)
                M[:n, n:] = B
                M[n:, :n] = -B.conj()
                mats.append(M)
    return mats


@dataclass(frozen=True, eq=False)
class LieAlgebraBasis:
    """A matrix Lie algebra with a Q-orthonormal basis and structure constants.

    ``structure[i, j, k]`` is the k-th coefficient of ``[e_i, e_j]``.
    """

    family: str
    n: int
    basis: tuple
    structure: np.ndarray = field(repr=False)
    # block sizes for direct sums; () for simple families
    blocks: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix_size(self) -> int:
        return self.basis[0].shape[0]

    def to_matrix(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs, dtype=float)
        return np.tensordot(c, self._stack, axes=([-1], [0]))

    def from_matrix(self, M, check: bool = True) -> np.ndarray:
        M = np.asarray(M, dtype=complex)
        # Q(M, e_k) for every k, batched over leading axes of M
        coeffs = -0.5 * np.real(np.einsum("...ab,kba->...k", M, self._stack))
        if check:
            resid = np.max(np.abs(self.to_matrix(coeffs) - M)) if M.size else 0.0
            if resid > CLOSURE_TOL * max(1.0, float(np.max(np.abs(M)))):
                raise LieAlgebraError(f"matrix is not in {self.name} (expansion residual {resid:.2e})")
        return coeffs

    @property
    def name(self) -> str:
        if self.blocks:
            return "+".join(f"{self.family}({b})" for b in self.blocks)
        return f"{self.family}({self.n})"

    @property
    def _stack(self) -> np.ndarray:
        return np.stack(self.basis)

    def _check(self, v, label="X") -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise LieAlgebraError(f"{label} has length {v.shape[-1]}, expected {self.dim}")
        return v

    def ad(self, Z) -> np.ndarray:
        """Matrix of ad_Z acting on coefficient vectors (column convention)."""
        Z = self._check(Z, "Z")
        return np.einsum("i,ijk->kj", Z, self.structure)


def _structure_constants(basis: list[np.ndarray]) -> np.ndarray:
    stack = np.stack(basis)
    d = len(basis)
    comm = np.einsum("iab,jbc->ijac", stack, stack)
    comm = comm - comm.transpose(1, 0, 2, 3)
    c = -0.5 * np.real(np.einsum("ijab,kba->ijk", comm, stack))
    recon = np.einsum("ijk,kab->ijab", c, stack)
    resid = np.max(np.abs(recon - comm)) if d else 0.0
    if resid > CLOSURE_TOL:
        raise LieAlgebraError(f"basis not closed under bracket (residual {resid:.2e})")
    return c


def _from_matrices(family: str, n: int, mats: list[np.ndarray], blocks: tuple = ()) -> LieAlgebraBasis:
    basis = _gram_schmidt(mats)
    for e in basis:
        e.setflags(write=False)
    c = _structure_constants(basis)
    c.setflags(write=False)
    return LieAlgebraBasis(family=family, n=n, basis=tuple(basis), structure=c, blocks=blocks)


def build_algebra(family: str, n: int) -> LieAlgebraBasis:
    """Build su(n), so(n) or sp(n) with a Q-orthonormal basis.

    For su(n) the diagonal (torus) elements come first, followed by the pairs
    E_ab - E_ba, i(E_ab + E_ba) for a < b.  In particular su(2) gets
    E1 = diag(i, -i), E2 = [[0, 1], [-1, 0]], E3 = [[0, i], [i, 0]].
    sp(n) lives inside su(2n) as quaternionic 2x2 block matrices.
    """
    if family == "su" and n >= 2:
        return _from_matrices("su", n, _su_spanning(n))
    if family == "so" and n >= 2:
        return _from_matrices("so", n, _so_spanning(n))
    if family == "sp" and n >= 1:
        return _from_matrices("sp", n, _sp_spanning(n))
    raise LieAlgebraError(f"unsupported algebra {family}({n})")


def direct_sum(a: LieAlgebraBasis, b: LieAlgebraBasis) -> LieAlgebraBasis:
    """Block-diagonal realization of a + b (used for su(2)+su(2))."""
    na, nb = a.matrix_size, b.matrix_size
    mats = []
    for e in a.basis:
        M = np.zeros((na + nb, na + nb), dtype=complex)
        M[:na, :na] = e
        mats.append(M)
    for e in b.basis:
        M = np.zeros((na + nb, na + nb), dtype=complex)
        M[na:, na:] = e
        mats.append(M)
    fam = a.family if a.family == b.family else f"{a.family}+{b.family}"
    return _from_matrices(fam, na + nb, mats, blocks=(a.n, b.n))


def bracket(alg: LieAlgebraBasis, X, Y) -> np.ndarray:
    """Coefficients of [X, Y]; accepts batches along leading axes."""
    X = alg._check(X, "X")
    Y = alg._check(Y, "Y")
    return np.einsum("...i,...j,ijk->...k", X, Y, alg.structure)


def inner(X, Y) -> np.ndarray:
    return np.sum(np.asarray(X) * np.asarray(Y), axis=-1)


# ---------------------------------------------------------------- group side


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray

    def inverse(self) -> "GroupElement":
        return GroupElement(self.matrix.conj().T)


def group_defect(alg: LieAlgebraBasis, g: np.ndarray) -> float:
    """Largest violation of the group conditions for g (batched over leading axes)."""
    g = np.asarray(g, dtype=complex)
    eye = np.eye(g.shape[-1])
    gh = np.conj(np.swapaxes(g, -1, -2))
    defect = np.max(np.abs(g @ gh - eye), axis=(-2, -1))
    if alg.family == "so":
        defect = np.maximum(defect, np.max(np.abs(g.imag), axis=(-2, -1)))
    if alg.family == "sp":
        J = _symplectic_form(alg.n)
        defect = np.maximum(defect, np.max(np.abs(np.swapaxes(g, -1, -2) @ J @ g - J), axis=(-2, -1)))
    if alg.blocks:
        i = 0
        for b in alg.blocks:
            blk = g[..., i:i + b, i:i + b]
            defect = np.maximum(defect, np.abs(np.linalg.det(blk) - 1.0))
            off = np.concatenate([g[..., i:i + b, :i], g[..., i:i + b, i + b:]], axis=-1)
            if off.size:
                defect = np.maximum(defect, np.max(np.abs(off), axis=(-2, -1)))
            i += b
    else:
        defect = np.maximum(defect, np.abs(np.linalg.det(g) - 1.0))
    return defect


def check_group_element(alg: LieAlgebraBasis, g) -> GroupElement:
    M = g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=complex)
    if M.shape != (alg.matrix_size, alg.matrix_size):
        raise LieAlgebraError(f"group element has shape {M.shape}")
    d = float(group_defect(alg, M))
    if d > GROUP_TOL:
        raise LieAlgebraError(f"matrix is not in the group of {alg.name} (defect {d:.2e})")
    return GroupElement(M)


def expm_skew(A: np.ndarray) -> np.ndarray:
    """exp of skew-Hermitian matrices, batched, via the Hermitian eigendecomposition."""
    H = -1j * np.asarray(A, dtype=complex)
    H = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w)[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def exp(alg: LieAlgebraBasis, X) -> GroupElement:
    return GroupElement(expm_skew(alg.to_matrix(X)))


def adjoint(alg: LieAlgebraBasis, g, X) -> np.ndarray:
    """Coefficients of g X g^-1."""
    g = check_group_element(alg, g)
    X = alg._check(X)
    M = g.matrix @ alg.to_matrix(X) @ g.matrix.conj().T
    return alg.from_matrix(M)


def adjoint_batch(alg: LieAlgebraBasis, gs: np.ndarray, X) -> np.ndarray:
    """Ad(g)X for a stack of group matrices gs of shape (N, n, n); no group checks."""
    M = alg.to_matrix(X)
    conj = gs @ M @ np.conj(np.swapaxes(gs, -1, -2))
    return alg.from_matrix(conj, check=False)


RANDOM_FACTORS = 3
RANDOM_SCALE = np.pi


def random_generators(alg: LieAlgebraBasis, rng: np.random.Generator, count: int,
                      factors: int = RANDOM_FACTORS) -> np.ndarray:
    """Algebra vectors of shape (count, factors, dim) feeding ``group_from_generators``."""
    return RANDOM_SCALE * rng.standard_normal((count, factors, alg.dim))


def group_from_generators(alg: LieAlgebraBasis, gens: np.ndarray) -> np.ndarray:
    """Product exp(A_1) exp(A_2) ... exp(A_f) for gens of shape (..., f, dim)."""
    mats = expm_skew(alg.to_matrix(gens))
    g = mats[..., 0, :, :]
    for j in range(1, mats.shape[-3]):
        g = g @ mats[..., j, :, :]
    if alg.family == "so":
        g = g.real.astype(complex)
    return g


def random_group_elements(alg: LieAlgebraBasis, seed: int, count: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return group_from_generators(alg, random_generators(alg, rng, count))


def random_group_element(alg: LieAlgebraBasis, seed: int) -> GroupElement:
    """Deterministic pseudo-random element: product of three exponentials."""
    return check_group_element(alg, random_group_elements(alg, seed, 1)[0])


# ---------------------------------------------------------------- subalgebras


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """Subspace of ``parent`` with a Q-orthonormal frame stored column-wise."""

    parent: LieAlgebraBasis
    span: np.ndarray
    name: Optional[str] = None

    @property
    def dim(self) -> int:
        return self.span.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.span @ self.span.T

    def complement(self) -> np.ndarray:
        """Q-orthonormal frame of the orthogonal complement (columns)."""
        return orthogonal_complement(self.span, self.parent.dim)

    def frame(self) -> list[np.ndarray]:
        return [self.span[:, i] for i in range(self.dim)]


def orthonormal_frame(vectors, tol: float = 1e-10) -> np.ndarray:
    """Columns forming an orthonormal basis of span(vectors)."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.size == 0:
        return np.zeros((V.shape[-1] if V.ndim else 0, 0))
    U, s, _ = np.linalg.svd(V.T, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return U[:, :rank]


def orthogonal_complement(frame: np.ndarray, dim: int) -> np.ndarray:
    if frame.shape[1] == 0:
        return np.eye(dim)
    U, _, _ = np.linalg.svd(frame, full_matrices=True)
    return U[:, frame.shape[1]:]


def closure_defect(alg: LieAlgebraBasis, span: np.ndarray) -> float:
    if span.shape[1] == 0:
        return 0.0
    vecs = span.T
    br = bracket(alg, vecs[:, None, :], vecs[None, :, :])
    resid = br - br @ span @ span.T
    return float(np.max(np.abs(resid)))


def make_subalgebra(alg: LieAlgebraBasis, vectors, name: Optional[str] = None) -> Subalgebra:
    span = orthonormal_frame(vectors)
    d = closure_defect(alg, span)
    if d > CLOSURE_TOL:
        raise LieAlgebraError(f"subspace {name or ''} not closed under bracket (defect {d:.2e})")
    span.setflags(write=False)
    return Subalgebra(parent=alg, span=span, name=name)


def project(sub: Subalgebra, X) -> tuple[np.ndarray, np.ndarray]:
    """Q-orthogonal splitting X = tangential + normal relative to ``sub``."""
    X = np.asarray(X, dtype=float)
    tang = (X @ sub.span) @ sub.span.T
    return tang, X - tang


# canonical orthonormal basis of symmetric traceless 3x3 matrices, <S,T> = tr(ST):
# two diagonal, then (12), (13), (23) off-diagonal
def sym_traceless_basis() -> list[np.ndarray]:
    S = [np.diag([1.0, -1.0, 0.0]) / np.sqrt(2), np.diag([1.0, 1.0, -2.0]) / np.sqrt(6)]
    for a, b in ((0, 1), (0, 2), (1, 2)):
        M = np.zeros((3, 3))
        M[a, b] = M[b, a] = 1 / np.sqrt(2)
        S.append(M)
    return S


def so3_irreducible_matrices() -> list[np.ndarray]:
    """Images in so(5) of the so(3) generators acting on Sym_0(R^3) by S -> AS - SA."""
    S = sym_traceless_basis()
    out = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        A = np.zeros((3, 3))
        A[a, b], A[b, a] = 1.0, -1.0
        M = np.array([[np.trace(S[i] @ (A @ S[j] - S[j] @ A)) for j in range(5)] for i in range(5)])
        out.append(M.astype(complex))
    return out


def _diag_element(alg: LieAlgebraBasis, vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    return alg.from_matrix(1j * np.diag(vec))


def named_subalgebra(alg: LieAlgebraBasis, name: str, *, block=(0, 1), vector=None) -> Subalgebra:
    """Subalgebras used throughout: tori, U(2) blocks, the irreducible SO(3) in SO(5), ...

    ``block`` selects the 2x2 diagonal block for ``u2_block`` / ``su2_block`` in su(3);
    ``vector`` is the integer direction for ``diag_circle``.
    """
    n = alg.matrix_size
    if name == "torus" and alg.family == "su" and not alg.blocks:
        vecs = [alg.from_matrix(1j * np.diag(np.eye(n)[j] - np.eye(n)[j + 1])) for j in range(n - 1)]
        return make_subalgebra(alg, vecs, "torus")
    if name in ("u2_block", "su2_block") and alg.family == "su" and alg.n == 3 and not alg.blocks:
        a, b = sorted(block)
        if a == b or not (0 <= a < 3 and 0 <= b < 3):
            raise LieAlgebraError(f"bad block {block}")
        E = np.zeros((3, 3), dtype=complex)
        E[a, b], E[b, a] = 1.0, -1.0
        F = np.zeros((3, 3), dtype=complex)
        F[a, b] = F[b, a] = 1j
        d = np.zeros(3)
        d[a], d[b] = 1.0, -1.0
        vecs = [alg.from_matrix(E), alg.from_matrix(F), _diag_element(alg, d)]
        if name == "u2_block":
            c = 3 - a - b
            z = np.ones(3)
            z[c] = -2.0
            vecs.append(_diag_element(alg, z))
        return make_subalgebra(alg, vecs, f"{name}{(a, b)}")
    if name == "so3_irreducible" and alg.family == "so" and alg.n == 5:
        vecs = [alg.from_matrix(M) for M in so3_irreducible_matrices()]
        return make_subalgebra(alg, vecs, "so3_irreducible")
    if name == "diag_circle" and alg.family == "su" and not alg.blocks:
        if vector is None or len(vector) != n:
            raise LieAlgebraError("diag_circle needs an integer vector of length n")
        v = np.asarray(vector, dtype=float)
        if abs(v.sum()) > 0 or not np.any(v):
            raise LieAlgebraError(f"diag_circle vector {tuple(vector)} must be non-zero with zero sum")
        return make_subalgebra(alg, [_diag_element(alg, v)], f"diag_circle{tuple(int(x) for x in vector)}")
    if name == "diagonal_su2" and alg.blocks == (2, 2) and alg.family == "su":
        half = alg.dim // 2
        vecs = [alg.from_matrix(np.kron(np.eye(2), alg.basis[i][:2, :2])) for i in range(half)]
        return make_subalgebra(alg, vecs, "diagonal_su2")
    raise LieAlgebraError(f"unknown subalgebra {name!r} for {alg.name}")
