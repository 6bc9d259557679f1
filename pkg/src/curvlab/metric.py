"""Left-invariant metrics Q(P., .) and their sectional curvature."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import LieAlgebraBasis, Subalgebra, bracket

# single flatness epsilon: normalized curvature of unit-Gram planes
FLAT_TOL = 1e-9
GRAM_TOL = 1e-14
SYM_TOL = 1e-12


class DegeneratePlaneError(ValueError):
    pass


class SymmetricPairError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LeftInvariantMetric:
    alg: LieAlgebraBasis
    P: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.shape != (self.alg.dim, self.alg.dim):
            raise ValueError(f"P has shape {P.shape}, expected {(self.alg.dim,) * 2}")
        if np.max(np.abs(P - P.T)) > SYM_TOL * max(1.0, np.max(np.abs(P))):
            raise ValueError("P is not symmetric")
        P = 0.5 * (P + P.T)
        w = np.linalg.eigvalsh(P)
        if w[0] <= 0:
            raise ValueError(f"P is not positive definite (smallest eigenvalue {w[0]:.3e})")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)
        Pinv = np.linalg.inv(P)
        Pinv = 0.5 * (Pinv + Pinv.T)
        Pinv.setflags(write=False)
        object.__setattr__(self, "Pinv", Pinv)

    @classmethod
    def biinvariant(cls, alg: LieAlgebraBasis) -> "LeftInvariantMetric":
        return cls(alg, np.eye(alg.dim))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.P)

    def inner(self, X, Y) -> np.ndarray:
        return np.sum((np.asarray(X) @ self.P) * np.asarray(Y), axis=-1)


def cheeger_deform(metric: LeftInvariantMetric, t: float) -> LeftInvariantMetric:
    """P_t = (P^-1 + t Id)^-1; eigenvalues move from lam to lam / (1 + t lam)."""
    if t < 0:
        raise ValueError("Cheeger parameter must be non-negative")
    Pt = np.linalg.inv(metric.Pinv + t * np.eye(metric.alg.dim))
    return LeftInvariantMetric(metric.alg, 0.5 * (Pt + Pt.T))


def subalgebra_scaled(sub: Subalgebra, t: float) -> LeftInvariantMetric:
    """Q_t = t Q|k + Q|k-perp."""
    if t <= 0:
        raise ValueError("scale must be positive")
    Pk = sub.projector
    return LeftInvariantMetric(sub.parent, t * Pk + (np.eye(sub.parent.dim) - Pk))


def unnormalized_curvature(metric: LeftInvariantMetric, X, Y) -> np.ndarray:
    """<R(X,Y)Y, X> for the left-invariant metric Q(P., .).

    Evaluated with the closed formula

        1/2 Q([PX,Y] + [X,PY], [X,Y]) - 3/4 Q(P[X,Y], [X,Y])
          + Q(B(X,Y), P^-1 B(X,Y)) - Q(B(X,X), P^-1 B(Y,Y)),

    B(X,Y) = 1/2 ([X,PY] - [PX,Y]).  Batched over leading axes.
    """
    alg, P, Pinv = metric.alg, metric.P, metric.Pinv
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    PX, PY = X @ P, Y @ P
    XY = bracket(alg, X, Y)
    PXY = bracket(alg, PX, Y)
    XPY = bracket(alg, X, PY)
    Bxy = 0.5 * (XPY - PXY)
    Bxx = bracket(alg, X, PX)
    Byy = bracket(alg, Y, PY)
    dot = lambda a, b: np.sum(a * b, axis=-1)  # noqa: E731
    return (0.5 * dot(PXY + XPY, XY)
            - 0.75 * dot(XY @ P, XY)
            + dot(Bxy @ Pinv, Bxy)
            - dot(Bxx @ Pinv, Byy))


def gram_determinant(metric: LeftInvariantMetric, X, Y) -> np.ndarray:
    xx = metric.inner(X, X)
    yy = metric.inner(Y, Y)
    xy = metric.inner(X, Y)
    return xx * yy - xy * xy


def sectional_curvature(metric: LeftInvariantMetric, X, Y):
    gram = gram_determinant(metric, X, Y)
    if np.any(gram < GRAM_TOL):
        raise DegeneratePlaneError(f"Gram determinant {np.min(gram):.3e} below {GRAM_TOL}")
    k = unnormalized_curvature(metric, X, Y) / gram
    return float(k) if np.ndim(k) == 0 else k


def symmetric_pair_defect(sub: Subalgebra) -> tuple[float, np.ndarray]:
    """Largest k-perp component of [m, m]; returns (defect, offending bracket)."""
    alg = sub.parent
    m = sub.complement().T
    if len(m) == 0:
        return 0.0, np.zeros(alg.dim)
    br = bracket(alg, m[:, None, :], m[None, :, :])
    esc = br - (br @ sub.span) @ sub.span.T
    norms = np.linalg.norm(esc, axis=-1)
    i, j = np.unravel_index(np.argmax(norms), norms.shape)
    return float(norms[i, j]), esc[i, j]


def flat_plane_conditions(sub: Subalgebra, X, Y, tol: float = FLAT_TOL) -> bool:
    """Zero-curvature test for Q_t (0 < t < 1) on a symmetric pair (g, k).

    The plane is flat iff [X,Y], [X_k,Y_k] and [X_m,Y_m] all vanish; this does
    not depend on t.
    """
    defect, esc = symmetric_pair_defect(sub)
    if defect > 1e-10:
        raise SymmetricPairError(
            f"[m,m] is not contained in {sub.name or 'k'}: escaping component of norm {defect:.3e}"
            f" (coefficients {np.round(esc, 6).tolist()})")
    alg = sub.parent
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Pk = sub.projector
    Xk, Yk = X @ Pk, Y @ Pk
    brackets = (bracket(alg, X, Y), bracket(alg, Xk, Yk), bracket(alg, X - Xk, Y - Yk))
    return all(np.linalg.norm(b) < tol for b in brackets)
