"""Spectral calculus for the symmetric matrix D = 2A(B + B^t).

Every closed form in the package is a scalar function of t*sqrt(lambda)
applied to the eigenvalues of D.  Positive eigenvalues take the hyperbolic
branch, negative ones the trigonometric continuation (u = i*v), and a zero
eigenvalue takes the limit value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import (
    DomainError,
    MehlerError,
    NonCommuting,
    NotPositiveDefinite,
    SingularD,
    SingularTime,
)

SERIES_CUTOFF = 1e-4
SINGULAR_GUARD = 1e-8
TRIG_THRESHOLD = 1e-12
COMMUTATOR_RTOL = 1e-10
SYMMETRY_RTOL = 1e-12


def _off_norm(a):
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(S, tol=1e-13, max_sweeps=64):
    """Eigendecomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    S : array_like, shape (n, n)
        Symmetric matrix.  Only its symmetric part is used.
    tol : float
        Stop once the off-diagonal Frobenius mass is at most ``tol * ||S||_F``.
    max_sweeps : int
        Upper bound on full sweeps over all (p, q) pairs.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in descending order.
    Q : ndarray, shape (n, n)
        Orthogonal matrix whose columns are the matching eigenvectors.
    """
    a = np.array(S, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), V

    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) > 1e100 * abs(apq):
                    tn = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    sgn = 1.0 if theta >= 0.0 else -1.0
                    tn = sgn / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(tn * tn + 1.0)
                s = tn * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        off = _off_norm(a)
        if off > tol * scale:
            raise MehlerError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def check_spd(A):
    """Validate that ``A`` is symmetric positive definite and return it as floats."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"A must be square, got shape {A.shape}")
    norm = np.linalg.norm(A)
    if np.linalg.norm(A - A.T) > SYMMETRY_RTOL * norm:
        raise NotPositiveDefinite("A is not symmetric")
    w, _ = jacobi_eigh(A)
    if w[-1] <= 1e-12 * w[0] or w[0] <= 0.0:
        raise NotPositiveDefinite(f"A is not positive definite (eigenvalues {w})")
    return A


def commutator_norm(A, B):
    return float(np.linalg.norm(A @ B - B @ A))


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition D = Q diag(eigenvalues) Q^t, eigenvalues descending.

    ``commutator`` records ||AB - BA||_F for the pair that produced D (zero
    when D was supplied directly).
    """

    D: np.ndarray
    eigenvalues: np.ndarray
    Q: np.ndarray
    commutator: float = 0.0

    @property
    def n(self) -> int:
        return self.D.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.D))

    def reconstruction_error(self) -> float:
        return float(np.linalg.norm(self.Q @ np.diag(self.eigenvalues) @ self.Q.T - self.D))

    def orthogonality_error(self) -> float:
        return float(np.linalg.norm(self.Q.T @ self.Q - np.eye(self.n)))


def spectral_from_symmetric(D, commutator=0.0) -> SpectralData:
    D = np.atleast_2d(np.asarray(D, dtype=float))
    w, Q = jacobi_eigh(D)
    return SpectralData(D=D, eigenvalues=w, Q=Q, commutator=commutator)


def build_spectral(A, B) -> SpectralData:
    """Form D = 2A(B + B^t) for a commuting pair and diagonalize it.

    Raises
    ------
    NotPositiveDefinite
        ``A`` fails the symmetric positive definite check.
    NonCommuting
        ``||AB - BA||_F > 1e-10 ||A||_F ||B||_F``.
    """
    A = check_spd(A)
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape != A.shape:
        raise DomainError(f"B has shape {B.shape}, expected {A.shape}")
    comm = commutator_norm(A, B)
    if comm > COMMUTATOR_RTOL * np.linalg.norm(A) * np.linalg.norm(B):
        raise NonCommuting(f"||AB - BA||_F = {comm:.3e} exceeds tolerance")
    D = 2.0 * A @ (B + B.T)
    return spectral_from_symmetric(D, commutator=comm)


class BranchFunction(str, enum.Enum):
    """Scalar functions of (t, lambda) evaluated through u = t*sqrt(lambda).

    PHI                u coth u
    PSI                u / sinh u
    PHI_W              t^3 (u - coth u) / u^3 = (u - coth u) / lambda^(3/2)
    COTH_OVER_ROOT     coth(u) / sqrt(lambda)
    INV_ROOT_SINH      1 / (sqrt(lambda) sinh u)
    COSH_OVER_SINH_SQ  cosh(u) / sinh(u)^2
    """

    PHI = "PHI"
    PSI = "PSI"
    PHI_W = "PHI_W"
    COTH_OVER_ROOT = "COTH_OVER_ROOT"
    INV_ROOT_SINH = "INV_ROOT_SINH"
    COSH_OVER_SINH_SQ = "COSH_OVER_SINH_SQ"


def _hyperbolic(fn, u, root):
    small = u < SERIES_CUTOFF
    u2 = u * u
    if fn is BranchFunction.PHI:
        return 1.0 + u2 / 3.0 - u2 * u2 / 45.0 if small else u / math.tanh(u)
    if fn is BranchFunction.PSI:
        return 1.0 - u2 / 6.0 + 7.0 * u2 * u2 / 360.0 if small else u / math.sinh(u)
    if fn is BranchFunction.PHI_W:
        if small:
            return (-1.0 / u + 2.0 * u / 3.0 + u2 * u / 45.0) / root**3
        return (u - 1.0 / math.tanh(u)) / root**3
    if fn is BranchFunction.COTH_OVER_ROOT:
        return 1.0 / (math.tanh(u) * root)
    if fn is BranchFunction.INV_ROOT_SINH:
        return 1.0 / (root * math.sinh(u))
    if fn is BranchFunction.COSH_OVER_SINH_SQ:
        return 1.0 / (math.sinh(u) * math.tanh(u))
    raise DomainError(f"unknown branch function {fn!r}")


def _trigonometric(fn, v, kappa):
    # analytic continuation u = i v of the hyperbolic branch
    small = v < SERIES_CUTOFF
    v2 = v * v
    if fn is BranchFunction.PHI:
        return 1.0 - v2 / 3.0 - v2 * v2 / 45.0 if small else v / math.tan(v)
    if fn is BranchFunction.PSI:
        return 1.0 + v2 / 6.0 + 7.0 * v2 * v2 / 360.0 if small else v / math.sin(v)
    if fn is BranchFunction.PHI_W:
        if small:
            return -(1.0 / v + 2.0 * v / 3.0 - v2 * v / 45.0) / kappa**3
        return -(v + 1.0 / math.tan(v)) / kappa**3
    if fn is BranchFunction.COTH_OVER_ROOT:
        return -1.0 / (math.tan(v) * kappa)
    if fn is BranchFunction.INV_ROOT_SINH:
        return -1.0 / (kappa * math.sin(v))
    if fn is BranchFunction.COSH_OVER_SINH_SQ:
        return -math.cos(v) / math.sin(v) ** 2
    raise DomainError(f"unknown branch function {fn!r}")


def guard_time(t, lam, index=None):
    """Raise SingularTime if ``t`` is within the guard of k*pi/sqrt(-lam), k >= 1."""
    if lam >= 0.0:
        return
    kappa = math.sqrt(-lam)
    k = round(t * kappa / math.pi)
    if k >= 1 and abs(t - k * math.pi / kappa) < SINGULAR_GUARD:
        raise SingularTime(t, index=index, k=k)


def scalar_branch(fn, t, lam):
    """Evaluate a branch function at time ``t`` for eigenvalue ``lam``.

    ``lam > 0`` uses u = t*sqrt(lam), ``lam < 0`` the trigonometric
    continuation with v = t*sqrt(-lam), and ``lam == 0`` the limit value
    (1 for PHI and PSI; the remaining functions diverge there and raise
    SingularD).  Arguments below 1e-4 use truncated series.
    """
    fn = BranchFunction(fn)
    t = float(t)
    lam = float(lam)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t}")
    if lam > 0.0:
        root = math.sqrt(lam)
        return _hyperbolic(fn, t * root, root)
    if lam < 0.0:
        guard_time(t, lam)
        kappa = math.sqrt(-lam)
        return _trigonometric(fn, t * kappa, kappa)
    if fn in (BranchFunction.PHI, BranchFunction.PSI):
        return 1.0
    raise SingularD(f"{fn.value} has no finite value at lambda = 0")


def branch_values(S: SpectralData, fn, t) -> np.ndarray:
    """scalar_branch over every eigenvalue; SingularTime carries the eigenvalue index."""
    out = np.empty(S.n)
    for i, lam in enumerate(S.eigenvalues):
        try:
            out[i] = scalar_branch(fn, t, lam)
        except SingularTime as exc:
            raise SingularTime(exc.t, index=i, k=exc.k) from None
    return out


def matrix_function(S: SpectralData, fn, t) -> np.ndarray:
    """Q diag(scalar_branch(fn, t, lambda_i)) Q^t."""
    vals = branch_values(S, fn, t)
    return (S.Q * vals) @ S.Q.T


class SingularEntry(NamedTuple):
    t: float
    index: int
    k: int


def singular_times(S: SpectralData, t_max) -> list[SingularEntry]:
    """All k*pi/sqrt(-lambda_i) in (0, t_max] for lambda_i < -1e-12, ascending."""
    if not t_max > 0.0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    out = []
    for i, lam in enumerate(S.eigenvalues):
        if lam >= -TRIG_THRESHOLD:
            continue
        step = math.pi / math.sqrt(-lam)
        k = 1
        while k * step <= t_max:
            out.append(SingularEntry(k * step, i, k))
            k += 1
    out.sort(key=lambda e: (e.t, e.index))
    return out


def check_regular(S: SpectralData, t):
    """Raise DomainError for t <= 0 and SingularTime inside the singular guard."""
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t}")
    for i, lam in enumerate(S.eigenvalues):
        guard_time(float(t), float(lam), index=i)


@dataclass(frozen=True)
class OperatorSpec:
    """Coefficients of L = -div(A grad) + <Bx, x> + <f, grad> + <g, x> + h.

    ``A`` must be symmetric positive definite and commute with ``B``.
    """

    A: np.ndarray
    B: np.ndarray
    f: np.ndarray | None = None
    g: np.ndarray | None = None
    h: float = 0.0

    def __post_init__(self):
        A = check_spd(self.A)
        n = A.shape[0]
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        if B.shape != (n, n):
            raise DomainError(f"B has shape {B.shape}, expected {(n, n)}")
        f = np.zeros(n) if self.f is None else np.asarray(self.f, dtype=float).reshape(-1)
        g = np.zeros(n) if self.g is None else np.asarray(self.g, dtype=float).reshape(-1)
        if f.shape != (n,) or g.shape != (n,):
            raise DomainError("f and g must be vectors of length n")
        comm = commutator_norm(A, B)
        if comm > COMMUTATOR_RTOL * np.linalg.norm(A) * np.linalg.norm(B):
            raise NonCommuting(f"||AB - BA||_F = {comm:.3e} exceeds tolerance")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", float(self.h))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @cached_property
    def spectral(self) -> SpectralData:
        return build_spectral(self.A, self.B)

    @cached_property
    def A_inv(self) -> np.ndarray:
        Ainv = np.linalg.inv(self.A)
        return 0.5 * (Ainv + Ainv.T)

    @cached_property
    def det_A(self) -> float:
        return float(np.linalg.det(self.A))

    @property
    def has_lower_order(self) -> bool:
        return bool(np.any(self.f) or np.any(self.g) or self.h != 0.0)

    def with_terms(self, f=None, g=None, h=0.0) -> "OperatorSpec":
        return OperatorSpec(self.A, self.B, f, g, h)
