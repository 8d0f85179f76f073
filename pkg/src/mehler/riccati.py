"""Coefficients of the Gaussian ansatz for the heat kernel of L.

The kernel is sought as
    W(t) exp(<alpha x, x> + <beta x, x0> + <gamma x0, x0> + <mu, x> + <nu, x0>)
and the coefficients obey a matrix Riccati system.  This module provides the
closed-form solution, finite-difference residuals of the system and an RK4
oracle for the alpha equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularTime, StepUnstable
from .kernels import _as_points, _squeeze, lower_order_parts, ls_parts
from .spectral import OperatorSpec, singular_times

BLOWUP = 1e12
EQUATIONS = ("alpha", "beta", "gamma", "mu", "nu", "W")


@dataclass(frozen=True)
class KernelCoefficients:
    t: float
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    W: complex
    log_W: complex = 0j

    def as_dict(self) -> dict:
        W = complex(self.W)
        return {
            "t": self.t,
            "alpha": self.alpha.ravel().tolist(),
            "beta": self.beta.ravel().tolist(),
            "gamma": self.gamma.ravel().tolist(),
            "mu": self.mu.tolist(),
            "nu": self.nu.tolist(),
            "W": W.real,
            "W_imag": W.imag,
        }


def coefficients(spec: OperatorSpec, t) -> KernelCoefficients:
    """Closed-form ansatz coefficients at time ``t``.

    Parameters
    ----------
    spec : OperatorSpec
        Operator coefficients; D must be invertible when f or g is nonzero.
    t : float
        Regular time.

    Returns
    -------
    KernelCoefficients
        alpha = gamma = -(1/4t) A^{-1} phi(t sqrt D), beta = (1/2t) A^{-1} psi(t sqrt D),
        mu = A^{-1} f / 2 - coth(t sqrt D)/sqrt D g, nu = (sqrt D sinh(t sqrt D))^{-1} g,
        and W the amplitude times the scalar lower-order exponent.

    Raises
    ------
    SingularTime, SingularD
    """
    t = float(t)
    amp, phi_m, psi_m = ls_parts(spec, t)
    C, N, scalar = lower_order_parts(spec, t)
    alpha = -phi_m / (4.0 * t)
    alpha = 0.5 * (alpha + alpha.T)
    beta = psi_m / (2.0 * t)
    beta = 0.5 * (beta + beta.T)
    mu = 0.5 * spec.A_inv @ spec.f - C @ spec.g
    nu = N @ spec.g
    # W itself can underflow when D has a small eigenvalue and g != 0
    log_W = np.log(complex(amp)) + scalar
    W = complex(amp * np.exp(scalar))
    return KernelCoefficients(t=t, alpha=alpha, beta=beta, gamma=alpha.copy(), mu=mu, nu=nu, W=W, log_W=log_W)


def riccati_rhs(spec: OperatorSpec, c: KernelCoefficients) -> dict:
    """Right-hand sides of the coefficient system evaluated at ``c``."""
    A, f = spec.A, spec.f
    a, b = c.alpha, c.beta
    return {
        "alpha": 4.0 * a @ A @ a - 0.5 * (spec.B + spec.B.T),
        "beta": 4.0 * b @ A @ a,
        "gamma": b @ A @ b,
        "mu": 4.0 * a @ A @ c.mu - 2.0 * a @ f - spec.g,
        "nu": 2.0 * b @ A @ c.mu - b @ f,
        "W": 2.0 * np.trace(A @ a) + c.mu @ A @ c.mu - f @ c.mu - spec.h,
    }


@dataclass
class OdeResidualReport:
    times: list
    residuals: dict = field(default_factory=dict)
    scales: dict = field(default_factory=dict)

    def relative(self, name) -> np.ndarray:
        return np.asarray(self.residuals[name]) / np.asarray(self.scales[name])

    def max_relative(self, names=EQUATIONS) -> float:
        return float(max(np.max(self.relative(k)) for k in names))


def ode_residuals(spec: OperatorSpec, times, step=None) -> OdeResidualReport:
    """Central-difference residuals of the coefficient system at each time.

    The time step defaults to 1e-5 * max(t, 0.1).  For every equation the
    report stores ||d/dt closed form - rhs|| and the scale 1 + ||rhs||
    (Frobenius / Euclidean norms; W uses the logarithmic derivative).
    """
    report = OdeResidualReport(times=[float(t) for t in times])
    for k in EQUATIONS:
        report.residuals[k] = []
        report.scales[k] = []
    for t in report.times:
        h = step if step is not None else 1e-5 * max(t, 0.1)
        c = coefficients(spec, t)
        cp = coefficients(spec, t + h)
        cm = coefficients(spec, t - h)
        rhs = riccati_rhs(spec, c)
        derivs = {
            "alpha": (cp.alpha - cm.alpha) / (2 * h),
            "beta": (cp.beta - cm.beta) / (2 * h),
            "gamma": (cp.gamma - cm.gamma) / (2 * h),
            "mu": (cp.mu - cm.mu) / (2 * h),
            "nu": (cp.nu - cm.nu) / (2 * h),
            "W": (cp.log_W - cm.log_W) / (2 * h),
        }
        for k in EQUATIONS:
            report.residuals[k].append(float(np.linalg.norm(np.atleast_1d(derivs[k] - rhs[k]))))
            report.scales[k].append(1.0 + float(np.linalg.norm(np.atleast_1d(rhs[k]))))
    return report


def rk4_propagate_alpha(spec: OperatorSpec, t0, t1, steps=4096) -> np.ndarray:
    """Integrate alpha' = 4 alpha A alpha - (B + B^t)/2 with classical RK4.

    Starts from the closed-form alpha(t0).  Raises SingularTime if a singular
    time lies in [t0, t1] and StepUnstable if an entry exceeds 1e12.
    """
    t0 = float(t0)
    t1 = float(t1)
    hits = singular_times(spec.spectral, t1)
    for e in hits:
        if e.t >= t0:
            raise SingularTime(e.t, index=e.index, k=e.k)
    A = spec.A
    Bs = 0.5 * (spec.B + spec.B.T)

    def rhs(a):
        return 4.0 * a @ A @ a - Bs

    a = coefficients(spec, t0).alpha
    h = (t1 - t0) / steps
    for _ in range(steps):
        k1 = rhs(a)
        k2 = rhs(a + 0.5 * h * k1)
        k3 = rhs(a + 0.5 * h * k2)
        k4 = rhs(a + h * k3)
        a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(a)) or np.max(np.abs(a)) > BLOWUP:
            raise StepUnstable("alpha left the stable range during RK4 propagation")
    return 0.5 * (a + a.T)


def assemble_ansatz(coef: KernelCoefficients, x, x0):
    """W exp(<alpha x, x> + <beta x, x0> + <gamma x0, x0> + <mu, x> + <nu, x0>)."""
    n = coef.alpha.shape[0]
    x = _as_points(x, n)
    x0 = _as_points(x0, n)
    ex = (
        np.einsum("...i,ij,...j->...", x, coef.alpha, x)
        + np.einsum("...i,ij,...j->...", x0, coef.beta, x)
        + np.einsum("...i,ij,...j->...", x0, coef.gamma, x0)
        + x @ coef.mu
        + x0 @ coef.nu
    )
    return _squeeze(coef.W * np.exp(ex))
