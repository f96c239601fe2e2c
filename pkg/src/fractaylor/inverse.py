"""Recovery of the unknown spatial coefficient from initial and boundary data.

Two routes are provided:

* `recover_separable` - when the x = 1 trace sequence is geometric,
  mu2_i = lam**i * mu2_0, the solution ansatz u = (time factor with
  normalized coefficients lam**i) * phi turns the marching recurrence into
  one triangular linear system for the coefficients of p:

      p_m = (lam*phi_m - phi_{m+2} - sum_{k<m} p_k B_beta(k, m-k) phi_{m-k}) / phi_0

  This reproduces the closed-form coefficients of both built-in example
  problems in the classical limit.

* `recover_newton` - general data.  Minimizes the stacked trace mismatches
  over p by damped Gauss-Newton (forward-difference Jacobian, step halving)
  starting from the zero vector.  Each mismatch row is normalized by
  max(1, |data entry|), matching `residual_check`, so the convergence test
  ||r||_inf <= tol is a relative criterion; without the normalization the
  rows span tens of orders of magnitude and no float tolerance is
  meaningful.  A single Gauss-Newton sweep from zero stalls in local
  minima on roughly a tenth of random self-coupled instances, so the solve
  warms up through increasing trace depths (depth d uses only the first d
  time levels of data) before the full-depth iteration; the reported
  iteration count is that of the full-depth loop.

Jacobian columns are independent forward marches and could be evaluated in
parallel; the iteration itself is sequential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .forward import forward_march, residual_check
from .gammafn import frac_binom
from .problem import ProblemSpec
from .series import WidthError, XSeries

__all__ = ["NotSeparable", "DegenerateData", "RecoveryReport", "recover_separable", "recover_newton"]


class NotSeparable(ValueError):
    """The boundary data fails the geometric-ratio test; use recover_newton."""


class DegenerateData(ValueError):
    """The data carries no boundary signal (phi_0 = 0 or mu2 identically zero)."""


@dataclass(frozen=True)
class RecoveryReport:
    """Recovered coefficient plus diagnostics.

    ``forward_residual`` is `residual_check` after re-marching with the
    recovered p; ``converged`` asserts it (or, for the Newton route, the
    final residual) met the configured tolerance.  ``iterations`` counts
    full-depth Gauss-Newton steps and is 0 for the separable route.
    ``rank_deficient`` flags a Jacobian with numerical rank below the
    number of unknowns at the solution; it marks an ill-posed instance,
    not a failure.
    """

    p: XSeries
    mode: str
    lam: float | None
    forward_residual: float
    iterations: int
    converged: bool
    rank_deficient: bool = False


def recover_separable(
    spec: ProblemSpec, *, tol_sep: float = 1e-9, residual_tol: float = 1e-9
) -> RecoveryReport:
    """Triangular solve for p on separable data.

    The time eigenvalue lam is estimated from mu2 alone (mu1 vanishes
    identically in the separable problems of interest) at the first
    nonzero entry, then every consecutive pair must satisfy
    |mu2_{i+1} - lam*mu2_i| <= tol_sep * max(1, |mu2_i|).

    Raises:
        NotSeparable: data fails the ratio test or the source is a known
            series rather than self-coupled.
        DegenerateData: phi_0 = 0 or mu2 carries no signal.
    """
    if not spec.self_coupled:
        raise NotSeparable("separable recovery applies to the self-coupled source form only")
    phi = spec.phi.coeffs
    if phi[0] == 0.0:
        raise DegenerateData("phi_0 = 0: the triangular solve cannot be anchored")
    mu2 = spec.mu2.coeffs
    lam = _estimate_eigenvalue(mu2, tol_sep)

    kmax = spec.kmax
    if kmax + 2 > len(phi) - 1:
        raise WidthError(
            f"phi width {len(phi) - 1} too small for the triangular solve up to kmax={kmax}"
        )
    beta = spec.orders.beta
    p = []
    for m in range(kmax + 1):
        acc = lam * phi[m] - phi[m + 2]
        for k in range(m):
            if p[k] != 0.0:
                acc -= p[k] * frac_binom(k, m - k, beta) * phi[m - k]
        p.append(acc / phi[0])
    p_series = XSeries(beta, tuple(p))

    residual = residual_check(forward_march(spec, p_series), spec)
    return RecoveryReport(
        p=p_series,
        mode="separable",
        lam=lam,
        forward_residual=residual,
        iterations=0,
        converged=residual <= residual_tol,
    )


def _estimate_eigenvalue(mu2: tuple[float, ...], tol_sep: float) -> float:
    nonzero = [i for i, v in enumerate(mu2) if v != 0.0]
    if not nonzero:
        raise DegenerateData("mu2 is identically zero: no boundary signal")
    i0 = nonzero[0]
    if i0 + 1 >= len(mu2):
        raise NotSeparable("mu2 has no usable consecutive pair to estimate the eigenvalue")
    lam = mu2[i0 + 1] / mu2[i0]
    for i in range(len(mu2) - 1):
        if abs(mu2[i + 1] - lam * mu2[i]) > tol_sep * max(1.0, abs(mu2[i])):
            raise NotSeparable(
                f"mu2 is not geometric: ratio test fails at entry {i + 1} (lam={lam:.6g})"
            )
    return lam


def recover_newton(
    spec: ProblemSpec,
    *,
    max_iter: int = 100,
    tol: float = 1e-10,
    fd_step: float = 1e-6,
) -> RecoveryReport:
    """Damped Gauss-Newton recovery of p from general trace data.

    Never raises on non-convergence: the report carries the best iterate
    with ``converged = False``.
    """
    depth = min(spec.nt, len(spec.mu1) - 1, len(spec.mu2) - 1)
    n = spec.kmax + 1
    if 2 * depth < n:
        raise ValueError(
            f"underdetermined: {2 * depth} usable trace equations for {n} unknowns"
        )

    p = np.zeros(n)
    # warm-up: track the solution through shallower trace depths
    for d in range(1, depth):
        p, _, _, _ = _gauss_newton(spec, p, d, tol=1e-6, fd_step=fd_step, max_iter=20)
    p, iterations, converged, jac = _gauss_newton(
        spec, p, depth, tol=tol, fd_step=fd_step, max_iter=max_iter
    )

    rank_deficient = False
    if jac is not None and np.all(np.isfinite(jac)):
        rank_deficient = np.linalg.matrix_rank(jac) < n

    p_series = XSeries(spec.orders.beta, tuple(float(v) for v in p))
    residual = residual_check(forward_march(spec, p_series), spec)
    return RecoveryReport(
        p=p_series,
        mode="newton",
        lam=None,
        forward_residual=residual,
        iterations=iterations,
        converged=converged,
        rank_deficient=rank_deficient,
    )


def _trace_mismatch(spec: ProblemSpec, p: np.ndarray, depth: int, weights: np.ndarray) -> np.ndarray:
    """Stacked normalized trace mismatches at levels 1..depth (inf if the march blows up)."""
    try:
        result = forward_march(spec, XSeries(spec.orders.beta, tuple(float(v) for v in p)))
    except ValueError:
        return np.full(2 * depth, np.inf)
    m1, m2 = result.bc_trace_x0.coeffs, result.bc_trace_x1.coeffs
    r = np.array(
        [m1[i] - spec.mu1.coeffs[i] for i in range(1, depth + 1)]
        + [m2[i] - spec.mu2.coeffs[i] for i in range(1, depth + 1)]
    )
    return r * weights


def _gauss_newton(
    spec: ProblemSpec,
    p0: np.ndarray,
    depth: int,
    *,
    tol: float,
    fd_step: float,
    max_iter: int,
) -> tuple[np.ndarray, int, bool, np.ndarray | None]:
    weights = np.array(
        [1.0 / max(1.0, abs(spec.mu1.coeffs[i])) for i in range(1, depth + 1)]
        + [1.0 / max(1.0, abs(spec.mu2.coeffs[i])) for i in range(1, depth + 1)]
    )
    n = len(p0)
    p = p0.copy()
    r = _trace_mismatch(spec, p, depth, weights)
    jac = None
    it = 0
    while it < max_iter:
        if np.max(np.abs(r)) <= tol:
            break
        jac = np.empty((len(r), n))
        for c in range(n):
            h = fd_step * max(1.0, abs(p[c]))
            dp = np.zeros(n)
            dp[c] = h
            jac[:, c] = (_trace_mismatch(spec, p + dp, depth, weights) - r) / h
        if not np.all(np.isfinite(jac)):
            break
        col_scale = np.linalg.norm(jac, axis=0)
        col_scale[col_scale == 0.0] = 1.0
        y, *_ = np.linalg.lstsq(jac / col_scale, -r, rcond=None)
        step = y / col_scale
        best = np.linalg.norm(r)
        s = 1.0
        accepted = False
        for _ in range(31):
            candidate = p + s * step
            r_new = _trace_mismatch(spec, candidate, depth, weights)
            if np.linalg.norm(r_new) < best:
                accepted = True
                break
            s *= 0.5
        if not accepted:
            break
        p, r = candidate, r_new
        it += 1
    if jac is None:
        # converged (or stalled) without forming a Jacobian; build one for diagnostics
        jac = np.empty((len(r), n))
        for c in range(n):
            h = fd_step * max(1.0, abs(p[c]))
            dp = np.zeros(n)
            dp[c] = h
            jac[:, c] = (_trace_mismatch(spec, p + dp, depth, weights) - r) / h
    converged = bool(np.max(np.abs(r)) <= tol) if np.all(np.isfinite(r)) else False
    return p, it, converged, jac
