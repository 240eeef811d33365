"""Exponential decay model for unicity as a function of dataset size.

The model is ``f(x) = a * exp(-b * sqrt(x)) + c`` on normalized sizes
``x in (0, 1]``: unicity falls off as users are added but levels out at
a floor ``c`` because new users both create and duplicate item
combinations. Fitting is plain Levenberg-Marquardt on the three
parameters with the analytic Jacobian.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .errors import FitError, InsufficientDataError, InvalidSpecError
from .validation import as_float_array

_LAMBDA_INIT = 1e-3
_LAMBDA_MAX = 1e12


def normalize_curve(points, x_max) -> list[tuple[float, float]]:
    """Scale curve sizes into (0, 1] by the target population size.

    ``points`` are ``(size, unicity)`` pairs; ``x_max`` must be at least
    the largest size present.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if x_max <= 0:
        raise InvalidSpecError(f"x_max must be positive, got {x_max}")
    if any(x <= 0 for x, _ in pts):
        raise InvalidSpecError("sizes must be positive")
    if any(x > x_max for x, _ in pts):
        raise InvalidSpecError(f"x_max={x_max} is smaller than a curve size")
    return [(x / x_max, y) for x, y in pts]


def split_train_test(points, train_fraction: float = 0.7):
    """Split a size-sorted curve into a leading train part and the tail.

    The test part holds the largest sizes, which is what makes the
    error measure an extrapolation error.
    """
    pts = list(points)
    if len(pts) < 4:
        raise InsufficientDataError(f"need at least 4 points, got {len(pts)}")
    if not 0.0 < train_fraction < 1.0:
        raise InvalidSpecError("train_fraction must be in (0, 1)")
    xs = [p[0] for p in pts]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise InvalidSpecError("points must be sorted by ascending x")
    n_train = math.ceil(train_fraction * len(pts))
    if n_train >= len(pts):
        n_train = len(pts) - 1
    return pts[:n_train], pts[n_train:]


def mean_abs_error(model, points) -> float:
    """Average absolute prediction error over ``(x, y)`` points."""
    pts = list(points)
    if not pts:
        raise InsufficientDataError("cannot score an empty point set")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    return float(np.mean(np.abs(y - model.predict(x))))


def _lm_fit(x, y, p0, exponent, max_iter, tol):
    """Levenberg-Marquardt with multiplicative damping.

    Damping starts at 1e-3, divides by 10 on an accepted step and
    multiplies by 10 on a rejected one. Stops when an accepted step is
    shorter than ``tol`` or the iteration budget runs out. Raises
    :class:`FitError` when the damped normal equations stay unsolvable
    all the way up the damping ladder.
    """
    xe = x**exponent
    p = np.asarray(p0, dtype=float).copy()

    def residuals(params):
        a, b, c = params
        return y - (a * np.exp(-b * xe) + c)

    r = residuals(p)
    sse = float(r @ r)
    lam = _LAMBDA_INIT
    converged = False
    iterations = 0
    eye = np.eye(3)
    for iterations in range(1, max_iter + 1):
        a, b, _ = p
        decay = np.exp(-b * xe)
        jac = np.column_stack((decay, -a * xe * decay, np.ones_like(xe)))
        jtj = jac.T @ jac
        jtr = jac.T @ r
        accepted = False
        solved_any = False
        while lam <= _LAMBDA_MAX:
            try:
                step = np.linalg.solve(jtj + lam * eye, jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            if not np.all(np.isfinite(step)):
                lam *= 10.0
                continue
            solved_any = True
            trial = p + step
            r_trial = residuals(trial)
            sse_trial = float(r_trial @ r_trial)
            if np.isfinite(sse_trial) and sse_trial <= sse:
                p, r, sse = trial, r_trial, sse_trial
                lam = max(lam / 10.0, 1e-15)
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            if not solved_any:
                raise FitError("normal equations singular at every damping level")
            # no downhill step exists within the damping ladder
            break
        if float(np.linalg.norm(step)) < tol:
            converged = True
            break
    return p, iterations, math.sqrt(sse), converged


class ExponentialDecayModel(BaseEstimator, RegressorMixin):
    """Nonlinear regressor ``y = a * exp(-b * x**exponent) + c``.

    Parameters
    ----------
    init : tuple of (a, b, c), optional
        Starting point. By default ``a = y[0] - y[-1]``, ``b = 1``,
        ``c = y[-1]``, which assumes points ordered by ascending x.
    max_iter : int
        Outer iteration budget for the optimizer.
    tol : float
        Accepted-step-norm threshold declaring convergence.
    exponent : float
        Power of x inside the exponential; 0.5 gives the default
        square-root decay, other values are exposed for exploration.

    Attributes
    ----------
    a_, b_, c_ : float
        Fitted parameters. ``c_`` is the predicted unicity floor for
        arbitrarily large datasets.
    iterations_ : int
        Optimizer iterations used.
    residual_norm_ : float
        Euclidean norm of the training residuals at the solution.
    converged_ : bool
        Whether the step-norm criterion was met within ``max_iter``.
    """

    def __init__(self, init=None, max_iter=200, tol=1e-10, exponent=0.5):
        self.init = init
        self.max_iter = max_iter
        self.tol = tol
        self.exponent = exponent

    def fit(self, X, y):
        x = as_float_array(X, "X")
        y = as_float_array(y, "y")
        if x.size != y.size:
            raise InvalidSpecError("X and y must have the same length")
        if x.size < 3:
            raise InsufficientDataError("need at least 3 points for 3 parameters")
        if np.any(x <= 0):
            raise InvalidSpecError("x values must be positive")
        if self.init is not None:
            p0 = tuple(float(v) for v in self.init)
            if len(p0) != 3:
                raise InvalidSpecError("init must be a 3-tuple (a, b, c)")
        else:
            p0 = (float(y[0] - y[-1]), 1.0, float(y[-1]))
        params, iterations, residual_norm, converged = _lm_fit(
            x, y, p0, self.exponent, self.max_iter, self.tol
        )
        self.a_, self.b_, self.c_ = (float(v) for v in params)
        self.iterations_ = iterations
        self.residual_norm_ = residual_norm
        self.converged_ = converged
        if self.c_ < 0:
            warnings.warn(
                f"fitted floor c = {self.c_:.4g} is negative", stacklevel=2
            )
        return self

    def predict(self, X):
        if not hasattr(self, "a_"):
            raise NotFittedError("call fit before predict")
        x = as_float_array(X, "X")
        if np.any(x <= 0):
            raise InvalidSpecError("x values must be positive")
        return self.a_ * np.exp(-self.b_ * x**self.exponent) + self.c_

    def fit_points(self, points):
        """Fit from ``(x, y)`` pairs (the curve format used elsewhere)."""
        pts = list(points)
        return self.fit([p[0] for p in pts], [p[1] for p in pts])
