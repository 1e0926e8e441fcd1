"""Objective functions (quadratic, logistic) and line-search routines."""

import numpy as np

from .errors import NonFiniteInputError


def _require_finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{name} contains NaN or Inf entries")


class Objective:
    """Minimal evaluator interface: ``value(x)`` and ``gradient(x)``.

    Subclasses may additionally provide ``curvature_along(x, d)`` returning
    the second directional derivative <d, H(x) d>.  Algorithms that need a
    line search fall back to the secant search when it is absent.
    """

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError


class ScaledIdentity:
    """Symmetric operator alpha * I, usable wherever a dense matrix is."""

    def __init__(self, alpha, dim):
        self.alpha = float(alpha)
        self.dim = int(dim)

    def matvec(self, x):
        return self.alpha * x


class QuadraticObjective(Objective):
    """f(x) = 0.5 <x, A x> + <b, x> + c with A symmetric PSD.

    ``quad_matrix`` may be a dense ndarray or any object exposing
    ``matvec(x)`` (e.g. :class:`ScaledIdentity`), so very high-dimensional
    diagonal forms avoid materializing A.
    """

    def __init__(self, quad_matrix, linear, constant=0.0):
        self.linear = np.asarray(linear, dtype=float)
        self.constant = float(constant)
        if hasattr(quad_matrix, "matvec"):
            self.quad_matrix = quad_matrix
            self._matvec = quad_matrix.matvec
        else:
            self.quad_matrix = np.asarray(quad_matrix, dtype=float)
            self._matvec = self.quad_matrix.__matmul__
        _require_finite("linear", self.linear)

    @property
    def dim(self):
        return self.linear.shape[0]

    def apply_quad(self, x):
        """Matrix-vector product A @ x."""
        return self._matvec(x)

    def value(self, x):
        return 0.5 * float(x @ self._matvec(x)) + float(self.linear @ x) + self.constant

    def gradient(self, x):
        return self._matvec(x) + self.linear

    def curvature_along(self, x, d):
        return float(d @ self._matvec(d))


class LogisticObjective(Objective):
    """Regularized logistic loss over rows z_i with labels y_i in {-1, +1}.

    f(x) = (1/m) sum_i ln(1 + exp(-y_i <x, z_i>)) + (1/(2m)) ||x||^2

    The ridge term makes the Hessian positive definite with eigenvalues
    bounded below by 1/m.
    """

    def __init__(self, features, labels):
        self.features = np.asarray(features, dtype=float)
        self.labels = np.asarray(labels, dtype=float).ravel()
        _require_finite("features", self.features)
        _require_finite("labels", self.labels)
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features must be (m, n) with one label per row")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        self.n_samples, self.dim = self.features.shape

    def _margins(self, x):
        return self.labels * (self.features @ x)

    def value(self, x):
        u = self._margins(x)
        m = self.n_samples
        return float(np.logaddexp(0.0, -u).sum()) / m + 0.5 * float(x @ x) / m

    def gradient(self, x):
        u = self._margins(x)
        m = self.n_samples
        # sigma(-u) = 1 / (1 + e^u), computed stably
        w = 0.5 * (1.0 - np.tanh(0.5 * u))
        return -(self.features.T @ (self.labels * w)) / m + x / m

    def _hessian_weights(self, x):
        u = self._margins(x)
        s = 0.5 * (1.0 - np.tanh(0.5 * u))
        return s * (1.0 - s)

    def hessian(self, x):
        w = self._hessian_weights(x)
        m = self.n_samples
        h = (self.features.T * w) @ self.features / m
        h += np.eye(self.dim) / m
        return h

    def hessian_vec(self, x, d):
        w = self._hessian_weights(x)
        m = self.n_samples
        return (self.features.T @ (w * (self.features @ d))) / m + d / m

    def curvature_along(self, x, d):
        return float(d @ self.hessian_vec(x, d))


def logistic_eval(obj, x, want_hessian=False):
    """Evaluate value, gradient and (optionally) the exact dense Hessian."""
    x = np.asarray(x, dtype=float)
    _require_finite("x", x)
    hess = obj.hessian(x) if want_hessian else None
    return obj.value(x), obj.gradient(x), hess


def exact_quadratic_line_search(obj, x, d, gamma_max):
    """argmin over [0, gamma_max] of f(x - gamma d) for quadratic f.

    The closed form is clamp(<grad f(x), d> / <d, A d>, 0, gamma_max).  For
    vanishing curvature (<d, A d> <= 1e-14 ||d||^2) the objective is linear
    along d, so the result is 0 or gamma_max depending on the slope sign.

    A return value exactly equal to ``gamma_max`` signals to callers that the
    step hit its cap (a potential drop step); the comparison is by equality
    after clamping, with no epsilon.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    _require_finite("x", x)
    _require_finite("d", d)
    if gamma_max <= 0.0:
        raise ValueError("gamma_max must be positive")
    slope = float(obj.gradient(x) @ d)
    curvature = obj.curvature_along(x, d)
    if curvature <= 1e-14 * float(d @ d):
        return 0.0 if slope <= 0.0 else float(gamma_max)
    return float(min(max(slope / curvature, 0.0), gamma_max))


def secant_line_search(obj, x, d, gamma_max, tol=1e-10, max_iterations=40):
    """argmin over [0, gamma_max] of phi(gamma) = f(x - gamma d), generic f.

    Root-finds phi'(gamma) = 0 by secant iteration with a bisection
    safeguard.  Stops when |phi'| <= tol * (1 + |phi'(0)|) or at a boundary
    whose derivative sign rules out an interior minimizer; on hitting the
    iteration cap the best bracketed point is returned.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    _require_finite("x", x)
    _require_finite("d", d)
    if gamma_max <= 0.0:
        raise ValueError("gamma_max must be positive")

    def dphi(gamma):
        return -float(obj.gradient(x - gamma * d) @ d)

    g0 = dphi(0.0)
    if g0 >= 0.0:
        return 0.0
    g1 = dphi(gamma_max)
    if g1 <= 0.0:
        return float(gamma_max)

    threshold = tol * (1.0 + abs(g0))
    lo, glo = 0.0, g0
    hi, ghi = float(gamma_max), g1
    gamma, g = hi, ghi
    prev_gamma, prev_g = lo, glo
    for _ in range(max_iterations):
        if abs(g) <= threshold:
            return gamma
        denom = g - prev_g
        if denom != 0.0:
            candidate = gamma - g * (gamma - prev_gamma) / denom
        else:
            candidate = 0.5 * (lo + hi)
        if not (lo < candidate < hi) or not np.isfinite(candidate):
            candidate = 0.5 * (lo + hi)
        prev_gamma, prev_g = gamma, g
        gamma = candidate
        g = dphi(gamma)
        if g < 0.0:
            lo, glo = gamma, g
        else:
            hi, ghi = gamma, g
    return 0.5 * (lo + hi)


def line_search(obj, x, d, gamma_max):
    """Dispatch: closed form for quadratics, secant search otherwise."""
    if isinstance(obj, QuadraticObjective):
        return exact_quadratic_line_search(obj, x, d, gamma_max)
    return secant_line_search(obj, x, d, gamma_max)
