"""Least-squares recovery of heat coefficients from heat-trace samples.

The model is ``theta(t) ~ sum_{n < N} t^{(n-m)/2} a_n``. Multiplying a row by
``t^{m/2}`` turns it into an ordinary polynomial in ``sqrt(t)``, which keeps
the scale of the right-hand side flat across the grid. The solve goes
through numpy's SVD-based ``lstsq``; the normal equations are never formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .coefficients import HeatCoefficientSet
from .spectra import EigenvalueList, HeatTraceSample, heat_trace_samples

__all__ = [
    "DEFAULT_TOLERANCES",
    "CoefficientCheck",
    "CompareReport",
    "FitPreconditionError",
    "FitResult",
    "HeatTraceExpansion",
    "IllConditionedFitError",
    "compare",
    "default_t_grid",
    "fit",
    "fit_spectrum",
]

DEFAULT_N_TERMS = 12
DEFAULT_MAX_CONDITION = 1e12
DEFAULT_TOLERANCES = (1e-4, 1e-4, 1e-3, 1e-2)


class FitPreconditionError(ValueError):
    """The samples cannot support a fit with the requested number of terms."""


class IllConditionedFitError(FitPreconditionError):
    pass


def default_t_grid(lambda_max: float, n_points: int = 60, lower: float = 60.0, decades: float = 2.0) -> np.ndarray:
    """Geometric grid from ``lower/lambda_max`` over ``decades`` decades.

    The lower end keeps ``lambda_max * t >= lower`` so the truncated spectrum
    certifies every sample; two decades is the narrowest span the fitter
    accepts.
    """
    t0 = lower / float(lambda_max)
    return np.geomspace(t0, t0 * 10.0**decades, int(n_points))


def _design(t: np.ndarray, n_terms: int, t_ref: float = 1.0) -> np.ndarray:
    # rows already multiplied by t^{m/2}: column n is (t/t_ref)^{n/2}
    s = np.sqrt(t / t_ref)
    return np.vander(s, n_terms, increasing=True)


def _solve(t: np.ndarray, theta: np.ndarray, m: int, n_terms: int) -> Tuple[np.ndarray, float, float]:
    # columns are scaled by t_max^{n/2} so the condition number does not
    # depend on where the grid sits, only on its shape
    t_ref = float(t.max())
    A = _design(t, n_terms, t_ref)
    y = theta * t ** (m / 2)
    scaled, _, _, sv = np.linalg.lstsq(A, y, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    residual = float(np.linalg.norm(A @ scaled - y))
    coef = scaled * t_ref ** (-np.arange(n_terms) / 2)
    return coef, residual, cond


class HeatTraceExpansion(RegressorMixin, BaseEstimator):
    """Estimator form of the fit: ``X`` is a single column of t values, ``y`` is theta.

    Parameters
    ----------
    m : int
        Manifold dimension.
    n_terms : int
        Number of coefficients ``a_0 .. a_{n_terms-1}``.
    max_condition : float
        Fits whose weighted design is worse conditioned raise
        :class:`IllConditionedFitError`.
    """

    def __init__(self, m: int = 2, n_terms: int = DEFAULT_N_TERMS, max_condition: float = DEFAULT_MAX_CONDITION):
        self.m = m
        self.n_terms = n_terms
        self.max_condition = max_condition

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=2, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError("X must hold exactly one column of t values")
        t = X[:, 0]
        if np.any(t <= 0):
            raise FitPreconditionError("t values must be positive")
        if self.n_terms < 4:
            raise FitPreconditionError("n_terms must be at least 4 to isolate a_3")
        coef, residual, cond = _solve(t, y, self.m, self.n_terms)
        if not math.isfinite(cond) or cond > self.max_condition:
            raise IllConditionedFitError(f"design condition {cond:.3g} exceeds {self.max_condition:.3g}")
        self.coef_ = coef
        self.condition_ = cond
        self.residual_norm_ = residual
        self.t_grid_ = t.copy()
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        t = X[:, 0]
        return (_design(t, self.n_terms) @ self.coef_) * t ** (-self.m / 2)


@dataclass(frozen=True)
class FitResult:
    a_hat: Tuple[float, ...]
    a_err: Tuple[float, ...]
    residual_norm: float
    condition_estimate: float
    t_grid: Tuple[float, ...]
    m: int
    max_tail_bound: float
    p: Optional[int] = None
    bc: Optional[str] = None
    model: Optional[str] = None

    @property
    def n_terms(self) -> int:
        return len(self.a_hat)

    def to_json(self) -> dict:
        g = lambda x: float(f"{x:.15g}")
        return {
            "model": self.model,
            "m": self.m,
            "p": self.p,
            "bc": self.bc,
            "n_terms": self.n_terms,
            "a_hat": [g(a) for a in self.a_hat],
            "a_err": [g(a) for a in self.a_err],
            "residual_norm": g(self.residual_norm),
            "condition_estimate": g(self.condition_estimate),
            "max_tail_bound": g(self.max_tail_bound),
            "t_grid": [g(t) for t in self.t_grid],
        }


def _check_samples(samples: Sequence[HeatTraceSample], n_terms: int, max_relative_tail: float) -> None:
    if n_terms < 4:
        raise FitPreconditionError("n_terms must be at least 4 to isolate a_3")
    if len(samples) < 2 * n_terms:
        raise FitPreconditionError(f"need at least {2 * n_terms} samples, got {len(samples)}")
    t = np.array([s.t for s in samples])
    if len(np.unique(t)) != t.size:
        raise FitPreconditionError("t values must be distinct")
    if t.min() <= 0:
        raise FitPreconditionError("t values must be positive")
    if t.max() / t.min() < 100.0 * (1 - 1e-9):
        raise FitPreconditionError("t grid must span at least two decades")
    for s in samples:
        if not s.tail_bound < max_relative_tail * s.theta:
            raise FitPreconditionError(f"tail bound {s.tail_bound:.3g} too large at t={s.t:g}")


def fit(
    samples: Sequence[HeatTraceSample],
    m: int,
    n_terms: int = DEFAULT_N_TERMS,
    max_condition: float = DEFAULT_MAX_CONDITION,
    max_relative_tail: float = 1e-3,
    p: Optional[int] = None,
    bc: Optional[str] = None,
    model: Optional[str] = None,
) -> FitResult:
    """Fit ``n_terms`` coefficients; ``a_err`` is the change when one more term is added."""
    _check_samples(samples, n_terms, max_relative_tail)
    t = np.array([s.t for s in samples], dtype=float)
    theta = np.array([s.theta for s in samples], dtype=float)
    X = t[:, None]
    est = HeatTraceExpansion(m, n_terms, max_condition).fit(X, theta)
    coef = est.coef_
    if len(samples) > n_terms + 1:
        try:
            guard = HeatTraceExpansion(m, n_terms + 1, math.inf).fit(X, theta).coef_[:n_terms]
            err = np.abs(guard - coef)
        except FitPreconditionError:
            err = np.full(n_terms, math.inf)
    else:
        err = np.full(n_terms, math.inf)
    return FitResult(
        tuple(coef.tolist()),
        tuple(err.tolist()),
        est.residual_norm_,
        est.condition_,
        tuple(t.tolist()),
        int(m),
        max(s.tail_bound for s in samples),
        p,
        bc,
        model,
    )


def fit_spectrum(
    spec: EigenvalueList,
    t_grid: Optional[Sequence[float]] = None,
    n_terms: int = DEFAULT_N_TERMS,
    max_condition: float = DEFAULT_MAX_CONDITION,
) -> FitResult:
    """Sample the heat trace of ``spec`` on ``t_grid`` (default grid if omitted) and fit."""
    grid = default_t_grid(spec.lambda_max) if t_grid is None else np.asarray(t_grid, dtype=float)
    samples = heat_trace_samples(spec, grid)
    return fit(samples, spec.m, n_terms, max_condition, p=spec.p, bc=spec.bc, model=spec.model)


@dataclass(frozen=True)
class CoefficientCheck:
    n: int
    fitted: float
    exact: float
    error: float
    relative: bool
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class CompareReport:
    checks: Tuple[CoefficientCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        g = lambda x: float(f"{x:.15g}")
        return {
            "passed": self.passed,
            "checks": [
                {
                    "n": c.n,
                    "fitted": g(c.fitted),
                    "exact": g(c.exact),
                    "error": g(c.error),
                    "kind": "relative" if c.relative else "absolute",
                    "tolerance": g(c.tolerance),
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def compare(fit_result: FitResult, exact: HeatCoefficientSet, tol: Sequence[float] = DEFAULT_TOLERANCES) -> CompareReport:
    """Per-coefficient check of a fit against closed forms.

    Nonzero exact values use relative error. For an exact zero the absolute
    error is compared with ``tol[n] * max |a_k|``.
    """
    if fit_result.m != exact.m:
        raise FitPreconditionError(f"dimension mismatch: fit m={fit_result.m}, exact m={exact.m}")
    if fit_result.p is not None and fit_result.p != exact.p:
        raise FitPreconditionError(f"degree mismatch: fit p={fit_result.p}, exact p={exact.p}")
    if fit_result.bc not in (None, "unknown") and fit_result.bc != exact.bc:
        raise FitPreconditionError(f"boundary condition mismatch: {fit_result.bc} vs {exact.bc}")
    values = [float(a) for a in exact.a]
    scale = max(abs(v) for v in values)
    checks = []
    for n, (tol_n, ex) in enumerate(zip(tol, values)):
        got = fit_result.a_hat[n]
        if ex != 0:
            err, rel, thr = abs(got - ex) / abs(ex), True, tol_n
        else:
            err, rel, thr = abs(got), False, tol_n * scale
        checks.append(CoefficientCheck(n, got, ex, err, rel, thr, err <= thr))
    return CompareReport(tuple(checks))
