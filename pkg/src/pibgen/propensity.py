"""Logistic sampling-propensity model and covariate balance diagnostics.

The model regresses the selection indicator z on covariates by Newton/IRLS
maximum likelihood.  Covariates are standardized internally for conditioning
and the coefficients are reported on the original scale.  Fitting is
deterministic and the fitted model is immutable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, Separation, SingularDesign, ZeroVariance
from .frame import StudyFrame


@dataclass(frozen=True)
class FitOptions:
    tolerance: float = 1e-8
    max_iter: int = 100
    ridge: float = 0.0


@dataclass(frozen=True)
class PropensityModel:
    intercept: float
    coefficients: dict  # covariate name -> original-scale coefficient
    converged: bool
    iterations: int
    final_gradient_norm: float
    loglik_trace: tuple[float, ...] = field(default=(), repr=False)

    def logit(self, x: dict | tuple, names=None) -> float:
        if isinstance(x, dict):
            return self.intercept + sum(b * x[name] for name, b in self.coefficients.items())
        return self.intercept + sum(
            b * x[names.index(name)] for name, b in self.coefficients.items()
        )


def _sigmoid(eta):
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def binomial_loglik(beta, design, z, ridge: float = 0.0) -> float:
    """Bernoulli log-likelihood of z given the design matrix, optionally with a
    ridge penalty on the non-intercept coefficients."""
    eta = design @ beta
    ll = float(np.sum(z * eta - np.logaddexp(0.0, eta)))
    if ridge:
        ll -= 0.5 * ridge * float(np.sum(beta[1:] ** 2))
    return ll


def binomial_score(beta, design, z, ridge: float = 0.0) -> np.ndarray:
    """Gradient of ``binomial_loglik`` with respect to beta."""
    mu = _sigmoid(design @ beta)
    grad = design.T @ (z - mu)
    if ridge:
        grad = grad.copy()
        grad[1:] -= ridge * beta[1:]
    return grad


def _standardized_design(frame: StudyFrame, covariates):
    n = frame.n_units
    cols, means, sds = [], [], []
    for name in covariates:
        col = np.asarray(frame.covariate_column(name), dtype=float)
        mean = col.mean()
        sd = col.std()  # population (denominator N) scale
        if sd == 0:
            raise SingularDesign(f"covariate {name!r} is constant")
        cols.append((col - mean) / sd)
        means.append(mean)
        sds.append(sd)
    design = np.column_stack([np.ones(n)] + cols) if cols else np.ones((n, 1))
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise SingularDesign("collinear covariates")
    return design, np.array(means), np.array(sds)


def fit_propensity(
    frame: StudyFrame,
    covariates,
    options: FitOptions = FitOptions(),
) -> PropensityModel:
    """Maximum-likelihood logistic fit of sample membership on covariates.

    Newton steps with step-halving keep the (penalized) log-likelihood
    non-decreasing; convergence is declared when the max-norm of the gradient
    on the standardized scale falls below ``options.tolerance``.
    """
    covariates = tuple(covariates)
    z = np.array([u.z for u in frame.units], dtype=float)
    if z.min() == z.max():
        raise SingularDesign("selection indicator takes a single value")
    design, means, sds = _standardized_design(frame, covariates)
    p = design.shape[1]
    ridge = options.ridge
    beta = np.zeros(p)
    ll = binomial_loglik(beta, design, z, ridge)
    trace = [ll]
    converged = False
    iterations = 0
    grad_norm = float(np.max(np.abs(binomial_score(beta, design, z, ridge))))
    for _ in range(options.max_iter):
        grad = binomial_score(beta, design, z, ridge)
        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm <= options.tolerance:
            if ridge == 0:
                _check_saturation(beta, design, z, covariates)
            converged = True
            break
        mu = _sigmoid(design @ beta)
        weights = mu * (1.0 - mu)
        hess = design.T @ (design * weights[:, None])
        if ridge:
            hess[1:, 1:] += ridge * np.eye(p - 1)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            _raise_separation(beta, covariates)
        # step-halving: never accept a decrease in the objective
        alpha = 1.0
        for _ in range(50):
            if binomial_loglik(beta + alpha * step, design, z, ridge) >= ll - 1e-12:
                break
            alpha *= 0.5
        beta = beta + alpha * step
        ll = binomial_loglik(beta, design, z, ridge)
        trace.append(ll)
        iterations += 1
        if ridge == 0 and float(np.max(np.abs(beta))) > 30.0:
            # standardized coefficients this large mean the likelihood is
            # drifting to a perfect-separation boundary
            _raise_separation(beta, covariates)
    if not converged:
        grad_norm = float(np.max(np.abs(binomial_score(beta, design, z, ridge))))
        if grad_norm > options.tolerance:
            raise NoConvergence(options.max_iter, grad_norm)
        if ridge == 0:
            _check_saturation(beta, design, z, covariates)
        converged = True

    # back-transform to the original covariate scale
    coef_std = beta[1:]
    coef_orig = coef_std / sds if len(coef_std) else coef_std
    intercept = float(beta[0] - np.sum(coef_std * means / sds)) if len(coef_std) else float(beta[0])
    return PropensityModel(
        intercept=intercept,
        coefficients={name: float(b) for name, b in zip(covariates, coef_orig)},
        converged=converged,
        iterations=iterations,
        final_gradient_norm=grad_norm,
        loglik_trace=tuple(trace),
    )


def _check_saturation(beta, design, z, covariates):
    """Complete separation drives the gradient to zero with the fit saturated at
    the labels; a converged fit that classifies every unit perfectly is one."""
    eta = design @ beta
    margins = (2 * z - 1) * eta
    mu = _sigmoid(eta)
    if len(beta) > 1 and float(margins.min()) > 0 and float(np.max(np.abs(z - mu))) < 1e-4:
        _raise_separation(beta, covariates)


def _raise_separation(beta, covariates):
    norm = float(np.linalg.norm(beta))
    direction = beta / norm if norm > 0 else beta
    names = ["intercept", *covariates]
    raise Separation({name: round(float(v), 4) for name, v in zip(names, direction)})


def logit_scores(model: PropensityModel, frame: StudyFrame) -> dict:
    """Per-unit propensity logit: intercept plus the covariate dot product."""
    slots = [(frame.covariate_index(name), b) for name, b in model.coefficients.items()]
    out = {}
    for u in frame.units:
        eta = model.intercept
        for j, b in slots:
            eta += b * u.x[j]
        out[u.id] = float(eta)
    return out


def _scalar_sigmoid(eta: float) -> float:
    if eta >= 0:
        return 1.0 / (1.0 + math.exp(-eta))
    ex = math.exp(eta)
    return ex / (1.0 + ex)


def propensity_scores(model: PropensityModel, frame: StudyFrame) -> dict:
    return {uid: _scalar_sigmoid(eta) for uid, eta in logit_scores(model, frame).items()}


# --- balance diagnostics -------------------------------------------------------


@dataclass(frozen=True)
class BalanceRow:
    covariate: str
    sample_mean: float
    population_mean: float
    population_sd: float
    asmd: float


@dataclass(frozen=True)
class BalanceReport:
    rows: tuple[BalanceRow, ...]

    def asmd_of(self, name: str) -> float:
        for row in self.rows:
            if row.covariate == name:
                return row.asmd
        from .errors import UnknownCovariate

        raise UnknownCovariate(name, [r.covariate for r in self.rows])


def asmd(frame: StudyFrame, covariate: str) -> float:
    """Absolute standardized mean difference |pop mean - sample mean| / pop sd.

    The population moments run over all N units with the uncorrected
    (denominator-N) standard deviation; the sample mean runs over z=1 units.
    """
    col = np.asarray(frame.covariate_column(covariate), dtype=float)
    z = np.array([u.z for u in frame.units])
    sigma = col.std()
    if sigma == 0:
        raise ZeroVariance(f"covariate {covariate!r}")
    sample = col[z == 1]
    if len(sample) == 0:
        from .errors import EmptySample

        raise EmptySample()
    return float(abs(col.mean() - sample.mean()) / sigma)


def compute_balance(frame: StudyFrame, covariates=None) -> BalanceReport:
    names = tuple(covariates) if covariates is not None else frame.covariate_names
    rows = []
    for name in names:
        col = np.asarray(frame.covariate_column(name), dtype=float)
        z = np.array([u.z for u in frame.units])
        rows.append(
            BalanceRow(
                covariate=name,
                sample_mean=float(col[z == 1].mean()),
                population_mean=float(col.mean()),
                population_sd=float(col.std()),
                asmd=asmd(frame, name),
            )
        )
    return BalanceReport(rows=tuple(rows))


# --- JSON round trip -----------------------------------------------------------


def model_to_json(model: PropensityModel) -> str:
    return json.dumps(
        {
            "intercept": model.intercept,
            "coefficients": model.coefficients,
            "converged": model.converged,
            "iterations": model.iterations,
        },
        indent=2,
        sort_keys=True,
    )


def model_from_json(text: str) -> PropensityModel:
    doc = json.loads(text)
    return PropensityModel(
        intercept=float(doc["intercept"]),
        coefficients={k: float(v) for k, v in doc["coefficients"].items()},
        converged=bool(doc["converged"]),
        iterations=int(doc["iterations"]),
        final_gradient_norm=float("nan"),
    )
