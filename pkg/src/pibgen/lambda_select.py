"""Data-driven choices of the bounded-variation tolerance lambda.

Two rules plus a fixed value: covariate balance (ASMD, optionally aggregated
over several covariates) and a margin-of-error style multiple of the sample
outcome standard deviation (pooled or the more conservative per-arm maximum).
ASMD values above one are returned as-is; the bounds engine's improvement flag
reports when such a lambda buys nothing over the worst case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, EmptySample, NegativeLambda
from .frame import StudyFrame
from .propensity import BalanceReport

ASMD_AGGREGATES = ("max", "mean", "single")
ARM_RULES = ("pooled", "max_arm")


@dataclass(frozen=True)
class LambdaSpec:
    mode: str  # "fixed" | "asmd" | "outcome_sd"
    value: float | None = None
    covariates: tuple[str, ...] = ()
    aggregate: str = "max"
    multiplier: float = 2.0
    arm_rule: str = "pooled"

    def __post_init__(self):
        if self.mode == "fixed":
            if self.value is None:
                raise ConfigError("fixed lambda needs a value")
            if self.value < 0:
                raise NegativeLambda(self.value)
        elif self.mode == "asmd":
            if self.aggregate not in ASMD_AGGREGATES:
                raise ConfigError(f"aggregate must be one of {ASMD_AGGREGATES}")
            if self.aggregate == "single" and len(self.covariates) != 1:
                raise ConfigError("aggregate 'single' needs exactly one covariate")
        elif self.mode == "outcome_sd":
            if self.arm_rule not in ARM_RULES:
                raise ConfigError(f"arm_rule must be one of {ARM_RULES}")
            if self.multiplier < 0:
                raise NegativeLambda(self.multiplier)
        else:
            raise ConfigError(f"unknown lambda mode {self.mode!r}")

    def label(self) -> str:
        if self.mode == "fixed":
            return f"fixed:{self.value:g}"
        if self.mode == "asmd":
            if self.covariates:
                return f"asmd:{self.aggregate}:{','.join(self.covariates)}"
            return f"asmd:{self.aggregate}"
        return f"sd:{self.arm_rule}"


def _plugin_variance(values) -> float:
    n = len(values)
    mean = sum(values) / n
    return sum((v - mean) ** 2 for v in values) / n


def _outcome_sd_lambda(frame: StudyFrame, multiplier: float, arm_rule: str) -> float:
    pooled = [u.y for u in frame.units if u.z == 1]
    if not pooled:
        raise EmptySample()
    if arm_rule == "pooled":
        return multiplier * math.sqrt(_plugin_variance(pooled))
    variances = []
    for w in (0, 1):
        arm = frame.sample_outcomes(w)
        if arm:
            variances.append(_plugin_variance(arm))
    return multiplier * math.sqrt(max(variances))


def resolve_lambda(spec: LambdaSpec, frame: StudyFrame, balance: BalanceReport) -> float:
    """Turn a lambda rule into a number for the BSV bounds."""
    if spec.mode == "fixed":
        return float(spec.value)
    if spec.mode == "asmd":
        names = spec.covariates or tuple(r.covariate for r in balance.rows)
        if not names:
            raise ConfigError("asmd lambda rule needs at least one covariate")
        values = [balance.asmd_of(name) for name in names]
        if spec.aggregate == "mean":
            return sum(values) / len(values)
        if spec.aggregate == "single":
            return values[0]
        return max(values)
    return _outcome_sd_lambda(frame, spec.multiplier, spec.arm_rule)


def lambda_report(frame: StudyFrame, balance: BalanceReport) -> list[dict]:
    """All rule outputs side by side: one row per covariate ASMD, the mean and
    max aggregates, and the pooled / max-arm outcome-SD rules."""
    rows = [
        {"rule": f"asmd:single:{r.covariate}", "value": r.asmd} for r in balance.rows
    ]
    if balance.rows:
        asmds = [r.asmd for r in balance.rows]
        rows.append({"rule": "asmd:mean", "value": sum(asmds) / len(asmds)})
        rows.append({"rule": "asmd:max", "value": max(asmds)})
    for arm_rule in ARM_RULES:
        rows.append(
            {"rule": f"sd:{arm_rule}", "value": _outcome_sd_lambda(frame, 2.0, arm_rule)}
        )
    return rows


def parse_lambda_expr(expr: str) -> LambdaSpec:
    """Parse a CLI lambda expression.

    Accepted forms: a bare number, ``asmd:AGG[:cov1,cov2]``, ``sd:pooled``,
    ``sd:max_arm`` (optionally ``sd:RULE:MULTIPLIER``).
    """
    expr = expr.strip()
    try:
        return LambdaSpec(mode="fixed", value=float(expr))
    except ValueError:
        pass
    parts = expr.split(":")
    if parts[0] == "asmd":
        if len(parts) < 2:
            raise ConfigError(f"bad lambda expression {expr!r}: asmd needs an aggregate")
        covs = tuple(c for c in parts[2].split(",") if c) if len(parts) > 2 else ()
        return LambdaSpec(mode="asmd", aggregate=parts[1], covariates=covs)
    if parts[0] == "sd":
        if len(parts) < 2:
            raise ConfigError(f"bad lambda expression {expr!r}: sd needs an arm rule")
        multiplier = float(parts[2]) if len(parts) > 2 else 2.0
        return LambdaSpec(mode="outcome_sd", arm_rule=parts[1], multiplier=multiplier)
    raise ConfigError(f"bad lambda expression {expr!r}")
