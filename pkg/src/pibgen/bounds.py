"""Interval estimates of the population average treatment effect (PATE).

Three assumption regimes are supported, each in a full-interval form (only the
experimental sample is informative) and a reduced-interval form (the population
frame additionally identifies the business-as-usual control mean among
non-sampled units):

* worst case: unknown expectations among non-sampled units are replaced by the
  outcome support endpoints;
* bounded sample variation (BSV): non-sampled expectations differ from the
  observed sample arm means by at most ``lam``;
* monotone treatment response (MTR): every unit's treated outcome is at least
  its control outcome, so the lower bound is 0 (binary outcomes only).

All arithmetic is plain Python (+, -, *, min, max) so the functions evaluate
exactly on ``fractions.Fraction`` inputs; the enumeration oracles rely on that.
Final intervals are clamped to the logically feasible range
``[y_lo - y_hi, y_hi - y_lo]`` with flags, and the unclamped values are kept
for the width identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ConfigError,
    MissingPopulationOutcome,
    NegativeLambda,
    NonBinaryOutcome,
)
from .frame import DesignProbs, EmpiricalRates, OutcomeSupport, StudyFrame, design_probs, empirical_rates

FRAMEWORKS = ("full", "reduced")
ASSUMPTIONS = ("worst_case", "bsv", "mtr")
MTR_SCOPES = ("sample", "population")


@dataclass(frozen=True)
class PateInterval:
    lo: float
    hi: float
    pre_clamp_lo: float
    pre_clamp_hi: float
    clamped_lo: bool
    clamped_hi: bool
    assumption: str
    framework: str
    lam: float | None = None
    variant: str | None = None
    scope: str | None = None
    improves: bool | None = None
    inputs: dict = field(default_factory=dict)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def pre_clamp_width(self):
        return self.pre_clamp_hi - self.pre_clamp_lo

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def to_json(self) -> dict:
        doc = {
            "assumption": self.assumption,
            "framework": self.framework,
            "lo": float(self.lo),
            "hi": float(self.hi),
            "clamped": {"lo": self.clamped_lo, "hi": self.clamped_hi},
            "pre_clamp": {"lo": float(self.pre_clamp_lo), "hi": float(self.pre_clamp_hi)},
            "inputs": self.inputs,
        }
        if self.lam is not None:
            doc["lambda"] = float(self.lam)
        if self.variant is not None:
            doc["variant"] = self.variant
        if self.scope is not None:
            doc["scope"] = self.scope
        if self.improves is not None:
            doc["improves"] = self.improves
        return doc


@dataclass(frozen=True)
class MtrResult:
    """Monotone-response bounds come in two reporting variants: the min variant
    substitutes the smallest feasible value for the unobservable non-sampled
    contribution, the max variant the largest."""

    interval_min_variant: PateInterval
    interval_max_variant: PateInterval
    scope: str

    def to_json(self) -> list[dict]:
        return [self.interval_min_variant.to_json(), self.interval_max_variant.to_json()]


def _snapshot(rates: EmpiricalRates, probs: DesignProbs, support: OutcomeSupport) -> dict:
    return {
        "e_y1_w1z1": float(rates.e_y1_w1z1),
        "e_y0_w0z1": float(rates.e_y0_w0z1),
        "e_y0_w0z0": None if rates.e_y0_w0z0 is None else float(rates.e_y0_w0z0),
        "p_z1": float(probs.p_z1),
        "p_w1_given_z1": float(probs.p_w1_given_z1),
        "p_w0_given_z0": float(probs.p_w0_given_z0),
        "support": [float(support.y_lo), float(support.y_hi)],
    }


def _clamp(lo, hi, support: OutcomeSupport, **tags) -> PateInterval:
    floor = support.y_lo - support.y_hi
    ceil = support.y_hi - support.y_lo
    lo_c = max(lo, floor)
    hi_c = min(hi, ceil)
    return PateInterval(
        lo=lo_c,
        hi=hi_c,
        pre_clamp_lo=lo,
        pre_clamp_hi=hi,
        clamped_lo=lo_c != lo,
        clamped_hi=hi_c != hi,
        **tags,
    )


def _check_framework(framework):
    if framework not in FRAMEWORKS:
        raise ConfigError(f"framework must be one of {FRAMEWORKS}, got {framework!r}")


def worst_case_bounds(
    rates: EmpiricalRates,
    probs: DesignProbs,
    framework: str,
    support: OutcomeSupport,
) -> PateInterval:
    """Bounds with no assumption beyond treatment randomization.

    Each potential-outcome mean splits into the sampled part, identified by the
    arm mean, and the non-sampled part, bounded by the support endpoints.  The
    reduced framework pins the control mean on the mass P(W=0, Z=0) at the
    observed business-as-usual rate and bounds only the remainder.
    """
    _check_framework(framework)
    e1, e0 = rates.e_y1_w1z1, rates.e_y0_w0z1
    lo_y, hi_y = support.y_lo, support.y_hi
    e1_lo = e1 * probs.p_z1 + lo_y * probs.p_z0
    e1_hi = e1 * probs.p_z1 + hi_y * probs.p_z0
    if framework == "full":
        e0_lo = e0 * probs.p_z1 + lo_y * probs.p_z0
        e0_hi = e0 * probs.p_z1 + hi_y * probs.p_z0
    else:
        if rates.e_y0_w0z0 is None:
            raise MissingPopulationOutcome()
        pinned = rates.e_y0_w0z0 * probs.p_w0_z0
        e0_lo = e0 * probs.p_z1 + pinned + lo_y * probs.p_w1_z0
        e0_hi = e0 * probs.p_z1 + pinned + hi_y * probs.p_w1_z0
    return _clamp(
        e1_lo - e0_hi,
        e1_hi - e0_lo,
        support,
        assumption="worst_case",
        framework=framework,
        inputs=_snapshot(rates, probs, support),
    )


def bsv_improves(rates: EmpiricalRates, lam, support: OutcomeSupport) -> bool:
    """True when the BSV interval is sharp and strictly inside the worst case:
    the observed arm-mean difference shifted by 2*lam must stay inside the
    support range on both sides."""
    if lam < 0:
        raise NegativeLambda(lam)
    d = rates.sate
    rng = support.y_hi - support.y_lo
    return (d + 2 * lam < rng) and (d - 2 * lam > -rng)


def bsv_bounds(
    rates: EmpiricalRates,
    probs: DesignProbs,
    framework: str,
    lam,
    support: OutcomeSupport,
    *,
    intersect_support: bool = False,
    rcode_reduced_mass: bool = False,
) -> PateInterval:
    """Bounds under bounded sample variation with tolerance ``lam``.

    Non-sampled potential-outcome means are replaced by the sample arm mean
    shifted down/up by ``lam``.  With ``intersect_support=True`` each shifted
    mean is first clipped to the outcome support, which yields the sharp
    interval the corner-enumeration oracle reproduces; the default leaves the
    raw arithmetic intact (so the 4*lam*P(Z=0) width identity holds pre-clamp)
    and only the final interval is clamped.

    ``rcode_reduced_mass`` switches the reduced framework's residual-mass
    factor from 1 - P(Z=1) - P(W=0,Z=0) to P(W=0|Z=0) * P(Z=0), a published
    code variant kept for comparison; the default follows the formula as
    stated.
    """
    _check_framework(framework)
    if lam < 0:
        raise NegativeLambda(lam)
    e1, e0 = rates.e_y1_w1z1, rates.e_y0_w0z1
    lo_y, hi_y = support.y_lo, support.y_hi

    def shift(e, sign):
        v = e + sign * lam
        if intersect_support:
            v = min(hi_y, max(lo_y, v))
        return v

    e1_lo = e1 * probs.p_z1 + shift(e1, -1) * probs.p_z0
    e1_hi = e1 * probs.p_z1 + shift(e1, +1) * probs.p_z0
    if framework == "full":
        e0_lo = e0 * probs.p_z1 + shift(e0, -1) * probs.p_z0
        e0_hi = e0 * probs.p_z1 + shift(e0, +1) * probs.p_z0
    else:
        if rates.e_y0_w0z0 is None:
            raise MissingPopulationOutcome()
        pinned = rates.e_y0_w0z0 * probs.p_w0_z0
        mass = probs.p_w0_z0 if rcode_reduced_mass else probs.p_w1_z0
        e0_lo = e0 * probs.p_z1 + pinned + shift(e0, -1) * mass
        e0_hi = e0 * probs.p_z1 + pinned + shift(e0, +1) * mass
    return _clamp(
        e1_lo - e0_hi,
        e1_hi - e0_lo,
        support,
        assumption="bsv",
        framework=framework,
        lam=lam,
        improves=bsv_improves(rates, lam, support),
        inputs=_snapshot(rates, probs, support),
    )


def _binary_rates(rates_or_frame) -> tuple[EmpiricalRates, bool]:
    if isinstance(rates_or_frame, StudyFrame):
        if not rates_or_frame.is_binary:
            raise NonBinaryOutcome()
        return empirical_rates(rates_or_frame), True
    return rates_or_frame, False


def mtr_bounds(rates_or_frame, probs: DesignProbs, scope: str = "sample") -> MtrResult:
    """Bounds assuming outcomes never decrease under treatment (binary only).

    The lower bound is 0 by assumption.  The upper bound counts the mass that
    could still move: sampled control fails and sampled treated passes, plus,
    in population scope, business-as-usual fails among non-sampled control-arm
    mass.  The unobservable non-sampled treated-arm contribution is set to 0
    in the min variant and to its full mass in the max variant.
    """
    if scope not in MTR_SCOPES:
        raise ConfigError(f"scope must be one of {MTR_SCOPES}, got {scope!r}")
    rates, _ = _binary_rates(rates_or_frame)
    if rates.pass1_w1z1 is None or rates.fail0_w0z1 is None:
        raise NonBinaryOutcome("monotone-response bounds need binary pass/fail rates")
    support = OutcomeSupport(0, 1)  # integer endpoints stay exact under Fraction inputs
    sample_part = rates.fail0_w0z1 * probs.p_w0_z1 + rates.pass1_w1z1 * probs.p_w1_z1
    if scope == "sample":
        min_hi = sample_part
        max_hi = sample_part + probs.p_z0
    else:
        if rates.fail0_w0z0 is None:
            raise MissingPopulationOutcome("the population-scope monotone bound")
        min_hi = sample_part + rates.fail0_w0z0 * probs.p_w0_z0
        max_hi = min_hi + probs.p_w1_z0
    framework = "full" if scope == "sample" else "reduced"
    zero = 0 * min_hi  # exact zero of whatever numeric type flows through
    common = dict(
        assumption="mtr",
        framework=framework,
        scope=scope,
        inputs=_snapshot(rates, probs, support),
    )
    return MtrResult(
        interval_min_variant=_clamp(zero, min_hi, support, variant="min", **common),
        interval_max_variant=_clamp(zero, max_hi, support, variant="max", **common),
        scope=scope,
    )


# --- per-stratum evaluation ----------------------------------------------------


@dataclass(frozen=True)
class StratumBounds:
    index: int
    n_population: int
    n_sample_treated: int
    n_sample_control: int
    viable: bool
    result: PateInterval | MtrResult | None
    skip_reason: str | None = None


@dataclass(frozen=True)
class StratifiedBounds:
    strata: tuple[StratumBounds, ...]
    pooled: PateInterval | MtrResult | None = None

    def viable(self):
        return [s for s in self.strata if s.viable]


def compute_bounds(
    rates: EmpiricalRates,
    probs: DesignProbs,
    support: OutcomeSupport,
    assumption: str,
    *,
    framework: str = "full",
    lam=None,
    scope: str = "sample",
    intersect_support: bool = False,
):
    """Dispatch a single bound computation by assumption tag."""
    if assumption == "worst_case":
        return worst_case_bounds(rates, probs, framework, support)
    if assumption == "bsv":
        if lam is None:
            raise ConfigError("bsv bounds need a lambda value")
        return bsv_bounds(rates, probs, framework, lam, support,
                          intersect_support=intersect_support)
    if assumption == "mtr":
        return mtr_bounds(rates, probs, scope)
    raise ConfigError(f"assumption must be one of {ASSUMPTIONS}, got {assumption!r}")


def stratified_bounds(
    frame: StudyFrame,
    assignment,
    assumption: str,
    *,
    framework: str = "full",
    lam=None,
    scope: str = "sample",
    p_w0_given_z0: float = 0.5,
    pooled: bool = False,
) -> StratifiedBounds:
    """Evaluate one bound specification inside each propensity stratum.

    Selection and assignment probabilities are recomputed within each stratum;
    the assumed P(W=0|Z=0) is inherited globally.  Strata without a sampled
    treated or control unit are skipped and flagged.  The optional pooled
    interval is the population-share weighted sum of the per-stratum
    endpoints; it is an extension beyond the per-stratum reporting and stays
    off by default.
    """
    from .stratify import stratum_frames

    per_stratum = []
    pieces = []
    for piece in stratum_frames(frame, assignment):
        if not piece.viable:
            per_stratum.append(
                StratumBounds(
                    index=piece.index,
                    n_population=piece.frame.n_units,
                    n_sample_treated=piece.n_sample_treated,
                    n_sample_control=piece.n_sample_control,
                    viable=False,
                    result=None,
                    skip_reason="no sampled treated unit"
                    if piece.n_sample_treated == 0
                    else "no sampled control unit",
                )
            )
            continue
        sub = piece.frame
        s_rates = empirical_rates(sub)
        s_probs = design_probs(sub, p_w0_given_z0)
        try:
            result = compute_bounds(
                s_rates, s_probs, sub.support, assumption,
                framework=framework, lam=lam, scope=scope,
            )
        except MissingPopulationOutcome:
            per_stratum.append(
                StratumBounds(
                    index=piece.index,
                    n_population=sub.n_units,
                    n_sample_treated=piece.n_sample_treated,
                    n_sample_control=piece.n_sample_control,
                    viable=False,
                    result=None,
                    skip_reason="no business-as-usual outcomes among its z=0 units",
                )
            )
            continue
        pieces.append((piece, result))
        per_stratum.append(
            StratumBounds(
                index=piece.index,
                n_population=sub.n_units,
                n_sample_treated=piece.n_sample_treated,
                n_sample_control=piece.n_sample_control,
                viable=True,
                result=result,
            )
        )
    pooled_result = None
    if pooled and pieces and all(s.viable for s in per_stratum):
        pooled_result = _pool(frame, pieces, assumption)
    return StratifiedBounds(strata=tuple(per_stratum), pooled=pooled_result)


def _pool(frame, pieces, assumption):
    total = frame.n_units

    def weighted(select):
        lo = sum(p.frame.n_units / total * select(r).pre_clamp_lo for p, r in pieces)
        hi = sum(p.frame.n_units / total * select(r).pre_clamp_hi for p, r in pieces)
        first = select(pieces[0][1])
        return _clamp(
            lo, hi, frame.support,
            assumption=first.assumption,
            framework=first.framework,
            lam=first.lam,
            variant=first.variant,
            scope=first.scope,
            inputs={"pooled": True, "strata": len(pieces)},
        )

    if assumption == "mtr":
        return MtrResult(
            interval_min_variant=weighted(lambda r: r.interval_min_variant),
            interval_max_variant=weighted(lambda r: r.interval_max_variant),
            scope=pieces[0][1].scope,
        )
    return weighted(lambda r: r)
