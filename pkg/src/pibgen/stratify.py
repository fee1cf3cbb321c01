"""Quantile partition of the population by sampling-propensity logit.

Breakpoints are the j/k empirical quantiles of the logit distribution over all
N units (the ceil(j*N/k)-th order statistic), units with a logit exactly at a
breakpoint go to the lower stratum, and the lowest stratum is closed below.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import ConfigError, TooManyStrata
from .frame import StudyFrame


@dataclass(frozen=True)
class StratumAssignment:
    k: int
    breakpoints: tuple[float, ...]
    stratum_of: dict  # unit id -> 1-based stratum index
    counts_population: tuple[int, ...]
    counts_sample_treated: tuple[int, ...]
    counts_sample_control: tuple[int, ...]

    def viable(self, j: int) -> bool:
        return self.counts_sample_treated[j - 1] >= 1 and self.counts_sample_control[j - 1] >= 1


def _assign(logit: float, breakpoints) -> int:
    for j, b in enumerate(breakpoints, start=1):
        if logit <= b:
            return j
    return len(breakpoints) + 1


def make_strata(logits: dict, k: int) -> StratumAssignment:
    """Assign every unit to one of k logit strata.

    ``logits`` maps unit id to its propensity logit.  Population stratum sizes
    differ by at most one plus any ties sitting exactly on a breakpoint.
    """
    if k < 1:
        raise ConfigError(f"stratum count must be >= 1, got {k}")
    values = sorted(logits.values())
    n = len(values)
    if k > len(set(values)):
        raise TooManyStrata(k, len(set(values)))
    breakpoints = tuple(values[math.ceil(j * n / k) - 1] for j in range(1, k))
    stratum_of = {uid: _assign(v, breakpoints) for uid, v in logits.items()}
    pop = [0] * k
    for j in stratum_of.values():
        pop[j - 1] += 1
    return StratumAssignment(
        k=k,
        breakpoints=breakpoints,
        stratum_of=stratum_of,
        counts_population=tuple(pop),
        counts_sample_treated=(0,) * k,  # filled by with_frame_counts
        counts_sample_control=(0,) * k,
    )


def with_frame_counts(assignment: StratumAssignment, frame: StudyFrame) -> StratumAssignment:
    """Recompute the per-stratum sample-arm counts from a frame."""
    treated = [0] * assignment.k
    control = [0] * assignment.k
    for u in frame.units:
        if u.z != 1:
            continue
        j = assignment.stratum_of[u.id] - 1
        if u.w == 1:
            treated[j] += 1
        else:
            control[j] += 1
    return StratumAssignment(
        k=assignment.k,
        breakpoints=assignment.breakpoints,
        stratum_of=assignment.stratum_of,
        counts_population=assignment.counts_population,
        counts_sample_treated=tuple(treated),
        counts_sample_control=tuple(control),
    )


def strata_for_frame(frame: StudyFrame, logits: dict, k: int) -> StratumAssignment:
    missing = [u.id for u in frame.units if u.id not in logits]
    if missing:
        raise ConfigError(f"no logit for unit(s) {missing[:3]}")
    return with_frame_counts(make_strata(logits, k), frame)


@dataclass(frozen=True)
class StratumPiece:
    index: int
    frame: StudyFrame
    n_sample_treated: int
    n_sample_control: int

    @property
    def viable(self) -> bool:
        return self.n_sample_treated >= 1 and self.n_sample_control >= 1


def stratum_frames(frame: StudyFrame, assignment: StratumAssignment) -> list[StratumPiece]:
    """Slice the frame into per-stratum sub-frames (support and covariate names
    inherited), flagging strata that lack a sampled arm as non-viable."""
    buckets: dict[int, list] = {j: [] for j in range(1, assignment.k + 1)}
    for u in frame.units:
        j = assignment.stratum_of.get(u.id)
        if j is None:
            raise ConfigError(f"unit {u.id!r} is not covered by the stratum assignment")
        buckets[j].append(u)
    pieces = []
    for j in range(1, assignment.k + 1):
        units = tuple(buckets[j])
        sub = StudyFrame(units=units, support=frame.support,
                         covariate_names=frame.covariate_names)
        treated = sum(1 for u in units if u.z == 1 and u.w == 1)
        control = sum(1 for u in units if u.z == 1 and u.w == 0)
        pieces.append(StratumPiece(index=j, frame=sub,
                                   n_sample_treated=treated, n_sample_control=control))
    return pieces


def stratum_summary_rows(assignment: StratumAssignment) -> list[dict]:
    rows = []
    for j in range(1, assignment.k + 1):
        lo = assignment.breakpoints[j - 2] if j > 1 else float("-inf")
        hi = assignment.breakpoints[j - 1] if j <= len(assignment.breakpoints) else float("inf")
        rows.append(
            {
                "stratum": j,
                "logit_lo": lo,
                "logit_hi": hi,
                "n_population": assignment.counts_population[j - 1],
                "n_sample_treated": assignment.counts_sample_treated[j - 1],
                "n_sample_control": assignment.counts_sample_control[j - 1],
                "viable": assignment.viable(j),
            }
        )
    return rows


def stratum_summary_csv(assignment: StratumAssignment) -> str:
    """CSV export of the per-stratum layout (the data behind a logit-distribution
    plot; plotting itself is out of scope)."""
    rows = stratum_summary_rows(assignment)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
