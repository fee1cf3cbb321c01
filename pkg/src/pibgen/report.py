"""Analysis report assembly and rendering.

The JSON document is the single source of truth (full precision, deterministic
key order); the Markdown and CSV emitters are pure views over it and never
recompute anything.  Markdown rounds interval endpoints to 2 decimals and
point estimates to 3, matching the usual table conventions for this kind of
analysis.
"""

from __future__ import annotations

import csv
import io
import json


def to_json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def _f2(x) -> str:
    return f"{x:.2f}"


def _f3(x) -> str:
    return f"{x:.3f}"


def _interval_cell(entry: dict) -> str:
    flag = ""
    if entry["clamped"]["lo"] or entry["clamped"]["hi"]:
        flag = " *"
    return f"[{_f2(entry['lo'])}, {_f2(entry['hi'])}]{flag}"


def _md_table(headers, rows) -> list[str]:
    lines = ["| " + " | ".join(headers) + " |",
             "| " + " | ".join("---" for _ in headers) + " |"]
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return lines


def _describe(entry: dict) -> tuple[str, str, str]:
    assumption = {"worst_case": "treatment randomization",
                  "bsv": "bounded sample variation",
                  "mtr": "monotone treatment response"}[entry["assumption"]]
    framework = entry.get("scope") or entry["framework"]
    extra = ""
    if "lambda" in entry:
        extra = f"lambda={entry['lambda']:g}"
    if "variant" in entry:
        extra = f"{entry['variant']} variant"
    return assumption, framework, extra


def render_markdown(document: dict) -> str:
    lines = ["# PATE analysis report", ""]
    meta = document["meta"]
    lines.append(f"- input: {meta['input']}")
    lines.append(f"- seed: {meta['seed']}")
    frame = document.get("frame")
    if frame:
        lines.append(
            f"- units: {frame['n_units']} total, {frame['n_sample']} sampled "
            f"({frame['n_sample_treated']} treated / {frame['n_sample_control']} control)"
        )
        lines.append(f"- outcome support: [{frame['support'][0]:g}, {frame['support'][1]:g}]")
    lines.append("")

    if document.get("intervals"):
        lines.append("## Interval estimates (whole frame)")
        lines.append("")
        rows = []
        for entry in document["intervals"]:
            assumption, framework, extra = _describe(entry)
            note = ""
            if entry.get("improves") is False:
                note = "does not improve on worst case"
            elif entry.get("improves") is True:
                note = "sharp and improving"
            rows.append((assumption, framework, extra, _interval_cell(entry), note))
        lines += _md_table(["Assumption", "Framework", "Detail", "Interval", "Note"], rows)
        lines.append("")
        lines.append("`*` endpoint clamped to the feasible range.")
        lines.append("")

    strata_block = document.get("stratum_intervals")
    if strata_block:
        lines.append(f"## Interval estimates by propensity stratum (k={strata_block['k']})")
        lines.append("")
        rows = []
        for stratum in strata_block["strata"]:
            if not stratum["viable"]:
                rows.append((stratum["stratum"], stratum["n_population"], "-", "-",
                             f"skipped: {stratum['skip_reason']}"))
                continue
            for entry in stratum["results"]:
                assumption, framework, extra = _describe(entry)
                rows.append((stratum["stratum"], stratum["n_population"],
                             f"{assumption} ({framework})", extra, _interval_cell(entry)))
        lines += _md_table(["Stratum", "N", "Assumption", "Detail", "Interval"], rows)
        lines.append("")
        if strata_block.get("pooled"):
            lines.append("Pooled across strata (population-share weighted, an extension "
                         "beyond the per-stratum bounds):")
            lines.append("")
            rows = []
            for entry in strata_block["pooled"]:
                assumption, framework, extra = _describe(entry)
                rows.append((assumption, framework, extra, _interval_cell(entry)))
            lines += _md_table(["Assumption", "Framework", "Detail", "Interval"], rows)
            lines.append("")

    if document.get("point_estimates"):
        lines.append("## Point estimates under sampling ignorability")
        lines.append("")
        rows = [
            (p["method"], f"{_f3(p['estimate'])} ({_f3(p['se'])})")
            for p in document["point_estimates"]
        ]
        lines += _md_table(["Method", "Estimate (SE)"], rows)
        lines.append("")

    if document.get("balance"):
        lines.append("## Covariate balance")
        lines.append("")
        rows = [
            (b["covariate"], _f3(b["sample_mean"]), _f3(b["population_mean"]),
             _f3(b["population_sd"]), _f3(b["asmd"]))
            for b in document["balance"]
        ]
        lines += _md_table(
            ["Covariate", "Sample mean", "Population mean", "Population SD", "ASMD"], rows
        )
        lines.append("")

    if document.get("lambda_report"):
        lines.append("## Candidate lambda values")
        lines.append("")
        rows = [(r["rule"], _f3(r["value"])) for r in document["lambda_report"]]
        lines += _md_table(["Rule", "Value"], rows)
        lines.append("")

    prop = document.get("propensity")
    if prop:
        lines.append("## Propensity model")
        lines.append("")
        lines.append(f"- converged: {prop['converged']} in {prop['iterations']} iterations")
        lines.append(f"- intercept: {prop['intercept']:.6g}")
        for name, b in prop["coefficients"].items():
            lines.append(f"- {name}: {b:.6g}")
        lines.append("")

    notes = document.get("notes") or {}
    items = []
    if notes.get("non_viable_strata"):
        items.append(f"non-viable strata skipped: {notes['non_viable_strata']}")
    if notes.get("subclassification_error"):
        items.append(f"subclassification unavailable: {notes['subclassification_error']}")
    if notes.get("clamped_intervals"):
        items.append(f"{notes['clamped_intervals']} interval endpoint(s) clamped")
    if items:
        lines.append("## Notes")
        lines.append("")
        lines += [f"- {item}" for item in items]
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def render_csv(document: dict) -> str:
    """Flat delimited view: one row per interval or point estimate."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["section", "stratum", "assumption", "framework", "lambda", "variant",
         "lo", "hi", "clamped_lo", "clamped_hi", "method", "estimate", "se"]
    )

    def interval_row(section, stratum, entry):
        writer.writerow(
            [section, stratum, entry["assumption"],
             entry.get("scope") or entry["framework"],
             entry.get("lambda", ""), entry.get("variant", ""),
             repr(entry["lo"]), repr(entry["hi"]),
             int(entry["clamped"]["lo"]), int(entry["clamped"]["hi"]), "", "", ""]
        )

    for entry in document.get("intervals", []):
        interval_row("whole_frame", "", entry)
    block = document.get("stratum_intervals") or {}
    for stratum in block.get("strata", []):
        if stratum["viable"]:
            for entry in stratum["results"]:
                interval_row("stratum", stratum["stratum"], entry)
    for entry in block.get("pooled", []):
        interval_row("pooled", "", entry)
    for p in document.get("point_estimates", []):
        writer.writerow(
            ["point", "", "", "", "", "", "", "", "", "", p["method"],
             repr(p["estimate"]), repr(p["se"])]
        )
    return buf.getvalue()
