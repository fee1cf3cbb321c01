"""Command-line front end.

Pipeline: ingest -> propensity -> strata -> lambda -> bounds -> point
estimates, emitted as JSON (full precision), CSV, or Markdown.  Subcommands
expose the individual stages; ``verify`` runs the enumeration oracles against
the closed-form engine on a small binary frame.

Exit codes: 0 success, 1 verification mismatch, 2 data error, 3 config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from . import oracle as oracle_mod
from .errors import (
    ConfigError,
    DataError,
    NonViableStratum,
    PibgenError,
)
from .frame import ColumnMap, OutcomeSupport, design_probs, empirical_rates, load_frame, load_two_frames
from .lambda_select import lambda_report, parse_lambda_expr, resolve_lambda
from .points import BootstrapOptions, ipw_estimate, merge_nonviable, naive_sate, subclass_estimate
from .propensity import (
    FitOptions,
    compute_balance,
    fit_propensity,
    logit_scores,
    model_from_json,
    model_to_json,
)
from .report import render_csv, render_markdown, to_json
from .stratify import strata_for_frame, stratum_summary_csv, stratum_summary_rows

ASSUMPTION_ALIASES = {"worst": "worst_case", "worst_case": "worst_case", "bsv": "bsv", "mtr": "mtr"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(3)


def _add_data_options(p):
    p.add_argument("--data", help="combined CSV with an in-sample column")
    p.add_argument("--sample", help="sample-only CSV (rows become z=1)")
    p.add_argument("--population", help="non-sampled population CSV (rows become z=0)")
    p.add_argument("--sample-col", default=None, help="in-sample indicator column (default in_sample)")
    p.add_argument("--treatment-col", default=None, help="treatment column (default treatment)")
    p.add_argument("--outcome-col", default=None, help="outcome column (default outcome)")
    p.add_argument("--id-col", default=None, help="id column (default id; absent = row numbers)")
    p.add_argument("--support", default=None,
                   help="outcome support as 'lo,hi' (default 0,1; write --support=-2,3 "
                        "for a negative lower bound)")
    p.add_argument("--covariates", default=None, help="comma-separated covariate columns (default: all)")
    p.add_argument("--exclude", default=None,
                   help="comma-separated columns to drop from the default covariate set")
    p.add_argument("--categorical", action="append", default=None, metavar="COL=REF",
                   help="one-hot encode COL with reference level REF (repeatable)")


def _add_analysis_options(p):
    p.add_argument("--strata", type=int, default=None, help="stratum count k (default 5)")
    p.add_argument("--pw0z0", type=float, default=None,
                   help="assumed P(W=0|Z=0) for the reduced framework (default 0.5)")
    p.add_argument("--lambda", dest="lambdas", action="append", default=None,
                   metavar="EXPR", help="lambda value or rule (repeatable), e.g. 0.3, asmd:max:x1,x2, sd:pooled")
    p.add_argument("--framework", choices=["full", "reduced", "both"], default=None)
    p.add_argument("--assumption", action="append", default=None,
                   choices=sorted(ASSUMPTION_ALIASES), help="repeatable; default worst")
    p.add_argument("--seed", type=int, default=None, help="master seed (env PIBGEN_SEED as fallback)")
    p.add_argument("--reps", type=int, default=None, help="bootstrap replicates (default 1000)")
    p.add_argument("--threads", type=int, default=None, help="bootstrap worker threads (default 1)")
    p.add_argument("--pooled", action="store_true", default=None,
                   help="add the population-share pooled interval across strata")
    p.add_argument("--merge-strata", action="store_true", default=None,
                   help="collapse non-viable strata into a neighbor instead of skipping")
    p.add_argument("--model", default=None,
                   help="propensity model JSON to load instead of fitting")


def build_parser() -> _Parser:
    parser = _Parser(prog="pibgen", description=__doc__)
    parser.add_argument("--config", help="JSON config file; flags override its values")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("analyze", "full report: intervals, stratified intervals, point estimates"),
        ("propensity", "fit the sampling propensity model and print it as JSON"),
        ("strata", "print the stratum layout as CSV"),
        ("lambda", "print candidate lambda values"),
        ("bounds", "whole-frame interval estimates only"),
        ("points", "point estimates only"),
        ("verify", "check the closed-form engine against the enumeration oracles"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_data_options(p)
        _add_analysis_options(p)
        p.add_argument("--format", choices=["json", "csv", "md"], default=None)
        p.add_argument("--out", default=None, help="write output here instead of stdout")
    return parser


_DEFAULTS = {
    "sample_col": "in_sample",
    "treatment_col": "treatment",
    "outcome_col": "outcome",
    "id_col": "id",
    "support": "0,1",
    "covariates": None,
    "exclude": None,
    "categorical": [],
    "model": None,
    "strata": 5,
    "pw0z0": 0.5,
    "lambdas": [],
    "framework": "full",
    "assumption": ["worst"],
    "reps": 1000,
    "threads": 1,
    "pooled": False,
    "merge_strata": False,
    "format": "md",
    "data": None,
    "sample": None,
    "population": None,
    "out": None,
    "seed": None,
}


def _merge_config(args) -> dict:
    config = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        unknown = set(config) - set(_DEFAULTS) - {"lambda"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "lambda" in config:
            config["lambdas"] = config.pop("lambda")
    options = dict(_DEFAULTS)
    options.update(config)
    for key in _DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    if options["seed"] is None:
        env = os.environ.get("PIBGEN_SEED")
        options["seed"] = int(env) if env else 0
    if isinstance(options["lambdas"], (str, float, int)):
        options["lambdas"] = [options["lambdas"]]
    return options


def _parse_support(text) -> OutcomeSupport:
    if isinstance(text, (list, tuple)):
        lo, hi = text
        return OutcomeSupport(float(lo), float(hi))
    try:
        lo, hi = (float(part) for part in str(text).split(","))
    except ValueError:
        raise ConfigError(f"--support expects 'lo,hi', got {text!r}")
    return OutcomeSupport(lo, hi)


def _load(options) -> tuple:
    support = _parse_support(options["support"])
    covs = options["covariates"]
    if isinstance(covs, str):
        covs = tuple(c for c in covs.split(",") if c)
    elif covs is not None:
        covs = tuple(covs)
    exclude = options["exclude"]
    if isinstance(exclude, str):
        exclude = tuple(c for c in exclude.split(",") if c)
    elif exclude is not None:
        exclude = tuple(exclude)
    categorical = []
    for item in options["categorical"]:
        if isinstance(item, (list, tuple)):
            col, ref = item
        elif "=" in str(item):
            col, ref = str(item).split("=", 1)
        else:
            raise ConfigError(f"--categorical expects COL=REF, got {item!r}")
        categorical.append((col, ref))
    columns = ColumnMap(
        id=options["id_col"],
        in_sample=options["sample_col"],
        treatment=options["treatment_col"],
        outcome=options["outcome_col"],
        covariates=covs,
        exclude=exclude or (),
        categorical=tuple(categorical),
    )
    if options["data"]:
        frame = load_frame(options["data"], support, columns)
        source = os.path.basename(options["data"])
    elif options["sample"] and options["population"]:
        frame = load_two_frames(options["sample"], options["population"], support, columns)
        source = f"{os.path.basename(options['sample'])}+{os.path.basename(options['population'])}"
    else:
        raise ConfigError("provide --data, or both --sample and --population")
    return frame, source


def _frameworks(options) -> list[str]:
    return ["full", "reduced"] if options["framework"] == "both" else [options["framework"]]


def _assumptions(options) -> list[str]:
    names = [ASSUMPTION_ALIASES[a] for a in options["assumption"]]
    if not names:
        raise ConfigError("at least one --assumption is required")
    return names


def _fit_model(frame, options):
    if options.get("model"):
        try:
            with open(options["model"], encoding="utf-8") as fh:
                model = model_from_json(fh.read())
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read model file: {exc}")
        return model, tuple(model.coefficients)
    names = frame.covariate_names
    return fit_propensity(frame, names, FitOptions()), names


def _resolve_lambdas(options, frame, balance):
    resolved = []
    for expr in options["lambdas"]:
        spec = parse_lambda_expr(str(expr))
        resolved.append({"label": spec.label(), "value": float(resolve_lambda(spec, frame, balance))})
    return resolved


def _whole_frame_intervals(rates, probs, support, options, lambdas):
    out = []
    for assumption in _assumptions(options):
        if assumption == "worst_case":
            for fw in _frameworks(options):
                out.append(bounds_mod.worst_case_bounds(rates, probs, fw, support).to_json())
        elif assumption == "bsv":
            if not lambdas:
                raise ConfigError("--assumption bsv needs at least one --lambda")
            for fw in _frameworks(options):
                for lam in lambdas:
                    out.append(
                        bounds_mod.bsv_bounds(rates, probs, fw, lam["value"], support).to_json()
                    )
        else:
            for fw in _frameworks(options):
                scope = "sample" if fw == "full" else "population"
                out.extend(bounds_mod.mtr_bounds(rates, probs, scope).to_json())
    return out


def _stratified_intervals(frame, assignment, options, lambdas):
    specs = []
    for assumption in _assumptions(options):
        if assumption == "bsv":
            for fw in _frameworks(options):
                for lam in lambdas:
                    specs.append((assumption, fw, lam["value"]))
        else:
            for fw in _frameworks(options):
                specs.append((assumption, fw, None))
    per_stratum: dict[int, dict] = {}
    pooled_entries = []
    for assumption, fw, lam in specs:
        scope = "sample" if fw == "full" else "population"
        result = bounds_mod.stratified_bounds(
            frame, assignment, assumption,
            framework=fw, lam=lam, scope=scope,
            p_w0_given_z0=options["pw0z0"], pooled=options["pooled"],
        )
        for stratum in result.strata:
            slot = per_stratum.setdefault(
                stratum.index,
                {
                    "stratum": stratum.index,
                    "n_population": stratum.n_population,
                    "n_sample_treated": stratum.n_sample_treated,
                    "n_sample_control": stratum.n_sample_control,
                    "viable": stratum.viable,
                    "results": [] if stratum.viable else None,
                    "skip_reason": stratum.skip_reason,
                },
            )
            if stratum.viable:
                r = stratum.result
                slot["results"].extend(r.to_json() if hasattr(r, "interval_min_variant") else [r.to_json()])
        if result.pooled is not None:
            p = result.pooled
            entries = p.to_json() if hasattr(p, "interval_min_variant") else [p.to_json()]
            for entry in entries:
                entry["note"] = "population-share weighted across strata (extension)"
            pooled_entries.extend(entries)
    block = {"k": assignment.k, "strata": [per_stratum[j] for j in sorted(per_stratum)]}
    if pooled_entries:
        block["pooled"] = pooled_entries
    return block


def _point_estimates(frame, model, assignment, options, notes):
    points = [naive_sate(frame).to_json()]
    points.append(
        ipw_estimate(
            frame, model,
            BootstrapOptions(reps=options["reps"], seed=options["seed"],
                             threads=options["threads"]),
        ).to_json()
    )
    try:
        working = assignment
        if options["merge_strata"]:
            merged = merge_nonviable(assignment, frame)
            if merged.k != assignment.k:
                print(
                    f"warning: merged non-viable strata, k={assignment.k} -> {merged.k}",
                    file=sys.stderr,
                )
            working = merged
        points.append(subclass_estimate(frame, working).to_json())
    except NonViableStratum as exc:
        notes["subclassification_error"] = str(exc)
    return points


def _validate_request(options):
    assumptions = _assumptions(options)
    if "bsv" in assumptions and not options["lambdas"]:
        raise ConfigError("--assumption bsv needs at least one --lambda")
    if options["strata"] < 1:
        raise ConfigError("--strata must be >= 1")
    if options["reps"] < 0:
        raise ConfigError("--reps must be >= 0")


def _analysis_document(options) -> dict:
    _validate_request(options)
    frame, source = _load(options)
    probs = design_probs(frame, options["pw0z0"])
    rates = empirical_rates(frame)
    model, cov_names = _fit_model(frame, options)
    balance = compute_balance(frame, cov_names)
    logits = logit_scores(model, frame)
    assignment = strata_for_frame(frame, logits, options["strata"])
    lambdas = _resolve_lambdas(options, frame, balance)
    notes = {"subclassification_error": None}
    intervals = _whole_frame_intervals(rates, probs, frame.support, options, lambdas)
    strat = _stratified_intervals(frame, assignment, options, lambdas)
    points = _point_estimates(frame, model, assignment, options, notes)
    clamped = sum(
        int(e["clamped"]["lo"]) + int(e["clamped"]["hi"])
        for e in intervals
    )
    notes.update(
        {
            "clamped_intervals": clamped,
            "non_viable_strata": [s["stratum"] for s in strat["strata"] if not s["viable"]],
        }
    )
    treated = len(frame.sample_outcomes(1))
    control = len(frame.sample_outcomes(0))
    return {
        "meta": {
            "tool": "pibgen",
            "format_version": 1,
            "input": source,
            "seed": options["seed"],
            "options": {
                "strata": options["strata"],
                "pw0z0": options["pw0z0"],
                "framework": options["framework"],
                "assumptions": _assumptions(options),
                "reps": options["reps"],
            },
        },
        "frame": {
            "n_units": frame.n_units,
            "n_sample": frame.n_sample,
            "n_sample_treated": treated,
            "n_sample_control": control,
            "support": [frame.support.y_lo, frame.support.y_hi],
        },
        "design": {
            "p_z1": probs.p_z1,
            "p_w1_given_z1": probs.p_w1_given_z1,
            "p_w0_given_z0": probs.p_w0_given_z0,
        },
        "rates": {
            "e_y1_w1z1": rates.e_y1_w1z1,
            "e_y0_w0z1": rates.e_y0_w0z1,
            "e_y0_w0z0": rates.e_y0_w0z0,
        },
        "propensity": {
            "intercept": model.intercept,
            "coefficients": model.coefficients,
            "converged": model.converged,
            "iterations": model.iterations,
        },
        "balance": [
            {
                "covariate": row.covariate,
                "sample_mean": row.sample_mean,
                "population_mean": row.population_mean,
                "population_sd": row.population_sd,
                "asmd": row.asmd,
            }
            for row in balance.rows
        ],
        "lambda_report": lambda_report(frame, balance),
        "lambda_values": lambdas,
        "intervals": intervals,
        "stratum_intervals": strat,
        "point_estimates": points,
        "notes": notes,
    }


def _emit(document: dict, options) -> str:
    fmt = options["format"]
    if fmt == "json":
        return to_json(document)
    if fmt == "csv":
        return render_csv(document)
    return render_markdown(document)


# --- verify ---------------------------------------------------------------------


def _verify_checks(frame, tolerance=1e-12):
    """Yield (name, engine_interval, oracle_lo, oracle_hi) comparisons."""
    rates_f = empirical_rates(frame)
    rates_x = oracle_mod.exact_rates(frame)
    z0 = frame.z0_units()
    share = oracle_mod.bearing_share(frame) if z0 and frame.z0_outcomes() else Fraction(1, 2)
    probs_f = design_probs(frame, float(share))
    probs_x = oracle_mod.exact_design_probs(frame, share)
    support = frame.support
    exact = oracle_mod.EXACT_BINARY

    enum = oracle_mod.enumerate_worst_case(frame, "full")
    yield ("worst_case full",
           bounds_mod.worst_case_bounds(rates_f, probs_f, "full", support),
           bounds_mod.worst_case_bounds(rates_x, probs_x, "full", exact),
           enum.lo, enum.hi)
    if frame.z0_outcomes():
        enum = oracle_mod.enumerate_worst_case(frame, "reduced")
        yield ("worst_case reduced",
               bounds_mod.worst_case_bounds(rates_f, probs_f, "reduced", support),
               bounds_mod.worst_case_bounds(rates_x, probs_x, "reduced", exact),
               enum.lo, enum.hi)
    for lam in (Fraction(0), Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        enum = oracle_mod.enumerate_bsv(rates_x, probs_x, lam, "full", exact)
        yield (f"bsv full lambda={lam}",
               bounds_mod.bsv_bounds(rates_f, probs_f, "full", float(lam), support,
                                     intersect_support=True),
               bounds_mod.bsv_bounds(rates_x, probs_x, "full", lam, exact,
                                     intersect_support=True),
               enum.lo, enum.hi)
        if rates_x.e_y0_w0z0 is not None:
            enum = oracle_mod.enumerate_bsv(rates_x, probs_x, lam, "reduced", exact)
            yield (f"bsv reduced lambda={lam}",
                   bounds_mod.bsv_bounds(rates_f, probs_f, "reduced", float(lam), support,
                                         intersect_support=True),
                   bounds_mod.bsv_bounds(rates_x, probs_x, "reduced", lam, exact,
                                         intersect_support=True),
                   enum.lo, enum.hi)
    enum_max = oracle_mod.enumerate_mtr(frame, "sample")
    enum_min = oracle_mod.enumerate_mtr(frame, "sample", pin_free_to_zero=True)
    mtr_f = bounds_mod.mtr_bounds(rates_f, probs_f, "sample")
    mtr_x = bounds_mod.mtr_bounds(rates_x, probs_x, "sample")
    yield ("mtr sample max-variant",
           mtr_f.interval_max_variant, mtr_x.interval_max_variant, enum_max.lo, enum_max.hi)
    yield ("mtr sample min-variant",
           mtr_f.interval_min_variant, mtr_x.interval_min_variant, enum_min.lo, enum_min.hi)
    labeled = [u for u in z0 if u.w is not None]
    w0_bearing = all(u.y is not None for u in z0 if u.w == 0)
    if z0 and len(labeled) == len(z0) and w0_bearing and any(u.w == 0 for u in z0):
        share_w0 = Fraction(sum(1 for u in z0 if u.w == 0), len(z0))
        probs_fp = design_probs(frame, float(share_w0))
        probs_xp = oracle_mod.exact_design_probs(frame, share_w0)
        rates_xp = _rates_over_w0_labeled(frame, rates_x)
        rates_fp = _float_rates(rates_xp)
        enum_max = oracle_mod.enumerate_mtr(frame, "population")
        enum_min = oracle_mod.enumerate_mtr(frame, "population", pin_free_to_zero=True)
        mtr_f = bounds_mod.mtr_bounds(rates_fp, probs_fp, "population")
        mtr_x = bounds_mod.mtr_bounds(rates_xp, probs_xp, "population")
        yield ("mtr population max-variant",
               mtr_f.interval_max_variant, mtr_x.interval_max_variant, enum_max.lo, enum_max.hi)
        yield ("mtr population min-variant",
               mtr_f.interval_min_variant, mtr_x.interval_min_variant, enum_min.lo, enum_min.hi)


def _rates_over_w0_labeled(frame, rates_x):
    """Exact rates whose z=0 control mean runs over control-labeled units only."""
    from .frame import EmpiricalRates

    w0 = [u for u in frame.z0_units() if u.w == 0]
    q0 = Fraction(int(sum(u.y for u in w0)), len(w0))
    return EmpiricalRates(
        e_y1_w1z1=rates_x.e_y1_w1z1,
        e_y0_w0z1=rates_x.e_y0_w0z1,
        e_y0_w0z0=q0,
        pass1_w1z1=rates_x.pass1_w1z1,
        fail0_w0z1=rates_x.fail0_w0z1,
        fail0_w0z0=1 - q0,
    )


def _float_rates(rates):
    from .frame import EmpiricalRates

    def conv(v):
        return None if v is None else float(v)

    return EmpiricalRates(
        e_y1_w1z1=float(rates.e_y1_w1z1),
        e_y0_w0z1=float(rates.e_y0_w0z1),
        e_y0_w0z0=conv(rates.e_y0_w0z0),
        pass1_w1z1=conv(rates.pass1_w1z1),
        fail0_w0z1=conv(rates.fail0_w0z1),
        fail0_w0z0=conv(rates.fail0_w0z0),
    )


def cmd_verify(options, stream) -> int:
    frame, _ = _load(options)
    failures = 0
    for name, engine, exact_engine, oracle_lo, oracle_hi in _verify_checks(frame):
        exact_ok = (exact_engine.pre_clamp_lo == oracle_lo
                    and exact_engine.pre_clamp_hi == oracle_hi)
        float_ok = (abs(engine.pre_clamp_lo - float(oracle_lo)) <= 1e-12
                    and abs(engine.pre_clamp_hi - float(oracle_hi)) <= 1e-12)
        if exact_ok and float_ok:
            print(f"ok {name}: [{float(oracle_lo):.6f}, {float(oracle_hi):.6f}]", file=stream)
        else:
            failures += 1
            print(f"MISMATCH {name}", file=stream)
            print(f"  engine (float):    [{engine.pre_clamp_lo!r}, {engine.pre_clamp_hi!r}]",
                  file=stream)
            print(f"  engine (rational): [{exact_engine.pre_clamp_lo}, {exact_engine.pre_clamp_hi}]",
                  file=stream)
            print(f"  enumeration:       [{oracle_lo}, {oracle_hi}]", file=stream)
            print("  frame:", file=stream)
            for u in frame.units:
                print(f"    id={u.id} z={u.z} w={u.w} y={u.y}", file=stream)
    if failures:
        print(f"{failures} mismatch(es)", file=stream)
        return 1
    print("all oracle checks passed", file=stream)
    return 0


# --- entry point ------------------------------------------------------------------


def _run(args) -> int:
    options = _merge_config(args)
    out_path = options["out"]

    def write(text: str) -> None:
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    if args.command == "analyze":
        write(_emit(_analysis_document(options), options))
        return 0
    if args.command == "bounds":
        _validate_request(options)
        frame, source = _load(options)
        probs = design_probs(frame, options["pw0z0"])
        rates = empirical_rates(frame)
        balance = compute_balance(frame)
        lambdas = _resolve_lambdas(options, frame, balance)
        intervals = _whole_frame_intervals(rates, probs, frame.support, options, lambdas)
        document = {
            "meta": {"tool": "pibgen", "input": source, "seed": options["seed"]},
            "frame": {
                "n_units": frame.n_units,
                "n_sample": frame.n_sample,
                "n_sample_treated": len(frame.sample_outcomes(1)),
                "n_sample_control": len(frame.sample_outcomes(0)),
                "support": [frame.support.y_lo, frame.support.y_hi],
            },
            "intervals": intervals,
        }
        write(_emit(document, options))
        return 0
    if args.command == "propensity":
        frame, _ = _load(options)
        model, _names = _fit_model(frame, options)
        write(model_to_json(model) + "\n")
        return 0
    if args.command == "strata":
        frame, _ = _load(options)
        model, _names = _fit_model(frame, options)
        assignment = strata_for_frame(frame, logit_scores(model, frame), options["strata"])
        if options["format"] == "json":
            write(to_json({"strata": stratum_summary_rows(assignment)}))
        else:
            write(stratum_summary_csv(assignment))
        return 0
    if args.command == "lambda":
        frame, _ = _load(options)
        balance = compute_balance(frame)
        rows = lambda_report(frame, balance)
        if options["format"] == "json":
            write(to_json({"lambda_report": rows}))
        else:
            lines = ["rule,value"] + [f"{r['rule']},{r['value']!r}" for r in rows]
            write("\n".join(lines) + "\n")
        return 0
    if args.command == "points":
        frame, source = _load(options)
        model, _names = _fit_model(frame, options)
        assignment = strata_for_frame(frame, logit_scores(model, frame), options["strata"])
        notes = {"subclassification_error": None}
        points = _point_estimates(frame, model, assignment, options, notes)
        document = {
            "meta": {"tool": "pibgen", "input": source, "seed": options["seed"]},
            "point_estimates": points,
            "notes": notes,
        }
        write(_emit(document, options))
        return 0
    if args.command == "verify":
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                return cmd_verify(options, fh)
        return cmd_verify(options, sys.stdout)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PibgenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
