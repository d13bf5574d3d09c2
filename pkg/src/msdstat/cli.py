"""Command-line surface for the pairwise median scaled difference toolkit.

Exit codes: 0 success, 2 usage errors, 3 input/validation problems
(including unreadable or unwritable paths), 4 numeric failures.
"""
from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from .bootstrap import BootstrapConfig, BootstrapReport, bootstrap_msd
from .datasets import load_study
from .distribution import quantile
from .errors import ConvergenceError, DataError, DomainError, TableRangeError
from .simulation import (
    calibrate_pwch_quantile,
    simulate_hetero_guideline,
    simulate_multi_quantiles,
    simulate_power,
    simulate_resistance,
)
from .statistic import msd
from .tables import (
    build_table,
    default_table,
    interp_quantile,
    load_table,
    multi_quantile_adjusted,
    save_table,
)

TABLES_ENV = "MSD_TABLES_DIR"
_LEVELS = (0.95, 0.99)


def _run(fn):
    # map library failures onto the documented exit codes
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConvergenceError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(4)
        except (DataError, DomainError, TableRangeError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
    return wrapper


@click.group()
@click.version_option(package_name="msdstat", prog_name="msd")
def entrypoint():
    """Flag anomalous results in location/uncertainty data.

    The statistic per observation is the median of its scaled differences
    against every other observation; critical values come from the exact
    sampling distribution, interpolation tables, or a parametric bootstrap.
    """


def _tables_dir(flag_value) -> Path | None:
    if flag_value is not None:
        return Path(flag_value)
    env = os.environ.get(TABLES_ENV)
    return Path(env) if env else None


def _table_for(n: int, tables: Path | None):
    parity = "even" if n % 2 == 0 else "odd"
    if tables is None:
        return default_table(parity)
    return load_table(tables / f"msd_table_{parity}.csv")


def _critical_values(n: int, mode: str, tables: Path | None):
    """One critical value per reporting level, plus a provenance note."""
    if tables is None and mode == "multiple":
        # exact inversion of the per-dataset adjusted probability
        return tuple(multi_quantile_adjusted(n, p) for p in _LEVELS), "exact"
    if tables is None:
        return tuple(quantile(p, n) for p in _LEVELS), "exact"
    table = _table_for(n, tables)
    adjusted = [p ** (1.0 / n) if mode == "multiple" else p for p in _LEVELS]
    return tuple(interp_quantile(table, n, p) for p in adjusted), str(tables)


def _p_json(p) -> dict:
    return {"value": p.value, "upper_bound": p.is_upper_bound, "text": str(p)}


def _bootstrap_json(report: BootstrapReport, label: str) -> dict:
    row = report.by_label(label)
    return {
        "quantiles": {f"{lv:g}": q for lv, q in zip(report.levels, row.quantiles)},
        "p_raw": _p_json(row.p_raw),
        "p_holm": _p_json(row.p_holm),
        "p_bh": _p_json(row.p_bh),
    }


def _mark(flag: bool) -> str:
    return "*" if flag else "-"


@entrypoint.command()
@click.argument("input_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--bootstrap", "bootstrap_b", type=int, default=0,
              help="Bootstrap replicates; 0 disables the bootstrap block.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Random seed for the bootstrap.")
@click.option("--mode", type=click.Choice(["single", "multiple"]),
              default="multiple", show_default=True,
              help="Quantile family the 95%/99% flags compare against.")
@click.option("--adjust", type=click.Choice(["holm", "bh"]), default="bh",
              show_default=True,
              help="Adjusted p-value column shown in text output.")
@click.option("--tables", type=click.Path(file_okay=False, path_type=Path),
              default=None,
              help=f"Interpolation-table directory (default: exact "
                   f"distribution, or ${TABLES_ENV} when set).")
@click.option("--format", "fmt", type=click.Choice(["text", "structured"]),
              default="text", show_default=True)
@_run
def analyze(input_path, bootstrap_b, seed, mode, adjust, tables, fmt):
    """Score every observation in a study file and flag anomalies."""
    ds = load_study(input_path)
    scores = msd(ds).by_label()
    tables = _tables_dir(tables)
    crit, provenance = _critical_values(ds.n, mode, tables)
    report = None
    if bootstrap_b:
        report = bootstrap_msd(ds, BootstrapConfig(
            replicates=bootstrap_b, seed=seed, levels=_LEVELS))

    rows = []
    for obs in ds.observations:
        qe = scores[obs.label]
        rows.append({
            "lab": obs.label,
            "value": obs.value,
            "u": obs.uncertainty,
            "q_e": qe,
            "above_95": bool(qe > crit[0]),
            "above_99": bool(qe > crit[1]),
            "above_2_0": bool(qe > 2.0),
            "above_2_5": bool(qe > 2.5),
            "bootstrap": (_bootstrap_json(report, obs.label)
                          if report is not None else None),
        })

    if fmt == "structured":
        doc = {
            "kind": "msd-analysis",
            "schema_version": 1,
            "n": ds.n,
            "parity": "even" if ds.n % 2 == 0 else "odd",
            "mode": mode,
            "tables": provenance,
            "critical_values": {f"{p:g}": c for p, c in zip(_LEVELS, crit)},
            "thresholds": {"inspect": 2.0, "screen": 2.5},
            "adjust": adjust,
            "seed": seed if report is not None else None,
            "bootstrap_replicates": bootstrap_b or None,
            "results": rows,
        }
        click.echo(json.dumps(doc, indent=2))
        return

    click.echo(f"{ds.n} results ({'even' if ds.n % 2 == 0 else 'odd'}); "
               f"mode={mode}; critical values ({provenance}): "
               f"95% {crit[0]:.4f}, 99% {crit[1]:.4f}")
    click.echo("rules of thumb: inspect above 2.0, strict screen above 2.5")
    click.echo("")
    click.echo(f"{'lab':<8} {'value':>12} {'u':>10} {'q_e':>8}  "
               f">95% >99% >2.0 >2.5")
    for row in rows:
        click.echo(
            f"{row['lab']:<8} {row['value']:>12g} {row['u']:>10g} "
            f"{row['q_e']:>8.3f}  {_mark(row['above_95']):>4} "
            f"{_mark(row['above_99']):>4} {_mark(row['above_2_0']):>4} "
            f"{_mark(row['above_2_5']):>4}")
    if report is not None:
        click.echo("")
        click.echo(f"bootstrap: B={report.replicates} seed={report.seed} "
                   f"adjusted by {adjust}")
        click.echo(f"{'lab':<8} {'q*(0.95)':>10} {'q*(0.99)':>10} "
                   f"{'p_raw':>10} {'p_' + adjust:>10}")
        for obs in ds.observations:
            brow = report.by_label(obs.label)
            adj = brow.p_holm if adjust == "holm" else brow.p_bh
            click.echo(f"{obs.label:<8} {brow.quantiles[0]:>10.4f} "
                       f"{brow.quantiles[1]:>10.4f} {str(brow.p_raw):>10} "
                       f"{str(adj):>10}")


@entrypoint.command("bootstrap")
@click.argument("input_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("-B", "--replicates", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "structured"]),
              default="text", show_default=True)
@_run
def bootstrap_cmd(input_path, replicates, seed, fmt):
    """Case-specific bootstrap quantiles and p-values for a study file."""
    ds = load_study(input_path)
    report = bootstrap_msd(ds, BootstrapConfig(
        replicates=replicates, seed=seed, levels=_LEVELS))
    if fmt == "structured":
        doc = {
            "kind": "msd-bootstrap",
            "schema_version": 1,
            "n": ds.n,
            "replicates": report.replicates,
            "seed": report.seed,
            "levels": list(report.levels),
            "quantile_method": report.quantile_method,
            "results": [{
                "lab": row.label,
                "q_e": row.statistic,
                **_bootstrap_json(report, row.label),
            } for row in report.rows],
        }
        click.echo(json.dumps(doc, indent=2))
        return
    click.echo(f"bootstrap: B={report.replicates} seed={report.seed}")
    click.echo(f"{'lab':<8} {'q_e':>8} {'q*(0.95)':>10} {'q*(0.99)':>10} "
               f"{'p_raw':>10} {'p_holm':>10} {'p_bh':>10}")
    for row in report.rows:
        click.echo(f"{row.label:<8} {row.statistic:>8.3f} "
                   f"{row.quantiles[0]:>10.4f} {row.quantiles[1]:>10.4f} "
                   f"{str(row.p_raw):>10} {str(row.p_holm):>10} "
                   f"{str(row.p_bh):>10}")


@entrypoint.command("quantile")
@click.option("--n", type=click.IntRange(min=3), required=True,
              help="Number of observations in the study.")
@click.option("--p", type=click.FloatRange(0.0, 1.0, min_open=True,
                                           max_open=True), required=True)
@click.option("--mode", type=click.Choice(["single", "multiple"]),
              default="multiple", show_default=True,
              help="'multiple' adjusts p for a whole-dataset screen.")
@click.option("--method", type=click.Choice(["exact", "table"]),
              default="exact", show_default=True)
@_run
def quantile_cmd(n, p, mode, method):
    """Print a critical value of the statistic under exchangeable data."""
    if method == "exact":
        value = multi_quantile_adjusted(n, p) if mode == "multiple" \
            else quantile(p, n)
    else:
        table = _table_for(n, _tables_dir(None))
        adjusted = p ** (1.0 / n) if mode == "multiple" else p
        value = interp_quantile(table, n, adjusted)
    click.echo(f"{value:.6g}")


@entrypoint.group()
def tables():
    """Build and inspect the quantile interpolation tables."""


@tables.command("generate")
@click.option("--parity", type=click.Choice(["even", "odd", "both"]),
              default="both", show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path),
              required=True, help="Directory the table files are written to.")
@click.option("--max-n", type=click.IntRange(min=3), default=None,
              help="Cap on the tabulated sizes, for quick partial builds.")
@_run
def tables_generate(parity, out, max_n):
    """Rebuild the interpolation tables from the exact distribution."""
    out.mkdir(parents=True, exist_ok=True)
    parities = ("even", "odd") if parity == "both" else (parity,)
    for par in parities:
        table = build_table(par, max_n=max_n)
        path = out / f"msd_table_{par}.csv"
        save_table(table, path)
        click.echo(f"wrote {path}")


def _parse_grid(ctx, param, value):
    try:
        parts = [float(t) for t in value.split(":")]
        lo, hi, step = parts
        if step <= 0 or hi < lo:
            raise ValueError
    except ValueError:
        raise click.BadParameter("expected LO:HI:STEP with STEP > 0")
    return tuple(np.arange(lo, hi + 0.5 * step, step))


def _parse_sizes(ctx, param, value):
    try:
        sizes = tuple(int(t) for t in value.split(","))
        if not sizes:
            raise ValueError
    except ValueError:
        raise click.BadParameter("expected a comma-separated list of sizes")
    return sizes


def _emit(lines, out: Path | None):
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text)
        click.echo(f"wrote {out}")


def _default_critical(statistic: str, n: int, seed: int) -> float:
    if statistic == "msd":
        return quantile(0.95, n)
    return calibrate_pwch_quantile(n, 0.95, 200_000, seed)


@entrypoint.group()
def simulate():
    """Seeded Monte Carlo studies; output is plot-ready delimited text."""


@simulate.command("table3")
@click.option("--n", type=click.IntRange(min=3), required=True)
@click.option("--p", type=click.FloatRange(0.0, 1.0, min_open=True,
                                           max_open=True), default=0.95,
              show_default=True)
@click.option("--replicates", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              default=None)
@_run
def simulate_table3(n, p, replicates, seed, out):
    """Empirical multiple-observation critical value for one study size."""
    (est,) = simulate_multi_quantiles(n, (p,), replicates, seed)
    _emit([
        f"# multiple-observation quantile; replicates={replicates} seed={seed}",
        "n,p,estimate,std_error",
        f"{n},{p:g},{est.value!r},{est.std_error!r}",
    ], out)


def _power_like(kind, runner, statistic, n, grid, replicates, seed, critical,
                out):
    if critical is None:
        critical = _default_critical(statistic, n, seed)
    curve = runner(statistic, n, grid, replicates, seed, critical)
    lines = [
        f"# {kind}; statistic={statistic} n={n} replicates={replicates} "
        f"seed={seed} critical={critical!r}",
        "delta,proportion,std_error",
    ]
    lines += [f"{d:g},{float(p)!r},{float(s)!r}" for d, p, s in
              zip(curve.grid, curve.proportion, curve.std_error)]
    _emit(lines, out)


_POWER_OPTIONS = (
    click.option("--stat", "statistic", type=click.Choice(["msd", "pwch"]),
                 default="msd", show_default=True),
    click.option("--n", type=click.IntRange(min=3), default=10,
                 show_default=True),
    click.option("--replicates", type=int, default=10_000, show_default=True),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--critical", type=float, default=None,
                 help="Detection threshold (default: the 95% critical value, "
                      "exact for msd, self-calibrated for pwch)."),
    click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
                 default=None),
)


def _with_power_options(fn):
    for option in reversed(_POWER_OPTIONS):
        fn = option(fn)
    return fn


@simulate.command("power")
@click.option("--grid", callback=_parse_grid, default="0:5:0.25",
              show_default=True, help="Subject displacement grid LO:HI:STEP.")
@_with_power_options
@_run
def simulate_power_cmd(grid, statistic, n, replicates, seed, critical, out):
    """Detection rate as the subject observation is displaced."""
    _power_like("power", simulate_power, statistic, n, grid, replicates,
                seed, critical, out)


@simulate.command("resistance")
@click.option("--grid", callback=_parse_grid, default="-8:8:1",
              show_default=True,
              help="Contaminant displacement grid LO:HI:STEP.")
@_with_power_options
@_run
def simulate_resistance_cmd(grid, statistic, n, replicates, seed, critical,
                            out):
    """False-alarm rate on a null subject while another value wanders."""
    _power_like("resistance", simulate_resistance, statistic, n, grid,
                replicates, seed, critical, out)


@simulate.command("hetero")
@click.option("--sizes", callback=_parse_sizes, default="5,10,15,20,25",
              show_default=True)
@click.option("--replicates", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              default=None)
@_run
def simulate_hetero(sizes, replicates, seed, out):
    """Rule-of-thumb exceedance rates under chi-squared(3) variances."""
    study = simulate_hetero_guideline(sizes, replicates, seed)
    lines = [
        f"# guideline exceedance rates; replicates={replicates} seed={seed}",
        "n,value_rate,value_se,dataset_rate,dataset_se",
    ]
    lines += [
        f"{n},{float(vr)!r},{float(vs)!r},{float(dr)!r},{float(ds)!r}"
        for n, vr, vs, dr, ds in zip(study.sizes, study.value_rate,
                                     study.value_se, study.dataset_rate,
                                     study.dataset_se)]
    _emit(lines, out)
