"""
Command-line front end.

Usage:
    robust-xbar factors --n-min 2 --n-max 30 --reps 1000000 --seed 42 --out factors.json
    robust-xbar limits --data piston_rings.csv --method III --pooling C --nk 5
    robust-xbar simulate-re --config scenario_a.conf --out results/scenario_a
    robust-xbar simulate-arl --config plan5.conf --out results/plan5
    robust-xbar sensitivity --data piston_rings.csv --start 73 --stop 74 --step 0.1 --out sweep.csv
"""

import logging
import os
import sys
from dataclasses import asdict
from typing import List, Optional, Sequence, Tuple

import click
from dotenv import load_dotenv

from robust_xbar import __version__
from robust_xbar.charts import DEFAULT_G, Method, control_limits, phase1_estimate, pooled_variance_limits
from robust_xbar.cli.datasets import read_dataset, summarize_dataset
from robust_xbar.cli.svg import sweep_svg, write_svg, xbar_chart_svg
from robust_xbar.cli.writers import (
    dumps_json,
    limits_csv,
    limits_document,
    range_lines,
    sweep_csv,
    write_report,
)
from robust_xbar.core.errors import RobustXbarError
from robust_xbar.core.files import atomic_write_text
from robust_xbar.core.types import ALL_ESTIMATORS, Estimator, LocationKind, ScaleKind, parse_estimator
from robust_xbar.factors.store import FactorTableStore
from robust_xbar.factors.table import FactorTable, build_table, load_table, save_table
from robust_xbar.ledger import configure_ledger, get_store, step
from robust_xbar.pooling import PoolingType
from robust_xbar.sensitivity import (
    MODE_APPEND,
    MODE_REPLACE,
    SensitivitySweepSpec,
    limit_ranges,
    sensitivity_sweep,
)
from robust_xbar.simulation.config import ScenarioConfig, load_config
from robust_xbar.simulation.efficiency import efficiency_study, study_cells
from robust_xbar.simulation.run_length import run_length_grid

logger = logging.getLogger("robust_xbar.cli")

FACTORS_ENV = "SPC_FACTORS"
DEFAULT_FACTOR_REPLICATIONS = 1_000_000
DEFAULT_FACTOR_SEED = 42

METHOD_CHOICE = click.Choice(["I", "II", "III", "1", "2", "3"], case_sensitive=False)
POOLING_CHOICE = click.Choice([p.value for p in PoolingType], case_sensitive=False)
HL_CHOICE = click.Choice([k.value for k in LocationKind if k.is_hodges_lehmann], case_sensitive=False)


class RobustXbarGroup(click.Group):
    """Reports library errors as one line on stderr with their exit code."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except RobustXbarError as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"error: {e}", err=True)
            ctx.exit(e.exit_code)


def _parse_estimators(value: str) -> Tuple[Estimator, ...]:
    names = [part.strip() for part in value.split(",") if part.strip()]
    if not names or names == ["all"]:
        return ALL_ESTIMATORS
    try:
        return tuple(dict.fromkeys(parse_estimator(name) for name in names))
    except RobustXbarError as e:
        raise click.BadParameter(str(e), param_hint="--estimators") from None


def _resolve_table(
    paths: Sequence[str],
    estimators: Sequence[Estimator],
    sizes: Sequence[int],
    extra: Sequence[Tuple[Estimator, int]],
    replications: int,
    seed: int,
    workers: int = 1,
) -> FactorTable:
    """Load the given tables (the first one primary), or build-or-load from the cache."""
    if paths:
        table = load_table(paths[0])
        if len(paths) > 1:
            table = table.with_supplements(*(load_table(p) for p in paths[1:]))
        return table
    return FactorTableStore().ensure_table(estimators, sizes, replications, seed, workers=workers, extra=extra)


def _pooled_mad_entry(method: Method, pooling: PoolingType, total: int) -> List[Tuple[Estimator, int]]:
    return [(ScaleKind.MAD, total)] if method is Method.II and pooling is PoolingType.D else []


@click.group(cls=RobustXbarGroup)
@click.version_option(__version__, prog_name="robust-xbar")
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
@click.option(
    "--ledger",
    "ledger_path",
    type=click.Path(dir_okay=False),
    envvar="SPC_LEDGER",
    help="Record provenance in this SQLite file.",
)
def cli(verbose: bool, ledger_path: Optional[str]) -> None:
    """Robust X-bar control charts for Phase-I subgroups of unequal sizes."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )
    if ledger_path:
        configure_ledger("sqlite", database_path=ledger_path)


@cli.command()
@click.option("--estimators", default="all", show_default=True, help="Comma-separated estimator names.")
@click.option("--n-min", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--n-max", type=click.IntRange(min=2), default=30, show_default=True)
@click.option("--reps", type=click.IntRange(min=1), default=DEFAULT_FACTOR_REPLICATIONS, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=DEFAULT_FACTOR_SEED, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Factor table JSON file.")
def factors(estimators: str, n_min: int, n_max: int, reps: int, seed: int, workers: int, out: str) -> None:
    """Build a factor table and save it."""
    if n_min > n_max:
        raise click.UsageError(f"--n-min {n_min} exceeds --n-max {n_max}")
    chosen = _parse_estimators(estimators)
    with step("cli.factors", attributes={"out": out}):
        table = build_table(chosen, (n_min, n_max), reps, seed, workers=workers)
        save_table(table, out)
    click.echo(f"{'estimator':<9} {'n':>3} {'gamma':>12} {'var_std':>12} {'gamma2/tau2':>12}  source")
    for entry in table.sorted_entries():
        ratio = "-"
        if isinstance(entry.estimator, ScaleKind):
            ratio = f"{table.squared_factor_ratio(entry.estimator, entry.n):.6f}"
        click.echo(
            f"{entry.estimator.value:<9} {entry.n:>3} {entry.gamma:>12.6f} "
            f"{entry.var_std:>12.6f} {ratio:>12}  {entry.source}"
        )
    click.echo(f"Wrote {len(table.entries)} entries to {out} ({table.fingerprint})", err=True)


def _factor_options(func):
    func = click.option(
        "--factor-seed", type=click.IntRange(min=0), default=DEFAULT_FACTOR_SEED, show_default=True,
        help="Seed for a table built on demand.",
    )(func)
    func = click.option(
        "--factor-reps", type=click.IntRange(min=1), default=DEFAULT_FACTOR_REPLICATIONS, show_default=True,
        help="Replications for a table built on demand.",
    )(func)
    func = click.option(
        "--factors", "factor_paths", multiple=True, type=click.Path(dir_okay=False), envvar=FACTORS_ENV,
        help="Factor table file; repeat to add supplement tables. Built and cached when absent.",
    )(func)
    return func


@cli.command()
@click.option("--data", type=click.Path(dir_okay=False), required=True, help="Dataset CSV (sample_id,value).")
@click.option("--method", type=METHOD_CHOICE, default="I", show_default=True)
@click.option("--pooling", type=POOLING_CHOICE, default="C", show_default=True)
@click.option("--nk", type=click.IntRange(min=1), default=5, show_default=True, help="Phase-II subgroup size.")
@click.option("--g", type=float, default=DEFAULT_G, show_default=True, help="Limit width in standard errors.")
@click.option("--format", "output_format", type=click.Choice(["json", "csv", "svg"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Output file (stdout when omitted, except svg).")
@click.option(
    "--pooled-variance", is_flag=True,
    help="Also report the classical limits from the square root of the pooled sample variance.",
)
@click.option("--hl-variant", type=HL_CHOICE, default="HL1", hidden=True)
@_factor_options
def limits(
    data: str,
    method: str,
    pooling: str,
    nk: int,
    g: float,
    output_format: str,
    out: Optional[str],
    hl_variant: str,
    pooled_variance: bool,
    factor_paths: Tuple[str, ...],
    factor_reps: int,
    factor_seed: int,
) -> None:
    """Phase-I control limits of a dataset."""
    if output_format == "svg" and not out:
        raise click.UsageError("--format svg needs --out")
    chosen_method = Method.parse(method)
    chosen_pooling = PoolingType.parse(pooling)
    variant = LocationKind.parse(hl_variant)
    samples = read_dataset(data)
    summary = summarize_dataset(samples)

    with step("cli.limits", attributes={"data": data, "method": method, "pooling": pooling, "nk": nk}) as s:
        table = _resolve_table(
            factor_paths,
            [chosen_method.location(variant), chosen_method.scale],
            summary.sizes,
            _pooled_mad_entry(chosen_method, chosen_pooling, summary.observations),
            factor_reps,
            factor_seed,
        )
        estimate = phase1_estimate(samples, chosen_method, chosen_pooling, table, hl_variant=variant)
        chart = control_limits(estimate, nk, g)
        document = limits_document(estimate, chart)
        s.save_artifact("limits", document, "json")
        if pooled_variance:
            classical = pooled_variance_limits(samples, nk, g)
            s.save_artifact("pooled_variance_limits", asdict(classical), "json")
            click.echo(
                f"pooled variance: LCL={classical.lcl!r} CL={classical.cl!r} UCL={classical.ucl!r}", err=True
            )

    if output_format == "svg":
        title = f"Method-{chosen_method.value}, type {chosen_pooling.value}, nk={nk}"
        write_svg(xbar_chart_svg(samples, chart, title=title), out)
        click.echo(f"LCL={chart.lcl!r} CL={chart.cl!r} UCL={chart.ucl!r}")
        return
    text = dumps_json(document) if output_format == "json" else limits_csv(estimate, chart)
    if out:
        atomic_write_text(out, text)
    else:
        click.echo(text, nl=False)


def _config_table(
    config: ScenarioConfig,
    config_path: str,
    factor_paths: Tuple[str, ...],
    estimators: Sequence[Estimator],
    extra: Sequence[Tuple[Estimator, int]],
) -> FactorTable:
    paths: Sequence[str] = factor_paths
    if not paths and config.factors:
        base = os.path.dirname(os.path.abspath(config_path))
        paths = [os.path.join(base, config.factors)]
    return _resolve_table(
        paths,
        estimators,
        config.sizes,
        extra,
        config.factor_replications,
        config.factor_seed,
        workers=config.workers,
    )


@cli.command("simulate-re")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Output prefix for .json and .csv.")
@click.option("--factors", "factor_paths", multiple=True, type=click.Path(dir_okay=False), envvar=FACTORS_ENV)
def simulate_re(config_path: str, out: str, factor_paths: Tuple[str, ...]) -> None:
    """Efficiency study of pooled estimators."""
    config = load_config(config_path)
    cells = study_cells(config)
    estimators = list(dict.fromkeys(e for e, _ in cells))
    extra = [(ScaleKind.MAD, config.total_size)] if (ScaleKind.MAD, PoolingType.D) in cells else []
    with step("cli.simulate_re", attributes={"config": config.describe()}) as s:
        table = _config_table(config, config_path, factor_paths, estimators, extra)
        report = efficiency_study(config, table)
        json_path, csv_path = write_report(report, out)
        s.save_artifact("report", report.to_dict(), "json")
    click.echo(f"Wrote {json_path} and {csv_path}", err=True)


@cli.command("simulate-arl")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Output prefix for .json and .csv.")
@click.option("--factors", "factor_paths", multiple=True, type=click.Path(dir_okay=False), envvar=FACTORS_ENV)
def simulate_arl(config_path: str, out: str, factor_paths: Tuple[str, ...]) -> None:
    """Run-length study of X-bar charts with estimated limits."""
    config = load_config(config_path)
    estimators: List[Estimator] = []
    for method in config.methods:
        estimators += [method.location(config.hl_variant), method.scale]
    with step("cli.simulate_arl", attributes={"config": config.describe()}) as s:
        table = _config_table(config, config_path, factor_paths, list(dict.fromkeys(estimators)), [])
        report = run_length_grid(config, table)
        json_path, csv_path = write_report(report, out)
        s.save_artifact("report", report.to_dict(), "json")
    click.echo(f"Wrote {json_path} and {csv_path}", err=True)


@cli.command()
@click.option("--data", type=click.Path(dir_okay=False), required=True, help="Dataset CSV (sample_id,value).")
@click.option("--start", type=float, default=73.0, show_default=True)
@click.option("--stop", type=float, default=74.0, show_default=True)
@click.option("--step", "step_size", type=float, default=0.1, show_default=True)
@click.option("--sample", type=click.IntRange(min=1), default=1, show_default=True, help="1-based target subgroup.")
@click.option("--observation", type=click.IntRange(min=1), help="1-based observation shifted by --replace (last by default).")
@click.option("--methods", default="I,II,III", show_default=True, help="Comma-separated methods.")
@click.option("--pooling", type=POOLING_CHOICE, default="C", show_default=True)
@click.option("--nk", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--g", type=float, default=DEFAULT_G, show_default=True)
@click.option("--replace", "replace_mode", is_flag=True, help="Shift an existing observation instead of appending one.")
@click.option("--out", type=click.Path(dir_okay=False), help="Sweep CSV (stdout when omitted).")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Plot of the limit curves.")
@_factor_options
def sensitivity(
    data: str,
    start: float,
    stop: float,
    step_size: float,
    sample: int,
    observation: Optional[int],
    methods: str,
    pooling: str,
    nk: int,
    g: float,
    replace_mode: bool,
    out: Optional[str],
    svg_path: Optional[str],
    factor_paths: Tuple[str, ...],
    factor_reps: int,
    factor_seed: int,
) -> None:
    """Control limits as one contaminated observation sweeps a grid of values."""
    names = [part.strip() for part in methods.split(",") if part.strip()]
    if not names:
        raise click.UsageError("--methods selects no method")
    try:
        chosen = tuple(dict.fromkeys(Method.parse(name) for name in names))
    except RobustXbarError as e:
        raise click.BadParameter(str(e), param_hint="--methods") from None
    if observation is not None and not replace_mode:
        raise click.UsageError("--observation applies to --replace only")

    samples = read_dataset(data)
    spec = SensitivitySweepSpec(
        start=start,
        stop=stop,
        step=step_size,
        sample_index=sample,
        observation_index=observation,
        methods=chosen,
        pooling=PoolingType.parse(pooling),
        mode=MODE_REPLACE if replace_mode else MODE_APPEND,
    )
    summary = summarize_dataset(samples)
    sizes = list(summary.sizes)
    total = summary.observations
    if spec.mode == MODE_APPEND and sample <= len(sizes):
        sizes.append(sizes[sample - 1] + 1)
        total += 1
    estimators: List[Estimator] = []
    extra: List[Tuple[Estimator, int]] = []
    for method in chosen:
        estimators += [method.location(), method.scale]
        extra += _pooled_mad_entry(method, spec.pooling, total)

    with step("cli.sensitivity", attributes={"data": data, "mode": spec.mode}) as s:
        table = _resolve_table(
            factor_paths, list(dict.fromkeys(estimators)), sizes, extra, factor_reps, factor_seed
        )
        rows = sensitivity_sweep(samples, spec, table, n_k=nk, g=g)
        text = sweep_csv(rows)
        s.save_artifact("sweep", text, "csv")

    if out:
        atomic_write_text(out, text)
    else:
        click.echo(text, nl=False)
    if svg_path:
        write_svg(sweep_svg(rows, title=f"Sensitivity of the limits ({spec.mode}, type {spec.pooling.value})"), svg_path)
    for line in range_lines(limit_ranges(rows)):
        click.echo(line, err=True)


@cli.command()
@click.option("--data", type=click.Path(dir_okay=False), required=True, help="Dataset CSV (sample_id,value).")
def validate(data: str) -> None:
    """Check a dataset against the sample_id,value schema."""
    summary = summarize_dataset(read_dataset(data))
    sizes = ",".join(str(n) for n in summary.sizes)
    click.echo(f"ok: {summary.subgroups} subgroups, {summary.observations} observations, sizes {sizes}")
    small = [i + 1 for i, n in enumerate(summary.sizes) if n < 2]
    if small:
        click.echo(f"warning: subgroups {small} have fewer than 2 observations", err=True)


@cli.command()
@click.argument("run_id", required=False)
def ledger(run_id: Optional[str]) -> None:
    """List recorded runs, or print one run as JSON."""
    store = get_store()
    if run_id is None:
        for run in store.list_runs():
            click.echo(f"{run['run_id']}  {run['name']}")
        return
    run = store.get_run(run_id)
    if not run["events"]:
        raise click.UsageError(f"no run {run_id!r} in the ledger")
    click.echo(dumps_json(run), nl=False)


def main() -> None:
    load_dotenv()
    cli(prog_name="robust-xbar")


if __name__ == "__main__":
    main()
