"""Batch command-line interface.

Exit codes: 0 success, 2 validation failure, 3 non-convergence, 1 other.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .accounting import TABLE3_HEADER, compare_runs
from .calibration import calibrate_dataset
from .costs import BehaviourParams, CostDistribution
from .dataset import load_dataset, validate_dataset
from .dynamics import SimConfig, simulate_run
from .errors import DatasetError, HeatmixError, NonConvergenceError, ValidationError
from .results import RunResult, export_results
from .scenario import PRESET_IDS, ScenarioSpec, preset_scenario, sensitivity_suite
from .synth import make_synthetic_dataset

logger = logging.getLogger(__name__)


def _build_config(from_year, to_year, dt, scrapping, payback_mean, payback_sd, discount_rate) -> SimConfig:
    return SimConfig(
        start_year=from_year,
        end_year=to_year,
        dt=dt,
        scrapping_enabled=scrapping,
        behaviour=BehaviourParams(
            discount_rate=discount_rate,
            payback_threshold=CostDistribution(payback_mean, payback_sd),
        ),
    )


def _load_scenario(arg: str, dataset) -> ScenarioSpec:
    if arg.lower() in PRESET_IDS and len(arg) == 1:
        return preset_scenario(arg.lower(), kick_start_regions=dataset.flagged_regions())
    path = Path(arg)
    if not path.exists():
        raise ValidationError(f"scenario '{arg}' is neither a preset a-j nor an existing file")
    return ScenarioSpec.from_dict(json.loads(path.read_text()))


def _write_gamma_csv(path: Path, gammas) -> None:
    lines = ["region,tech_id,gamma_cent_per_kwh,provenance"]
    for region, tech_id, value, prov in gammas.to_rows():
        lines.append(f"{region},{tech_id},{repr(value * 100.0)},{prov}")
    path.write_text("\n".join(lines) + "\n")


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--scenario", "scenario_arg", required=True, help="Preset id a-j or a scenario JSON file.")
@click.option("--from", "from_year", default=2015, show_default=True)
@click.option("--to", "to_year", default=2050, show_default=True)
@click.option("--dt", default=0.25, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--workers", default=1, show_default=True)
@click.option("--scrapping/--no-scrapping", default=True, show_default=True)
@click.option("--payback-mean", default=3.0, show_default=True)
@click.option("--payback-sd", default=1.0, show_default=True)
@click.option("--discount-rate", default=0.09, show_default=True)
@click.option("--format", "fmt", default="all", type=click.Choice(["csv", "structured", "all"]))
def simulate(data_dir, scenario_arg, from_year, to_year, dt, out_dir, workers,
             scrapping, payback_mean, payback_sd, discount_rate, fmt):
    """Run one scenario and export the results."""
    dataset = load_dataset(data_dir)
    scenario = _load_scenario(scenario_arg, dataset)
    config = _build_config(from_year, to_year, dt, scrapping, payback_mean, payback_sd, discount_rate)
    run = simulate_run(dataset, scenario, config, workers=workers)
    written = export_results(run, out_dir, fmt)
    click.echo(f"scenario {scenario.id}: wrote {len(written)} file(s) to {out_dir}")


@cli.command()
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False))
@click.option("--region", "region", default=None, help="Calibrate a single region only.")
def calibrate(data_dir, out_file, region):
    """Fit intangible cost terms against the historical diffusion trends."""
    dataset = load_dataset(data_dir)
    config = SimConfig()
    if region is not None:
        if region not in dataset.regions:
            raise ValidationError(f"unknown region '{region}'")
        from .calibration import auto_calibrate
        from .costs import GammaVector

        res = auto_calibrate(dataset, region, config)
        gammas = GammaVector(dataset.tech_ids)
        gammas.set_region(region, res.gamma, res.provenance)
        converged = res.converged
    else:
        cal = calibrate_dataset(dataset, config)
        gammas, converged = cal.gammas, cal.converged
    _write_gamma_csv(Path(out_file), gammas)
    click.echo(f"wrote {out_file}")
    if not converged:
        raise NonConvergenceError("calibration residuals above tolerance; best-found values written")


@cli.command()
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--base", "base_preset", required=True, help="Preset id a-j used as the base scenario.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def sensitivity(data_dir, base_preset, out_dir):
    """Run the parameter-perturbation table for one base scenario."""
    dataset = load_dataset(data_dir)
    base = _load_scenario(base_preset, dataset)
    rows = sensitivity_suite(base, dataset, SimConfig())
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["perturbation,cumulative_direct_kg,deviation_pct"]
    lines += [f"{r.label},{repr(r.cumulative_direct_kg)},{repr(r.deviation_pct)}" for r in rows]
    (out / "sensitivity.csv").write_text("\n".join(lines) + "\n")
    click.echo(f"wrote {out / 'sensitivity.csv'}")


@cli.command()
@click.option("--run", "run_a", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--run-b", "--reference", "run_b", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def compare(run_a, run_b, out_dir):
    """Difference one run against a reference run (structured files)."""
    a, b = RunResult.load(run_a), RunResult.load(run_b)
    cmp = compare_runs(a, b)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = [",".join(TABLE3_HEADER),
             ",".join(repr(v) if isinstance(v, float) else str(v) for v in cmp.table3_row())]
    (out / "table3.csv").write_text("\n".join(lines) + "\n")
    click.echo(f"wrote {out / 'table3.csv'}")


@cli.command()
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--runs-dir", default=None, type=click.Path(file_okay=False),
              help="Persist completed runs here (sessions never persist).")
def serve(data_dir, port, host, runs_dir):
    """Start the HTTP service for the calibration/scenario studio."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir, runs_dir=runs_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@cli.command()
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True, file_okay=False))
def validate(data_dir):
    """Validate a dataset directory; lists every violation."""
    issues = validate_dataset(data_dir)
    if issues:
        for issue in issues:
            click.echo(f"INVALID {issue}")
        raise DatasetError(issues)
    click.echo("dataset valid")


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def synth(out_dir):
    """Write the bundled synthetic dataset to a directory."""
    make_synthetic_dataset(out_dir)
    click.echo(f"wrote synthetic dataset to {out_dir}")


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def presets(out_dir):
    """Export the preset scenarios a-j as JSON files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for pid in PRESET_IDS:
        spec = preset_scenario(pid)
        (out / f"{pid}.json").write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n")
    click.echo(f"wrote presets to {out_dir}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except (DatasetError, ValidationError) as e:
        click.echo(str(e), err=True)
        return 2
    except NonConvergenceError as e:
        click.echo(str(e), err=True)
        return 3
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except HeatmixError as e:
        click.echo(str(e), err=True)
        return 1
    except Exception as e:  # pragma: no cover - defensive
        logger.exception("unexpected failure")
        click.echo(f"error: {e}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
