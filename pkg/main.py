# main.py
import logging
import sys
from typing import Any, Callable, Dict, Optional

import typer
from pydantic import ValidationError

from command import (CltCommand, Command, CountCommand, CriticalCommand, DiagnosticsCommand, FitCommand,
                     GenusCountCommand, GenusFitCommand, MomentsCommand, OracleCommand, SampleCommand,
                     SchemesCommand)
from config import AppConfig, RunConfig
from mapdeg.degrees import DegreeSpec, parse_degree_spec
from mapdeg.errors import ConfigurationError, InsufficientDataError, NumericFailure, SpecValidationError
from mapdeg.utils import console, display_error, display_header, display_summary, display_table
from service_factory import ServiceFactory
from strategy import create_output_strategy

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3

app = typer.Typer(help="Exact and asymptotic enumeration of rooted maps with prescribed face degrees.",
                  add_completion=False)

CommandBuilder = Callable[[AppConfig, Optional[DegreeSpec]], Command]


class MapdegApp:
    """
    Runs one subcommand: resolves configuration, builds the command through
    the service factory, renders the result and maps errors to exit codes.
    """

    def __init__(self, app_config: Optional[AppConfig] = None):
        self.app_config = app_config
        self.logger = logging.getLogger(self.__class__.__name__)

    def _configure(self, run_config: RunConfig) -> AppConfig:
        config = self.app_config or AppConfig.from_env()
        if run_config.threads > 1:
            config = config.model_copy(update={"threads": run_config.threads})
        logging.basicConfig(
            level=config.log_level.upper(),
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            stream=sys.stderr,
        )
        return config

    def run(self, run_config: RunConfig, build: CommandBuilder) -> int:
        try:
            config = self._configure(run_config)
            spec = parse_degree_spec(run_config.degrees, run_config.weights) if run_config.degrees else None
            command = build(config, spec)
            display_header(run_config.subcommand)
            with console.status(f"[yellow]Running {run_config.subcommand}...[/yellow]"):
                result = command.execute()
            text = create_output_strategy(run_config, config).write(result)
            if text is not None:
                sys.stdout.write(text)
                sys.stdout.flush()
            summary = {k: v for k, v in result.get("result", {}).items()
                       if isinstance(v, (int, float, str, bool)) or (isinstance(v, dict) and "decimal" in v)}
            display_summary(run_config.subcommand, summary)
            columns = result.get("columns") or []
            if columns and result.get("rows"):
                display_table(run_config.subcommand, columns,
                              ([row.get(c, "") for c in columns] for row in result["rows"]))
            return EXIT_OK
        except (SpecValidationError, InsufficientDataError, ConfigurationError) as exc:
            display_error(str(exc))
            return EXIT_VALIDATION
        except NumericFailure as exc:
            display_error(f"numeric failure: {exc}")
            return EXIT_NUMERIC


def _finish(fields: Dict[str, Any], build: CommandBuilder) -> None:
    try:
        run_config = RunConfig(**fields)
    except ValidationError as exc:
        first = exc.errors()[0]
        display_error(f"invalid option {'.'.join(str(p) for p in first['loc'])}: {first['msg']}")
        raise typer.Exit(code=EXIT_VALIDATION)
    status = MapdegApp().run(run_config, build)
    raise typer.Exit(code=status)


# ----------------------------------------------------------------------
# Shared options
# ----------------------------------------------------------------------

DEGREES = typer.Option(..., "--degrees", help='Degree set: "4", "3,4", "all", "even", "even-geq:K".')
WEIGHTS = typer.Option(None, "--weights", help='Weight rule: "uniform", "indicator", "power:ALPHA".')
FORMAT = typer.Option("json", "--format", help="json or csv.")
OUT = typer.Option(None, "--out", help="Output file (stdout when omitted).")
THREADS = typer.Option(1, "--threads", min=1, help="Worker cap.")
SEED = typer.Option(0, "--seed", help="Root seed of the PCG64 streams.")


@app.command()
def count(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS, n: int = typer.Option(10, "--n"),
          format: str = FORMAT, out: Optional[str] = OUT, threads: int = THREADS):
    """Exact planar counts M_{D,n} for n = 1..N."""
    fields = dict(subcommand="count", degrees=degrees, weights=weights, n=n, format=format, out=out,
                    threads=threads)
    _finish(fields, lambda cfg, spec: CountCommand(ServiceFactory.create_enumerator(cfg), spec, n))


@app.command()
def critical(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS, format: str = FORMAT,
             out: Optional[str] = OUT, threads: int = THREADS):
    """Critical point (z0, R0[, L0]) at extended precision."""
    fields = dict(subcommand="critical", degrees=degrees, weights=weights, format=format, out=out,
                    threads=threads)
    _finish(fields, lambda cfg, spec: CriticalCommand(ServiceFactory.create_solver(cfg), spec))


@app.command()
def moments(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS,
            n: int = typer.Option(12, "--n", help="Largest reported degree."),
            format: str = FORMAT, out: Optional[str] = OUT, threads: int = THREADS):
    """Limit means μ_d and covariances σ_{d1,d2}."""
    fields = dict(subcommand="moments", degrees=degrees, weights=weights, n=n, format=format, out=out,
                    threads=threads)
    _finish(fields, lambda cfg, spec: MomentsCommand(ServiceFactory.create_moment_service(cfg), spec, cutoff=n))


@app.command()
def fit(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS, n: int = typer.Option(60, "--n"),
        format: str = FORMAT, out: Optional[str] = OUT, threads: int = THREADS):
    """Fit c·ρ^{-n}·n^β on the exact counts and compare ρ with z0."""
    fields = dict(subcommand="fit", degrees=degrees, weights=weights, n=n, format=format, out=out,
                    threads=threads)
    _finish(fields, lambda cfg, spec: FitCommand(ServiceFactory.create_enumerator(cfg), ServiceFactory.create_fitter(cfg),
                                              ServiceFactory.create_solver(cfg), spec, n))


@app.command()
def sample(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS, n: int = typer.Option(50, "--n"),
           reps: int = typer.Option(1, "--reps", min=1), seed: int = SEED, format: str = FORMAT,
           out: Optional[str] = OUT, threads: int = THREADS):
    """Uniform random mobiles (degree histograms)."""
    fields = dict(subcommand="sample", degrees=degrees, weights=weights, n=n, reps=reps, seed=seed,
                    format=format, out=out, threads=threads)
    _finish(fields, lambda cfg, spec: SampleCommand(ServiceFactory.create_sampler(cfg), spec, n, reps, seed))


@app.command()
def clt(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS, n: int = typer.Option(300, "--n"),
        reps: int = typer.Option(1000, "--reps", min=1), d: int = typer.Option(2, "--d"), seed: int = SEED,
        format: str = FORMAT, out: Optional[str] = OUT, threads: int = THREADS):
    """Empirical skewness and excess kurtosis of X^(d)."""
    fields = dict(subcommand="clt", degrees=degrees, weights=weights, n=n, reps=reps, d=d, seed=seed,
                    format=format, out=out, threads=threads)
    _finish(fields, lambda cfg, spec: CltCommand(ServiceFactory.create_sampler(cfg), spec, n, reps, d, seed))


@app.command()
def schemes(genus: int = typer.Option(1, "--genus"), format: str = FORMAT, out: Optional[str] = OUT):
    """Rooted coloured genus-g schemes."""
    fields = dict(subcommand="schemes", genus=genus, format=format, out=out)
    _finish(fields, lambda cfg, spec: SchemesCommand(genus))


@app.command("genus-count")
def genus_count(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS, n: int = typer.Option(8, "--n"),
                genus: int = typer.Option(1, "--genus"), format: str = FORMAT, out: Optional[str] = OUT,
                threads: int = THREADS):
    """Counts of rooted bipartite maps of genus g from the scheme sums."""
    fields = dict(subcommand="genus-count", degrees=degrees, weights=weights, n=n, genus=genus,
                    format=format, out=out, threads=threads)
    _finish(fields, lambda cfg, spec: GenusCountCommand(ServiceFactory.create_genus_counter(cfg), spec, n, genus))


@app.command("genus-fit")
def genus_fit(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS, n: int = typer.Option(40, "--n"),
              genus: int = typer.Option(1, "--genus"), format: str = FORMAT, out: Optional[str] = OUT,
              threads: int = THREADS):
    """Exponent fit of the genus counts."""
    fields = dict(subcommand="genus-fit", degrees=degrees, weights=weights, n=n, genus=genus,
                    format=format, out=out, threads=threads)
    _finish(fields, lambda cfg, spec: GenusFitCommand(ServiceFactory.create_genus_counter(cfg), spec, n, genus))


@app.command()
def diagnostics(degrees: str = DEGREES, weights: Optional[str] = WEIGHTS,
                n: Optional[int] = typer.Option(None, "--n", help="Order for coefficient ratios."),
                format: str = FORMAT, out: Optional[str] = OUT, threads: int = THREADS):
    """Tightness sums, weight classification, coefficient ratios, edge-series decay."""
    fields = dict(subcommand="diagnostics", degrees=degrees, weights=weights, n=n, format=format, out=out,
                    threads=threads)
    _finish(fields, lambda cfg, spec: DiagnosticsCommand(ServiceFactory.create_solver(cfg),
                                                      ServiceFactory.create_fitter(cfg),
                                                      ServiceFactory.create_enumerator(cfg), spec, n))


@app.command()
def oracle(n: int = typer.Option(3, "--n"), genus: Optional[int] = typer.Option(None, "--genus"),
           degrees: Optional[str] = typer.Option(None, "--degrees"), format: str = FORMAT,
           out: Optional[str] = OUT):
    """Brute-force rotation-system counts (n <= 5)."""
    fields = dict(subcommand="oracle", n=n, genus=genus if genus is not None else 1, degrees=degrees,
                    format=format, out=out)
    _finish(fields, lambda cfg, spec: OracleCommand(ServiceFactory.create_oracle(cfg), n, genus, spec))


if __name__ == "__main__":
    app()
