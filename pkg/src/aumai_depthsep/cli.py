"""CLI entry point for aumai-depthsep.

Commands
--------
compile   Compile a deep network into a shallow Fourier network with a certificate.
certify   Shallow lower bounds for the oscillatory separation target.
sphere    Spherical-harmonic coefficient tables, frames and γ₁ bounds.
sample    Sanity-check a sampling measure.
bench     Run an experiment config.
init      Scaffold a toy net and an experiment config.

Exit codes: 0 on success, 2 on configuration errors (bad flags, missing or
invalid files), 3 when a budget cap is exceeded.
"""

from __future__ import annotations

import contextlib
import logging
import sys
from collections.abc import Iterator
from pathlib import Path
from typing import Any, NoReturn

import click
from pydantic import BaseModel, ValidationError

from aumai_depthsep.errors import BudgetExceededError, ConfigError, DepthSepError
from aumai_depthsep.fixtures import sample_experiment_yaml, toy_net_json
from aumai_depthsep.fouriernet import dump_fn
from aumai_depthsep.models import (
    CliConfig,
    CompileConfig,
    ExperimentReport,
    SamplerConfig,
    default_seed,
)
from aumai_depthsep.netir import LayeredNet, load_net
from aumai_depthsep.reporter import ConsoleReporter, JSONReporter, Reportable
from aumai_depthsep.runner import ExperimentRunner, config_hash, sample_report
from aumai_depthsep.shallowify import compile_deep, compile_gaussian, compile_two_layer
from aumai_depthsep.spectral import Window, heavy_tail_target, kappa_certificate, kappa_sweep
from aumai_depthsep.sphere import RidgeMeasure, coefficient_table, export_frame, spread_frame

__all__ = ["main", "EXIT_OK", "EXIT_CONFIG", "EXIT_BUDGET"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3

_POSITIVE = click.FloatRange(min=0.0, min_open=True)

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _fail(message: str, code: int) -> NoReturn:
    click.echo(click.style(f"Error: {message}", fg="red"), err=True)
    sys.exit(code)


def _validation_message(exc: ValidationError) -> str:
    first = exc.errors()[0]
    where = ".".join(str(part) for part in first["loc"])
    return f"{where}: {first['msg']}" if where else str(first["msg"])


def _write_json(path: Path, document: Reportable) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        JSONReporter().report(document, fh)
    return path


@contextlib.contextmanager
def _exit_codes(output_dir: Path | None = None) -> Iterator[None]:
    """Map package errors onto the CLI exit-code contract."""
    try:
        yield
    except ValidationError as exc:
        _fail(_validation_message(exc), EXIT_CONFIG)
    except (ConfigError, FileNotFoundError) as exc:
        _fail(str(exc), EXIT_CONFIG)
    except BudgetExceededError as exc:
        if exc.certificate is not None and output_dir is not None:
            path = _write_json(output_dir / "certificate.json", exc.certificate)
            click.echo(f"  partial certificate written to {path}", err=True)
        _fail(str(exc), EXIT_BUDGET)
    except DepthSepError as exc:
        raise click.ClickException(str(exc)) from exc


def _settings(ctx: click.Context, subcommand: str, **fields: Any) -> CliConfig:
    """Validate the flags of *subcommand* together with the global ones."""
    obj: dict[str, Any] = ctx.obj
    try:
        return CliConfig(
            subcommand=subcommand,
            seed=obj["seed"],
            threads=obj["threads"] or 1,
            **{k: v for k, v in fields.items() if v is not None},
        )
    except ValidationError as exc:
        _fail(_validation_message(exc), EXIT_CONFIG)


def _emit(ctx: click.Context, document: Reportable) -> None:
    if ctx.obj["json"]:
        JSONReporter().report(document, sys.stdout)
    else:
        ConsoleReporter().report(document, sys.stdout)


def _note(ctx: click.Context, message: str) -> None:
    """Progress line; suppressed when stdout carries JSON."""
    if not ctx.obj["json"]:
        click.echo(message)


class _Flags(BaseModel):
    values: list[str]


def _flags_hash(*parts: object) -> str:
    """Config hash for reports built straight from flags."""
    return config_hash(_Flags(values=[repr(p) for p in parts]))


# ---------------------------------------------------------------------------
# CLI definition
# ---------------------------------------------------------------------------


@click.group()
@click.version_option(package_name="aumai-depthsep")
@click.option("-v", "--verbose", is_flag=True, default=False, help="Log at DEBUG level.")
@click.option(
    "--threads",
    default=None,
    type=click.IntRange(min=1),
    help="Upper bound on worker threads (default: 1, or the config's value for bench).",
)
@click.option(
    "--json",
    "json_output",
    is_flag=True,
    default=False,
    help="Mirror the report to stdout as JSON.",
)
@click.option(
    "--seed",
    default=None,
    type=click.IntRange(min=0),
    help="Root seed (default: $AUMAI_DEPTHSEP_SEED or 0).",
)
@click.pass_context
def main(
    ctx: click.Context, verbose: bool, threads: int | None, json_output: bool, seed: int | None
) -> None:
    """AumAI DepthSep: depth-separation compilers and certificates."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj.update(
        threads=threads,
        json=json_output,
        seed=seed if seed is not None else default_seed(),
    )


# ---------------------------------------------------------------------------
# compile command
# ---------------------------------------------------------------------------


def _load_net_file(path: str) -> LayeredNet:
    file = Path(path)
    if not file.exists():
        raise FileNotFoundError(f"Network file not found: {path}")
    return load_net(file.read_text(encoding="utf-8"))


@main.command("compile")
@click.option("--net", "net_path", required=True, metavar="FILE", help="Network JSON document.")
@click.option("--eps", required=True, type=float, help="Target accuracy ε.")
@click.option(
    "--mode",
    default="two_layer",
    show_default=True,
    type=click.Choice(["two_layer", "deep", "gaussian"]),
    help="Compiler to run.",
)
@click.option("--radius", default=1.0, show_default=True, type=_POSITIVE,
              help="Radius of the approximation domain (two_layer).")
@click.option("--norm", default="l2", show_default=True, type=click.Choice(["l2", "linf"]),
              help="Ball (l2) or cube (linf) domain (two_layer).")
@click.option("--schedule", default="adaptive", show_default=True,
              type=click.Choice(["adaptive", "closed_form"]), help="Degree schedule.")
@click.option("--atom-cap", default=None, type=int, help="Largest Fourier net to build.")
@click.option("--verify-points", default=4096, show_default=True, type=click.IntRange(min=1),
              help="Probe points for the measured error.")
@click.option("--out-dir", "output_dir", default=".", show_default=True, metavar="DIR",
              help="Directory for certificate.json and fourier_net.json.")
@click.pass_context
def compile_command(
    ctx: click.Context,
    net_path: str,
    eps: float,
    mode: str,
    radius: float,
    norm: str,
    schedule: str,
    atom_cap: int | None,
    verify_points: int,
    output_dir: str,
) -> None:
    """Compile the network in FILE into a shallow Fourier network.

    Examples:

        aumai-depthsep compile --net toy.json --eps 0.3

        aumai-depthsep --json compile --net deep.json --eps 0.5 --mode deep
    """
    settings = _settings(ctx, "compile", inputs=[net_path], eps=eps, atom_cap=atom_cap,
                         output_dir=output_dir)
    out = Path(settings.output_dir)
    with _exit_codes(out):
        net = _load_net_file(net_path)
        config = CompileConfig(
            schedule=schedule,  # type: ignore[arg-type]
            norm=norm,  # type: ignore[arg-type]
            atom_cap=settings.atom_cap,
            verify_points=verify_points,
            shards=settings.threads,
            seed=settings.seed,
        )
        if mode == "deep":
            fn, cert = compile_deep(net, eps, settings.atom_cap, config=config)
        elif mode == "gaussian":
            fn, cert = compile_gaussian(net, eps, settings.atom_cap, config=config)
        else:
            fn, cert = compile_two_layer(net, radius, eps, settings.atom_cap,
                                         K_norm=config.norm, config=config)
        cert_path = _write_json(out / "certificate.json", cert)
        fn_path = out / "fourier_net.json"
        fn_path.write_text(dump_fn(fn) + "\n", encoding="utf-8")
    _emit(ctx, cert)
    _note(ctx, f"  create  {cert_path}\n  create  {fn_path}")


# ---------------------------------------------------------------------------
# certify command
# ---------------------------------------------------------------------------


@main.command("certify")
@click.option("--d", "dims", multiple=True, required=True, type=click.IntRange(min=1),
              help="Dimension; repeat for a sweep.")
@click.option("--N", "sizes", multiple=True, required=True, type=click.IntRange(min=0),
              help="Shallow width; repeat for a sweep.")
@click.option("--gamma", default=1.0, show_default=True, type=_POSITIVE,
              help="Scale γ of the target's inner weights.")
@click.option("--bandwidth", default=1.0, show_default=True,
              type=_POSITIVE, help="Window bandwidth.")
@click.option("--out-dir", "output_dir", default=".", show_default=True, metavar="DIR")
@click.pass_context
def certify_command(
    ctx: click.Context,
    dims: tuple[int, ...],
    sizes: tuple[int, ...],
    gamma: float,
    bandwidth: float,
    output_dir: str,
) -> None:
    """Lower-bound the error of every N-unit shallow net on the oscillatory target.

    A single (d, N) pair prints a certificate; repeated flags print a sweep
    and write it as CSV.

    Examples:

        aumai-depthsep certify --d 60 --N 1

        aumai-depthsep certify --d 40 --d 80 --N 1 --N 100
    """
    settings = _settings(ctx, "certify", d=dims[0], N=sizes[0], output_dir=output_dir)
    out = Path(settings.output_dir)
    window = Window.sinc2(bandwidth)
    with _exit_codes(out):
        if len(dims) == 1 and len(sizes) == 1:
            d = dims[0]
            cert = kappa_certificate(window, heavy_tail_target(d, gamma), d, sizes[0])
            path = _write_json(out / "lower_bound.json", cert)
            _emit(ctx, cert)
            _note(ctx, f"  create  {path}")
            return
        rows = kappa_sweep(window, dims, sizes, lambda d: heavy_tail_target(d, gamma))
        report = ExperimentReport(
            name="kappa-sweep",
            experiment="kappa",
            config_hash=_flags_hash("certify", dims, sizes, gamma, bandwidth),
            seeds=[settings.seed],
            columns=["d", "N", "lower_bound", "regime"],
            rows=[list(row) for row in rows],
        )
        csv_path, _ = ExperimentRunner().write(report, out)
    _emit(ctx, report)
    _note(ctx, f"  create  {csv_path}")


# ---------------------------------------------------------------------------
# sphere command
# ---------------------------------------------------------------------------


@main.command("sphere")
@click.option("--d", "d", required=True, type=click.IntRange(min=2), help="Ambient dimension.")
@click.option("--table", is_flag=True, default=False,
              help="Coefficient table (k, N_k, σ_k, λ_k).")
@click.option("--kmax", default=10, show_default=True, type=click.IntRange(min=0),
              help="Largest degree in the table.")
@click.option("--frame", is_flag=True, default=False, help="Export the spread frame as JSON.")
@click.option("--gamma1", "gamma1_net", default=None, metavar="FILE",
              help="Bound γ₁ of a bias-free abs network.")
@click.option("--out-dir", "output_dir", default=".", show_default=True, metavar="DIR")
@click.pass_context
def sphere_command(
    ctx: click.Context,
    d: int,
    table: bool,
    kmax: int,
    frame: bool,
    gamma1_net: str | None,
    output_dir: str,
) -> None:
    """Spherical-harmonic tables, spread frames and γ₁ bounds.

    Examples:

        aumai-depthsep sphere --table --d 3 --kmax 10

        aumai-depthsep sphere --frame --d 8
    """
    if not (table or frame or gamma1_net):
        raise click.UsageError("choose at least one of --table, --frame, --gamma1")
    settings = _settings(ctx, "sphere", d=d, output_dir=output_dir,
                         inputs=[gamma1_net] if gamma1_net else [])
    out = Path(settings.output_dir)
    with _exit_codes(out):
        if table:
            report = ExperimentReport(
                name=f"sigma_table_d{d}",
                experiment="sigma_table",
                config_hash=_flags_hash("sphere", d, kmax),
                seeds=[settings.seed],
                columns=["d", "k", "N_k", "sigma_k", "lambda_k"],
                rows=[[d, r.k, r.N, r.sigma, r.lam] for r in coefficient_table(d, kmax)],
            )
            csv_path, _ = ExperimentRunner().write(report, out)
            _emit(ctx, report)
            _note(ctx, f"  create  {csv_path}")
        if frame:
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"frame_d{d}.json"
            document = export_frame(spread_frame(d))
            path.write_text(document + "\n", encoding="utf-8")
            if ctx.obj["json"]:
                click.echo(document)
            _note(ctx, f"  create  {path}")
        if gamma1_net:
            measure = RidgeMeasure.from_net(_load_net_file(gamma1_net))
            if measure.d != d:
                raise ConfigError(f"network has dimension {measure.d}, expected {d}", path="d")
            click.echo(f"gamma1 <= {measure.mass:.12g}")


# ---------------------------------------------------------------------------
# sample command
# ---------------------------------------------------------------------------


@main.command("sample")
@click.option(
    "--kind",
    required=True,
    type=click.Choice(["product_sinc4", "gaussian", "uniform_sphere", "uniform_ball", "box"]),
)
@click.option("--d", "d", required=True, type=click.IntRange(min=1))
@click.option("--n", "n", default=10_000, show_default=True, type=click.IntRange(min=2),
              help="Number of samples.")
@click.option("--sigma", default=None, type=float, help="Gaussian scale (default d^-1/2).")
@click.option("--radius", default=1.0, show_default=True, type=float, help="Box/ball radius.")
@click.option("--out-dir", "output_dir", default=".", show_default=True, metavar="DIR")
@click.pass_context
def sample_command(
    ctx: click.Context,
    kind: str,
    d: int,
    n: int,
    sigma: float | None,
    radius: float,
    output_dir: str,
) -> None:
    """Moments and Kolmogorov–Smirnov statistics of a sampling measure.

    Example:

        aumai-depthsep --seed 7 sample --kind product_sinc4 --d 2 --n 20000
    """
    settings = _settings(ctx, "sample", d=d, N=n, output_dir=output_dir)
    out = Path(settings.output_dir)
    with _exit_codes(out):
        config = SamplerConfig(
            kind=kind,  # type: ignore[arg-type]
            d=d,
            sigma=sigma,
            radius=radius,
            seed=settings.seed,
        )
        report = sample_report(config, n)
        csv_path, _ = ExperimentRunner().write(report, out)
    _emit(ctx, report)
    _note(ctx, f"  create  {csv_path}")


# ---------------------------------------------------------------------------
# bench command
# ---------------------------------------------------------------------------


@main.command("bench")
@click.argument("config_path", metavar="CONFIG")
@click.option("--out-dir", "output_dir", default=None, metavar="DIR",
              help="Override the config's output_dir.")
@click.pass_context
def bench_command(ctx: click.Context, config_path: str, output_dir: str | None) -> None:
    """Run the experiment described by the YAML or JSON file CONFIG.

    Example:

        aumai-depthsep --threads 4 bench experiment.yaml
    """
    _settings(ctx, "bench", inputs=[config_path], output_dir=output_dir)
    runner = ExperimentRunner()
    with _exit_codes():
        config = runner.load(config_path)
        cap = ctx.obj["threads"]
        report = runner.run(config, threads=min(cap, config.threads) if cap else config.threads)
        csv_path, json_path = runner.write(report, output_dir or config.output_dir)
    _emit(ctx, report)
    _note(ctx, f"  create  {csv_path}\n  create  {json_path}")


# ---------------------------------------------------------------------------
# init command
# ---------------------------------------------------------------------------


@main.command("init")
@click.argument("directory", default="depthsep-demo", metavar="DIRECTORY")
@click.option(
    "--force",
    is_flag=True,
    default=False,
    help="Overwrite existing files.",
)
def init_command(directory: str, force: bool) -> None:
    """Create DIRECTORY with a toy network and an example experiment config.

    Example:

        aumai-depthsep init depthsep-demo
    """
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)

    net_file = target / "toy_net.json"
    experiment_file = target / "experiment.yaml"

    file_pairs = [(net_file, toy_net_json() + "\n"), (experiment_file, sample_experiment_yaml())]
    for path, content in file_pairs:
        if path.exists() and not force:
            click.echo(f"  skip  {path} (already exists, use --force to overwrite)")
            continue
        path.write_text(content, encoding="utf-8")
        click.echo(f"  create  {path}")

    click.echo(
        f"\nInitialised demo directory at '{directory}'.\n"
        "Try:\n"
        f"  aumai-depthsep compile --net {net_file} --eps 0.5\n"
        f"  aumai-depthsep bench {experiment_file}"
    )


if __name__ == "__main__":
    main()
