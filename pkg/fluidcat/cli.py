from __future__ import annotations

import logging
import random
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any, Optional

import typer
from pydantic import ValidationError

from . import checks, dot, reports
from .bundles import build_bundle, build_chi_pq
from .delta import DirectedSystem, ThickPoint, build_system, colimit
from .errors import FluidcatError, LawViolationError, UnsupportedFormatError
from .info_space import InfoSpace, read_space
from .models import RunConfig
from .natural import Reconstruction, push_forward, rec_point, wavefn
from .towers import canonical_tower, delta_tower, merge_all, random_tower

app = typer.Typer(add_completion=False, help="Thick points, towers and tower bundles over finite information spaces.")

InputOpt = Annotated[Path, typer.Option("--input", help="Space document (JSON)")]
EpsilonOpt = Annotated[float, typer.Option("--epsilon", help="Ball radius; must be positive")]
LevelsOpt = Annotated[int, typer.Option("--levels", help="Highest thickening level P")]
LambdaOpt = Annotated[float, typer.Option("--lambda", help="Wave-function decay in (0, 1)")]
ArityOpt = Annotated[int, typer.Option("--arity", help="Number of feet q for bundles")]
CoreOpt = Annotated[Optional[str], typer.Option("--core", help="Restrict to one core atom")]
SeedOpt = Annotated[int, typer.Option("--seed", help="Seed for randomized towers and suites")]
OutputOpt = Annotated[Optional[Path], typer.Option("--output", help="Write the report here instead of stdout")]
FormatOpt = Annotated[str, typer.Option("--format", help="json or dot")]
VerboseOpt = Annotated[bool, typer.Option("--verbose", help="Debug logging on stderr")]


def _error_name(exc: BaseException) -> str:
    return type(exc).__name__.removesuffix("Error")


def _fail(code: int, message: str) -> None:
    typer.echo(message, err=True)
    raise typer.Exit(code=code)


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except ValidationError as exc:
        detail = exc.errors()[0]["msg"].removeprefix("Value error, ")
        if ":" not in detail.split(" ", 1)[0]:
            detail = f"InvalidConfig: {detail}"
        _fail(2, detail)
    except FluidcatError as exc:
        _fail(2, f"{_error_name(exc)}: {exc}")
    except LawViolationError as exc:
        _fail(3, f"{_error_name(exc)}: {exc}")


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _config(**options: Any) -> RunConfig:
    _setup_logging(options.pop("verbose"))
    options["lambda"] = options.pop("lam")
    return RunConfig.model_validate(options)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        typer.echo(text, nl=False)
        return
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    cfg.output.write_text(text, encoding="utf-8")


def _emit_json(cfg: RunConfig, command: str, result: Any) -> None:
    _emit(cfg, reports.dumps(reports.envelope(command, cfg, result)))


def _json_only(cfg: RunConfig, command: str) -> None:
    if cfg.format != "json":
        raise UnsupportedFormatError(f"'{command}' only writes json reports.")


def _cores(cfg: RunConfig, space: InfoSpace) -> list[str]:
    if cfg.core is None:
        return list(space.atoms)
    space.require(cfg.core)
    return [cfg.core]


def _top_points(cfg: RunConfig, system: DirectedSystem) -> list[ThickPoint]:
    return [system.point(core, cfg.levels) for core in _cores(cfg, system.space)]


def _system(cfg: RunConfig) -> DirectedSystem:
    return build_system(read_space(cfg.input), cfg.epsilon, cfg.levels)


@app.command()
def cover(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """Every epsilon-ball and the component partition of the atoms."""
    with _exit_codes():
        cfg = _config(**locals())
        space = read_space(cfg.input)
        result = reports.cover_report(space, cfg.epsilon)
        for warning in result["warnings"]:
            typer.echo(f"warning: {warning}", err=True)
        if cfg.format == "dot":
            _emit(cfg, dot.eps_graph_dot(space, cfg.epsilon))
        else:
            _emit_json(cfg, "cover", result)


@app.command()
def system(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """The directed system of thick-point categories up to level P."""
    with _exit_codes():
        cfg = _config(**locals())
        built = _system(cfg)
        if cfg.format == "dot":
            _emit(cfg, dot.thick_category_dot(built.space, built.category(cfg.levels)))
        else:
            _emit_json(cfg, "system", reports.system_report(built))


@app.command()
def strata(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """Degree strata of the level-P thick points."""
    with _exit_codes():
        cfg = _config(**locals())
        _json_only(cfg, "strata")
        built = _system(cfg)
        _emit_json(cfg, "strata", reports.strata_report(built.space, _top_points(cfg, built)))


@app.command(name="colimit")
def colimit_cmd(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """Where repeated thickening of each core settles."""
    with _exit_codes():
        cfg = _config(**locals())
        _json_only(cfg, "colimit")
        space = read_space(cfg.input)
        reached = {atom: colimit(space, cfg.epsilon, atom) for atom in _cores(cfg, space)}
        _emit_json(cfg, "colimit", reports.colimit_report(space, reached))


@app.command(name="wavefn")
def wavefn_cmd(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """Wave functions of the level-P points and their blobs under the component labelling."""
    with _exit_codes():
        cfg = _config(**locals())
        _json_only(cfg, "wavefn")
        built = _system(cfg)
        labels = Reconstruction.by_component(built.space, built.epsilon)
        points = _top_points(cfg, built)
        waves = [wavefn(tp, cfg.lam) for tp in points]
        result = {
            "waves": [reports.wavefn_payload(built.space, wave) for wave in waves],
            "blobs": [reports.blob_payload(rec_point(tp, labels)) for tp in points],
            "push_forward": {wave.core: push_forward(wave, labels) for wave in waves},
        }
        _emit_json(cfg, "wavefn", result)


@app.command()
def towers(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """Canonical and seeded random towers over the level-P points, their merge and thickening."""
    with _exit_codes():
        cfg = _config(**locals())
        built = _system(cfg)
        space, eps = built.space, built.epsilon
        rng = random.Random(cfg.seed)
        points = _top_points(cfg, built)
        canonical = [canonical_tower(space, eps, tp) for tp in points]
        generated = canonical + [random_tower(space, eps, tp, rng) for tp in points]
        if cfg.format == "dot":
            _emit(cfg, dot.towers_dot(space, generated))
            return
        result = {
            "towers": [reports.tower_payload(space, tower) for tower in generated],
            "merged": reports.tower_payload(space, merge_all(canonical)),
            "thickened": [reports.tower_payload(space, delta_tower(space, eps, tower)) for tower in generated],
        }
        _emit_json(cfg, "towers", result)


@app.command()
def bundle(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """The tower bundle over the level-P thick-point category (or its q-th power)."""
    with _exit_codes():
        cfg = _config(**locals())
        built = _system(cfg)
        tower_bundle = build_bundle(build_chi_pq(built, cfg.levels, cfg.arity))
        if cfg.format == "dot":
            _emit(cfg, dot.bundle_dot(tower_bundle))
        else:
            _emit_json(cfg, "bundle", reports.bundle_report(tower_bundle, built))


@app.command()
def check(
    input: InputOpt,
    epsilon: EpsilonOpt,
    levels: LevelsOpt = 3,
    lam: LambdaOpt = 0.5,
    arity: ArityOpt = 1,
    core: CoreOpt = None,
    seed: SeedOpt = 0,
    output: OutputOpt = None,
    format: FormatOpt = "json",
    verbose: VerboseOpt = False,
) -> None:
    """Run every law suite; exits 1 when any law fails."""
    with _exit_codes():
        cfg = _config(**locals())
        _json_only(cfg, "check")
        results = checks.run_checks(read_space(cfg.input), cfg.epsilon, cfg.levels, cfg.lam, cfg.seed)
        payload = reports.check_payload(results)
        _emit_json(cfg, "check", payload)
    if not payload["passed"]:
        for report in results:
            for failure in report.failed:
                typer.echo(f"FAILED {report.suite}/{failure.law}: {failure.counterexample}", err=True)
        raise typer.Exit(code=1)


if __name__ == "__main__":
    app()
