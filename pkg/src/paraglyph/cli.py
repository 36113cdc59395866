"""Command-line pipeline: compile, build, check, instance, emit, serve.

Exit codes: 0 success, 1 validation or compatibility failure, 2 usage error,
3 I/O error. Diagnostics go to stderr as file:line:col: severity: message.
"""

from __future__ import annotations

import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import __version__
from .dsl import SourceError, evaluate, parse, resolve_includes
from .pipeline import (
    BuildError,
    FontMetadata,
    InterpolationError,
    ManifestError,
    build_master_set,
    check_compatibility,
    designspace_document,
    glyph_to_svg,
    interpolate,
    load_project,
    write_svg_dir,
    write_ufo,
)
from .pipeline.report import write_check_report
from .pipeline.fsutil import write_atomic

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _print_diagnostics(diagnostics) -> None:
    for diag in diagnostics:
        click.echo(diag.format(), err=True)


def _parse_overrides(pairs: tuple[str, ...]) -> dict[str, float]:
    overrides = {}
    for pair in pairs:
        name, _, value = pair.partition("=")
        if not name or not value:
            raise click.UsageError(f"--set expects name=value, got {pair!r}")
        try:
            overrides[name] = float(value)
        except ValueError as exc:
            raise click.UsageError(f"--set {name}: {value!r} is not a number") \
                from exc
    return overrides


def _parse_location(text: str) -> dict[str, float]:
    location = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        tag, _, value = part.partition("=")
        if not value:
            raise click.UsageError(
                f"--loc expects tag=value pairs, got {part!r}")
        try:
            location[tag.strip()] = float(value)
        except ValueError as exc:
            raise click.UsageError(f"--loc {tag}: {value!r} is not a number") \
                from exc
    return location


manifest_option = click.option(
    "--manifest", "-m", envvar="PARAGLYPH_MANIFEST", required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Project manifest (or set PARAGLYPH_MANIFEST).")


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Parametric glyph compiler and variable-font master pipeline."""


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path",
              type=click.Path(exists=True, dir_okay=False),
              help="Configuration program supplying base parameters.")
@click.option("--set", "-s", "sets", multiple=True, metavar="NAME=VALUE",
              help="Override a parameter (repeatable).")
@click.option("--svg", "svg_out", type=click.Path(dir_okay=False),
              help="Write the compiled outline as SVG.")
@click.option("--debug", is_flag=True,
              help="Add knots, control handles and guidelines to the SVG.")
@click.option("--debug-color", "debug_colors", multiple=True,
              metavar="CLASS=COLOR",
              help="Override an overlay colour (knot, handle, center, guide).")
def compile(source, config_path, sets, svg_out, debug, debug_colors) -> None:
    """Evaluate one glyph program and optionally write its SVG."""
    overrides = {}
    if config_path:
        from .pipeline import load_config_params

        try:
            overrides.update(load_config_params(config_path))
        except BuildError as exc:
            _report_build_error(exc)
    overrides.update(_parse_overrides(sets))
    colors = {}
    for pair in debug_colors:
        key, _, value = pair.partition("=")
        if not value:
            raise click.UsageError(
                f"--debug-color expects class=color, got {pair!r}")
        colors[key] = value
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    result = parse(text, source)
    if not result.ok:
        _print_diagnostics(result.diagnostics)
        sys.exit(EXIT_FAILURE)
    try:
        program = resolve_includes(result.program,
                                   base=os.path.dirname(os.path.abspath(source)))
    except SourceError as exc:
        _print_diagnostics(exc.diagnostics)
        sys.exit(EXIT_FAILURE)
    glyph = evaluate(program, overrides)
    _print_diagnostics(glyph.diagnostics)
    if not glyph.ok:
        sys.exit(EXIT_FAILURE)
    if svg_out:
        svg = glyph_to_svg(glyph.outlines, debug=debug,
                           center_paths=glyph.center_paths, colors=colors)
        try:
            write_atomic(svg_out, svg)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)
        click.echo(f"wrote {svg_out}")
    else:
        names = ", ".join(f"{k}={v:g}" for k, v in glyph.params)
        click.echo(f"{len(glyph.outlines)} contour(s); parameters: {names}")


@main.command()
@manifest_option
@click.option("--master", "only", help="Build a single master by name.")
@click.option("--svg-dir", type=click.Path(file_okay=False),
              help="Write per-master SVG files under this directory.")
@click.option("--jobs", "-j", default=0, show_default="cpu count",
              help="Parallel glyph builds per master.")
def build(manifest, only, svg_dir, jobs) -> None:
    """Build master glyph sets from the manifest."""
    try:
        project = load_project(manifest)
        master_set = _build_parallel(project, only, jobs)
    except (ManifestError, BuildError, SourceError, OSError) as exc:
        _report_build_error(exc)
        return  # unreachable; _report_build_error exits
    for master in master_set.masters:
        click.echo(f"{master.spec.name}: {len(master.glyphs)} glyphs "
                   f"(thick={master.config.thick:g}, "
                   f"condense={master.config.condense:g}, "
                   f"slant={master.config.slant:g}, "
                   f"terminalround={master.config.terminalround:g})")
        if svg_dir:
            out = os.path.join(svg_dir, master.spec.name)
            write_svg_dir(master.glyphs, out, config=master.config)
            click.echo(f"  svg -> {out}")


def _build_parallel(project, only, jobs):
    # Masters are independent; glyph evaluation is pure, so threads are safe.
    from .pipeline.build import MasterSet, build_master

    specs = [s for s in project.masters if only is None or s.name == only]
    if not specs:
        raise BuildError(f"no master named {only!r}")
    workers = jobs if jobs > 0 else min(len(specs), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        masters = list(pool.map(lambda s: build_master(project, s), specs))
    default_location = {axis.tag: axis.default for axis in project.axes}
    default = next((m for m in masters if m.location == default_location), None)
    if default is None:
        raise BuildError(f"no master sits at the default location "
                         f"{default_location}")
    return MasterSet(axes=project.axes, masters=masters,
                     named_instances=list(project.instances),
                     default_master=default)


def _report_build_error(exc) -> None:
    if isinstance(exc, BuildError) and exc.diagnostics:
        click.echo(str(exc).splitlines()[0], err=True)
        _print_diagnostics(exc.diagnostics)
    elif isinstance(exc, SourceError):
        _print_diagnostics(exc.diagnostics)
    else:
        click.echo(f"error: {exc}", err=True)
    sys.exit(EXIT_IO if isinstance(exc, OSError) else EXIT_FAILURE)


@main.command()
@manifest_option
@click.option("--report-dir", type=click.Path(file_okay=False),
              help="Write compatibility.tsv, metrics.tsv and per-glyph "
                   "overlay figures here.")
def check(manifest, report_dir) -> None:
    """Check that all masters are interpolation-compatible."""
    try:
        project = load_project(manifest)
        master_set = build_master_set(project)
    except (ManifestError, BuildError, SourceError, OSError) as exc:
        _report_build_error(exc)
        return
    report = check_compatibility(master_set)
    click.echo(report.format())
    if report_dir:
        artifacts = write_check_report(report, master_set, report_dir)
        click.echo(f"report artifacts in {report_dir}: "
                   f"{', '.join(artifacts['tsv'])} and "
                   f"{len(artifacts['figures'])} figure(s)")
    sys.exit(EXIT_OK if report.ok else EXIT_FAILURE)


@main.command()
@manifest_option
@click.option("--loc", required=True, metavar="TAG=V,TAG=V",
              help="Designspace location, e.g. wght=550,wdth=80.")
@click.option("--svg-dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for the instance SVGs.")
def instance(manifest, loc, svg_dir) -> None:
    """Interpolate an instance and write its glyph SVGs."""
    location = _parse_location(loc)
    try:
        project = load_project(manifest)
        master_set = build_master_set(project)
        glyphs = interpolate(master_set, location)
    except (ManifestError, BuildError, SourceError, InterpolationError) as exc:
        _report_build_error(exc)
        return
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    write_svg_dir(glyphs, svg_dir, config=master_set.default_master.config)
    click.echo(f"wrote {len(glyphs)} glyph SVG(s) to {svg_dir}")


@main.command()
@manifest_option
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Output directory for UFO masters and the designspace.")
def emit(manifest, out) -> None:
    """Write one UFO per master plus the variable-font designspace."""
    try:
        project = load_project(manifest)
        master_set = build_master_set(project)
    except (ManifestError, BuildError, SourceError, OSError) as exc:
        _report_build_error(exc)
        return
    report = check_compatibility(master_set)
    if not report.ok:
        click.echo(report.format(), err=True)
        click.echo("refusing to emit incompatible masters", err=True)
        sys.exit(EXIT_FAILURE)
    try:
        os.makedirs(out, exist_ok=True)
        family_file = project.family.replace(" ", "")
        filenames = {}
        for master in master_set.masters:
            ufo_name = f"{family_file}-{master.spec.name}.ufo"
            write_ufo(master.glyphs,
                      FontMetadata(project.family, master.spec.name,
                                   project.version),
                      master.config, os.path.join(out, ufo_name))
            filenames[master.spec.name] = ufo_name
            click.echo(f"wrote {ufo_name}")
        ds_path = os.path.join(out, f"{family_file}.designspace")
        write_atomic(ds_path, designspace_document(master_set, project.family,
                                                   filenames))
        click.echo(f"wrote {os.path.basename(ds_path)}")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)


@main.command()
@click.option("--port", default=8737, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static-dir", envvar="PARAGLYPH_STATIC_DIR",
              type=click.Path(file_okay=False, exists=True),
              help="Playground UI bundle to serve at /.")
@click.option("--max-source-bytes", default=262144, show_default=True,
              envvar="PARAGLYPH_MAX_SOURCE_BYTES")
def serve(port, host, static_dir, max_source_bytes) -> None:
    """Run the live-preview compile service."""
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=static_dir, max_source_bytes=max_source_bytes)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
