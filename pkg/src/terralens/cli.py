"""terralens command-line interface.

Subcommands: render, generate, analyze, morph, session, golden. Everything is
deterministic given its flags and seed; the TERRALENS_SEED environment
variable supplies the seed when --seed is omitted.

Exit codes: 2 malformed input file, 3 unwritable output, 4 generation
exhausted.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import analytics, render, scenes, stimuli
from .errors import GenerationExhausted
from .sphere import SphericalRotation

EXIT_BAD_INPUT = 2
EXIT_UNWRITABLE = 3
EXIT_EXHAUSTED = 4


def _parse_rotation(text: str) -> SphericalRotation:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"rotation must be 'lam,phi,gamma', got {text!r}")
    if len(parts) != 3:
        raise click.BadParameter(f"rotation must have 3 angles, got {len(parts)}")
    return SphericalRotation(*parts)


def _write_text(path: str, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc}", err=True)
        sys.exit(EXIT_UNWRITABLE)


def _dump_json(doc, out: str | None):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        _write_text(out, text)
    else:
        click.echo(text, nl=False)


def _load_coastlines(path: str | None):
    if not path:
        return None
    try:
        return render.load_geojson_paths(path)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BAD_INPUT)


rotation_option = click.option("--rotation", default="0,0,0", show_default=True,
                               help="Recentering rotation 'lam,phi,gamma' in degrees.")
seed_option = click.option("--seed", type=int, default=0, show_default=True,
                           envvar="TERRALENS_SEED",
                           help="Random seed (or TERRALENS_SEED).")


@click.group()
@click.version_option()
def main():
    """Computational-cartography toolkit for the four geo visualisations."""


@main.command("render")
@click.option("--projection", type=click.Choice(["flat", "curved-preview"]),
              default="flat", show_default=True)
@rotation_option
@click.option("--graticule", "graticule_spacing", type=float, default=10.0,
              show_default=True, help="Graticule spacing, degrees.")
@click.option("--tissot", "tissot_spacing", type=float, default=30.0,
              show_default=True, help="Tissot node spacing, degrees (0 = off).")
@click.option("--size", type=int, default=1100, show_default=True,
              help="Output width in pixels.")
@click.option("--coastlines", type=click.Path(), default=None,
              help="Coastline GeoJSON file.")
@click.option("--format", "fmt", type=click.Choice(["svg", "png"]), default="svg",
              show_default=True)
@click.option("--out", required=True, type=click.Path())
def cmd_render(projection, rotation, graticule_spacing, tissot_spacing, size,
               coastlines, fmt, out):
    """Render the projected map (boundary, graticule, Tissot, coastlines)."""
    rot = _parse_rotation(rotation)
    coast = _load_coastlines(coastlines)
    svg = render.render_map(rot, projection=projection,
                            graticule_spacing=graticule_spacing,
                            tissot_spacing=tissot_spacing, size=size,
                            coast_paths=coast)
    if fmt == "svg":
        _write_text(out, svg)
    else:
        try:
            render.svg_to_png(svg, out)
        except OSError as exc:
            click.echo(f"error: cannot write {out}: {exc}", err=True)
            sys.exit(EXIT_UNWRITABLE)


_FAMILY_DIFFICULTIES = {
    "distance": ("easy", "small_variation", "far_distance"),
    "area": ("easy", "small_variation", "far_distance"),
    "direction": ("close", "far"),
}


def _generate_tasks(family: str, difficulty: str, count: int, seed: int) -> dict:
    tasks = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        if family == "distance":
            task = stimuli.gen_distance_task(difficulty, rng)
        elif family == "area":
            task = stimuli.gen_area_task(difficulty, rng)
        else:
            sep = stimuli.DIRECTION_SEPARATIONS[difficulty]
            truth = "hit" if rng.random() < 0.5 else "miss"
            task = stimuli.gen_direction_task(sep, truth, rng)
        d = stimuli.task_to_dict(task)
        d["stimulus_id"] = i
        tasks.append(d)
    return {"family": family, "difficulty": difficulty, "seed": seed,
            "count": count, "tasks": tasks}


@main.command("generate")
@click.argument("family", type=click.Choice(["distance", "area", "direction", "session"]))
@click.option("--difficulty", default=None,
              help="distance/area: easy|small_variation|far_distance; "
                   "direction: close|far.")
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--participant", type=int, default=0, show_default=True,
              help="Participant index (family=session only).")
@seed_option
@click.option("--out", type=click.Path(), default=None, help="Output JSON path (default stdout).")
def cmd_generate(family, difficulty, count, participant, seed, out):
    """Generate stimuli (or a full participant session) as JSON."""
    if family == "session":
        doc = stimuli.session_to_dict(stimuli.build_session(participant, seed))
        _dump_json(doc, out)
        return
    allowed = _FAMILY_DIFFICULTIES[family]
    if difficulty is None:
        difficulty = allowed[0]
    if difficulty not in allowed:
        raise click.BadParameter(
            f"difficulty for {family} must be one of {', '.join(allowed)}")
    if count < 1:
        raise click.BadParameter("count must be >= 1")
    try:
        doc = _generate_tasks(family, difficulty, count, seed)
    except GenerationExhausted as exc:
        click.echo(f"error: generation exhausted: {exc}", err=True)
        sys.exit(EXIT_EXHAUSTED)
    _dump_json(doc, out)


@main.command("session")
@click.option("--participant", type=int, required=True, help="Participant index.")
@seed_option
@click.option("--out", type=click.Path(), default=None)
def cmd_session(participant, seed, out):
    """Shorthand for `generate session --participant N`."""
    doc = stimuli.session_to_dict(stimuli.build_session(participant, seed))
    _dump_json(doc, out)


def _summary_doc(records, logs) -> dict:
    cells = analytics.summarize(records, logs)
    cell_docs = []
    for c in cells:
        cell_docs.append({
            "visualisation": c.visualisation,
            "task": c.task,
            "difficulty": c.difficulty,
            "n_participants": c.n_participants,
            "accuracy": {"mean": c.accuracy_mean,
                         "ci95": list(c.accuracy_ci95) if c.accuracy_ci95 else None},
            "time_s": ({"mean": c.time_mean,
                        "ci95": list(c.time_ci95) if c.time_ci95 else None}
                       if c.time_mean is not None else None),
            "interaction": ({
                "head_move_m": c.interaction.head_move_m,
                "ctrl_move_m": c.interaction.ctrl_move_m,
                "head_rot_deg": c.interaction.head_rot_deg,
                "ctrl_rot_deg": c.interaction.ctrl_rot_deg,
                "large_gap_count": c.interaction.large_gap_count,
            } if c.interaction is not None else None),
        })
    return {"cells": cell_docs, "friedman": analytics.friedman_by_task(records)}


def _summary_table(doc: dict) -> str:
    headers = ["visualisation", "task", "difficulty", "n", "accuracy", "time_s"]
    rows = []
    for c in doc["cells"]:
        rows.append([
            c["visualisation"], c["task"], c["difficulty"],
            str(c["n_participants"]),
            f"{c['accuracy']['mean']:+.3f}",
            f"{c['time_s']['mean']:.2f}" if c["time_s"] else "-",
        ])
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    lines.append("")
    for task, f in doc["friedman"].items():
        if f["chi2"] is None:
            lines.append(f"friedman[{task}]: not computable (unbalanced data)")
        else:
            lines.append(f"friedman[{task}]: chi2({f['dof']}) = {f['chi2']:.3f}, "
                         f"p = {f['p']:.4f}")
    return "\n".join(lines) + "\n"


@main.command("analyze")
@click.argument("responses", type=click.Path(exists=True))
@click.option("--logs", "logs_dir", type=click.Path(), default=None,
              help="Directory of pose-log CSVs named <participant>__<stimulus>.csv.")
@click.option("--out", type=click.Path(), default=None, help="Summary JSON path.")
def cmd_analyze(responses, logs_dir, out):
    """Summarize a response CSV (accuracy/time/interaction + Friedman)."""
    try:
        records = analytics.read_responses(responses)
        logs = analytics.load_log_dir(logs_dir) if logs_dir else None
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BAD_INPUT)
    if not records:
        click.echo("error: response file has no rows", err=True)
        sys.exit(EXIT_BAD_INPUT)
    doc = _summary_doc(records, logs)
    click.echo(_summary_table(doc), nl=False)
    if out:
        _dump_json(doc, out)


@main.command("morph")
@click.option("--steps", type=int, required=True, help="Number of frames (>= 2).")
@rotation_option
@click.option("--graticule", "graticule_spacing", type=float, default=10.0,
              show_default=True)
@click.option("--size", type=int, default=1100, show_default=True)
@click.option("--coastlines", type=click.Path(), default=None)
@click.option("--out-dir", required=True, type=click.Path())
def cmd_morph(steps, rotation, graticule_spacing, size, coastlines, out_dir):
    """Export numbered SVG frames of the flat-map-to-globe morph."""
    if steps < 2:
        raise click.BadParameter("steps must be >= 2")
    rot = _parse_rotation(rotation)
    coast = _load_coastlines(coastlines)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        click.echo(f"error: cannot create {out_dir}: {exc}", err=True)
        sys.exit(EXIT_UNWRITABLE)
    for i in range(steps):
        t = i / (steps - 1)
        svg = render.render_morph_frame(t, rot, graticule_spacing=graticule_spacing,
                                        size=size, coast_paths=coast)
        _write_text(str(out / f"frame_{i:03d}.svg"), svg)


def _golden_doc(seed: int, samples: int) -> dict:
    from .sphere import uniform_sphere_sample

    scene_list = []
    rotations = [SphericalRotation(), SphericalRotation(25.0, -40.0, 10.0)]
    for ri, rot in enumerate(rotations):
        for ki, kind in enumerate(("exocentric", "flat", "egocentric", "curved")):
            scene = scenes.SCENE_KINDS[kind](rotation=rot)
            rng = np.random.default_rng([seed, ri, ki])
            entries = []
            for _ in range(samples):
                g = uniform_sphere_sample(rng)
                w = scene.embed(g)
                entries.append({"geo": [g.lon, g.lat], "world": [w.x, w.y, w.z]})
            scene_list.append({
                "scene": {"kind": kind, "rotation": list(rot.as_tuple()),
                          "params": scene.params()},
                "samples": entries,
            })
    return {"seed": seed, "scenes": scene_list}


@main.command("golden")
@seed_option
@click.option("--samples", type=int, default=128, show_default=True,
              help="Samples per scene (>= 100 for the conformance suite).")
@click.option("--out", required=True, type=click.Path())
def cmd_golden(seed, samples, out):
    """Emit geo-to-world golden vectors for viewer conformance testing."""
    _dump_json(_golden_doc(seed, samples), out)


if __name__ == "__main__":
    main()
