"""Command-line entry points for the whole pipeline.

Verbs: prepare, synth-data, train, sample, fill, suggest, interpolate,
metrics, serve. Every command takes --config FILE and repeated
--set section.key=value overrides; artifacts are written next to a
run.json echo of the effective configuration. Failures exit non-zero
with a single machine-parseable line: `<category>: <message>`.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import metrics as metrics_mod
from . import sampler as sampler_mod
from . import wire
from .dataset.ingest import ANNOTATION_FILE, AnnotationError, ingest, load_cache, write_cache
from .dataset.synth import synth_corpus
from .geometry import Icon
from .model import IconModel, ModelConfig, train_model
from .runconfig import ConfigError, RunConfig, load_run_config
from .svg_codec import CodecError, normalize_and_quantize, parse_svg, rasterize, serialize_svg
from .text_frontend import build_text_vocab


def _fail(category: str, message: str):
    click.echo(f"{category}: {message}", err=True)
    sys.exit(1)


def _load_cfg(config_path, sets) -> RunConfig:
    overrides = {}
    for item in sets:
        if "=" not in item:
            _fail("config-error", f"--set expects key=value, got {item!r}")
        k, _, v = item.partition("=")
        overrides[k.strip()] = v.strip()
    try:
        return load_run_config(config_path, overrides)
    except (ConfigError, ValueError, OSError) as exc:
        _fail("config-error", str(exc))


def _echo_config(out_dir: str, cfg: RunConfig, extra: dict | None = None):
    os.makedirs(out_dir, exist_ok=True)
    payload = cfg.to_dict()
    if extra:
        payload["invocation"] = extra
    with open(os.path.join(out_dir, "run.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def _load_model(ckpt: str, vocab: str | None) -> IconModel:
    vocab_path = vocab or os.path.join(os.path.dirname(ckpt) or ".", "text_vocab.txt")
    try:
        return IconModel.load(ckpt, vocab_path)
    except (OSError, ValueError) as exc:
        _fail("checkpoint-error", str(exc))


def _strategy(cfg: RunConfig, seed: int | None, greedy: bool = False):
    sc = cfg.strategy
    return sampler_mod.DecodeStrategy(
        kind="greedy" if greedy else sc.kind,
        temperature=sc.temperature,
        k=sc.k,
        p=sc.p,
        grammar_constrained=sc.grammar_constrained,
        max_icon_tokens=sc.max_icon_tokens,
        seed=seed,
    )


def _write_svg(path: str, icon: Icon):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_svg(icon, include_xmlns=True) + "\n")


common = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                 help="key-value run configuration file"),
    click.option("--set", "sets", multiple=True, metavar="KEY=VALUE",
                 help="override a configuration key (repeatable)"),
]


def _with_common(fn):
    for deco in reversed(common):
        fn = deco(fn)
    return fn


@click.group()
def main():
    """Text-guided vector icon synthesis."""


@main.command("synth-data")
@click.option("--n", type=int, required=True, help="number of icons")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--families", default=None, help="comma-separated family names")
@_with_common
def synth_data(n, seed, out_dir, families, config_path, sets):
    """Emit a synthetic labeled corpus (SVG files + annotations.tsv)."""
    cfg = _load_cfg(config_path, sets)
    fams = families.split(",") if families else None
    try:
        records = synth_corpus(n, np.random.default_rng(seed), fams)
    except ValueError as exc:
        _fail("data-error", str(exc))
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, ANNOTATION_FILE), "w", encoding="utf-8") as fh:
        for rec in records:
            fname = rec.name + ".svg"
            _write_svg(os.path.join(out_dir, fname), rec.icon)
            fh.write(f"{fname}\t{'/'.join(rec.keywords)}\t{rec.phrase or ''}\n")
    _echo_config(out_dir, cfg, {"verb": "synth-data", "n": n, "seed": seed})
    click.echo(f"wrote {len(records)} icons to {out_dir}")


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@_with_common
def prepare(corpus_dir, out_dir, config_path, sets):
    """Ingest and cache a corpus (token lines + manifest)."""
    cfg = _load_cfg(config_path, sets)
    try:
        result = ingest(
            corpus_dir,
            remove_outer_box=cfg.data.remove_outer_box,
            take_first=cfg.data.take_first or None,
        )
    except (AnnotationError, OSError) as exc:
        _fail("data-error", str(exc))
    write_cache(result, out_dir)
    _echo_config(out_dir, cfg, {"verb": "prepare", "corpus": corpus_dir})
    click.echo(
        f"prepared {result.total} records "
        f"(train {len(result.train)} / val {len(result.val)} / test {len(result.test)}, "
        f"dropped {result.dropped_too_long} too long, "
        f"skipped {result.skipped_unreadable} unreadable)"
    )


def _load_records(corpus_dir: str, cfg: RunConfig):
    if os.path.exists(os.path.join(corpus_dir, "manifest.json")):
        return load_cache(corpus_dir)
    return ingest(
        corpus_dir,
        remove_outer_box=cfg.data.remove_outer_box,
        take_first=cfg.data.take_first or None,
    )


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@_with_common
def train(corpus_dir, out_dir, config_path, sets):
    """Train a model; writes checkpoint, vocab, and a metrics sidecar."""
    cfg = _load_cfg(config_path, sets)
    try:
        result = _load_records(corpus_dir, cfg)
    except (AnnotationError, OSError, ValueError) as exc:
        _fail("data-error", str(exc))
    records = result.train or (result.val + result.test)
    if not records:
        _fail("data-error", f"no training records in {corpus_dir}")
    texts = [" ".join(r.keywords) + " " + (r.phrase or "") for r in records]
    vocab = build_text_vocab(texts, min_freq=cfg.data.min_freq)
    model_cfg = ModelConfig.from_dict(
        {**cfg.model.to_dict(), "text_vocab_size": vocab.size}
    )
    os.makedirs(out_dir, exist_ok=True)
    _echo_config(out_dir, cfg, {"verb": "train", "corpus": corpus_dir})
    epoch_rows = []
    steps_per_epoch = max(1, len(records) // cfg.train.batch_size)

    def on_step(transformer, m):
        if m.step % max(1, cfg.train.log_every) == 0:
            click.echo(
                f"step {m.step}: total {m.total:.4f} text {m.text:.4f} "
                f"icon {m.icon:.4f} lr {m.lr:.2e}"
            )
        if (m.step + 1) % steps_per_epoch == 0:
            epoch_rows.append(
                {"epoch": len(epoch_rows), "step": m.step, "total": m.total,
                 "text": m.text, "icon": m.icon}
            )
            snapshot = IconModel(transformer=transformer, text_vocab=vocab)
            snapshot.save(os.path.join(out_dir, f"checkpoint-epoch{len(epoch_rows)-1}.bin"))

    try:
        transformer, history_out = train_model(
            records, vocab, model_cfg, cfg.train, cfg.sample, on_step=on_step
        )
    except Exception as exc:  # TrainingDiverged or config issues
        _fail("train-error", str(exc))
    model = IconModel(transformer=transformer, text_vocab=vocab)
    ckpt = os.path.join(out_dir, "checkpoint.bin")
    model.save(ckpt, os.path.join(out_dir, "text_vocab.txt"),
               extra={"run_config": cfg.to_dict()})
    sidecar = {
        "steps": len(history_out),
        "final": {"total": history_out[-1].total, "text": history_out[-1].text,
                  "icon": history_out[-1].icon} if history_out else None,
        "epochs": epoch_rows,
        "run_config": cfg.to_dict(),
        "text_vocab_sha256": vocab.fingerprint(),
    }
    with open(os.path.join(out_dir, "metrics.json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
    click.echo(f"saved {ckpt}")


@main.command()
@click.option("--ckpt", type=click.Path(exists=True), required=True)
@click.option("--vocab", type=click.Path(), default=None)
@click.option("--text", default="")
@click.option("--n", type=int, default=1)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@_with_common
def sample(ckpt, vocab, text, n, seed, out_dir, config_path, sets):
    """Generate icons and write them as SVG files."""
    cfg = _load_cfg(config_path, sets)
    model = _load_model(ckpt, vocab)
    os.makedirs(out_dir, exist_ok=True)
    written = 0
    for i in range(n):
        strategy = _strategy(cfg, seed + i)
        try:
            icon = sampler_mod.generate(model, text, strategy)
        except sampler_mod.GenerationError as exc:
            click.echo(f"sample {i}: failed ({exc})", err=True)
            continue
        _write_svg(os.path.join(out_dir, f"sample_{i:04d}.svg"), icon)
        written += 1
    _echo_config(out_dir, cfg, {"verb": "sample", "text": text, "n": n, "seed": seed})
    if written == 0:
        _fail("generation-error", "no sample could be decoded; try another seed")
    click.echo(f"wrote {written}/{n} icons to {out_dir}")


def _read_icon(path: str) -> Icon:
    with open(path, "r", encoding="utf-8") as fh:
        return normalize_and_quantize(parse_svg(fh.read()))


@main.command()
@click.option("--ckpt", type=click.Path(exists=True), required=True)
@click.option("--vocab", type=click.Path(), default=None)
@click.option("--svg", "svg_path", type=click.Path(exists=True), required=True,
              help="icon to edit")
@click.option("--remove-paths", required=True,
              help="comma-separated path indices to regenerate")
@click.option("--text", default="")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), required=True)
@_with_common
def fill(ckpt, vocab, svg_path, remove_paths, text, seed, out_path, config_path, sets):
    """Remove paths from an icon and regenerate them in place."""
    cfg = _load_cfg(config_path, sets)
    model = _load_model(ckpt, vocab)
    try:
        icon = _read_icon(svg_path)
        idx = sorted({int(i) for i in remove_paths.split(",")})
    except (CodecError, ValueError) as exc:
        _fail("data-error", str(exc))
    if not idx or idx[0] < 0 or idx[-1] >= len(icon.paths):
        _fail("data-error", f"path indices {idx} out of range for {len(icon.paths)} paths")
    if idx != list(range(idx[0], idx[-1] + 1)):
        _fail("data-error", "removed paths must be contiguous")
    left = Icon(icon.paths[: idx[0]]) if idx[0] > 0 else None
    right = Icon(icon.paths[idx[-1] + 1 :]) if idx[-1] + 1 < len(icon.paths) else None
    try:
        result = sampler_mod.fill_in_middle(model, text, left, right, _strategy(cfg, seed))
    except sampler_mod.GenerationError as exc:
        _fail("generation-error", str(exc))
    _write_svg(out_path, result)
    _echo_config(os.path.dirname(out_path) or ".", cfg,
                 {"verb": "fill", "svg": svg_path, "removed": idx, "seed": seed})
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--ckpt", type=click.Path(exists=True), required=True)
@click.option("--vocab", type=click.Path(), default=None)
@click.option("--svg", "svg_path", type=click.Path(exists=True), default=None,
              help="partial icon (omit to start from scratch)")
@click.option("--text", default="")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), required=True)
@_with_common
def suggest(ckpt, vocab, svg_path, text, seed, out_path, config_path, sets):
    """Suggest the next path; writes partial+suggestion as SVG and prints
    the suggested path as command-list JSON."""
    cfg = _load_cfg(config_path, sets)
    model = _load_model(ckpt, vocab)
    partial = None
    try:
        if svg_path:
            partial = _read_icon(svg_path)
    except CodecError as exc:
        _fail("data-error", str(exc))
    try:
        path = sampler_mod.suggest_next_path(model, text, partial, _strategy(cfg, seed))
    except sampler_mod.GenerationError as exc:
        _fail("generation-error", str(exc))
    if path is None:
        click.echo(json.dumps({"end": True}))
        return
    paths = (partial.paths if partial else ()) + (path,)
    _write_svg(out_path, Icon(paths))
    _echo_config(os.path.dirname(out_path) or ".", cfg,
                 {"verb": "suggest", "svg": svg_path, "text": text, "seed": seed})
    click.echo(json.dumps({"path": wire.path_to_json(path)}))


@main.command()
@click.option("--ckpt", type=click.Path(exists=True), required=True)
@click.option("--vocab", type=click.Path(), default=None)
@click.option("--text-a", required=True)
@click.option("--text-b", required=True)
@click.option("--steps", type=int, default=5, help="number of interpolation points")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@_with_common
def interpolate(ckpt, vocab, text_a, text_b, steps, seed, out_dir, config_path, sets):
    """Generate icons along the text-embedding interpolation."""
    cfg = _load_cfg(config_path, sets)
    model = _load_model(ckpt, vocab)
    os.makedirs(out_dir, exist_ok=True)
    for i in range(steps + 1):
        alpha = i / steps if steps else 0.0
        try:
            icon = sampler_mod.interpolate_generate(
                model, text_a, text_b, alpha, _strategy(cfg, seed)
            )
        except sampler_mod.GenerationError as exc:
            click.echo(f"alpha {alpha:.2f}: failed ({exc})", err=True)
            continue
        _write_svg(os.path.join(out_dir, f"alpha_{alpha:.2f}.svg"), icon)
    _echo_config(out_dir, cfg, {"verb": "interpolate", "a": text_a, "b": text_b, "seed": seed})
    click.echo(f"wrote interpolation sweep to {out_dir}")


@main.command("metrics")
@click.option("--ckpt", type=click.Path(exists=True), required=True)
@click.option("--vocab", type=click.Path(), default=None)
@click.option("--n", type=int, default=100, help="number of generated icons")
@click.option("--ref", "ref_dir", type=click.Path(exists=True), required=True,
              help="reference corpus (raw or prepared)")
@click.option("--seed", type=int, default=0)
@click.option("--constrained/--raw", "constrained", default=False,
              help="grammar-constrain sampling (default: raw model output)")
@click.option("--out", "out_path", type=click.Path(), required=True)
@_with_common
def metrics_cmd(ckpt, vocab, n, ref_dir, seed, constrained, out_path, config_path, sets):
    """Generate n icons and report FID / Uniqueness / Novelty as JSON.

    Features come from the raster-downsample extractor, not a pretrained
    image encoder; absolute values are not comparable to encoder-based
    reports and the JSON says so."""
    cfg = _load_cfg(config_path, sets)
    model = _load_model(ckpt, vocab)
    try:
        result = _load_records(ref_dir, cfg)
    except (AnnotationError, OSError, ValueError) as exc:
        _fail("data-error", str(exc))
    refs = result.train + result.val + result.test
    if len(refs) < 2:
        _fail("data-error", "reference corpus needs at least 2 icons")
    res = cfg.data.raster_resolution
    ref_rasters = [rasterize(r.icon, res) for r in refs]
    mean_intensity = metrics_mod.corpus_mean_intensity(ref_rasters)
    extractor = metrics_mod.DownsampleExtractor(cfg.data.feature_side, mean_intensity)
    ref_feats = [extractor(img) for img in ref_rasters]
    gen_feats = []
    failures = 0
    # default: raw-model sampling (grammar off, lenient decode) so the
    # report reflects the model itself rather than the constraint
    for i in range(n):
        strategy = sampler_mod.DecodeStrategy(
            kind=cfg.strategy.kind,
            temperature=cfg.strategy.temperature,
            k=cfg.strategy.k,
            p=cfg.strategy.p,
            grammar_constrained=constrained,
            max_icon_tokens=cfg.strategy.max_icon_tokens,
            seed=seed + i,
        )
        try:
            icon = sampler_mod.generate(model, "", strategy)
        except sampler_mod.GenerationError:
            failures += 1
            continue
        gen_feats.append(extractor(rasterize(icon, res)))
    if len(gen_feats) < 2:
        _fail("generation-error", "fewer than 2 decodable samples; cannot fit metrics")
    report = {
        "fid": metrics_mod.frechet_distance(gen_feats, ref_feats),
        "uniqueness_pct": metrics_mod.uniqueness(gen_feats),
        "novelty_pct": metrics_mod.novelty(gen_feats, ref_feats),
        "n_generated": len(gen_feats),
        "n_reference": len(ref_feats),
        "extractor_id": extractor.extractor_id,
        "tau": metrics_mod.COSINE_TAU,
        "decode_failures": failures,
        "grammar_constrained": constrained,
        "note": "features are raster downsamples, not a pretrained encoder; "
        "absolute values are not comparable to encoder-based reports",
        "run_config": cfg.to_dict(),
        "seed": seed,
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
    click.echo(json.dumps({k: report[k] for k in
                          ("fid", "uniqueness_pct", "novelty_pct", "n_generated")}))


@main.command()
@click.option("--ckpt", type=click.Path(exists=True), required=True)
@click.option("--vocab", type=click.Path(), default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8734)
@_with_common
def serve(ckpt, vocab, host, port, config_path, sets):
    """Start the HTTP generation service."""
    cfg = _load_cfg(config_path, sets)
    try:
        import uvicorn
    except ImportError:
        _fail("internal-error", "uvicorn is not installed")
    from .service import create_app

    vocab_path = vocab or os.path.join(os.path.dirname(ckpt) or ".", "text_vocab.txt")
    app = create_app(ckpt, vocab_path, strategy_defaults=cfg.strategy)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
