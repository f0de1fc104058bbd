"""File-based pipeline stages. Each stage reads its inputs from the output
directory, writes its own artifacts there, and can be rerun on its own."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from pathlib import Path

import numpy as np

from . import __version__, svgplot
from .align import align, load_series
from .config import PipelineConfig
from .corpus import (
    CorpusError,
    LexiconLemmatizer,
    NormalizerConfig,
    build_matrix,
    fetch_corpus,
    load_local_corpus,
    normalize,
    read_matrix,
    write_local_corpus,
    write_matrix,
)
from .divergence import jsd_series, rolling_mean, yearly_distributions, YearlyTopicSeries
from .lda import LdaConfig, fit_lda
from .nmf import NmfConfig, fit_nmf_model
from .semmap import classical_mds, cosine_distance_matrix, place_labels, representative_docs
from .topicmodel import TopicModel, top_words, write_phi_csv, write_theta_csv
from .trends import analyze_trends

log = logging.getLogger(__name__)

STAGE_VERSION = 1
STAGES = ("ingest", "preprocess", "fit", "trends", "divergence", "map", "align", "report")


class StageError(RuntimeError):
    pass


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _need(path: Path, stage: str) -> Path:
    if not path.exists():
        raise StageError(f"missing {path.name}: run {stage} first")
    return path


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _stamp(out: Path, stage: str, inputs: dict[str, str]) -> None:
    d = out / "stages"
    d.mkdir(exist_ok=True)
    with open(d / f"{stage}.json", "w", encoding="utf-8") as fh:
        json.dump({"stage": stage, "version": STAGE_VERSION, "inputs": inputs}, fh, indent=2, sort_keys=True)


def _method_dir(cfg: PipelineConfig, method: str) -> Path:
    out = Path(cfg.out_dir)
    # the first configured method writes at the top level, others in a subfolder
    return out if method == cfg.methods[0] else out / method


# --------------------------------------------------------------------------


def ingest(cfg: PipelineConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    c = cfg.corpus
    if c.source == "api":
        docs = fetch_corpus(c.api_base, c.name, c.cache_dir, tuple(c.year_range), c.concurrency)
        source = f"{c.api_base}/corpora/{c.name}"
    else:
        docs = load_local_corpus(c.path, tuple(c.year_range))
        source = c.path
    if not docs:
        raise CorpusError("corpus is empty after year filtering")
    path = out / "corpus.jsonl"
    write_local_corpus(docs, path)
    log.info("ingest: %d documents from %s", len(docs), source)
    _stamp(out, "ingest", {"source": source})
    return path


def _normalizer(cfg: PipelineConfig) -> NormalizerConfig:
    pp = cfg.preprocess
    kwargs = dict(kept_pos=frozenset(pp.kept_pos), lowercase=pp.lowercase, min_token_length=pp.min_token_length)
    for key, path in (("stopwords", pp.stopwords_file), ("drop_lemmas", pp.drop_lemmas_file)):
        if path:
            text = Path(path).read_text(encoding="utf-8")
            kwargs[key] = frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))
    return NormalizerConfig(**kwargs)


def preprocess(cfg: PipelineConfig) -> Path:
    out = Path(cfg.out_dir)
    corpus_path = _need(out / "corpus.jsonl", "ingest")
    docs = load_local_corpus(corpus_path, tuple(cfg.corpus.year_range))
    ncfg = _normalizer(cfg)
    lemmatizer = None
    if any(d.text is not None for d in docs):
        lemmatizer = (LexiconLemmatizer.from_file(cfg.corpus.lexicon) if cfg.corpus.lexicon
                      else LexiconLemmatizer.french())
    token_lists = [normalize(d, ncfg, lemmatizer) for d in docs]
    pp = cfg.preprocess
    vocab, matrix = build_matrix(
        token_lists, pp.min_df, pp.max_df_fraction, pp.min_doc_tokens,
        doc_ids=[d.id for d in docs], doc_years=[d.year for d in docs],
    )
    write_matrix(matrix, out / "matrix.txt", out / "vocab.txt")
    titles = {d.id: d.title for d in docs}
    lengths = np.asarray(matrix.counts.sum(axis=1)).ravel()
    _write_csv(out / "docs.csv", ["doc_id", "year", "title", "n_tokens"],
               [[i, y, titles[i], int(n)] for i, y, n in zip(matrix.doc_ids, matrix.doc_years, lengths)])
    _write_csv(out / "dropped_docs.csv", ["doc_id", "reason"],
               [[i, f"fewer than {pp.min_doc_tokens} retained tokens"] for i in matrix.dropped])
    log.info("preprocess: %d docs x %d terms, %d dropped", *matrix.shape, len(matrix.dropped))
    _stamp(out, "preprocess", {"corpus.jsonl": sha256_file(corpus_path)})
    return out / "matrix.txt"


def _load_matrix(cfg: PipelineConfig):
    out = Path(cfg.out_dir)
    _need(out / "matrix.txt", "preprocess")
    docs = _read_csv(_need(out / "docs.csv", "preprocess"))
    return read_matrix(out / "matrix.txt", _need(out / "vocab.txt", "preprocess"),
                       [r["doc_id"] for r in docs], [int(r["year"]) for r in docs])


def fit(cfg: PipelineConfig) -> list[Path]:
    matrix = _load_matrix(cfg)
    m = cfg.model
    written = []
    for method in cfg.methods:
        d = _method_dir(cfg, method)
        d.mkdir(parents=True, exist_ok=True)
        if method == "lda":
            model = fit_lda(matrix, LdaConfig(K=m.K, alpha=m.alpha, beta=m.beta, iterations=m.iterations,
                                              burn_in=m.burn_in, sample_lag=m.sample_lag, seed=cfg.seed))
        else:
            model, _ = fit_nmf_model(matrix, NmfConfig(K=m.K, max_iterations=m.nmf_max_iterations,
                                                        tolerance=m.nmf_tolerance, seed=cfg.seed,
                                                        weighting=m.nmf_weighting))
        model.save(d / "model.json")
        write_theta_csv(model, d / "theta.csv")
        write_phi_csv(model, d / "phi_top_words.csv", cfg.analysis.top_n)
        written.append(d / "model.json")
        log.info("fit: %s K=%d -> %s", method, m.K, d / "model.json")
    _stamp(Path(cfg.out_dir), "fit", {"matrix.txt": sha256_file(Path(cfg.out_dir) / "matrix.txt")})
    return written


def _models(cfg: PipelineConfig):
    for method in cfg.methods:
        d = _method_dir(cfg, method)
        yield d, TopicModel.load(_need(d / "model.json", "fit"))


def _yearly(cfg: PipelineConfig, model: TopicModel) -> YearlyTopicSeries:
    weights = None
    if cfg.analysis.aggregation == "token-weighted":
        docs = {r["doc_id"]: int(r["n_tokens"]) for r in _read_csv(Path(cfg.out_dir) / "docs.csv")}
        weights = [docs[i] for i in model.doc_ids]
    return yearly_distributions(model.theta, model.doc_years, weights)


def trends(cfg: PipelineConfig) -> None:
    a = cfg.analysis
    for d, model in _models(cfg):
        series = _yearly(cfg, model)
        K = model.n_topics
        _write_csv(d / "yearly_prevalence.csv", ["year", "n_docs"] + [f"topic_{k}" for k in range(K)],
                   [[y, n] + [_fmt(v) for v in row]
                    for y, n, row in zip(series.years, series.doc_counts, series.distributions)])
        results = analyze_trends(series, tuple(a.period), a.significance, a.delta_threshold, theta=model.theta)
        _write_csv(d / "trends.csv",
                   ["topic", "mean_prevalence", "slope", "stderr", "t", "p_value", "delta", "classification"],
                   [[r.topic, _fmt(r.mean_prevalence), _fmt(r.slope), _fmt(r.stderr), _fmt(r.t), _fmt(r.p),
                     _fmt(r.delta), r.classification] for r in results])
    _stamp(Path(cfg.out_dir), "trends", {})


def divergence(cfg: PipelineConfig) -> None:
    for d, model in _models(cfg):
        js = jsd_series(_yearly(cfg, model))
        smooth = rolling_mean(js.values, cfg.analysis.smoothing_window)
        _write_csv(d / "jsd.csv", ["year_from", "year_to", "gap", "jsd_bits", "jsd_smoothed"],
                   [[a, b, b - a, _fmt(v), _fmt(s)] for (a, b), v, s in zip(js.year_pairs, js.values, smooth)])
    _stamp(Path(cfg.out_dir), "divergence", {})


def _label_topics(cfg: PipelineConfig, model: TopicModel) -> list[tuple[int, str]]:
    if cfg.analysis.map_topics is not None:
        return [(int(k), str(label)) for k, label in cfg.analysis.map_topics]
    return [(k, f"T{k}: " + " ".join(t for t, _ in top_words(model, k, 3))) for k in range(model.n_topics)]


def semantic_map(cfg: PipelineConfig) -> None:
    n_rep = cfg.analysis.n_representative
    for d, model in _models(cfg):
        coords = classical_mds(cosine_distance_matrix(model.theta), 2, model.doc_ids)
        coords = place_labels(coords, model, _label_topics(cfg, model), min(n_rep, len(model.doc_ids)))
        dominant = model.theta.argmax(axis=1)
        _write_csv(d / "mds_coords.csv", ["doc_id", "year", "x", "y", "dominant_topic"],
                   [[i, y, _fmt(x0), _fmt(y0), int(k)]
                    for i, y, (x0, y0), k in zip(model.doc_ids, model.doc_years, coords.xy, dominant)])
        _write_csv(d / "map_labels.csv", ["topic", "label", "x", "y"],
                   [[k, text, _fmt(x), _fmt(y)] for k, text, x, y in coords.labels])
        _write_csv(d / "mds_eigenvalues.csv", ["rank", "eigenvalue"],
                   [[i, _fmt(v)] for i, v in enumerate(coords.eigenvalues[:10])])
    _stamp(Path(cfg.out_dir), "map", {})


def align_stage(cfg: PipelineConfig) -> None:
    e = cfg.external
    if not e.path:
        raise StageError("align needs external.path in the config")
    ext = load_series(e.path, e.year_col, e.value_col, e.country_col, e.country, e.name, e.unit)
    for d, _model in _models(cfg):
        rows = _read_csv(_need(d / "yearly_prevalence.csv", "trends"))
        K = sum(1 for key in rows[0] if key.startswith("topic_"))
        out_rows = []
        for k in range(K):
            series = [(int(r["year"]), float(r[f"topic_{k}"])) for r in rows]
            ov = align(series, ext, e.normalization, e.interpolate)
            for y, tv, ev, flag in zip(ov.years, ov.topic_values, ov.external_values, ov.interpolated):
                out_rows.append([y, k, _fmt(tv), _fmt(ev), int(flag), ov.normalization])
        _write_csv(d / "overlay.csv",
                   ["year", "topic", "topic_value", "external_value", "interpolated", "normalization"], out_rows)
    _stamp(Path(cfg.out_dir), "align", {e.path: sha256_file(e.path)})


def report(cfg: PipelineConfig) -> None:
    a = cfg.analysis
    out = Path(cfg.out_dir)
    titles = {r["doc_id"]: r["title"] for r in _read_csv(_need(out / "docs.csv", "preprocess"))}
    for d, model in _models(cfg):
        rep = d / "report"
        rep.mkdir(exist_ok=True)
        trend_rows = _read_csv(_need(d / "trends.csv", "trends"))
        yearly = _read_csv(_need(d / "yearly_prevalence.csv", "trends"))
        jsd_rows = _read_csv(_need(d / "jsd.csv", "divergence"))
        coords = _read_csv(_need(d / "mds_coords.csv", "map"))
        labels = _read_csv(_need(d / "map_labels.csv", "map"))
        K = model.n_topics
        n_rep = min(a.n_representative, len(model.doc_ids))

        table = []
        for r in trend_rows:
            k = int(r["topic"])
            words = " ".join(t for t, _ in top_words(model, k, min(a.top_n, len(model.terms))))
            works = "; ".join(f"{titles.get(i, i)} ({i})" for i in representative_docs(model, k, n_rep))
            table.append([k, r["mean_prevalence"], r["delta"], r["classification"], words, works])
        _write_csv(rep / "topic_table.csv",
                   ["topic", "mean_prevalence", "delta", "classification", "top_words", "representative_works"],
                   table)
        with open(rep / "topic_table.md", "w", encoding="utf-8") as fh:
            fh.write(f"| topic | mean prevalence | delta {a.period[0]}-{a.period[1]} | class | top words | representative works |\n")
            fh.write("|---|---|---|---|---|---|\n")
            for k, mp, delta, cls, words, works in table:
                fh.write(f"| {k} | {float(mp):.3f} | {float(delta):+.3f} | {cls} | {words} | {works} |\n")

        years = [int(r["year"]) for r in yearly]
        svgplot.line_chart(
            {f"topic {k}": list(zip(years, (float(r[f"topic_{k}"]) for r in yearly))) for k in range(K)},
            rep / "prevalence.svg", "Yearly topic prevalence", "year", "mean topic proportion")
        svgplot.line_chart(
            {"JSD": [(int(r["year_to"]), float(r["jsd_bits"])) for r in jsd_rows],
             **({"smoothed": [(int(r["year_to"]), float(r["jsd_smoothed"])) for r in jsd_rows]}
                if a.smoothing_window > 1 else {})},
            rep / "jsd.svg", "Jensen-Shannon divergence between consecutive years", "year", "JSD (bits)")
        first_year, last_year = min(years), max(years)
        svgplot.scatter_chart(
            [(float(r["x"]), float(r["y"])) for r in coords], rep / "semantic_map.svg",
            colors=[(int(r["year"]) - first_year) / max(last_year - first_year, 1) for r in coords],
            labels=[(r["label"], float(r["x"]), float(r["y"])) for r in labels],
            title="Semantic map (MDS of cosine distance)", xlabel="dim 1", ylabel="dim 2")

        overlay_path = d / "overlay.csv"
        if overlay_path.exists():
            rows = _read_csv(overlay_path)
            if a.overlay_topics is not None:
                chosen = [int(k) for k in a.overlay_topics]
            else:
                chosen = [int(r["topic"]) for r in trend_rows if r["classification"] != "flat"] or list(range(K))
            series = {f"topic {k}": [(int(r["year"]), float(r["topic_value"])) for r in rows if int(r["topic"]) == k]
                      for k in chosen}
            k0 = chosen[0]
            series[cfg.external.name] = [(int(r["year"]), float(r["external_value"]))
                                         for r in rows if int(r["topic"]) == k0]
            svgplot.line_chart(series, rep / "overlay.svg", f"Topic prevalence vs {cfg.external.name}",
                               "year", f"{rows[0]['normalization']} normalized")
    _write_manifest(cfg)
    _stamp(out, "report", {})


def _write_manifest(cfg: PipelineConfig) -> None:
    out = Path(cfg.out_dir)
    inputs = {}
    for name in ("corpus.jsonl", "matrix.txt", "vocab.txt"):
        if (out / name).exists():
            inputs[name] = sha256_file(out / name)
    if cfg.external.path:
        inputs["external"] = sha256_file(cfg.external.path)
    manifest = {"version": __version__, "seed": cfg.seed, "config": cfg.to_json(), "inputs": inputs}
    with open(out / "run_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


RUNNERS = {
    "ingest": ingest,
    "preprocess": preprocess,
    "fit": fit,
    "trends": trends,
    "divergence": divergence,
    "map": semantic_map,
    "align": align_stage,
    "report": report,
}


def run_all(cfg: PipelineConfig) -> None:
    for stage in STAGES:
        if stage == "align" and not cfg.external.path:
            log.info("align: no external series configured; skipped")
            continue
        RUNNERS[stage](cfg)
