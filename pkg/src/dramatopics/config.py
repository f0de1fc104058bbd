"""Pipeline configuration: a versioned JSON document mapped onto dataclasses."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

CONFIG_VERSION = 1
API_BASE_ENV = "DRAMATOPICS_API_BASE"
DEFAULT_API_BASE = "https://dracor.org/api/v1"


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in problems))


@dataclass
class CorpusSettings:
    source: str = "local"  # "local" or "api"
    path: str | None = None
    api_base: str = DEFAULT_API_BASE
    name: str = "fre"
    cache_dir: str = "cache"
    year_range: tuple[int, int] = (1700, 1900)
    concurrency: int = 4
    lexicon: str | None = None  # surface/lemma/pos TSV for raw-text documents; bundled list if None


@dataclass
class PreprocessSettings:
    kept_pos: list[str] = field(default_factory=lambda: ["NOUN", "PROPN", "VERB", "ADJ"])
    stopwords_file: str | None = None
    drop_lemmas_file: str | None = None
    lowercase: bool = True
    min_token_length: int = 2
    min_df: int = 5
    max_df_fraction: float = 0.5
    min_doc_tokens: int = 20


@dataclass
class ModelSettings:
    method: str = "lda"  # lda, nmf or both
    K: int = 10
    alpha: float | None = None
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 500
    sample_lag: int = 10
    nmf_max_iterations: int = 500
    nmf_tolerance: float = 1e-5
    nmf_weighting: str = "tf-idf"


@dataclass
class AnalysisSettings:
    period: tuple[int, int] = (1700, 1900)
    significance: float = 0.05
    delta_threshold: float = 0.1
    aggregation: str = "unweighted"  # or "token-weighted"
    smoothing_window: int = 1
    top_n: int = 15
    n_representative: int = 5
    map_topics: list | None = None  # [[topic, label], ...]; None labels every topic
    overlay_topics: list | None = None  # None plots hot and cold topics


@dataclass
class ExternalSettings:
    path: str | None = None
    year_col: str = "year"
    value_col: str = "gdppc"
    country_col: str | None = None
    country: str | None = None
    name: str = "GDP per capita"
    unit: str = "2011 US$"
    normalization: str = "min-max"
    interpolate: bool = False


@dataclass
class PipelineConfig:
    seed: int
    out_dir: str = "out"
    config_version: int = CONFIG_VERSION
    corpus: CorpusSettings = field(default_factory=CorpusSettings)
    preprocess: PreprocessSettings = field(default_factory=PreprocessSettings)
    model: ModelSettings = field(default_factory=ModelSettings)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    external: ExternalSettings = field(default_factory=ExternalSettings)

    def to_json(self) -> dict:
        return asdict(self)

    @property
    def methods(self) -> list[str]:
        return ["lda", "nmf"] if self.model.method == "both" else [self.model.method]


_SECTIONS = {
    "corpus": CorpusSettings,
    "preprocess": PreprocessSettings,
    "model": ModelSettings,
    "analysis": AnalysisSettings,
    "external": ExternalSettings,
}


def _build(cls, data: dict, where: str, problems: list[str]):
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            problems.append(f"{where}: unknown key {key!r}")
    kwargs = {k: v for k, v in data.items() if k in known}
    for k in ("year_range", "period"):
        if isinstance(kwargs.get(k), list):
            kwargs[k] = tuple(kwargs[k])
    return cls(**kwargs)


def _resolve(base: Path, p: str | None) -> str | None:
    if p is None:
        return None
    path = Path(p).expanduser()
    return str(path if path.is_absolute() else (base / path).resolve())


def parse_config(data: dict, base_dir=".", seed: int | None = None, out_dir: str | None = None) -> PipelineConfig:
    """Validate a config mapping. All violations are collected into one ConfigError.

    Relative paths are taken relative to `base_dir` (the config file's folder).
    Command-line `seed` and `out_dir` override the file. `out_dir` is resolved
    against the working directory, not the config folder.
    """
    problems: list[str] = []
    base = Path(base_dir)
    data = dict(data)
    version = data.pop("config_version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        problems.append(f"config_version {version!r} unsupported (expected {CONFIG_VERSION})")
    sections = {}
    for name, cls in _SECTIONS.items():
        raw = data.pop(name, {}) or {}
        if not isinstance(raw, dict):
            problems.append(f"{name}: expected an object")
            raw = {}
        sections[name] = _build(cls, raw, name, problems)
    file_seed = data.pop("seed", None)
    file_out = data.pop("out_dir", None)
    for key in data:
        problems.append(f"unknown top-level key {key!r}")
    final_seed = seed if seed is not None else file_seed
    if final_seed is None:
        problems.append("seed must be given (in the config or with --seed)")
    elif not isinstance(final_seed, int) or final_seed < 0:
        problems.append(f"seed must be a non-negative integer, got {final_seed!r}")

    if out_dir is not None:
        resolved_out = str(Path(out_dir).resolve())
    else:
        resolved_out = _resolve(base, file_out or "out")

    cfg = PipelineConfig(seed=final_seed if isinstance(final_seed, int) else 0, out_dir=resolved_out, **sections)
    c, pp, m, a, e = cfg.corpus, cfg.preprocess, cfg.model, cfg.analysis, cfg.external

    env_base = os.environ.get(API_BASE_ENV)
    if env_base:
        c.api_base = env_base
    c.path = _resolve(base, c.path)
    c.lexicon = _resolve(base, c.lexicon)
    c.cache_dir = _resolve(base, c.cache_dir)
    pp.stopwords_file = _resolve(base, pp.stopwords_file)
    pp.drop_lemmas_file = _resolve(base, pp.drop_lemmas_file)
    e.path = _resolve(base, e.path)

    if c.source not in ("local", "api"):
        problems.append(f"corpus.source must be 'local' or 'api', got {c.source!r}")
    if c.source == "local" and not c.path:
        problems.append("corpus.path is required for a local corpus")
    for label, p in (("corpus.path", c.path), ("corpus.lexicon", c.lexicon),
                     ("preprocess.stopwords_file", pp.stopwords_file),
                     ("preprocess.drop_lemmas_file", pp.drop_lemmas_file), ("external.path", e.path)):
        if p is not None and not Path(p).exists():
            problems.append(f"{label}: file not found: {p}")
    if len(c.year_range) != 2 or c.year_range[0] > c.year_range[1]:
        problems.append(f"corpus.year_range must be [start, end], got {list(c.year_range)}")
    if c.concurrency < 1:
        problems.append("corpus.concurrency must be >= 1")
    if not pp.kept_pos:
        problems.append("preprocess.kept_pos must not be empty")
    if pp.min_df < 1:
        problems.append("preprocess.min_df must be >= 1")
    if not 0 < pp.max_df_fraction <= 1:
        problems.append("preprocess.max_df_fraction must lie in (0, 1]")
    if m.method not in ("lda", "nmf", "both"):
        problems.append(f"model.method must be lda, nmf or both, got {m.method!r}")
    if m.K < 1:
        problems.append("model.K must be >= 1")
    if m.alpha is not None and m.alpha <= 0:
        problems.append("model.alpha must be positive")
    if m.beta <= 0:
        problems.append("model.beta must be positive")
    if not 0 <= m.burn_in < m.iterations:
        problems.append("model.burn_in must lie in [0, iterations)")
    elif m.sample_lag < 1 or m.iterations - m.burn_in < m.sample_lag:
        problems.append("model.sample_lag must be >= 1 and fit at least once after burn-in")
    if m.nmf_weighting not in ("tf-idf", "raw-counts"):
        problems.append(f"model.nmf_weighting must be tf-idf or raw-counts, got {m.nmf_weighting!r}")
    if m.nmf_tolerance <= 0:
        problems.append("model.nmf_tolerance must be positive")
    if len(a.period) != 2 or a.period[0] >= a.period[1]:
        problems.append(f"analysis.period must be [start, end] with start < end, got {list(a.period)}")
    if not 0 < a.significance < 1:
        problems.append("analysis.significance must lie in (0, 1)")
    if a.delta_threshold < 0:
        problems.append("analysis.delta_threshold must be >= 0")
    if a.aggregation not in ("unweighted", "token-weighted"):
        problems.append(f"analysis.aggregation must be unweighted or token-weighted, got {a.aggregation!r}")
    if a.smoothing_window < 1:
        problems.append("analysis.smoothing_window must be >= 1")
    if e.normalization not in ("min-max", "z-score", "none"):
        problems.append(f"external.normalization must be min-max, z-score or none, got {e.normalization!r}")
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path, seed: int | None = None, out_dir: str | None = None) -> PipelineConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError([f"config file not found: {path}"]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})"]) from None
    if not isinstance(data, dict):
        raise ConfigError([f"{path}: top level must be an object"])
    return parse_config(data, path.parent, seed=seed, out_dir=out_dir)


def sample_config_path() -> Path:
    from importlib import resources

    return Path(str(resources.files("dramatopics.data") / "sample_config.json"))

