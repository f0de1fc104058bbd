"""Corpus acquisition, token normalization and document-term matrix construction."""

from __future__ import annotations

import hashlib
import json
import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np
import requests
from scipy import sparse

log = logging.getLogger(__name__)

Token = tuple[str, str, str]  # (surface, lemma, pos)

DEFAULT_YEAR_RANGE = (1700, 1900)
DEFAULT_KEPT_POS = frozenset({"NOUN", "PROPN", "VERB", "ADJ"})
# Metadata fields carrying a play's date, highest precedence first.
YEAR_FIELDS = ("yearNormalized", "yearPrinted", "yearPremiered")


class CorpusError(ValueError):
    """Invalid corpus input: malformed file, failed validation, unknown corpus."""


class FetchError(RuntimeError):
    """Network failure with no cached response to fall back on. Safe to retry."""


@dataclass(frozen=True)
class RawDocument:
    id: str
    year: int
    title: str = ""
    text: str | None = None
    tokens: tuple[Token, ...] | None = None

    def __post_init__(self):
        if (self.text is None) == (self.tokens is None):
            raise CorpusError(f"document {self.id!r}: exactly one of text/tokens must be given")

    def to_json(self) -> dict:
        out = {"id": self.id, "year": self.year, "title": self.title}
        if self.text is not None:
            out["text"] = self.text
        else:
            out["tokens"] = [list(t) for t in self.tokens]
        return out


def _check_corpus(docs: Sequence[RawDocument], year_range: tuple[int, int]) -> None:
    lo, hi = year_range
    seen = set()
    for d in docs:
        if d.id in seen:
            raise CorpusError(f"duplicate document id {d.id!r}")
        seen.add(d.id)
        if not lo <= d.year <= hi:
            raise CorpusError(f"document {d.id!r}: year {d.year} outside {lo}-{hi}")


def load_local_corpus(path, year_range: tuple[int, int] = DEFAULT_YEAR_RANGE) -> list[RawDocument]:
    """Read a JSONL corpus, one document object per line, in file order."""
    docs = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            for key in ("id", "year"):
                if key not in obj:
                    raise CorpusError(f"line {lineno}: missing required field {key!r}")
            if "text" in obj and "tokens" in obj:
                raise CorpusError(f"line {lineno}: document has both 'text' and 'tokens'")
            if "text" not in obj and "tokens" not in obj:
                raise CorpusError(f"line {lineno}: document needs 'text' or 'tokens'")
            doc_id = str(obj["id"])
            if doc_id in seen:
                raise CorpusError(f"line {lineno}: duplicate id {doc_id!r} (first on line {seen[doc_id]})")
            seen[doc_id] = lineno
            try:
                year = int(obj["year"])
            except (TypeError, ValueError):
                raise CorpusError(f"line {lineno}: year {obj['year']!r} is not an integer") from None
            tokens = None
            if "tokens" in obj:
                try:
                    tokens = tuple((str(s), str(l), str(p)) for s, l, p in obj["tokens"])
                except (TypeError, ValueError):
                    raise CorpusError(f"line {lineno}: tokens must be [surface, lemma, pos] triples") from None
            docs.append(RawDocument(doc_id, year, str(obj.get("title", "")), obj.get("text"), tokens))
    _check_corpus(docs, year_range)
    return docs


def write_local_corpus(docs: Iterable[RawDocument], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps(d.to_json(), ensure_ascii=False) + "\n")


# --------------------------------------------------------------------------
# Remote corpus (DraCor-style API)


class CachedHttpClient:
    """GET with an on-disk cache: one file per URL, named by the URL's sha256."""

    def __init__(self, cache_dir, session: requests.Session | None = None, retries: int = 3, timeout: float = 60.0):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.session = session or requests.Session()
        self.retries = retries
        self.timeout = timeout
        self.network_calls = 0

    def cache_path(self, url: str) -> Path:
        return self.cache_dir / hashlib.sha256(url.encode("utf-8")).hexdigest()

    def get(self, url: str) -> str | None:
        """Response body, or None on HTTP 404. Raises FetchError when unreachable."""
        path = self.cache_path(url)
        if path.exists():
            return path.read_text(encoding="utf-8")
        last_exc = None
        for _ in range(max(1, self.retries)):
            self.network_calls += 1
            try:
                resp = self.session.get(url, timeout=self.timeout)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if resp.status_code == 404:
                return None
            if resp.status_code >= 500:
                last_exc = RuntimeError(f"HTTP {resp.status_code}")
                continue
            resp.raise_for_status()
            body = resp.text
            tmp = path.with_suffix(".tmp")
            tmp.write_text(body, encoding="utf-8")
            tmp.replace(path)
            return body
        raise FetchError(f"could not fetch {url} after {self.retries} attempts: {last_exc}")


def play_year(meta: dict) -> tuple[int | None, str | None]:
    """Pick the publication year by field precedence; returns (year, field used)."""
    for key in YEAR_FIELDS:
        val = meta.get(key)
        if val in (None, ""):
            continue
        try:
            return int(val), key
        except (TypeError, ValueError):
            continue
    return None, None


def fetch_corpus(
    api_base: str,
    corpus_name: str,
    cache_dir,
    year_range: tuple[int, int] | None = DEFAULT_YEAR_RANGE,
    concurrency: int = 4,
    client: CachedHttpClient | None = None,
) -> list[RawDocument]:
    """Download play metadata and spoken text for every dated play of a corpus.

    Responses are cached on disk, so a second call with a warm cache issues no
    requests. Plays without any year field are skipped with a warning; plays
    outside `year_range` are filtered out.
    """
    api_base = api_base.rstrip("/")
    client = client or CachedHttpClient(cache_dir)
    index_url = f"{api_base}/corpora/{corpus_name}"
    body = client.get(index_url)
    if body is None:
        raise CorpusError(f"corpus {corpus_name!r} not found at {api_base}")
    try:
        index = json.loads(body)
        plays = index["plays"]
    except (json.JSONDecodeError, KeyError, TypeError):
        raise CorpusError(f"malformed index response for corpus {corpus_name!r}") from None

    selected = []
    for meta in plays:
        play_id = meta.get("id") or meta.get("name")
        slug = meta.get("name") or meta.get("id")
        if not play_id:
            raise CorpusError(f"corpus {corpus_name!r}: play entry without id or name")
        year, source = play_year(meta)
        if year is None:
            log.warning("play %s has no year metadata; skipped", play_id)
            continue
        log.debug("play %s: year %d from %s", play_id, year, source)
        if year_range and not year_range[0] <= year <= year_range[1]:
            continue
        selected.append((str(play_id), str(slug), year, str(meta.get("title", ""))))

    def get_text(item):
        play_id, slug, _, _ = item
        text = client.get(f"{api_base}/corpora/{corpus_name}/plays/{slug}/spoken-text")
        if text is None:
            raise CorpusError(f"play {play_id}: spoken text not found")
        return text

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        texts = list(pool.map(get_text, selected))
    return [RawDocument(pid, year, title, text=text) for (pid, _, year, title), text in zip(selected, texts)]


# --------------------------------------------------------------------------
# Normalization


class LemmaProvider(Protocol):
    def annotate(self, text: str) -> list[Token]: ...


_WORD_RE = re.compile(r"[^\W\d_]+(?:['’])?", re.UNICODE)


class LexiconLemmatizer:
    """Dictionary lookup lemmatizer: surface form -> (lemma, POS).

    Unknown words get their lowercased surface as lemma and `unknown_pos` as
    tag (pass None to drop them). Elided articles such as "l'" are split off.
    """

    def __init__(self, entries: dict[str, tuple[str, str]], unknown_pos: str | None = "NOUN"):
        self.entries = entries
        self.unknown_pos = unknown_pos

    @classmethod
    def from_file(cls, path, unknown_pos: str | None = "NOUN") -> "LexiconLemmatizer":
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 3:
                    raise CorpusError(f"{path}:{lineno}: expected surface<TAB>lemma<TAB>pos")
                entries.setdefault(parts[0].lower(), (parts[1], parts[2]))
        return cls(entries, unknown_pos)

    @classmethod
    def french(cls, unknown_pos: str | None = "NOUN") -> "LexiconLemmatizer":
        with resources.as_file(resources.files("dramatopics.resources") / "lexicon_fr.tsv") as p:
            return cls.from_file(p, unknown_pos)

    def annotate(self, text: str) -> list[Token]:
        out = []
        for m in _WORD_RE.finditer(text):
            surface = m.group(0).replace("’", "'")
            key = surface.lower()
            hit = self.entries.get(key)
            if hit is None and key.endswith("'"):
                hit = self.entries.get(key[:-1])
            if hit is not None:
                out.append((surface, hit[0], hit[1]))
            elif self.unknown_pos is not None:
                out.append((surface, key.rstrip("'"), self.unknown_pos))
        return out


def _read_wordlist(name: str) -> frozenset[str]:
    text = (resources.files("dramatopics.resources") / name).read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


def default_stopwords() -> frozenset[str]:
    return _read_wordlist("stopwords_fr.txt")


def default_drop_lemmas() -> frozenset[str]:
    return _read_wordlist("drop_lemmas_fr.txt")


@dataclass
class NormalizerConfig:
    kept_pos: frozenset[str] = DEFAULT_KEPT_POS
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    drop_lemmas: frozenset[str] = field(default_factory=default_drop_lemmas)
    lowercase: bool = True
    min_token_length: int = 2

    def __post_init__(self):
        self.kept_pos = frozenset(self.kept_pos)
        self.stopwords = frozenset(self.stopwords)
        self.drop_lemmas = frozenset(self.drop_lemmas)
        if not self.kept_pos:
            raise CorpusError("kept_pos must not be empty")


def normalize(doc: RawDocument, cfg: NormalizerConfig, lemmatizer: LemmaProvider | None = None) -> list[str]:
    """Filter a document down to content lemmas, preserving order."""
    if doc.tokens is not None:
        tokens = doc.tokens
    else:
        if lemmatizer is None:
            raise CorpusError(f"document {doc.id!r} carries raw text but no lemmatizer was configured")
        tokens = lemmatizer.annotate(doc.text)
    dropped = cfg.stopwords | cfg.drop_lemmas
    out = []
    for _surface, lemma, pos in tokens:
        if pos not in cfg.kept_pos:
            continue
        if cfg.lowercase:
            lemma = lemma.lower()
        if len(lemma) < cfg.min_token_length or lemma in dropped:
            continue
        out.append(lemma)
    return out


# --------------------------------------------------------------------------
# Document-term matrix


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.terms)) != len(self.terms):
            raise CorpusError("vocabulary has duplicate terms")

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)

    def fingerprint(self) -> str:
        return hashlib.sha256("\n".join(self.terms).encode("utf-8")).hexdigest()


@dataclass
class DocTermMatrix:
    counts: sparse.csr_matrix  # D x V, int64
    doc_ids: list[str]
    doc_years: list[int]
    vocab: Vocabulary
    dropped: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not (self.counts.shape[0] == len(self.doc_ids) == len(self.doc_years)):
            raise CorpusError("row count, doc ids and doc years disagree")
        if self.counts.shape[1] != len(self.vocab):
            raise CorpusError("column count does not match vocabulary size")

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def dense(self) -> np.ndarray:
        return self.counts.toarray()


def _doc_freq(docs: Sequence[Sequence[str]]) -> Counter:
    df: Counter = Counter()
    for toks in docs:
        df.update(set(toks))
    return df


def build_matrix(
    docs: Sequence[Sequence[str]],
    min_df: int = 5,
    max_df_fraction: float = 0.5,
    min_doc_tokens: int = 20,
    doc_ids: Sequence[str] | None = None,
    doc_years: Sequence[int] | None = None,
) -> tuple[Vocabulary, DocTermMatrix]:
    """Prune the vocabulary by document frequency and count retained lemmas.

    Documents left with fewer than `min_doc_tokens` retained tokens are dropped
    and the vocabulary recomputed on the survivors until nothing changes, so
    the document-frequency bounds hold on the final matrix.
    """
    if min_df < 1:
        raise CorpusError("min_df must be >= 1")
    if not 0 < max_df_fraction <= 1:
        raise CorpusError("max_df_fraction must lie in (0, 1]")
    ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(len(docs))]
    years = list(doc_years) if doc_years is not None else [0] * len(docs)
    if not len(ids) == len(years) == len(docs):
        raise CorpusError("docs, doc_ids and doc_years must have equal length")

    keep = list(range(len(docs)))
    dropped: list[str] = []
    while True:
        current = [docs[i] for i in keep]
        df = _doc_freq(current)
        max_df = max_df_fraction * len(current)
        terms = sorted(t for t, n in df.items() if min_df <= n <= max_df)
        if not terms:
            raise CorpusError("vocabulary is empty after pruning")
        term_set = set(terms)
        totals = [sum(1 for t in toks if t in term_set) for toks in current]
        low = [i for i, n in zip(keep, totals) if n < min_doc_tokens]
        if not low:
            break
        for i in low:
            log.info("document %s dropped: fewer than %d retained tokens", ids[i], min_doc_tokens)
        dropped.extend(ids[i] for i in low)
        low_set = set(low)
        keep = [i for i in keep if i not in low_set]
        if not keep:
            raise CorpusError("every document fell below the minimum token count")

    vocab = Vocabulary(tuple(terms), tuple(df[t] for t in terms))
    index = vocab.index
    rows, cols, vals = [], [], []
    for r, i in enumerate(keep):
        c = Counter(index[t] for t in docs[i] if t in index)
        for col in sorted(c):
            rows.append(r)
            cols.append(col)
            vals.append(c[col])
    counts = sparse.csr_matrix(
        (np.asarray(vals, dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(len(keep), len(terms)),
        dtype=np.int64,
    )
    matrix = DocTermMatrix(counts, [ids[i] for i in keep], [int(years[i]) for i in keep], vocab, dropped)
    return vocab, matrix


def write_matrix(matrix: DocTermMatrix, path, vocab_path) -> None:
    """Sparse triplet export: header "D V NNZ", then "doc term count" lines (0-based)."""
    coo = matrix.counts.tocoo()
    order = np.lexsort((coo.col, coo.row))
    d, v = matrix.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{d} {v} {coo.nnz}\n")
        for k in order:
            fh.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k]}\n")
    with open(vocab_path, "w", encoding="utf-8") as fh:
        fh.write("".join(t + "\n" for t in matrix.vocab.terms))


def read_matrix(path, vocab_path, doc_ids: Sequence[str], doc_years: Sequence[int]) -> DocTermMatrix:
    with open(vocab_path, encoding="utf-8") as fh:
        terms = [line.rstrip("\n") for line in fh]
    with open(path, encoding="utf-8") as fh:
        d, v, nnz = (int(x) for x in fh.readline().split())
        trip = np.loadtxt(fh, dtype=np.int64, ndmin=2) if nnz else np.zeros((0, 3), dtype=np.int64)
    if trip.shape[0] != nnz or v != len(terms) or d != len(doc_ids):
        raise CorpusError(f"{path}: header does not match contents")
    counts = sparse.csr_matrix((trip[:, 2], (trip[:, 0], trip[:, 1])), shape=(d, v), dtype=np.int64)
    df = np.diff(counts.tocsc().indptr)
    vocab = Vocabulary(tuple(terms), tuple(int(x) for x in df))
    return DocTermMatrix(counts, list(doc_ids), [int(y) for y in doc_years], vocab)
