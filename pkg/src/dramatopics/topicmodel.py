"""Fitted topic model container shared by LDA and NMF, with I/O and diagnostics."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import DocTermMatrix

STOCHASTIC_TOL = 1e-9


class ModelError(ValueError):
    pass


def config_fingerprint(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode("utf-8")).hexdigest()[:16]


@dataclass
class TopicModel:
    """Doc-topic (theta, D x K) and topic-word (phi, K x V) distributions."""

    theta: np.ndarray
    phi: np.ndarray
    method: str
    seed: int
    config: dict
    terms: tuple[str, ...]
    doc_ids: list[str]
    doc_years: list[int]
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        self.phi = np.asarray(self.phi, dtype=np.float64)
        if self.method not in ("LDA", "NMF"):
            raise ModelError(f"unknown method {self.method!r}")
        d, k = self.theta.shape
        k2, v = self.phi.shape
        if k != k2 or v != len(self.terms) or d != len(self.doc_ids) or d != len(self.doc_years):
            raise ModelError("theta/phi/terms/doc_ids shapes are inconsistent")
        for name, m in (("theta", self.theta), ("phi", self.phi)):
            if (m < 0).any() or np.abs(m.sum(axis=1) - 1.0).max(initial=0.0) > STOCHASTIC_TOL:
                raise ModelError(f"{name} is not row-stochastic")

    @property
    def n_topics(self) -> int:
        return self.phi.shape[0]

    @property
    def fingerprint(self) -> str:
        return config_fingerprint(self.config)

    def vocab_hash(self) -> str:
        return hashlib.sha256("\n".join(self.terms).encode("utf-8")).hexdigest()

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "seed": self.seed,
            "config": self.config,
            "config_fingerprint": self.fingerprint,
            "vocab_hash": self.vocab_hash(),
            "terms": list(self.terms),
            "doc_ids": self.doc_ids,
            "doc_years": self.doc_years,
            "theta": self.theta.tolist(),
            "phi": self.phi.tolist(),
            "flags": self.flags,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TopicModel":
        model = cls(
            theta=np.array(obj["theta"], dtype=np.float64),
            phi=np.array(obj["phi"], dtype=np.float64),
            method=obj["method"],
            seed=obj["seed"],
            config=obj["config"],
            terms=tuple(obj["terms"]),
            doc_ids=list(obj["doc_ids"]),
            doc_years=[int(y) for y in obj["doc_years"]],
            flags=obj.get("flags", {}),
        )
        if model.vocab_hash() != obj.get("vocab_hash", model.vocab_hash()):
            raise ModelError("vocabulary hash mismatch in serialized model")
        return model

    def save(self, path) -> None:
        # repr() round-trips floats exactly, which json does by default
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path) -> "TopicModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def top_words(model: TopicModel, topic: int, n: int = 15) -> list[tuple[str, float]]:
    """The n most probable terms of a topic; ties go to the lower vocabulary index."""
    if not 0 <= topic < model.n_topics:
        raise ModelError(f"topic {topic} out of range 0..{model.n_topics - 1}")
    if n < 1:
        raise ModelError("n must be >= 1")
    row = model.phi[topic]
    order = np.lexsort((np.arange(row.size), -row))[:n]
    return [(model.terms[i], float(row[i])) for i in order]


def perplexity(model: TopicModel, matrix: DocTermMatrix) -> float:
    if tuple(matrix.vocab.terms) != tuple(model.terms):
        raise ModelError("model and matrix vocabularies differ")
    if matrix.shape[0] != model.theta.shape[0]:
        raise ModelError("model and matrix have different document counts")
    coo = matrix.counts.tocoo()
    probs = np.einsum("nk,kn->n", model.theta[coo.row], model.phi[:, coo.col])
    total = coo.data.sum()
    return float(np.exp(-np.sum(coo.data * np.log(probs)) / total))


def match_topics(phi_ref: np.ndarray, phi_other: np.ndarray) -> np.ndarray:
    """Permutation `perm` such that phi_other[perm[k]] best matches phi_ref[k].

    Best bipartite matching on cosine similarity of topic-word rows.
    """
    a = phi_ref / np.linalg.norm(phi_ref, axis=1, keepdims=True)
    b = phi_other / np.linalg.norm(phi_other, axis=1, keepdims=True)
    rows, cols = linear_sum_assignment(-(a @ b.T))
    perm = np.empty(len(rows), dtype=int)
    perm[rows] = cols
    return perm


def write_theta_csv(model: TopicModel, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", "year"] + [f"topic_{k}" for k in range(model.n_topics)])
        for doc_id, year, row in zip(model.doc_ids, model.doc_years, model.theta):
            w.writerow([doc_id, year] + [repr(float(x)) for x in row])


def write_phi_csv(model: TopicModel, path, n: int = 15) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["topic", "rank", "term", "probability"])
        for k in range(model.n_topics):
            for rank, (term, p) in enumerate(top_words(model, k, min(n, len(model.terms)))):
                w.writerow([k, rank, term, repr(p)])
