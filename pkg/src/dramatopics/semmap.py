"""Cosine distances between documents, classical MDS and topic label placement."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .topicmodel import TopicModel


class MapError(ValueError):
    pass


@dataclass
class EmbeddingCoords:
    doc_ids: list[str]
    xy: np.ndarray  # D x dims
    eigenvalues: np.ndarray  # all eigenvalues of the centered Gram matrix, descending
    labels: list[tuple[int, str, float, float]] = field(default_factory=list)


def cosine_distance_matrix(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    norms = np.linalg.norm(theta, axis=1)
    if (norms == 0).any():
        raise MapError(f"zero-norm rows: {np.flatnonzero(norms == 0).tolist()}")
    unit = theta / norms[:, None]
    sim = np.clip(unit @ unit.T, -1.0, 1.0)
    dist = 1.0 - sim
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return np.maximum(dist, 0.0)


def classical_mds(distances, dims: int = 2, doc_ids=None) -> EmbeddingCoords:
    """Torgerson scaling: double-center the squared distances and take the top eigenpairs.

    Each axis is flipped so that its largest-magnitude coordinate is positive.
    Axes whose eigenvalue is not clearly positive collapse to zero.
    """
    Dm = np.asarray(distances, dtype=np.float64)
    n = Dm.shape[0]
    if Dm.ndim != 2 or Dm.shape[1] != n:
        raise MapError("distance matrix must be square")
    scale = max(np.abs(Dm).max(initial=0.0), 1.0)
    if np.abs(Dm - Dm.T).max(initial=0.0) > 1e-12 * scale:
        raise MapError("distance matrix is not symmetric")
    if (np.diag(Dm) < 0).any() or np.abs(np.diag(Dm)).max(initial=0.0) > 0:
        raise MapError("distance matrix must have a zero diagonal")
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (Dm ** 2) @ J
    B = 0.5 * (B + B.T)
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    xy = np.zeros((n, dims))
    # eigenvalues at rounding-noise level would contribute sqrt(noise) coordinates
    floor = 1e-12 * max(abs(evals[0]), abs(evals[-1])) if n else 0.0
    for a in range(min(dims, n)):
        if evals[a] <= floor:
            continue
        col = evecs[:, a] * np.sqrt(evals[a])
        if col[np.argmax(np.abs(col))] < 0:
            col = -col
        xy[:, a] = col
    ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(n)]
    return EmbeddingCoords(ids, xy, evals)


def representative_docs(model: TopicModel, topic: int, n: int = 5) -> list[str]:
    """The n documents with the largest share of `topic`; ties by doc id."""
    if not 0 <= topic < model.n_topics:
        raise MapError(f"topic {topic} out of range")
    if n > len(model.doc_ids):
        raise MapError(f"n={n} exceeds document count {len(model.doc_ids)}")
    col = model.theta[:, topic]
    order = sorted(range(len(col)), key=lambda i: (-col[i], model.doc_ids[i]))
    return [model.doc_ids[i] for i in order[:n]]


def place_labels(coords: EmbeddingCoords, model: TopicModel, topics, n: int = 5) -> EmbeddingCoords:
    """Put each (topic, label) at the centroid of its representative documents."""
    pos = {d: i for i, d in enumerate(coords.doc_ids)}
    labels = []
    for topic, text in topics:
        if not 0 <= topic < model.n_topics:
            raise MapError(f"unknown topic {topic}")
        rows = [pos[d] for d in representative_docs(model, topic, n)]
        cx, cy = coords.xy[rows, :2].mean(axis=0)
        labels.append((topic, text, float(cx), float(cy)))
    return EmbeddingCoords(coords.doc_ids, coords.xy, coords.eigenvalues, labels)
