import numpy as np
import pytest
from scipy import sparse

from dramatopics.corpus import DocTermMatrix, Vocabulary


def two_topic_corpus(n_docs=200, half=50, doc_len=120, seed=7):
    """Documents from two topics with disjoint vocabularies: topic 0 owns
    terms [0, half), topic 1 owns [half, 2*half). Returns (matrix, true_theta)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    V = 2 * half
    phi = np.zeros((2, V))
    phi[0, :half] = rng.dirichlet(np.ones(half))
    phi[1, half:] = rng.dirichlet(np.ones(half))
    theta = rng.dirichlet([0.5, 0.5], size=n_docs)
    counts = np.zeros((n_docs, V), dtype=np.int64)
    for d in range(n_docs):
        z = rng.choice(2, size=doc_len, p=theta[d])
        for k in (0, 1):
            n = int((z == k).sum())
            if n:
                counts[d] += rng.multinomial(n, phi[k])
    terms = tuple(f"w{i:03d}" for i in range(V))
    vocab = Vocabulary(terms, tuple(int(x) for x in (counts > 0).sum(axis=0)))
    years = [1700 + d % 200 for d in range(n_docs)]
    matrix = DocTermMatrix(sparse.csr_matrix(counts), [f"d{d:03d}" for d in range(n_docs)], years, vocab)
    return matrix, theta


@pytest.fixture(scope="session")
def synthetic_two_topic():
    return two_topic_corpus()


def matrix_from_dense(counts, years=None):
    counts = np.asarray(counts, dtype=np.int64)
    D, V = counts.shape
    vocab = Vocabulary(tuple(f"t{i}" for i in range(V)), tuple(int(x) for x in (counts > 0).sum(axis=0)))
    return DocTermMatrix(sparse.csr_matrix(counts), [f"d{i}" for i in range(D)],
                         list(years) if years is not None else [1700] * D, vocab)


CRITERIA = {
    "test_criterion_1_divergence": "1 divergence oracle suite",
    "test_criterion_2_ols": "2 OLS suite",
    "test_criterion_3_lda_recovery": "3 LDA generative recovery",
    "test_criterion_4_nmf": "4 NMF factorization",
    "test_criterion_5_mds": "5 classical MDS",
    "test_criterion_6_pipeline_golden_run": "6 pipeline golden run",
    "test_criterion_7_real_corpus_smoke": "7 real-corpus smoke test (network, optional)",
}


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            name = nodeid.split("::")[-1]
            if name in CRITERIA and (outcome != "passed" or rep.when == "call"):
                lines.append((name, outcome))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    seen = dict(sorted(set(lines)))
    for name, title in CRITERIA.items():
        label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP", None: "NOT RUN (deselected)"}[seen.get(name)]
        terminalreporter.write_line(f"criterion {title}: {label}")
