"""Generate the bundled synthetic drift corpus and a synthetic GDP-like series.

60 "plays", three in each decade year 1700, 1710, ..., 1890, drawn from four
disjoint-vocabulary topics. Topic 0 ("court") declines and topic 1
("household") rises, with an abrupt regime change between 1790 and 1800.
Each play also carries function words, light verbs and address terms that
preprocessing must remove, plus a couple of rare names that min_df prunes.

    python scripts/make_sample_corpus.py [--out src/dramatopics/data]
"""

import argparse
import csv
import json
from pathlib import Path

import numpy as np

TOPICS = {
    "court": [("roi", "NOUN"), ("trône", "NOUN"), ("vertu", "NOUN"), ("loi", "NOUN"), ("peuple", "NOUN"),
              ("crime", "NOUN"), ("tyran", "NOUN"), ("gloire", "NOUN"), ("honneur", "NOUN"), ("sang", "NOUN"),
              ("empire", "NOUN"), ("prince", "NOUN"), ("justice", "NOUN"), ("vengeance", "NOUN"),
              ("couronne", "NOUN"), ("sceptre", "NOUN"), ("autel", "NOUN"), ("destin", "NOUN"),
              ("héros", "NOUN"), ("régner", "VERB"), ("punir", "VERB"), ("venger", "VERB"),
              ("cruel", "ADJ"), ("noble", "ADJ"), ("juste", "ADJ")],
    "household": [("argent", "NOUN"), ("franc", "NOUN"), ("dot", "NOUN"), ("notaire", "NOUN"),
                  ("affaire", "NOUN"), ("dette", "NOUN"), ("maison", "NOUN"), ("mari", "NOUN"),
                  ("marchand", "NOUN"), ("boutique", "NOUN"), ("commerce", "NOUN"), ("banque", "NOUN"),
                  ("fortune", "NOUN"), ("salaire", "NOUN"), ("rente", "NOUN"), ("loyer", "NOUN"),
                  ("bourse", "NOUN"), ("usine", "NOUN"), ("héritage", "NOUN"), ("payer", "VERB"),
                  ("vendre", "VERB"), ("acheter", "VERB"), ("pauvre", "ADJ"), ("riche", "ADJ"),
                  ("bourgeois", "ADJ")],
    "love": [("amour", "NOUN"), ("cœur", "NOUN"), ("soupir", "NOUN"), ("charme", "NOUN"), ("beauté", "NOUN"),
             ("flamme", "NOUN"), ("larme", "NOUN"), ("baiser", "NOUN"), ("amant", "NOUN"), ("rival", "NOUN"),
             ("passion", "NOUN"), ("regard", "NOUN"), ("plaisir", "NOUN"), ("bonheur", "NOUN"),
             ("espoir", "NOUN"), ("désir", "NOUN"), ("promesse", "NOUN"), ("serment", "NOUN"),
             ("lettre", "NOUN"), ("aimer", "VERB"), ("soupirer", "VERB"), ("tendre", "ADJ"),
             ("jaloux", "ADJ"), ("fidèle", "ADJ"), ("charmant", "ADJ")],
    "home": [("père", "NOUN"), ("mère", "NOUN"), ("fille", "NOUN"), ("fils", "NOUN"), ("oncle", "NOUN"),
             ("tante", "NOUN"), ("cousin", "NOUN"), ("valet", "NOUN"), ("servante", "NOUN"), ("dîner", "NOUN"),
             ("jardin", "NOUN"), ("chambre", "NOUN"), ("voisin", "NOUN"), ("ami", "NOUN"), ("chapeau", "NOUN"),
             ("habit", "NOUN"), ("perruque", "NOUN"), ("carrosse", "NOUN"), ("bal", "NOUN"),
             ("musique", "NOUN"), ("chanson", "NOUN"), ("vin", "NOUN"), ("souper", "VERB"),
             ("danser", "VERB"), ("gai", "ADJ")],
}
FILLER = [("et", "et", "CCONJ"), ("le", "le", "DET"), ("la", "le", "DET"), ("de", "de", "ADP"),
          ("est", "être", "AUX"), ("a", "avoir", "AUX"), ("fait", "faire", "VERB"), ("dit", "dire", "VERB"),
          ("Monsieur", "monsieur", "NOUN"), ("Madame", "madame", "NOUN"), ("il", "il", "PRON"),
          ("ne", "ne", "ADV"), ("pas", "pas", "ADV"), ("tout", "tout", "ADJ")]
RARE_NAMES = ["Clitandre", "Dorante", "Arsinoé", "Célimène", "Philinte", "Oronte", "Éliante", "Acaste",
              "Harpagon", "Valère", "Cléante", "Frosine", "Sganarelle", "Géronte", "Léandre", "Zerbinette",
              "Argan", "Béline", "Toinette", "Angélique", "Purgon", "Fleurant", "Thomas", "Diafoirus",
              "Tartuffe", "Orgon", "Elmire", "Damis", "Mariane", "Dorine", "Loyal", "Laurent", "Agnès",
              "Arnolphe", "Horace", "Chrysalde", "Alain", "Georgette", "Enrique", "Bélise"]

YEARS = list(range(1700, 1900, 10))
DOCS_PER_YEAR = 3
CHANGEPOINT = 1800  # first year of the second regime
CONTENT_TOKENS = 300
FILLER_TOKENS = 60


def topic_mixture(year: int) -> np.ndarray:
    """Planted mean mixture over (court, household, love, home)."""
    if year < CHANGEPOINT:
        court = 0.60 - 0.0005 * (year - 1700)
        household = 0.08 + 0.0003 * (year - 1700)
    else:
        court = 0.12 - 0.0003 * (year - 1800)
        household = 0.50 + 0.0005 * (year - 1800)
    rest = (1.0 - court - household) / 2
    return np.array([court, household, rest, rest])


def generate(seed: int = 20240601):
    rng = np.random.Generator(np.random.PCG64(seed))
    names = list(TOPICS)
    word_dists = [rng.dirichlet(np.full(len(TOPICS[n]), 2.0)) for n in names]
    docs = []
    i = 0
    for year in YEARS:
        mean = topic_mixture(year)
        for _ in range(DOCS_PER_YEAR):
            theta = rng.dirichlet(mean * 200)
            tokens = []
            for k in rng.choice(len(names), size=CONTENT_TOKENS, p=theta):
                lemma, pos = TOPICS[names[k]][rng.choice(len(word_dists[k]), p=word_dists[k])]
                tokens.append([lemma, lemma, pos])
            for j in rng.choice(len(FILLER), size=FILLER_TOKENS):
                tokens.append(list(FILLER[j]))
            for j in rng.choice(len(RARE_NAMES), size=2, replace=False):
                tokens.append([RARE_NAMES[j], RARE_NAMES[j], "PROPN"])
            order = rng.permutation(len(tokens))
            docs.append({"id": f"play{i:03d}", "year": year, "title": f"Pièce {i} ({year})",
                         "tokens": [tokens[j] for j in order]})
            i += 1
    return docs


def gdp_series():
    """Synthetic GDP-per-capita-like series: slow growth, take-off after 1825, sparse before 1820."""
    years = [1700, 1720, 1740, 1760, 1780, 1800] + list(range(1820, 1901, 5))
    out = []
    for y in years:
        base = 1000 * (1.002 ** (y - 1700))
        if y > 1825:
            base *= 1.012 ** (y - 1825)
        out.append((y, round(base, 1)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src" / "dramatopics" / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sample_corpus.jsonl", "w", encoding="utf-8") as fh:
        for d in generate():
            fh.write(json.dumps(d, ensure_ascii=False) + "\n")
    with open(out / "sample_gdp.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "year", "gdppc"])
        for y, v in gdp_series():
            w.writerow(["synthetic", y, v])
    print(f"wrote {out / 'sample_corpus.jsonl'} and {out / 'sample_gdp.csv'}")


if __name__ == "__main__":
    main()
