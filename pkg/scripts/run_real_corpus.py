"""Full analysis of the DraCor French corpus (1700-1900) with LDA and NMF, K=10.

Needs network access on the first run; responses are cached under cache/dracor.
Point DRAMATOPICS_API_BASE at a mirror if dracor.org is not reachable.

    python scripts/run_real_corpus.py [--iterations 1000] [--seed 1789]
"""

import argparse
import logging
from pathlib import Path

from dramatopics.config import load_config
from dramatopics.pipeline import run_all

CONFIG = Path(__file__).with_name("dracor_fre.json")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--iterations", type=int, help="Gibbs sweeps; burn-in is half of them")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out-dir")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    cfg = load_config(CONFIG, seed=args.seed, out_dir=args.out_dir)
    if args.iterations:
        cfg.model.iterations = args.iterations
        cfg.model.burn_in = args.iterations // 2
    run_all(cfg)
    print(f"outputs in {cfg.out_dir}")


if __name__ == "__main__":
    main()
