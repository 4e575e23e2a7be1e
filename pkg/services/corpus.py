"""Seeded corpora of Borel fixed ideals: closures of a few random monomials."""
import logging
import random

from services.borel import BorelIdeal, borel_closure
from services.monomials import Monomial, RingSpec

logger = logging.getLogger(__name__)


def random_monomial(rng: random.Random, n: int, max_degree: int) -> Monomial:
    degree = rng.randint(1, max_degree)
    return Monomial.from_alpha(sorted(rng.randint(1, n) for _ in range(degree)), RingSpec.single(n))


def random_borel_ideal(
    rng: random.Random,
    max_n: int = 5,
    max_degree: int = 5,
    max_seeds: int = 3,
    max_gens: int = 30,
) -> BorelIdeal:
    while True:
        n = rng.randint(1, max_n)
        seeds = [random_monomial(rng, n, max_degree) for _ in range(rng.randint(1, max_seeds))]
        ideal = borel_closure(seeds, RingSpec.single(n))
        if len(ideal.gens) <= max_gens:
            return ideal


def borel_corpus(
    seed: int,
    size: int,
    max_n: int = 5,
    max_degree: int = 5,
    max_seeds: int = 3,
    max_gens: int = 30,
) -> list[BorelIdeal]:
    """``size`` distinct ideals; identical arguments give identical corpora."""
    rng = random.Random(seed)
    corpus: list[BorelIdeal] = []
    seen = set()
    attempts = 0
    while len(corpus) < size and attempts < 50 * size:
        attempts += 1
        ideal = random_borel_ideal(rng, max_n, max_degree, max_seeds, max_gens)
        if ideal.ideal in seen:
            continue
        seen.add(ideal.ideal)
        corpus.append(ideal)
    logger.info("Corpus seed=%d: %d ideals", seed, len(corpus))
    return corpus
