"""Reward-trace equivalence between counter automata and pushdown machines."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.automata.pdrm import PdRM
from src.automata.semantics import run_word
from src.counting.cra import CounterMachine, NegativeCounter, run_counter_word

logger = logging.getLogger(__name__)

EQUAL = "equal"
MISMATCH = "mismatch"
CRA_UNDEFINED = "cra_undefined"

Word = List[frozenset]


@dataclass
class WordResult:
    word: Word
    status: str
    cra_trace: Optional[List[float]]
    pdrm_trace: List[float]


@dataclass
class EquivalenceReport:
    """Per-word comparison. ``passed`` iff no word produced different traces."""

    results: List[WordResult] = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return not self.mismatches

    @property
    def mismatches(self) -> List[WordResult]:
        return [r for r in self.results if r.status == MISMATCH]

    @property
    def n_checked(self) -> int:
        return sum(1 for r in self.results if r.status != CRA_UNDEFINED)

    def merge(self, other: "EquivalenceReport") -> "EquivalenceReport":
        return EquivalenceReport(self.results + other.results, self.seed)


def generate_words(
    props: Iterable[str], n_words: int, max_length: int = 20, seed: int = 0
) -> List[Word]:
    """Random words over the singleton label sets and the empty set.

    Lengths are uniform in ``[0, max_length]``; letters are uniform.
    """
    letters = [frozenset()] + [frozenset([p]) for p in sorted(props)]
    rng = np.random.default_rng(seed)
    words: List[Word] = []
    for _ in range(n_words):
        length = int(rng.integers(0, max_length + 1))
        picks = rng.integers(0, len(letters), size=length)
        words.append([letters[i] for i in picks])
    return words


def compare_word(cra: CounterMachine, pdrm: PdRM, word: Sequence[frozenset]) -> WordResult:
    pdrm_trace, _ = run_word(pdrm, word)
    try:
        cra_trace, _ = run_counter_word(cra, word)
    except NegativeCounter:
        return WordResult(list(word), CRA_UNDEFINED, None, pdrm_trace)
    status = EQUAL if cra_trace == pdrm_trace else MISMATCH
    return WordResult(list(word), status, cra_trace, pdrm_trace)


def check_reward_equivalence(
    cra: CounterMachine,
    pdrm: PdRM,
    words: Sequence[Sequence[frozenset]],
    seed: Optional[int] = None,
    n_jobs: int = 1,
    batch_size: int = 250,
) -> EquivalenceReport:
    """Run both machines on every word and compare reward traces exactly.

    Words on which the counter automaton would drive a counter negative are
    recorded as undefined and do not count as mismatches.

    Args:
        cra: Counter automaton
        pdrm: Pushdown machine over the same propositions
        words: Input words
        seed: Seed the words were generated with, kept in the report
        n_jobs: Worker count for checking disjoint batches
        batch_size: Words per batch

    Returns:
        EquivalenceReport with one entry per word
    """
    batches = [list(words[i:i + batch_size]) for i in range(0, len(words), batch_size)]
    if n_jobs == 1 or len(batches) <= 1:
        parts = [_check_batch(cra, pdrm, batch) for batch in batches]
    else:
        parts = Parallel(n_jobs=n_jobs)(delayed(_check_batch)(cra, pdrm, batch) for batch in batches)
    report = EquivalenceReport(seed=seed)
    for part in parts:
        report = report.merge(part)
    for result in report.mismatches:
        word = [sorted(s) for s in result.word]
        logger.warning(f"Trace mismatch on {word}: cra={result.cra_trace} pdrm={result.pdrm_trace}")
    return report


def _check_batch(cra: CounterMachine, pdrm: PdRM, words: List[Sequence[frozenset]]) -> EquivalenceReport:
    return EquivalenceReport([compare_word(cra, pdrm, w) for w in words])
