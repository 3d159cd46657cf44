"""Deterministic synthetic noisy bitext for the filter tests.

Builds a 1000-pair corpus whose target side has 182 injected noisy lines:
junk-symbol rows, shuffled (unrelated) translations, and wrong-language
rows. Everything derives from a fixed seed, so test runs are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

SEED = 20240817
TOTAL_PAIRS = 1000
NOISY_PAIRS = 182

_EN_WORDS = """
people history city water music school market river garden window
mountain letter evening morning teacher doctor bridge forest station
village journey member moment problem answer question silence picture
kitchen project holiday weather library neighbor business student
contract painting article channel culture traffic economy airport
factory justice finger captain quarter officer concert machine country
science service purpose freedom payment hospital chapter director
""".split()

_EN_VERBS = """
builds carries explains defends paints watches repairs delivers
describes invites forgets borrows organizes protects measures
welcomes remembers collects compares improves translates announces
""".split()

_PL_WORDS = """
miasto woda szkoła rzeka ogród okno góra list wieczór poranek
nauczyciel lekarz most las stacja wioska podróż problem odpowiedź
pytanie cisza obraz kuchnia projekt pogoda biblioteka sąsiad uczeń
umowa artykuł kultura ruch gospodarka lotnisko fabryka kapitan
oficer koncert maszyna kraj nauka wolność szpital rozdział dyrektor
""".split()

_JUNK_LINES = [
    "ISBN 1-55164-250-6.",
    "[[Category:Historia]] {{stub}}",
    "??? *** !!! ~~~~",
    "p. 451, vol. II, fig. 7(b)",
    "<ref name=auto1/> 1998-2004 ----",
    "#REDIRECT [[Main page]]",
    "|- style=background:#ccc |",
    "123 456 789 000 111 222",
]


def _sentence(rng: random.Random, words, verbs=None, n_lo=8, n_hi=13) -> str:
    n = rng.randint(n_lo, n_hi)
    toks = [rng.choice(words) for _ in range(n)]
    if verbs:
        toks[1] = rng.choice(verbs)
    toks[0] = toks[0].capitalize()
    return " ".join(toks) + "."


def _perturb(rng: random.Random, sentence: str, words) -> str:
    """Light MT-style noise: maybe replace one interior word, maybe drop
    the final period."""
    toks = sentence[:-1].split()
    roll = rng.random()
    if roll < 0.45 and len(toks) > 4:
        pos = rng.randrange(2, len(toks))
        toks[pos] = rng.choice(words)
    elif roll < 0.6 and len(toks) > 5:
        pos = rng.randrange(2, len(toks))
        del toks[pos]
    out = " ".join(toks)
    if rng.random() < 0.9:
        out += "."
    return out


@dataclass(frozen=True)
class SyntheticBitext:
    source: tuple[str, ...]
    target: tuple[str, ...]
    trans: tuple[str, ...]
    noisy_indices: tuple[int, ...]

    @property
    def gold_poor(self) -> set[tuple[int, int]]:
        return {(i, i) for i in self.noisy_indices}

    @property
    def gold_good(self) -> set[tuple[int, int]]:
        noisy = set(self.noisy_indices)
        return {(i, i) for i in range(len(self.source)) if i not in noisy}

    def labels_covering(self, pairs) -> tuple[set, set]:
        """Ground-truth (poor, good) label sets for the diagonal plus any
        extra pairs in `pairs`. A pair is good only when it sits on the
        diagonal and the line was not injected; everything else is poor."""
        good = self.gold_good
        poor = self.gold_poor | {
            (i, j) for i, j in pairs if (i, j) not in good and (i, j) not in self.gold_poor
        }
        return poor, good


def build(total: int = TOTAL_PAIRS, noisy: int = NOISY_PAIRS,
          seed: int = SEED) -> SyntheticBitext:
    rng = random.Random(seed)
    source = []
    target = []
    trans = []
    for _ in range(total):
        src_line = _sentence(rng, _PL_WORDS)
        tgt_line = _sentence(rng, _EN_WORDS, _EN_VERBS)
        source.append(src_line)
        target.append(tgt_line)
        trans.append(_perturb(rng, tgt_line, _EN_WORDS))
    noisy_indices = sorted(rng.sample(range(total), noisy))
    kinds = ["junk", "shuffled", "wrong_lang"]
    for idx in noisy_indices:
        kind = kinds[idx % 3]
        if kind == "junk":
            target[idx] = rng.choice(_JUNK_LINES)
        elif kind == "shuffled":
            # an unrelated fluent sentence: the right language, wrong content
            target[idx] = _sentence(rng, _EN_WORDS, _EN_VERBS)
        else:
            target[idx] = _sentence(rng, _PL_WORDS)
    return SyntheticBitext(
        source=tuple(source),
        target=tuple(target),
        trans=tuple(trans),
        noisy_indices=tuple(noisy_indices),
    )
