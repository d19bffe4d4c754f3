from __future__ import annotations

import random
from functools import lru_cache

import pytest

from vnkernel.params import DESK
from vnkernel.rules import Configuration
from vnkernel.words import LETTERS, ball, inverse_letter, multiply


@lru_cache(maxsize=None)
def _window(radius: int) -> tuple[tuple[str, ...], frozenset[str]]:
    """The ball in a fixed order (for reproducible noise) and as a set."""
    words = tuple(ball("", radius))
    return words, frozenset(words)


def random_word(rng: random.Random, n: int) -> str:
    out = []
    for _ in range(n):
        c = rng.choice(LETTERS)
        while out and c == inverse_letter(out[-1]):
            c = rng.choice(LETTERS)
        out.append(c)
    return "".join(out)


def _walk(rng: random.Random, start: str, first: str, length: int, turn: float) -> list[str]:
    out = []
    g, s = start, first
    for _ in range(length):
        g = multiply(g, s)
        out.append(g)
        if rng.random() < turn:
            choices = [t for t in LETTERS if t not in (s, inverse_letter(s))]
            s = rng.choice(choices)
    return out


def _defect(rng: random.Random, end: str, before: str) -> list[str]:
    """Zeros that spoil the end of an arm: a short dogleg or a fork."""
    last = [t for t in LETTERS if multiply(before, t) == end]
    s = last[0] if last else rng.choice(LETTERS)
    side = [t for t in LETTERS if t not in (s, inverse_letter(s))]
    t = rng.choice(side)
    if rng.random() < 0.5:
        # turn, one step, turn back: a short run flanked by the arm's direction
        g = multiply(end, t)
        return [g, multiply(g, s), multiply(multiply(g, s), s)]
    # fork: two branches leave the end
    return [multiply(end, t), multiply(end, s)] + [multiply(multiply(end, t), t)]


def planted_zeros(rng: random.Random, radius: int = 8) -> set[str]:
    """A path through (or next to) the identity, with occasional defects.

    The two arms turn rarely so long dogleg-free stretches are common; short
    side runs, forks and a little background noise produce bad ends.
    """
    centre = "" if rng.random() < 0.8 else rng.choice(LETTERS)
    s1 = rng.choice(LETTERS)
    s2 = rng.choice([t for t in LETTERS if t != s1])
    zeros = {centre}
    arms = []
    for s in (s1, s2):
        arm = _walk(rng, centre, s, rng.randint(0, radius), rng.choice((0.0, 0.0, 0.1, 0.3)))
        arms.append(arm)
        zeros.update(arm)
    for (s, arm) in zip((s1, s2), arms):
        if rng.random() < 0.5:
            zeros.update(_defect(rng, arm[-1] if arm else centre, arm[-2] if len(arm) > 1 else centre))
    noise = rng.choice((0.0, 0.0, 0.002, 0.01))
    ordered, window = _window(radius)
    if noise:
        zeros.update(g for g in ordered if rng.random() < noise)
    return zeros & window


def planted_configuration(rng: random.Random, radius: int = 8) -> Configuration:
    return Configuration.from_zeros(planted_zeros(rng, radius))


@pytest.fixture
def desk():
    return DESK


@pytest.fixture
def rng():
    return random.Random(20240601)


# acceptance results, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
