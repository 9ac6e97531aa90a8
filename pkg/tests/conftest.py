import itertools
import random

import pytest

from cgs.dfa import from_strings, iter_strings, letters


def all_strings(k, length):
    return list(itertools.product(range(k), repeat=length))


def random_language(rng, k, length, density=None):
    """A random subset of all ``k**length`` strings, as a Python set."""
    if density is None:
        density = rng.choice([0.0, 0.05, 0.3, 0.5, 0.9, 1.0])
    return {s for s in all_strings(k, length) if rng.random() < density}


def as_set(language, k, length):
    return from_strings(letters(k), length, sorted(language))


def language(s):
    return set(iter_strings(s))


@pytest.fixture
def rng():
    return random.Random(20240611)


def checkpoint_levels(checkpoint):
    """``{ply: (player_tag, RW, RL)}`` from a finished meet-in-the-middle checkpoint."""
    out = {}
    for name in checkpoint.names():
        entry = checkpoint.entry(name)
        if entry["kind"] not in ("RW", "RL"):
            continue
        i = int(entry["ply_forward"])
        tag, rw, rl = out.get(i, (entry["player"], None, None))
        if entry["kind"] == "RW":
            rw = checkpoint.load(name)
        else:
            rl = checkpoint.load(name)
        out[i] = (tag, rw, rl)
    return out


def oracle_levels(game, values, levels):
    """Per ply, the oracle's WIN and LOSS positions as position sets."""
    from cgs.oracle import Value

    out = []
    for i, level in enumerate(levels):
        player = 1 if i % 2 == 0 else 2
        wins = [tuple(p) for p in level if values[(p, player)] is Value.WIN]
        losses = [tuple(p) for p in level if values[(p, player)] is Value.LOSS]
        draws = [p for p in level if values[(p, player)] is Value.DRAW]
        out.append(
            (
                from_strings(game.alphabet, game.length, wins),
                from_strings(game.alphabet, game.length, losses),
                len(draws),
            )
        )
    return out


def mismatches_against_oracle(game, levels_dfa, levels_oracle):
    """Number of reachable positions the two classifications disagree on."""
    from cgs.algebra import difference, union

    bad = 0
    for i, (win, loss, draws) in enumerate(levels_oracle):
        bad += draws
        if win.is_empty and loss.is_empty:
            assert i not in levels_dfa or (levels_dfa[i][1].is_empty and levels_dfa[i][2].is_empty)
            continue
        _, rw, rl = levels_dfa[i]
        bad += union(difference(rw, win), difference(win, rw)).count()
        bad += union(difference(rl, loss), difference(loss, rl)).count()
    return bad


# criterion number -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")
