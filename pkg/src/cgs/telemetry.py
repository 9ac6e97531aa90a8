"""Process-wide operation counters.

The counters make cost claims testable: membership tests count table
lookups, set constructors count themselves, and the change operation
records its state-count checks.
"""

from collections import Counter
from contextlib import contextmanager

counters = Counter()

# When true, every change operation also verifies that it preserved the
# number of accepted strings (an extra backward counting pass).
strict_checks = False


def bump(name, amount=1):
    counters[name] += amount


def snapshot():
    return Counter(counters)


@contextmanager
def measure():
    """Yield a Counter that holds the counter deltas once the block exits."""
    before = snapshot()
    delta = Counter()
    try:
        yield delta
    finally:
        after = snapshot()
        for key in set(before) | set(after):
            diff = after[key] - before[key]
            if diff:
                delta[key] = diff


@contextmanager
def checking(enabled=True):
    """Temporarily toggle :data:`strict_checks`."""
    global strict_checks
    previous = strict_checks
    strict_checks = enabled
    try:
        yield
    finally:
        strict_checks = previous
