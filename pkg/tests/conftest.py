"""Shared fixtures for the pegkit test suite."""

from __future__ import annotations

from collections import Counter

import pytest

from pegkit import ParseFailed, new_session, parse_complete, registry
from pegkit.engine import UNEVALUATED, ParseSession


class CountingSession(ParseSession):
    """ParseSession that tallies evaluations per memo cell.

    ``eval_counts[(rule, pos)]`` increments exactly when the cell goes
    from Unevaluated to Done; comparing its total against the session's
    own ``cells_evaluated`` counter exposes any hidden re-evaluation.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.eval_counts: Counter[tuple[int, int]] = Counter()

    def apply(self, rule: int, pos: int):
        fresh = self.matrix[rule][pos] is UNEVALUATED
        out = super().apply(rule, pos)
        if fresh:
            self.eval_counts[(rule, pos)] += 1
        return out


@pytest.fixture(scope="session")
def entries():
    return registry()


@pytest.fixture(scope="session")
def accepts():
    """Callable: does the grammar completely parse the text?"""

    def check(grammar, text, config=None) -> bool:
        session = new_session(grammar, text, config=config)
        try:
            parse_complete(session)
        except ParseFailed:
            return False
        return True

    return check


@pytest.fixture(scope="session")
def counting_session_cls():
    return CountingSession
