"""Shared registry for acceptance-criterion outcomes.

The conftest terminal-summary hook prints one line per criterion after the
run, outside pytest's output capture.
"""
from contextlib import contextmanager

RESULTS: list[tuple[str, str]] = []


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        RESULTS.append((name, "FAIL"))
        raise
    else:
        RESULTS.append((name, "PASS"))
