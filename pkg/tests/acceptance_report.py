"""Shared record of acceptance outcomes, printed at the end of the run."""

import time
from contextlib import contextmanager

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(number: int, title: str, bound: float | None = None):
    start = time.perf_counter()
    status, note = "FAIL", ""
    notes: list[str] = []
    try:
        yield notes
        elapsed = time.perf_counter() - start
        if bound is not None and elapsed > bound:
            note = f" (over the {bound:g} s bound)"
            raise AssertionError(f"criterion {number} took {elapsed:.1f} s, bound {bound:g} s")
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        extra = "".join(f"; {n}" for n in notes)
        RESULTS[number] = f"{status}  criterion {number:>2}: {title} [{elapsed:.2f} s]{note}{extra}"
        print(RESULTS[number])

