"""Multiply-add counter for the complexity harness"""
from __future__ import annotations

import contextlib
from collections import Counter
from typing import Iterator


class FlopCounter:
    def __init__(self) -> None:
        self.total = 0
        self.by_op: Counter[str] = Counter()

    def add(self, op: str, count: int) -> None:
        self.total += int(count)
        self.by_op[op] += int(count)


_active: list[FlopCounter] = []


@contextlib.contextmanager
def count_flops() -> Iterator[FlopCounter]:
    """Count floating-point operations issued by autodiff ops inside the block."""
    counter = FlopCounter()
    _active.append(counter)
    try:
        yield counter
    finally:
        _active.remove(counter)


def record(op: str, count: int) -> None:
    for counter in _active:
        counter.add(op, count)
