"""Synthetic syscall-trace generation for detector experiments.

Baseline traces repeat a seeded random pattern over a small alphabet,
which is what steady-state service behavior looks like to a bag-based
learner.  An optional injection overwrites a contiguous block with
tokens outside the alphabet, modeling foreign activity for detection
tests.
"""

from __future__ import annotations

import os

import numpy as np

from .reporting import write_text_atomic

__all__ = ["generate_synthetic_trace", "write_trace"]

# baseline pattern length per alphabet symbol; long enough to look busy,
# short enough that the learned database stays small
PATTERN_REPEATS = 4


def generate_synthetic_trace(
    alphabet_size: int,
    length: int,
    seed: int = 0,
    inject_offset: int | None = None,
    inject_length: int = 0,
) -> list[str]:
    """Produce a deterministic trace as a list of syscall names.

    The baseline tiles a seeded random pattern of 4 * alphabet_size
    draws from tokens sc_000..sc_NNN.  When an injection is requested,
    positions [inject_offset, inject_offset + inject_length) are
    replaced with distinct novel_* tokens that no baseline contains.
    """
    if alphabet_size < 1:
        raise ValueError(f"alphabet_size must be >= 1, got {alphabet_size}")
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    if inject_offset is not None:
        if inject_length < 1:
            raise ValueError("inject_length must be >= 1 when an offset is given")
        if inject_offset < 0 or inject_offset >= max(length, 1):
            raise ValueError(
                f"injection offset {inject_offset} is beyond the trace length {length}"
            )
        if inject_offset + inject_length > length:
            raise ValueError(
                f"injection [{inject_offset}, {inject_offset + inject_length}) overruns"
                f" the trace length {length}"
            )
    rng = np.random.default_rng(seed)
    pattern = rng.integers(0, alphabet_size, size=PATTERN_REPEATS * alphabet_size)
    tokens = [f"sc_{i:03d}" for i in range(alphabet_size)]
    trace = [tokens[pattern[i % pattern.size]] for i in range(length)]
    if inject_offset is not None:
        for j in range(inject_length):
            trace[inject_offset + j] = f"novel_{j:03d}"
    return trace


def write_trace(names: list[str], destination: str | os.PathLike) -> None:
    """Write a trace file: one syscall name per line."""
    text = "".join(f"{name}\n" for name in names)
    write_text_atomic(text, destination)
