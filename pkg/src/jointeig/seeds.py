"""Deterministic seed derivation for trial fan-out.

Every Monte-Carlo loop in the package derives per-trial seeds from a single
base seed so that results are independent of execution order and worker
count.  The mixing function is SplitMix64; the exact constants are part of
the documented file-format contract (see docs/formats.md) so that runs are
reproducible across versions.
"""

import os

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 output step for the 64-bit state ``x``."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Mix ``(seed, index)`` into a fresh 64-bit seed.

    Defined as ``splitmix64(splitmix64(seed) + index)`` on 64-bit words.
    Chaining calls gives independent sub-streams, e.g.
    ``derive_seed(derive_seed(base, j), t)`` for trial ``t`` of config ``j``.
    """
    return splitmix64((splitmix64(seed & _MASK64) + (index & _MASK64)) & _MASK64)


def thread_count() -> int:
    """Worker cap for parallel trial loops, from ``JOINTEIG_THREADS``.

    Unset or empty means serial execution; ``0`` means one worker per CPU.
    """
    raw = os.environ.get("JOINTEIG_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)
