import math
from typing import Sequence


def is_power_of_two(n: int) -> bool:
    """Validate that n is a positive power of two."""
    return n > 0 and (n & (n - 1)) == 0


def is_finite(*values: float) -> bool:
    """Validate that every value is a finite real number."""
    try:
        return all(math.isfinite(v) for v in values)
    except TypeError:
        return False


def covers_interval(lo: float, hi: float, start: float, end: float) -> bool:
    """Validate that [start, end] lies inside [lo, hi]."""
    return lo <= start and end <= hi


def is_doubling_sequence(values: Sequence[int]) -> bool:
    """Validate that each entry is twice the previous one."""
    return all(b == 2 * a for a, b in zip(values, values[1:]))
