"""Discrete time domain with an infinity element.

Finite time values are plain non-negative ints.  ``INF`` is a singleton
that compares above every int and is absorbing for addition.  All timer,
clock and delay arithmetic in the engine goes through the helpers here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class Infinity:
    """The unbounded time value.  There is exactly one instance, ``INF``."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __lt__(self, other):
        if isinstance(other, (int, Infinity)):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, Infinity):
            return True
        if isinstance(other, int):
            return False
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, Infinity):
            return False
        if isinstance(other, int):
            return True
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, Infinity)):
            return True
        return NotImplemented

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self


INF = Infinity()

TimeInf = Union[int, Infinity]


def is_time(v) -> bool:
    """True for finite, non-negative time values (bools excluded)."""
    return type(v) is int and v >= 0


def is_time_inf(v) -> bool:
    return v is INF or is_time(v)


def plus(a: TimeInf, b: TimeInf) -> TimeInf:
    if a is INF or b is INF:
        return INF
    return a + b


def monus(a: TimeInf, b: int) -> TimeInf:
    """Truncated subtraction; the subtrahend must be finite."""
    if not is_time(b):
        raise ValueError(f"monus needs a finite subtrahend, got {b!r}")
    if a is INF:
        return INF
    return a - b if a > b else 0


def min_time(a: TimeInf, b: TimeInf) -> TimeInf:
    return b if b < a else a


def format_time(v: TimeInf) -> str:
    return "INF" if v is INF else str(v)


@dataclass(frozen=True)
class Interval:
    """Closed time interval [lower, upper]; the upper bound may be INF."""

    lower: int
    upper: TimeInf

    def __post_init__(self):
        if not is_time(self.lower):
            raise ValueError(f"interval lower bound must be a finite time: {self.lower!r}")
        if not is_time_inf(self.upper):
            raise ValueError(f"interval upper bound must be a time or INF: {self.upper!r}")
        if self.upper < self.lower:
            raise ValueError(f"empty interval [{self.lower}, {format_time(self.upper)}]")

    def contains(self, t: int) -> bool:
        return self.lower <= t <= self.upper

    def __str__(self):
        return f"[{self.lower}, {format_time(self.upper)}]"
