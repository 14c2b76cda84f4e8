"""Symbolic core: words, eventually periodic itineraries, cylinders, the
shift map and the natural shift metric.

Symbols are plain integers (the fundamental-domain index k).  An infinite
sequence is represented as preperiod + repeating period, which keeps every
shift orbit finite and makes tails computable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

Word = tuple[int, ...]

DEFAULT_STATE_CAP = 2_000_000


class StateCapError(ValueError):
    """Raised when a cylinder enumeration would exceed the state cap."""


def _minimal_period(period: Word) -> Word:
    """Smallest word whose repetition generates ``period``."""
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period == period[:d] * (n // d):
            return period[:d]
    return period


@dataclass(frozen=True)
class Itinerary:
    """Eventually periodic sequence preperiod . period period ...

    Instances are always stored in canonical form: the period is primitive
    and the preperiod is as short as possible.  Canonical form is unique,
    so equality of itineraries is equality of dataclass fields.
    """

    preperiod: Word = ()
    period: Word = (0,)

    def __post_init__(self):
        if len(self.period) == 0:
            raise ValueError("period must be nonempty")
        pre = tuple(int(s) for s in self.preperiod)
        per = _minimal_period(tuple(int(s) for s in self.period))
        # absorb preperiod symbols that just repeat the rotated period
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> Word:
        return tuple(self[i] for i in range(n))

    def max_symbol(self) -> int:
        return max(abs(s) for s in self.preperiod + self.period)

    def in_sigma(self, N: int) -> bool:
        return self.max_symbol() <= N

    def __str__(self) -> str:
        pre = ",".join(str(s) for s in self.preperiod)
        per = ",".join(str(s) for s in self.period)
        return f"{pre}|{per}"


ZERO = Itinerary((), (0,))


def parse_itinerary(text: str) -> Itinerary:
    """Parse the ``pre|per`` text form, e.g. ``"3,1|0"``."""
    if text.count("|") != 1:
        raise ValueError(f"itinerary must contain exactly one '|': {text!r}")
    pre_s, per_s = text.split("|")
    try:
        pre = tuple(int(t) for t in pre_s.split(",") if t.strip() != "")
        per = tuple(int(t) for t in per_s.split(",") if t.strip() != "")
    except ValueError as e:
        raise ValueError(f"bad itinerary token in {text!r}: {e}") from None
    if not per:
        raise ValueError(f"empty period in {text!r}")
    return Itinerary(pre, per)


def shift(s: Itinerary) -> Itinerary:
    """Drop the first symbol."""
    if s.preperiod:
        return Itinerary(s.preperiod[1:], s.period)
    return Itinerary((), s.period[1:] + s.period[:1])


def prepend(u: Word, s: Itinerary) -> Itinerary:
    """u * s = (u_0 ... u_{n-1} s_0 s_1 ...)."""
    return Itinerary(tuple(u) + s.preperiod, s.period)


def first_difference(s: Itinerary, t: Itinerary) -> int | None:
    """Index of the first disagreeing symbol, or None if s == t."""
    if s == t:
        return None
    # two eventually periodic sequences that agree this far agree everywhere
    bound = (max(len(s.preperiod), len(t.preperiod))
             + len(s.period) * len(t.period) // gcd(len(s.period), len(t.period)))
    for k in range(bound + 1):
        if s[k] != t[k]:
            return k
    raise AssertionError("canonical forms differ but symbols agree")


def natural_metric(s: Itinerary, t: Itinerary, theta: float) -> float:
    """d(s,t) = theta**(first disagreement index); 0 iff s == t."""
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must be in (0,1)")
    k = first_difference(s, t)
    return 0.0 if k is None else theta**k


def alphabet(N: int) -> range:
    """Symbols of Sigma_N in lexicographic order -N..N."""
    if N < 1:
        raise ValueError("truncation level must be >= 1")
    return range(-N, N + 1)


def cylinder_count(N: int, m: int) -> int:
    return (2 * N + 1) ** m


def cylinders(N: int, m: int, state_cap: int = DEFAULT_STATE_CAP):
    """All (2N+1)**m depth-m words over {-N..N} in lexicographic order.

    The ordering is part of the contract: measure vectors are stored in
    this order.
    """
    if m < 1:
        raise ValueError("cylinder depth must be >= 1")
    n = cylinder_count(N, m)
    if n > state_cap:
        raise StateCapError(f"(2N+1)^m = {n} exceeds state cap {state_cap}")
    return itertools.product(alphabet(N), repeat=m)


def cylinder_index(word: Word, N: int) -> int:
    """Position of ``word`` in the cylinders(N, len(word)) enumeration."""
    base = 2 * N + 1
    idx = 0
    for s in word:
        if abs(s) > N:
            raise ValueError(f"symbol {s} outside alphabet of Sigma_{N}")
        idx = idx * base + (s + N)
    return idx


def representative(word: Word) -> Itinerary:
    """Canonical representative of the cylinder [word]: word . 0-bar."""
    return Itinerary(tuple(word), (0,))
