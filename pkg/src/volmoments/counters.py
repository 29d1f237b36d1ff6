"""Operation-count instrumentation.

Engines accept an optional OpCounters and tally the element multiplications
and additions their vectorized inner loops perform.  Passing None (the
default) skips every tally site, so timed runs carry no counting overhead.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class OpCounters:
    multiplications: int = 0
    additions: int = 0

    def merge(self, other: "OpCounters") -> None:
        self.multiplications += other.multiplications
        self.additions += other.additions
