"""Sites, windows, configurations and boundary conditions on Z^- = {..., -1, 0}.

Configurations on a window [l, m] are dense symbol tuples indexed by ``site - l``.
Enumeration is lexicographic in the encoded symbol array, so the leftmost
site is the most significant digit.  For the binary alphabet this is the same
as reading the bits of the configuration index with ``-1 -> 0`` and ``+1 -> 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

DEFAULT_CAP = 24


class InvalidSite(ValueError):
    """A site index outside Z^-."""


class CapExceeded(ValueError):
    """A window is larger than the enumeration cap."""


class FreeBoundaryQueried(ValueError):
    """A value was requested from a free boundary condition."""


class OverlapOrGap(ValueError):
    """Two windows are not adjacent and disjoint."""


def check_site(i: int) -> int:
    i = int(i)
    if i > 0:
        raise InvalidSite(f"site {i} is not in Z^- (sites are <= 0)")
    return i


@dataclass(frozen=True)
class Window:
    """The interval [l, m] of Z^-, with l <= m <= 0."""

    l: int
    m: int = 0

    def __post_init__(self):
        check_site(self.l)
        check_site(self.m)
        if self.l > self.m:
            raise ValueError(f"empty window [{self.l}, {self.m}]")

    @property
    def size(self) -> int:
        return self.m - self.l + 1

    @property
    def sites(self) -> range:
        return range(self.l, self.m + 1)

    def __contains__(self, i: int) -> bool:
        return self.l <= i <= self.m

    def __str__(self):
        return f"[{self.l},{self.m}]"


@dataclass(frozen=True)
class Alphabet:
    """Finite ordered alphabet; the encoding is the position in ``symbols``."""

    symbols: tuple

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValueError("an alphabet needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")

    def __len__(self):
        return len(self.symbols)

    def encode(self, symbol) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValueError(f"{symbol!r} is not in the alphabet {self.symbols}") from None

    def decode(self, code: int):
        return self.symbols[code]

    @property
    def is_binary(self) -> bool:
        return len(self.symbols) == 2

    @classmethod
    def of_size(cls, q: int) -> "Alphabet":
        return cls(tuple(range(q)))


ISING = Alphabet((-1, 1))


@dataclass(frozen=True)
class WindowConfig:
    """A configuration on ``window``; ``window=None`` is the empty configuration."""

    window: Window | None
    values: tuple
    alphabet: Alphabet = ISING

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        size = 0 if self.window is None else self.window.size
        if len(self.values) != size:
            raise ValueError(f"{len(self.values)} values for a window of size {size}")
        for v in self.values:
            self.alphabet.encode(v)

    @classmethod
    def empty(cls, alphabet: Alphabet = ISING) -> "WindowConfig":
        return cls(None, (), alphabet)

    @classmethod
    def on(cls, l: int, values: Sequence, alphabet: Alphabet = ISING) -> "WindowConfig":
        """Configuration on [l, l + len(values) - 1]."""
        values = tuple(values)
        if not values:
            return cls.empty(alphabet)
        return cls(Window(l, l + len(values) - 1), values, alphabet)

    @classmethod
    def from_string(cls, s: str, l: int) -> "WindowConfig":
        """Parse a ``+``/``-`` string (left to right from ``l``) into an Ising configuration."""
        table = {"+": 1, "-": -1, "−": -1}
        return cls.on(l, [table[c] for c in s])

    def __len__(self):
        return len(self.values)

    def __getitem__(self, site: int):
        if self.window is None or site not in self.window:
            raise KeyError(site)
        return self.values[site - self.window.l]

    @property
    def codes(self) -> np.ndarray:
        return np.array([self.alphabet.encode(v) for v in self.values], dtype=np.int64)

    def restrict(self, window: Window) -> "WindowConfig":
        if self.window is None or window.l < self.window.l or window.m > self.window.m:
            raise ValueError(f"{window} is not inside {self.window}")
        a = window.l - self.window.l
        return WindowConfig(window, self.values[a : a + window.size], self.alphabet)

    def to_string(self) -> str:
        if self.alphabet == ISING:
            return "".join("+" if v == 1 else "-" for v in self.values)
        return "".join(str(self.alphabet.encode(v)) for v in self.values)

    def index(self) -> int:
        """Position of this configuration in the lexicographic enumeration."""
        q = len(self.alphabet)
        idx = 0
        for c in self.codes:
            idx = idx * q + int(c)
        return idx

    @classmethod
    def from_index(cls, idx: int, window: Window, alphabet: Alphabet = ISING) -> "WindowConfig":
        q = len(alphabet)
        codes = []
        for _ in range(window.size):
            idx, c = divmod(idx, q)
            codes.append(c)
        return cls(window, tuple(alphabet.decode(c) for c in reversed(codes)), alphabet)


@dataclass(frozen=True)
class BoundaryCondition:
    """Values of the infinite tail strictly left of a window.

    ``kind`` is one of ``all_plus``, ``all_minus``, ``periodic`` or ``free``.
    A periodic tail repeats ``pattern`` leftward so that its last entry sits
    immediately left of the window.  ``free`` omits exterior interactions and
    cannot be queried for values.
    """

    kind: str
    pattern: tuple = ()

    def __post_init__(self):
        if self.kind not in ("all_plus", "all_minus", "periodic", "free"):
            raise ValueError(f"unknown boundary condition {self.kind!r}")
        if isinstance(self.pattern, WindowConfig):
            object.__setattr__(self, "pattern", self.pattern.values)
        object.__setattr__(self, "pattern", tuple(self.pattern))
        if self.kind == "periodic" and not self.pattern:
            raise ValueError("a periodic tail needs a nonempty pattern")

    @classmethod
    def all_plus(cls):
        return cls("all_plus")

    @classmethod
    def all_minus(cls):
        return cls("all_minus")

    @classmethod
    def periodic(cls, pattern):
        return cls("periodic", pattern)

    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def constant(cls, symbol, alphabet: Alphabet = ISING):
        if symbol == alphabet.symbols[-1]:
            return cls.all_plus()
        if symbol == alphabet.symbols[0]:
            return cls.all_minus()
        return cls.periodic((symbol,))

    @property
    def is_free(self) -> bool:
        return self.kind == "free"

    def flipped(self) -> "BoundaryCondition":
        """Spin-flip image (Ising only)."""
        if self.kind == "all_plus":
            return BoundaryCondition.all_minus()
        if self.kind == "all_minus":
            return BoundaryCondition.all_plus()
        if self.kind == "periodic":
            return BoundaryCondition.periodic(tuple(-v for v in self.pattern))
        return self

    def __str__(self):
        if self.kind == "periodic":
            return "periodic(" + ",".join(str(v) for v in self.pattern) + ")"
        return self.kind


def tail_value(bc: BoundaryCondition, site: int, attach: int, alphabet: Alphabet = ISING):
    """Symbol of ``bc`` at ``site`` for a tail attached left of site ``attach``."""
    check_site(site)
    if site >= attach:
        raise ValueError(f"site {site} is not strictly left of {attach}")
    if bc.kind == "free":
        raise FreeBoundaryQueried("a free boundary has no values")
    if bc.kind == "all_plus":
        return alphabet.symbols[-1]
    if bc.kind == "all_minus":
        return alphabet.symbols[0]
    return bc.pattern[(site - attach) % len(bc.pattern)]


def tail_codes(bc: BoundaryCondition, start: int, stop: int, attach: int,
               alphabet: Alphabet = ISING) -> np.ndarray:
    """Encoded tail symbols on sites ``start..stop`` (inclusive, ``stop < attach``)."""
    if stop >= attach:
        raise ValueError(f"site {stop} is not strictly left of {attach}")
    n = stop - start + 1
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    if bc.kind == "free":
        raise FreeBoundaryQueried("a free boundary has no values")
    if bc.kind == "all_plus":
        return np.full(n, len(alphabet) - 1, dtype=np.int64)
    if bc.kind == "all_minus":
        return np.zeros(n, dtype=np.int64)
    pat = np.array([alphabet.encode(v) for v in bc.pattern], dtype=np.int64)
    offs = (np.arange(start, stop + 1) - attach) % len(pat)
    return pat[offs]


def enumerate_configs(window: Window, alphabet: Alphabet = ISING,
                      cap: int = DEFAULT_CAP) -> Iterator[WindowConfig]:
    """Yield all ``|A|**size`` configurations on ``window`` in lexicographic order."""
    if window.size > cap:
        raise CapExceeded(f"window of {window.size} sites exceeds the cap of {cap}")
    for values in itertools.product(alphabet.symbols, repeat=window.size):
        yield WindowConfig(window, values, alphabet)


def concat(left: WindowConfig, right: WindowConfig) -> WindowConfig:
    """Concatenate configurations on adjacent windows ``[a, b]`` and ``[b + 1, c]``."""
    if left.window is None:
        return right
    if right.window is None:
        return left
    if left.alphabet != right.alphabet:
        raise ValueError("configurations over different alphabets")
    if left.window.m + 1 != right.window.l:
        raise OverlapOrGap(f"{left.window} and {right.window} are not adjacent")
    return WindowConfig(Window(left.window.l, right.window.m),
                        left.values + right.values, left.alphabet)


def code_matrix(n: int, q: int = 2) -> np.ndarray:
    """All codes of ``n`` sites over ``q`` symbols, shape (q**n, n), lexicographic."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    idx = np.arange(q**n, dtype=np.int64)
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // powers[None, :]) % q).astype(np.int8)


def spin_matrix(n: int) -> np.ndarray:
    """All Ising configurations of ``n`` sites as a (2**n, n) array of +-1."""
    return (2 * code_matrix(n, 2) - 1).astype(np.int8)
