"""Pointed spaces and enumerated alternating-word bases for the product spaces.

Two truncated product spaces appear everywhere downstream:

* the H-side space, spanned by a distinguished vacuum ``xi`` together with
  words made of zero or more alternating K-letters followed by a mandatory
  terminal H-letter whose index differs from the last K-letter;
* the K-side space, the plain reduced free product, spanned by a vacuum
  ``eta`` and terminal-free alternating K-letter words.

A letter is a pair ``(index, coord)`` with ``index`` in {ALPHA, BETA} and
``coord`` in the reduced range ``1 .. dim-1`` of its space (coordinate 0 is
always the distinguished unit vector).  Truncation keeps words with at most
``depth`` K-letters; the terminal letter is free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import InadmissibleWordError

ALPHA = 0
BETA = 1
INDEX_NAMES = ("alpha", "beta")

H_SIDE = "H"
K_SIDE = "K"


def other(iota: int) -> int:
    """The opposite index."""
    return 1 - iota


class Classification(Enum):
    """How one embedding index sees a basis word (block membership)."""

    XI_OR_HOME = "xi_or_home"   # vacuum or bare own-side terminal: T-block
    STRIP = "strip"             # first K-letter carries the embedding index
    PREPEND = "prepend"         # everything else: scalar plus new first letter


@dataclass(frozen=True)
class PointedSpace:
    """Finite-dimensional space with the first basis vector distinguished."""

    dim: int
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"PointedSpace needs dim >= 1, got {self.dim}")

    @property
    def reduced_dim(self) -> int:
        """Dimension of the orthogonal complement of the distinguished vector."""
        return self.dim - 1

    def distinguished(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


@dataclass(frozen=True)
class BasisWord:
    """An alternating tensor word: K-letters plus an optional terminal H-letter."""

    letters: tuple[tuple[int, int], ...] = ()
    terminal: tuple[int, int] | None = None

    @property
    def letter_count(self) -> int:
        return len(self.letters)

    @property
    def is_vacuum(self) -> bool:
        return not self.letters and self.terminal is None

    def head_index(self) -> int | None:
        """Index of the first letter, falling back to the terminal; None for the vacuum."""
        if self.letters:
            return self.letters[0][0]
        if self.terminal is not None:
            return self.terminal[0]
        return None

    def sort_key(self):
        return (
            self.letter_count,
            0 if self.terminal is None else 1,
            self.letters,
            self.terminal if self.terminal is not None else (),
        )

    def to_json(self) -> dict:
        return {
            "letters": [list(l) for l in self.letters],
            "terminal": list(self.terminal) if self.terminal is not None else None,
        }


def word_admissible(word: BasisWord, spaces=None) -> bool:
    """Check the alternation and terminal constraints (and coordinate ranges if
    the four-space tuple is supplied)."""
    idxs = [i for i, _ in word.letters]
    for a, b in zip(idxs, idxs[1:]):
        if a == b:
            return False
    if word.terminal is not None and idxs and idxs[-1] == word.terminal[0]:
        return False
    for i, c in list(word.letters) + ([word.terminal] if word.terminal is not None else []):
        if i not in (ALPHA, BETA) or c < 1:
            return False
    if spaces is not None:
        h_alpha, k_alpha, h_beta, k_beta = spaces
        kdims = (k_alpha.dim, k_beta.dim)
        hdims = (h_alpha.dim, h_beta.dim)
        for i, c in word.letters:
            if c > kdims[i] - 1:
                return False
        if word.terminal is not None:
            i, c = word.terminal
            if c > hdims[i] - 1:
                return False
    return True


def classify_for_embedding(word: BasisWord, iota: int) -> Classification:
    """Block membership of an H-side word for the embedding with index ``iota``."""
    if not word_admissible(word):
        raise InadmissibleWordError(f"word {word} is not admissible")
    if word.is_vacuum:
        return Classification.XI_OR_HOME
    if not word.letters:
        # bare terminal
        if word.terminal[0] == iota:
            return Classification.XI_OR_HOME
        return Classification.PREPEND
    if word.letters[0][0] == iota:
        return Classification.STRIP
    return Classification.PREPEND


def _index_patterns(length: int, side: str, terminal_index: int | None):
    """Alternating index patterns of the given length.

    On the H side the pattern is forced by the terminal index (the last letter
    must differ from it); on the K side both starting indices occur.
    """
    if length == 0:
        return [()]
    if side == H_SIDE:
        last = other(terminal_index)
        pat = []
        cur = last
        for _ in range(length):
            pat.append(cur)
            cur = other(cur)
        return [tuple(reversed(pat))]
    out = []
    for start in (ALPHA, BETA):
        pat = []
        cur = start
        for _ in range(length):
            pat.append(cur)
            cur = other(cur)
        out.append(tuple(pat))
    return out


@dataclass
class ProductBasis:
    """Enumerated truncated basis of one side of the product space.

    ``words[0]`` is always the vacuum.  ``index`` maps a word to its flat
    position.  The classification, strip and prepend tables used by the
    embedding assembly are cached numpy arrays.
    """

    side: str
    depth: int
    spaces: tuple[PointedSpace, PointedSpace, PointedSpace, PointedSpace]
    words: tuple[BasisWord, ...]
    index: dict = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def count(self) -> int:
        return len(self.words)

    @property
    def h_dims(self) -> tuple[int, int]:
        return (self.spaces[0].dim, self.spaces[2].dim)

    @property
    def k_dims(self) -> tuple[int, int]:
        return (self.spaces[1].dim, self.spaces[3].dim)

    def vacuum_vector(self) -> np.ndarray:
        v = np.zeros(self.count, dtype=complex)
        v[0] = 1.0
        return v

    def basis_vector(self, word: BasisWord) -> np.ndarray:
        v = np.zeros(self.count, dtype=complex)
        v[self.index[word]] = 1.0
        return v

    # --- cached structure tables ------------------------------------------

    def classification(self, iota: int) -> np.ndarray:
        """Per-word classification codes for index ``iota`` (H side only):
        0 = XI_OR_HOME, 1 = STRIP, 2 = PREPEND."""
        key = ("cls", iota)
        if key not in self._cache:
            codes = {
                Classification.XI_OR_HOME: 0,
                Classification.STRIP: 1,
                Classification.PREPEND: 2,
            }
            arr = np.empty(self.count, dtype=np.int8)
            for i, w in enumerate(self.words):
                arr[i] = codes[classify_for_embedding(w, iota)]
            self._cache[key] = arr
        return self._cache[key]

    def head_indices(self) -> np.ndarray:
        """head_index per word, -1 for the vacuum."""
        if "head" not in self._cache:
            arr = np.empty(self.count, dtype=np.int8)
            for i, w in enumerate(self.words):
                h = w.head_index()
                arr[i] = -1 if h is None else h
            self._cache["head"] = arr
        return self._cache["head"]

    def strip_data(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(first_letter_index, first_letter_coord, stripped_word_index); -1
        entries for words without letters."""
        if "strip" not in self._cache:
            fl_i = np.full(self.count, -1, dtype=np.int64)
            fl_c = np.full(self.count, -1, dtype=np.int64)
            tgt = np.full(self.count, -1, dtype=np.int64)
            for i, w in enumerate(self.words):
                if w.letters:
                    fl_i[i], fl_c[i] = w.letters[0]
                    tgt[i] = self.index[BasisWord(w.letters[1:], w.terminal)]
            self._cache["strip"] = (fl_i, fl_c, tgt)
        return self._cache["strip"]

    def prepend_table(self, iota: int) -> np.ndarray:
        """Array of shape (dim K_iota, count): entry [c, w] is the index of the
        word with letter (iota, c) prepended to word w, or -1 when that word
        is illegal (alternation) or exceeds the depth.  Row 0 is unused."""
        key = ("prep", iota)
        if key not in self._cache:
            kdim = self.k_dims[iota]
            table = np.full((kdim, self.count), -1, dtype=np.int64)
            for i, w in enumerate(self.words):
                if self.side == H_SIDE and w.is_vacuum:
                    continue
                head = w.head_index()
                if head == iota:
                    continue
                if w.letter_count >= self.depth:
                    continue
                for c in range(1, kdim):
                    nw = BasisWord(((iota, c),) + w.letters, w.terminal)
                    table[c, i] = self.index[nw]
            self._cache[key] = table
        return self._cache[key]

    def home_indices(self, iota: int) -> np.ndarray:
        """H side: flat indices of [xi, bare terminal (iota, 1..dim-1)] in
        coordinate order.  These carry the T-block of an embedding."""
        key = ("home", iota)
        if key not in self._cache:
            if self.side != H_SIDE:
                raise ValueError("home_indices is defined for H-side bases only")
            hdim = self.h_dims[iota]
            idx = [0] + [self.index[BasisWord((), (iota, c))] for c in range(1, hdim)]
            self._cache[key] = np.asarray(idx, dtype=np.int64)
        return self._cache[key]

    def prepend_cols(self, iota: int) -> np.ndarray:
        """Indices of words taking the scalar-plus-prepend rule for ``iota``."""
        key = ("pcols", iota)
        if key not in self._cache:
            if self.side == H_SIDE:
                self._cache[key] = np.nonzero(self.classification(iota) == 2)[0]
            else:
                self._cache[key] = np.nonzero(self.head_indices() != iota)[0]
        return self._cache[key]

    def strip_cols(self, iota: int) -> np.ndarray:
        """Indices of words whose first letter index is ``iota``."""
        key = ("scols", iota)
        if key not in self._cache:
            fl_i, _, _ = self.strip_data()
            self._cache[key] = np.nonzero(fl_i == iota)[0]
        return self._cache[key]

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "depth": self.depth,
            "dims": [s.dim for s in self.spaces],
            "words": [w.to_json() for w in self.words],
        }

    def content_hash(self) -> str:
        """Stable identifier of the enumerated word list for golden files."""
        import hashlib
        import json as _json
        payload = _json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def build_product_basis(spaces, depth: int, side: str) -> ProductBasis:
    """Enumerate the truncated basis in canonical order.

    Order: by K-letter count, vacuum first, then lexicographically on the
    (index, coord) letter sequence and terminal.  Spaces of dimension 1 have
    empty reduced subspaces and simply contribute no letters or terminals.
    """
    spaces = tuple(spaces)
    if len(spaces) != 4:
        raise ValueError("expected four pointed spaces (H_alpha, K_alpha, H_beta, K_beta)")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if side not in (H_SIDE, K_SIDE):
        raise ValueError(f"unknown side {side!r}")
    h_alpha, k_alpha, h_beta, k_beta = spaces
    kdims = (k_alpha.dim, k_beta.dim)
    hdims = (h_alpha.dim, h_beta.dim)

    words = [BasisWord()]
    for n in range(0, depth + 1):
        layer = []
        if side == H_SIDE:
            for kappa in (ALPHA, BETA):
                for pattern in _index_patterns(n, H_SIDE, kappa):
                    coord_ranges = [range(1, kdims[i]) for i in pattern]
                    for coords in itertools.product(*coord_ranges):
                        letters = tuple(zip(pattern, coords))
                        for tc in range(1, hdims[kappa]):
                            layer.append(BasisWord(letters, (kappa, tc)))
        else:
            if n == 0:
                continue
            for pattern in _index_patterns(n, K_SIDE, None):
                coord_ranges = [range(1, kdims[i]) for i in pattern]
                for coords in itertools.product(*coord_ranges):
                    layer.append(BasisWord(tuple(zip(pattern, coords))))
        layer.sort(key=BasisWord.sort_key)
        words.extend(layer)

    index = {w: i for i, w in enumerate(words)}
    assert len(index) == len(words), "duplicate words in basis enumeration"
    return ProductBasis(side=side, depth=depth, spaces=spaces, words=tuple(words), index=index)


@lru_cache(maxsize=None)
def _four_spaces(dims: tuple[int, int, int, int]):
    labels = ("H_alpha", "K_alpha", "H_beta", "K_beta")
    return tuple(PointedSpace(d, l) for d, l in zip(dims, labels))


@lru_cache(maxsize=32)
def cached_product_basis(dims: tuple[int, int, int, int], depth: int,
                         side: str) -> "ProductBasis":
    """Shared immutable basis for repeated trials at the same sizes."""
    return build_product_basis(spaces_from_dims(dims), depth, side)


def spaces_from_dims(dims) -> tuple[PointedSpace, ...]:
    """Convenience: the four pointed spaces for integer dims (H_a, K_a, H_b, K_b)."""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 4:
        raise ValueError("dims must have four entries")
    return _four_spaces(dims)
