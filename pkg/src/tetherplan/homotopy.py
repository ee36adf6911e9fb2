"""Homotopy signatures as reduced words in the free group on the generator rays.

A signature is a tuple of nonzero ints: ``+i`` is a left-to-right crossing of ray
``i`` (1-based, ray oriented from its origin outward), ``-i`` the opposite.  The
empty tuple is the identity (trivial class).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import SignatureError
from .geometry import orient_sign

Signature = tuple

IDENTITY: Signature = ()


def reduce(word: Iterable[int], m: int | None = None) -> Signature:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[int] = []
    for g in word:
        g = int(g)
        if g == 0 or (m is not None and abs(g) > m):
            raise SignatureError("INDEX_OUT_OF_RANGE", f"generator index {g} outside 1..{m}")
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def concat(s1: Signature, s2: Signature) -> Signature:
    if not s2:
        return s1
    if not s1:
        return s2
    # only the seam can cancel when both inputs are reduced
    i = 0
    n = min(len(s1), len(s2))
    while i < n and s1[-1 - i] == -s2[i]:
        i += 1
    return s1[: len(s1) - i] + s2[i:]


def invert(s: Signature) -> Signature:
    return tuple(-g for g in reversed(s))


def sort_key(s: Signature):
    """Shorter words first, then lexicographic on the signed indices."""
    return (len(s), s)


def format_signature(s: Signature) -> str:
    return " ".join(f"s{g}" if g > 0 else f"s{-g}^-1" for g in s)


def parse_signature(text: str) -> Signature:
    word = []
    for tok in text.split():
        neg = tok.endswith("^-1")
        core = tok[:-3] if neg else tok
        if not core.startswith("s") or not core[1:].isdigit():
            raise SignatureError("PARSE_ERROR", f"bad signature token {tok!r}")
        word.append(-int(core[1:]) if neg else int(core[1:]))
    return reduce(word)


def _crossing_param(a, b, o, f) -> Fraction:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    dx, dy = Fraction(b[0]) - ax, Fraction(b[1]) - ay
    ex, ey = Fraction(f[0]) - Fraction(o[0]), Fraction(f[1]) - Fraction(o[1])
    return ((Fraction(o[0]) - ax) * ey - (Fraction(o[1]) - ay) * ex) / (dx * ey - dy * ex)


def segment_crossings(a, b, generators: Sequence) -> list[int]:
    """Signed ray crossings of segment ``a -> b`` in path order (unreduced).

    A point lying exactly on a ray counts as being on its right-hand side; this is
    a symbolic shift of the ray to the left, so touching a ray and turning back
    yields a cancelling pair and passing through a vertex on the ray counts once.
    """
    hits = []
    for i, g in enumerate(generators, 1):
        o, f = g.origin, g.far
        la = orient_sign(o, f, a) > 0
        lb = orient_sign(o, f, b) > 0
        if la == lb:
            continue
        if orient_sign(a, b, o) * orient_sign(a, b, f) < 0:
            hits.append((i if la else -i, o, f))
    if len(hits) <= 1:
        return [h[0] for h in hits]
    hits.sort(key=lambda h: _crossing_param(a, b, h[1], h[2]))
    return [h[0] for h in hits]


def signature_of_path(path: Sequence, generators: Sequence) -> Signature:
    word: list[int] = []
    for i in range(len(path) - 1):
        word.extend(segment_crossings(path[i], path[i + 1], generators))
    return reduce(word)


class SignatureTable:
    """Interns reduced words as small ints.

    Words form a trie: each id remembers its last letter and the id of the word
    without it, so appending a letter (with cancellation) is a dict lookup.
    Id 0 is the identity.
    """

    def __init__(self):
        self.parent = [-1]
        self.letter = [0]
        self._child: dict = {}

    def __len__(self) -> int:
        return len(self.parent)

    def push(self, sid: int, g: int) -> int:
        if self.letter[sid] == -g:
            return self.parent[sid]
        key = (sid, g)
        c = self._child.get(key)
        if c is None:
            c = self._child[key] = len(self.parent)
            self.parent.append(sid)
            self.letter.append(g)
        return c

    def extend(self, sid: int, word) -> int:
        for g in word:
            sid = self.push(sid, g)
        return sid

    def intern(self, word) -> int:
        return self.extend(0, word)

    def find(self, word) -> int | None:
        """Id of an already interned word, or None (the word is assumed reduced)."""
        sid = 0
        for g in word:
            sid = self._child.get((sid, g))
            if sid is None:
                return None
        return sid

    def word(self, sid: int) -> Signature:
        out = []
        while sid > 0:
            out.append(self.letter[sid])
            sid = self.parent[sid]
        return tuple(reversed(out))
