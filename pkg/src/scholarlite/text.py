"""Title normalisation, tokenising and edit-distance similarity."""

from __future__ import annotations

import re
import unicodedata
from functools import lru_cache

_PUNCT = re.compile(r"[^\w\s]", re.UNICODE)
_SPACE = re.compile(r"\s+")
_TOKEN = re.compile(r"\w+", re.UNICODE)


def fold(text: str) -> str:
    """Lowercase and strip diacritics."""
    if text.isascii():
        return text.lower()
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c)).lower()


@lru_cache(maxsize=65536)
def normalize_title(text: str) -> str:
    text = _PUNCT.sub(" ", fold(text).replace("_", " "))
    return _SPACE.sub(" ", text).strip()


@lru_cache(maxsize=65536)
def normalize_name(text: str) -> str:
    return re.sub(r"[^a-z]", "", fold(text))


def tokens(text: str) -> list[str]:
    return _TOKEN.findall(fold(text))


def levenshtein(a: str, b: str, limit: int | None = None) -> int:
    """Edit distance.

    With ``limit`` only the diagonal band of width ``limit`` is filled and
    ``limit + 1`` is returned as soon as the distance is known to exceed it.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    n, m = len(a), len(b)
    if limit is None:
        limit = n
    if m == 0:
        return min(n, limit + 1)
    if n - m > limit:
        return limit + 1
    big = limit + 1
    prev = [j if j <= limit else big for j in range(m + 1)]
    for i in range(1, n + 1):
        lo = max(1, i - limit)
        hi = min(m, i + limit)
        cur = [big] * (m + 1)
        if i <= limit:
            cur[0] = i
        ca = a[i - 1]
        best = cur[0] if lo == 1 else big
        for j in range(lo, hi + 1):
            v = prev[j - 1] + (ca != b[j - 1])
            d = prev[j] + 1
            if d < v:
                v = d
            d = cur[j - 1] + 1
            if d < v:
                v = d
            if v > big:
                v = big
            cur[j] = v
            if v < best:
                best = v
        if best > limit:
            return big
        prev = cur
    return min(prev[m], big)


def similarity(a: str, b: str, threshold: float | None = None) -> float:
    """``1 - lev / max_len`` on normalised titles.

    With ``threshold`` set, pairs that cannot reach it return 0.0 without
    finishing the distance computation.
    """
    na, nb = normalize_title(a), normalize_title(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    limit = None
    if threshold is not None:
        limit = int((1.0 - threshold) * longest + 1e-9)
    d = levenshtein(na, nb, limit)
    if limit is not None and d > limit:
        return 0.0
    return 1.0 - d / longest
