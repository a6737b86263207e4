"""Reference three-way merge used as a test oracle.

Walks stable and unstable chunks the way the classic diff3 description
does, over matchings from a memoized recursive LCS. The LCS tie rule is
part of the contract: common prefix and suffix are matched first, then
equal heads match and ties skip a line of the first sequence.
"""
from __future__ import annotations

import sys
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

LEFT, MID, RIGHT = "<<<<<<< LEFT", "=======", ">>>>>>> RIGHT"


def matching(a: Sequence[str], b: Sequence[str]) -> Dict[int, int]:
    a, b = tuple(a), tuple(b)
    pre = 0
    while pre < min(len(a), len(b)) and a[pre] == b[pre]:
        pre += 1
    suf = 0
    while suf < min(len(a), len(b)) - pre and a[len(a) - 1 - suf] == b[len(b) - 1 - suf]:
        suf += 1
    mid_a, mid_b = a[pre:len(a) - suf], b[pre:len(b) - suf]
    sys.setrecursionlimit(max(10_000, sys.getrecursionlimit()))

    @lru_cache(maxsize=None)
    def length(i: int, j: int) -> int:
        if i == len(mid_a) or j == len(mid_b):
            return 0
        if mid_a[i] == mid_b[j]:
            return 1 + length(i + 1, j + 1)
        return max(length(i + 1, j), length(i, j + 1))

    out = {k: k for k in range(pre)}
    i = j = 0
    while i < len(mid_a) and j < len(mid_b):
        if mid_a[i] == mid_b[j]:
            out[pre + i] = pre + j
            i, j = i + 1, j + 1
        elif length(i + 1, j) >= length(i, j + 1):
            i += 1
        else:
            j += 1
    for k in range(suf):
        out[len(a) - suf + k] = len(b) - suf + k
    return out


def chunks(o: Sequence[str], a: Sequence[str], b: Sequence[str]) -> List[Tuple[bool, tuple, tuple, tuple]]:
    """(stable, o-part, a-part, b-part) chunks in order."""
    ma, mb = matching(o, a), matching(o, b)
    lo = la = lb = 0
    out = []
    while True:
        i = 0
        while lo + i < len(o) and ma.get(lo + i) == la + i and mb.get(lo + i) == lb + i:
            i += 1
        if i > 0:
            out.append((True, tuple(o[lo:lo + i]), tuple(a[la:la + i]), tuple(b[lb:lb + i])))
            lo, la, lb = lo + i, la + i, lb + i
            continue
        if lo == len(o) and la == len(a) and lb == len(b):
            return out
        j = next((x for x in range(lo, len(o)) if x in ma and x in mb), None)
        if j is None:
            out.append((False, tuple(o[lo:]), tuple(a[la:]), tuple(b[lb:])))
            return out
        k, m = ma[j], mb[j]
        out.append((False, tuple(o[lo:j]), tuple(a[la:k]), tuple(b[lb:m])))
        lo, la, lb = j, k, m


def merge(o: Sequence[str], a: Sequence[str], b: Sequence[str]) -> Tuple[List[str], int]:
    """Merged lines with markers, and the number of conflict blocks."""
    lines, n = [], 0
    for stable, co, ca, cb in chunks(o, a, b):
        if stable or ca == co:
            lines += cb
        elif cb == co or ca == cb:
            lines += ca
        else:
            lines += [LEFT, *ca, MID, *cb, RIGHT]
            n += 1
    return lines, n


def merge_text(o: Sequence[str], a: Sequence[str], b: Sequence[str]) -> str:
    lines, _ = merge(o, a, b)
    return "\n".join(lines) + "\n" if lines else ""
