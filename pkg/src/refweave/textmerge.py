"""Line-based three-way merge over texts and file trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

LEFT_MARK = "<<<<<<< LEFT"
MID_MARK = "======="
RIGHT_MARK = ">>>>>>> RIGHT"

Range = Tuple[int, int]  # half-open, 0-based


class MarkerError(ValueError):
    pass


class IOFailure(OSError):
    def __init__(self, path, cause=None):
        self.path = str(path)
        super().__init__(f"cannot read {path}: {cause}")


@dataclass(frozen=True)
class ConflictBlock:
    file: str
    left_lines: Tuple[str, ...]
    right_lines: Tuple[str, ...]
    start_line: int  # 1-based line of the opening marker

    @property
    def loc(self) -> int:
        return len(self.left_lines) + len(self.right_lines)


@dataclass(frozen=True)
class LineOrigin:
    """Where one merged line came from; line numbers are 1-based."""

    origin: str  # Base, Left, Right, Both, Marker
    base: Optional[int] = None
    left: Optional[int] = None
    right: Optional[int] = None


@dataclass(frozen=True)
class Hunk:
    kind: str  # stable, left, right, both, conflict
    base: Range
    left: Range
    right: Range
    merged: Range


@dataclass(frozen=True)
class FileMerge:
    text: str
    blocks: Tuple[ConflictBlock, ...]
    provenance: Tuple[LineOrigin, ...]
    hunks: Tuple[Hunk, ...]


@dataclass
class MergedTree:
    files: Dict[str, str] = field(default_factory=dict)
    conflicts: List[ConflictBlock] = field(default_factory=list)
    provenance: Dict[str, Tuple[LineOrigin, ...]] = field(default_factory=dict)
    hunks: Dict[str, Tuple[Hunk, ...]] = field(default_factory=dict)
    # (path, side that deleted it)
    delete_modify: List[Tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class ConflictMetrics:
    conflicting_files: int = 0
    conflict_blocks: int = 0
    conflicting_loc: int = 0

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.conflicting_files, self.conflict_blocks, self.conflicting_loc)


# ---------------------------------------------------------------------------
# line diff

def split_lines(text: str) -> List[str]:
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


def join_lines(lines: Sequence[str]) -> str:
    return "\n".join(lines) + "\n" if lines else ""


def lcs_matches(a: Sequence[str], b: Sequence[str]) -> List[Tuple[int, int]]:
    """Index pairs of one longest common subsequence of ``a`` and ``b``.

    Equal lines are matched greedily; on ties the walk advances in ``a``.
    """
    lo = 0
    while lo < len(a) and lo < len(b) and a[lo] == b[lo]:
        lo += 1
    hi_a, hi_b = len(a), len(b)
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    pairs = [(i, i) for i in range(lo)]
    n, m = hi_a - lo, hi_b - lo
    if n and m:
        sa, sb = a[lo:hi_a], b[lo:hi_b]
        dp = [[0] * (m + 1) for _ in range(n + 1)]
        for i in range(n - 1, -1, -1):
            row, nxt = dp[i], dp[i + 1]
            ai = sa[i]
            for j in range(m - 1, -1, -1):
                row[j] = nxt[j + 1] + 1 if ai == sb[j] else max(nxt[j], row[j + 1])
        i = j = 0
        while i < n and j < m:
            if sa[i] == sb[j]:
                pairs.append((lo + i, lo + j))
                i += 1
                j += 1
            elif dp[i + 1][j] >= dp[i][j + 1]:
                i += 1
            else:
                j += 1
    pairs.extend((hi_a + k, hi_b + k) for k in range(len(a) - hi_a))
    return pairs


# ---------------------------------------------------------------------------
# three-way merge

def merge_lines(base: Sequence[str], left: Sequence[str], right: Sequence[str], path: str = "") -> FileMerge:
    ml = dict(lcs_matches(base, left))
    mr = dict(lcs_matches(base, right))
    syncs = [(i, ml[i], mr[i]) for i in range(len(base)) if i in ml and i in mr]
    syncs.append((len(base), len(left), len(right)))
    out: List[str] = []
    prov: List[LineOrigin] = []
    blocks: List[ConflictBlock] = []
    hunks: List[Hunk] = []
    i0 = j0 = k0 = 0

    def emit(lines, origins):
        out.extend(lines)
        prov.extend(origins)

    for i, j, k in syncs:
        b, lft, rgt = base[i0:i], left[j0:j], right[k0:k]
        if b or lft or rgt:
            start = len(out)
            if lft == b:
                kind = "right"
                emit(rgt, [LineOrigin("Right", right=k0 + x + 1) for x in range(len(rgt))])
            elif rgt == b:
                kind = "left"
                emit(lft, [LineOrigin("Left", left=j0 + x + 1) for x in range(len(lft))])
            elif lft == rgt:
                kind = "both"
                emit(lft, [LineOrigin("Both", left=j0 + x + 1, right=k0 + x + 1) for x in range(len(lft))])
            else:
                kind = "conflict"
                blocks.append(ConflictBlock(path, tuple(lft), tuple(rgt), len(out) + 1))
                emit([LEFT_MARK], [LineOrigin("Marker")])
                emit(lft, [LineOrigin("Left", left=j0 + x + 1) for x in range(len(lft))])
                emit([MID_MARK], [LineOrigin("Marker")])
                emit(rgt, [LineOrigin("Right", right=k0 + x + 1) for x in range(len(rgt))])
                emit([RIGHT_MARK], [LineOrigin("Marker")])
            hunks.append(Hunk(kind, (i0, i), (j0, j), (k0, k), (start, len(out))))
        if i < len(base):
            hunks.append(Hunk("stable", (i, i + 1), (j, j + 1), (k, k + 1), (len(out), len(out) + 1)))
            emit([base[i]], [LineOrigin("Base", i + 1, j + 1, k + 1)])
        i0, j0, k0 = i + 1, j + 1, k + 1
    return FileMerge(join_lines(out), tuple(blocks), tuple(prov), tuple(_coalesce(hunks)))


def _coalesce(hunks: List[Hunk]) -> List[Hunk]:
    out: List[Hunk] = []
    for h in hunks:
        if out and h.kind == "stable" and out[-1].kind == "stable":
            p = out[-1]
            h = Hunk("stable", (p.base[0], h.base[1]), (p.left[0], h.left[1]),
                     (p.right[0], h.right[1]), (p.merged[0], h.merged[1]))
            out[-1] = h
        else:
            out.append(h)
    return out


def diff3_merge(base: str, left: str, right: str, path: str = ""):
    """Merge three texts; returns (merged text, conflict blocks, provenance)."""
    fm = merge_lines(split_lines(base), split_lines(left), split_lines(right), path)
    return fm.text, list(fm.blocks), list(fm.provenance)


def map_left_span(hunks: Sequence[Hunk], first: int, last: int, side: str = "left") -> Optional[Range]:
    """Merged line span (1-based, inclusive) covering lines ``first..last`` of one side."""
    lo = hi = None
    for h in hunks:
        s, e = getattr(h, side)
        if s < last and first - 1 < e:
            if h.kind == "stable":
                off_s = max(s, first - 1) - s
                off_e = min(e, last) - s
                ms, me = h.merged[0] + off_s, h.merged[0] + off_e
            else:
                ms, me = h.merged
            lo = ms if lo is None else min(lo, ms)
            hi = me if hi is None else max(hi, me)
    if lo is None or hi <= lo:
        return None
    return lo + 1, hi


# ---------------------------------------------------------------------------
# trees

TreeLike = Union[str, Path, Mapping[str, str]]


def read_tree(root: TreeLike) -> Dict[str, str]:
    if isinstance(root, Mapping):
        return dict(root)
    root = Path(root)
    if not root.is_dir():
        raise IOFailure(root, "not a directory")
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            try:
                out[p.relative_to(root).as_posix()] = p.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise IOFailure(p, exc) from exc
    return out


def _full_conflict(path: str, left: str, right: str) -> FileMerge:
    lft, rgt = split_lines(left), split_lines(right)
    lines = [LEFT_MARK, *lft, MID_MARK, *rgt, RIGHT_MARK]
    prov = ([LineOrigin("Marker")] + [LineOrigin("Left", left=x + 1) for x in range(len(lft))] +
            [LineOrigin("Marker")] + [LineOrigin("Right", right=x + 1) for x in range(len(rgt))] +
            [LineOrigin("Marker")])
    hunk = Hunk("conflict", (0, 0), (0, len(lft)), (0, len(rgt)), (0, len(lines)))
    return FileMerge(join_lines(lines), (ConflictBlock(path, tuple(lft), tuple(rgt), 1),),
                     tuple(prov), (hunk,))


def _adopted(text: str, side: str) -> FileMerge:
    lines = split_lines(text)
    prov = tuple(LineOrigin(side, **{side.lower(): x + 1}) for x in range(len(lines)))
    rng = (0, len(lines))
    hunk = Hunk(side.lower(), (0, 0), rng if side == "Left" else (0, 0),
                rng if side == "Right" else (0, 0), rng)
    return FileMerge(text, (), prov, (hunk,))


def merge_trees(base: TreeLike, left: TreeLike, right: TreeLike) -> MergedTree:
    b, lt, rt = read_tree(base), read_tree(left), read_tree(right)
    tree = MergedTree()
    for path in sorted(set(b) | set(lt) | set(rt)):
        x, y, z = b.get(path), lt.get(path), rt.get(path)
        fm: Optional[FileMerge] = None
        if x is None:
            if y is not None and z is not None:
                fm = _adopted(y, "Left") if y == z else _full_conflict(path, y, z)
            elif y is not None:
                fm = _adopted(y, "Left")
            else:
                fm = _adopted(z, "Right")
        elif y is None and z is None:
            continue
        elif y is None or z is None:
            kept, side = (z, "Right") if y is None else (y, "Left")
            if kept == x:
                continue
            tree.delete_modify.append((path, "LEFT" if y is None else "RIGHT"))
            fm = _adopted(kept, side)
        else:
            fm = merge_lines(split_lines(x), split_lines(y), split_lines(z), path)
        tree.files[path] = fm.text
        tree.conflicts.extend(fm.blocks)
        tree.provenance[path] = fm.provenance
        tree.hunks[path] = fm.hunks
    return tree


def write_tree(tree: Union[MergedTree, Mapping[str, str]], root: Union[str, Path]):
    files = tree.files if isinstance(tree, MergedTree) else tree
    root = Path(root)
    for path, text in files.items():
        target = root / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# markers and metrics

def parse_conflicts(text: str, file: str = "") -> List[ConflictBlock]:
    blocks: List[ConflictBlock] = []
    state, start = None, 0
    left: List[str] = []
    right: List[str] = []
    for n, line in enumerate(split_lines(text), 1):
        if line.startswith("<<<<<<<"):
            if state is not None:
                raise MarkerError(f"{file}:{n}: nested conflict marker")
            state, start, left, right = "left", n, [], []
        elif line == MID_MARK:
            if state != "left":
                raise MarkerError(f"{file}:{n}: separator outside a conflict")
            state = "right"
        elif line.startswith(">>>>>>>"):
            if state != "right":
                raise MarkerError(f"{file}:{n}: closing marker without separator")
            blocks.append(ConflictBlock(file, tuple(left), tuple(right), start))
            state = None
        elif state == "left":
            left.append(line)
        elif state == "right":
            right.append(line)
    if state is not None:
        raise MarkerError(f"{file}: unterminated conflict starting at line {start}")
    return blocks


def has_markers(text: str) -> bool:
    return any(line.startswith(("<<<<<<<", ">>>>>>>")) or line == MID_MARK for line in split_lines(text))


def metrics(tree: MergedTree) -> ConflictMetrics:
    files = {c.file for c in tree.conflicts} | {p for p, _ in tree.delete_modify}
    return ConflictMetrics(len(files), len(tree.conflicts) + len(tree.delete_modify),
                           sum(c.loc for c in tree.conflicts))


def metrics_from_files(files: Mapping[str, str], delete_modify=()) -> ConflictMetrics:
    """Metrics recomputed by parsing markers out of merged texts."""
    blocks = [b for path in sorted(files) for b in parse_conflicts(files[path], path)]
    return metrics(MergedTree(dict(files), blocks, delete_modify=list(delete_modify)))
