"""Icon <-> token-sequence codec over the 10,007-entry SVG vocabulary.

Vocabulary layout (fixed so checkpoints stay portable):

    0..2      command tokens M, L, C
    3..10002  packed grid locations, Loc(v) at id 3 + v with v = x*100 + y
    10003     BOP   begin-of-path
    10004     EOS   end-of-icon
    10005     MASK  span marker (training-time rewrite)
    10006     EOM   end-of-masked-span

Token sequences are plain lists of ints. Encoding is uniquely decodable:
each path is prefixed by BOP, each command token is followed by exactly
one (M, L) or three (C) location tokens, and a single EOS terminates
the icon.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .geometry import CUBIC, GRID, LINE, MOVE, Command, Icon, Point, SvgPath

CMD_M = 0
CMD_L = 1
CMD_C = 2
LOC_BASE = 3
NUM_LOCATIONS = GRID * GRID
BOP = LOC_BASE + NUM_LOCATIONS  # 10003
EOS = BOP + 1  # 10004
MASK = EOS + 1  # 10005
EOM = MASK + 1  # 10006
VOCAB_SIZE = EOM + 1  # 10007

_KIND_TO_CMD = {MOVE: CMD_M, LINE: CMD_L, CUBIC: CMD_C}
_CMD_TO_KIND = {v: k for k, v in _KIND_TO_CMD.items()}
_CMD_ARITY = {CMD_M: 1, CMD_L: 1, CMD_C: 3}

STRICT = "strict"
LENIENT = "lenient"


class TokenizeError(ValueError):
    pass


class DecodeError(ValueError):
    """Grammar violation while decoding; carries the offending index."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"token {index}: {reason}")
        self.index = index
        self.reason = reason


def token_name(tid: int) -> str:
    if tid == CMD_M:
        return "M"
    if tid == CMD_L:
        return "L"
    if tid == CMD_C:
        return "C"
    if LOC_BASE <= tid < BOP:
        x, y = unpack_location(tid - LOC_BASE)
        return f"Loc({x},{y})"
    return {BOP: "BOP", EOS: "EOS", MASK: "MASK", EOM: "EOM"}.get(tid, f"id{tid}")


def pack_location(x: int, y: int, w: int = GRID) -> int:
    """Row-major packing of a grid coordinate: x*w + y."""
    if not (0 <= x < w and 0 <= y < w):
        raise ValueError(f"coordinate ({x}, {y}) outside [0, {w})^2")
    return x * w + y


def unpack_location(v: int, w: int = GRID) -> tuple[int, int]:
    """Inverse of pack_location."""
    if not (0 <= v < w * w):
        raise ValueError(f"packed location {v} outside [0, {w * w})")
    return v // w, v % w


def loc_token(x: int, y: int) -> int:
    return LOC_BASE + pack_location(x, y)


def is_loc(tid: int) -> bool:
    return LOC_BASE <= tid < LOC_BASE + NUM_LOCATIONS


def _point_to_loc(p: Point) -> int:
    x, y = p
    xi, yi = int(x), int(y)
    if xi != x or yi != y:
        raise TokenizeError(f"non-integer coordinate {p}; quantize first")
    return loc_token(xi, yi)


def encode_icon(icon: Icon) -> list[int]:
    """Flatten a quantized icon into token ids, BOP-framed, EOS-terminated."""
    out: list[int] = []
    for path in icon:
        out.append(BOP)
        for cmd in path:
            out.append(_KIND_TO_CMD[cmd.kind])
            out.extend(_point_to_loc(p) for p in cmd.points)
    out.append(EOS)
    return out


def encoded_length(icon: Icon) -> int:
    """Closed-form encoded length: 1 + sum over paths of (1 + sum(1 + arity))."""
    return 1 + sum(
        1 + sum(1 + len(cmd.points) for cmd in path) for path in icon
    )


def decode_icon(tokens: Iterable[int], mode: str = STRICT) -> Icon:
    """Inverse of encode_icon.

    strict: full grammar conformance (BOP-led paths, MoveTo first in each
    path, exact location arity, a single trailing EOS) or DecodeError.
    lenient: truncate at the first violation or at EOS, drop a trailing
    incomplete command/path, and fail only if no complete path survives.
    """
    if mode not in (STRICT, LENIENT):
        raise ValueError(f"unknown decode mode {mode!r}")
    strict = mode == STRICT
    toks = list(tokens)

    paths: list[SvgPath] = []
    cur: list[Command] = []  # completed commands of the open path
    i = 0
    n = len(toks)

    def fail(idx: int, reason: str) -> None:
        raise DecodeError(idx, reason)

    def close_path(idx: int) -> None:
        nonlocal cur
        if cur:
            paths.append(SvgPath(tuple(cur)))
            cur = []
        elif strict:
            fail(idx, "empty path (BOP with no commands)")

    in_path = False
    saw_eos = False
    while i < n:
        t = toks[i]
        if not (0 <= t < VOCAB_SIZE):
            if strict:
                fail(i, f"id {t} outside vocabulary")
            break
        if saw_eos:
            if strict:
                fail(i, "content after EOS (single trailing EOS required)")
            break
        if t == BOP:
            if in_path:
                close_path(i)
            in_path = True
            i += 1
            continue
        if t == EOS:
            if not in_path and strict:
                fail(i, "EOS before any path")
            if in_path:
                close_path(i)
            saw_eos = True
            i += 1
            continue
        if t in (CMD_M, CMD_L, CMD_C):
            if not in_path:
                if strict:
                    fail(i, "path must open with BOP")
                break
            if not cur and t != CMD_M:
                if strict:
                    fail(i, "path must start with a MoveTo command")
                break
            arity = _CMD_ARITY[t]
            args = toks[i + 1 : i + 1 + arity]
            if len(args) < arity or not all(is_loc(a) for a in args):
                if strict:
                    bad = next(
                        (j for j, a in enumerate(args) if not is_loc(a)), len(args)
                    )
                    kind_name = {CMD_M: "MoveTo", CMD_L: "LineTo", CMD_C: "CubicBezier"}[t]
                    fail(
                        i + 1 + bad,
                        f"{kind_name} arity {arity}, got {bad} location token(s)",
                    )
                break
            pts = tuple(Point(*unpack_location(a - LOC_BASE)) for a in args)
            cur.append(Command(_CMD_TO_KIND[t], pts))
            i += 1 + arity
            continue
        # MASK / EOM are never part of a plain icon sequence
        if strict:
            fail(i, f"unexpected {token_name(t)} token")
        break

    if strict:
        if not saw_eos:
            fail(n, "missing EOS terminator")
    else:
        # drop any incomplete trailing path silently
        if cur:
            paths.append(SvgPath(tuple(cur)))
    if not paths:
        if strict:
            fail(0, "no paths decoded")
        raise DecodeError(0, "no complete path recovered")
    return Icon(tuple(paths))


# --- token line format: whitespace-separated ids, one icon per line ---


def tokens_to_line(tokens: Iterable[int]) -> str:
    return " ".join(str(t) for t in tokens)


def line_to_tokens(line: str) -> list[int]:
    return [int(part) for part in line.split()]


def write_token_lines(path, sequences: Iterable[Iterable[int]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in sequences:
            fh.write(tokens_to_line(seq) + "\n")


def read_token_lines(path) -> Iterator[list[int]]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield line_to_tokens(line)
