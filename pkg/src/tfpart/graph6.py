"""graph6 reading and writing.

Format: the vertex count ``n`` is written as one byte ``n+63`` for ``n < 63``,
otherwise as ``~`` followed by three 6-bit groups (``n < 258048``). The upper
triangle of the adjacency matrix follows column by column (``(0,1), (0,2),
(1,2), (0,3), ...``), padded with zeros to a multiple of 6 bits, each group
written as ``value + 63``.
"""

from __future__ import annotations

from typing import Iterable, Iterator, TextIO

from .errors import Graph6Error
from .graphcore import Graph

HEADER = ">>graph6<<"


def _encode_n(n: int) -> str:
    if n < 63:
        return chr(n + 63)
    if n < 258048:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    raise Graph6Error(f"graph6 cannot encode n={n}")


def encode(g: Graph) -> str:
    out = [_encode_n(g.n)]
    value = 0
    nbits = 0
    adj = g.adj
    for j in range(1, g.n):
        col = adj[j]
        for i in range(j):
            value = (value << 1) | (col >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(chr(value + 63))
                value = 0
                nbits = 0
    if nbits:
        out.append(chr((value << (6 - nbits)) + 63))
    return "".join(out)


def decode(text: str) -> Graph:
    s = text.strip()
    if s.startswith(HEADER):
        s = s[len(HEADER):]
    if not s:
        raise Graph6Error("empty graph6 string")
    data = [ord(c) - 63 for c in s]
    if any(x < 0 or x > 63 for x in data):
        raise Graph6Error(f"invalid graph6 character in {text!r}")
    if data[0] == 63:
        if len(data) < 4 or data[1] == 63:
            raise Graph6Error("graph6 sizes above 258047 are not supported")
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        body = data[4:]
    else:
        n = data[0]
        body = data[1:]
    need = (n * (n - 1) // 2 + 5) // 6
    if len(body) != need:
        raise Graph6Error(f"graph6 body has {len(body)} bytes, expected {need} for n={n}")
    adj = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if body[k // 6] >> (5 - k % 6) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            k += 1
    tail = k % 6
    if tail and body[-1] & ((1 << (6 - tail)) - 1):
        raise Graph6Error("graph6 padding bits must be zero")
    return Graph(n, tuple(adj))


def read_lines(stream: Iterable[str]) -> Iterator[Graph]:
    for line in stream:
        line = line.strip()
        if line and not line.startswith("#"):
            yield decode(line)


def write_lines(graphs: Iterable[Graph], stream: TextIO) -> int:
    count = 0
    for g in graphs:
        stream.write(encode(g) + "\n")
        count += 1
    return count
