"""Device connectivity, per-element error rates, and gate durations.

File format (line-oriented, '#' comments):

    QUBITS <n>
    DUR <d_1q> <d_2q> <d_readout>      # seconds
    EDGE <i> <j> <err_2q>
    Q <i> <err_1q> <err_ro> <t1> <t2>  # optional per-qubit line

Qubits without a Q line get the default error/coherence entries.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParseError, ValidationError

DEFAULT_DURATIONS = (0.032e-6, 0.068e-6, 2.6e-6)
DEFAULT_QUBIT = (0.0, 0.0, float("inf"), float("inf"))


@dataclass(frozen=True)
class QubitInfo:
    err_1q: float
    err_ro: float
    t1: float
    t2: float

    def __post_init__(self) -> None:
        for name in ("err_1q", "err_ro"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be in [0,1], got {v}")
        for name in ("t1", "t2"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")


@dataclass(frozen=True)
class CouplingMap:
    n_physical: int
    edge_errors: dict[tuple[int, int], float]
    qubit_info: dict[int, QubitInfo] = field(default_factory=dict)
    durations: tuple[float, float, float] = DEFAULT_DURATIONS
    all_to_all: bool = False

    def __post_init__(self) -> None:
        if self.n_physical < 1:
            raise ValidationError("map needs at least one qubit")
        for (i, j), err in self.edge_errors.items():
            if not (0 <= i < j < self.n_physical):
                raise ValidationError(f"edge ({i},{j}) out of range")
            if not 0.0 <= err <= 1.0:
                raise ValidationError(f"edge error must be in [0,1], got {err}")
        for q in self.qubit_info:
            if not 0 <= q < self.n_physical:
                raise ValidationError(f"qubit info index {q} out of range")
        if any(d <= 0 for d in self.durations):
            raise ValidationError("durations must be positive")

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edge_errors))

    def has_edge(self, i: int, j: int) -> bool:
        if self.all_to_all:
            return i != j
        return (min(i, j), max(i, j)) in self.edge_errors

    def edge_error(self, i: int, j: int) -> float:
        if self.all_to_all:
            return self.edge_errors.get((min(i, j), max(i, j)), 0.0)
        return self.edge_errors[(min(i, j), max(i, j))]

    def qubit(self, q: int) -> QubitInfo:
        return self.qubit_info.get(q, QubitInfo(*DEFAULT_QUBIT))

    def neighbors(self, q: int) -> tuple[int, ...]:
        if self.all_to_all:
            return tuple(p for p in range(self.n_physical) if p != q)
        out = []
        for i, j in self.edge_errors:
            if i == q:
                out.append(j)
            elif j == q:
                out.append(i)
        return tuple(sorted(out))

    def degree(self, q: int) -> int:
        return len(self.neighbors(q))

    def distances_from(self, src: int) -> np.ndarray:
        """BFS hop counts; unreachable qubits get a large sentinel."""
        dist = np.full(self.n_physical, np.iinfo(np.int32).max, dtype=np.int64)
        dist[src] = 0
        if self.all_to_all:
            dist[:] = 1
            dist[src] = 0
            return dist
        queue = deque([src])
        adj = self._adjacency()
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[v] > dist[u] + 1:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def _adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_physical)]
        for i, j in self.edge_errors:
            adj[i].append(j)
            adj[j].append(i)
        for row in adj:
            row.sort()
        return adj

    def distance_matrix(self) -> np.ndarray:
        return np.stack([self.distances_from(s) for s in range(self.n_physical)])

    def shortest_path(self, src: int, dst: int) -> list[int]:
        """One BFS shortest path, deterministic (lowest neighbor first)."""
        if self.all_to_all:
            return [src, dst] if src != dst else [src]
        prev = {src: src}
        queue = deque([src])
        adj = self._adjacency()
        while queue:
            u = queue.popleft()
            if u == dst:
                break
            for v in adj[u]:
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if dst not in prev:
            raise ValidationError(f"qubits {src} and {dst} are disconnected")
        path = [dst]
        while path[-1] != src:
            path.append(prev[path[-1]])
        return path[::-1]


def all_to_all_map(
    n: int,
    err_2q: float = 0.0,
    durations: tuple[float, float, float] = DEFAULT_DURATIONS,
    qubit_info: dict[int, QubitInfo] | None = None,
) -> CouplingMap:
    """Fully connected device of n qubits (trapped-ion style)."""
    edges = {
        (i, j): err_2q for i in range(n) for j in range(i + 1, n)
    }
    return CouplingMap(n, edges, qubit_info or {}, durations, all_to_all=True)


def heavy_hex_map(
    err_2q: float = 0.0,
    durations: tuple[float, float, float] = DEFAULT_DURATIONS,
) -> CouplingMap:
    """156-qubit heavy-hexagon lattice: 8 rows of 16 plus staggered bridges.

    Row qubits form horizontal paths; each gap between consecutive rows
    holds 4 bridge qubits, attached at columns 1,5,9,13 for even gaps and
    3,7,11,15 for odd gaps. Max degree 3 everywhere.
    """
    rows, cols = 8, 16
    edges: dict[tuple[int, int], float] = {}

    def row_qubit(r: int, c: int) -> int:
        return r * cols + c

    for r in range(rows):
        for c in range(cols - 1):
            edges[(row_qubit(r, c), row_qubit(r, c + 1))] = err_2q
    next_index = rows * cols
    for gap in range(rows - 1):
        anchor_cols = (1, 5, 9, 13) if gap % 2 == 0 else (3, 7, 11, 15)
        for c in anchor_cols:
            bridge = next_index
            next_index += 1
            a = row_qubit(gap, c)
            b = row_qubit(gap + 1, c)
            edges[(min(a, bridge), max(a, bridge))] = err_2q
            edges[(min(b, bridge), max(b, bridge))] = err_2q
    return CouplingMap(next_index, edges, {}, durations)


def load_coupling_map(path: str) -> CouplingMap:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read coupling map {path}: {exc}") from exc
    return parse_coupling_map(text, name=path)


def parse_coupling_map(text: str, name: str = "<map>") -> CouplingMap:
    n = None
    durations = DEFAULT_DURATIONS
    edges: dict[tuple[int, int], float] = {}
    qubit_info: dict[int, QubitInfo] = {}

    def fail(line_no: int, msg: str) -> None:
        raise ParseError(name, line_no, msg)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "QUBITS":
            if n is not None:
                fail(line_no, "duplicate QUBITS line")
            try:
                n = int(parts[1])
            except (ValueError, IndexError):
                fail(line_no, "QUBITS takes one integer")
            if n < 1:
                fail(line_no, "QUBITS must be >= 1")
        elif head == "DUR":
            try:
                durations = (float(parts[1]), float(parts[2]), float(parts[3]))
            except (ValueError, IndexError):
                fail(line_no, "DUR takes three durations in seconds")
        elif head == "EDGE":
            if n is None:
                fail(line_no, "EDGE before QUBITS")
            try:
                i, j, err = int(parts[1]), int(parts[2]), float(parts[3])
            except (ValueError, IndexError):
                fail(line_no, "EDGE takes two indices and an error rate")
            if i == j:
                fail(line_no, "EDGE endpoints must differ")
            key = (min(i, j), max(i, j))
            if key in edges:
                fail(line_no, f"duplicate EDGE {key}")
            edges[key] = err
        elif head == "Q":
            if n is None:
                fail(line_no, "Q before QUBITS")
            try:
                q = int(parts[1])
                info = QubitInfo(
                    float(parts[2]), float(parts[3]), float(parts[4]), float(parts[5])
                )
            except (ValueError, IndexError):
                fail(line_no, "Q takes index, err_1q, err_ro, t1, t2")
            except ValidationError as exc:
                fail(line_no, str(exc))
            if q in qubit_info:
                fail(line_no, f"duplicate Q line for {q}")
            qubit_info[q] = info
        else:
            fail(line_no, f"unknown directive {head!r}")
    if n is None:
        raise ParseError(name, 1, "missing QUBITS line")
    try:
        return CouplingMap(n, edges, qubit_info, durations)
    except ValidationError as exc:
        raise ParseError(name, 1, str(exc)) from exc


def write_coupling_map(path: str, cmap: CouplingMap) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"QUBITS {cmap.n_physical}\n")
        d1, d2, dro = cmap.durations
        fh.write(f"DUR {d1!r} {d2!r} {dro!r}\n")
        for (i, j) in cmap.edges:
            fh.write(f"EDGE {i} {j} {cmap.edge_errors[(i, j)]!r}\n")
        for q in sorted(cmap.qubit_info):
            info = cmap.qubit_info[q]
            fh.write(
                f"Q {q} {info.err_1q!r} {info.err_ro!r} {info.t1!r} {info.t2!r}\n"
            )
