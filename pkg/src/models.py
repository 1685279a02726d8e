"""
Domain value types shared by every analysis module.

All types are immutable after construction. Vertices are dense 0-based
integers. Sequence norms follow the normalized convention
<x,x> = ||x||^2 = n ||x||_2^2: ||.||_1 is the mean, ||.||_2 the
root-mean-square and ||.||_inf the maximum. The unsubscripted ||.|| is the
plain Euclidean norm.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple
import math

import numpy as np
from scipy import sparse

from src.analysis.base import DomainError


def _csr_from_rows(rows: Sequence[Sequence[int]], column_count: int) -> sparse.csr_matrix:
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, row in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(row)
    indices = np.fromiter((j for row in rows for j in row), dtype=np.int64, count=int(indptr[-1]))
    data = np.ones(len(indices), dtype=np.int64)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(rows), column_count))


class Graph:
    """Simple undirected graph stored as sorted neighbor lists (CSR)"""

    __slots__ = ('_matrix',)

    def __init__(self, vertex_count: int, adjacency: Sequence[Sequence[int]]):
        if vertex_count < 1:
            raise DomainError("a graph needs at least one vertex")
        if len(adjacency) != vertex_count:
            raise DomainError(f"expected {vertex_count} neighbor lists, got {len(adjacency)}")
        rows = []
        for v, neighbors in enumerate(adjacency):
            row = sorted(int(u) for u in neighbors)
            if len(set(row)) != len(row):
                raise DomainError(f"duplicate neighbor in the list of vertex {v}")
            if v in row:
                raise DomainError(f"self-loop at vertex {v}")
            if row and (row[0] < 0 or row[-1] >= vertex_count):
                raise DomainError(f"neighbor index out of range at vertex {v}")
            rows.append(row)
        matrix = _csr_from_rows(rows, vertex_count)
        if (matrix != matrix.T).nnz:
            raise DomainError("adjacency is not symmetric")
        self._matrix = matrix

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Tuple[int, int]]) -> 'Graph':
        """Build from an edge iterable; duplicate edges collapse, loops are rejected"""
        adjacency: List[set] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            adjacency[u].add(v)
            adjacency[v].add(u)
        return cls(vertex_count, [sorted(a) for a in adjacency])

    @classmethod
    def from_matrix(cls, matrix: sparse.spmatrix) -> 'Graph':
        """Wrap a symmetric 0/1 sparse matrix with zero diagonal"""
        csr = sparse.csr_matrix(matrix, dtype=np.int64)
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        if csr.shape[0] != csr.shape[1] or csr.shape[0] < 1:
            raise DomainError("adjacency matrix must be square and non-empty")
        if csr.diagonal().any():
            raise DomainError("adjacency matrix has a non-zero diagonal")
        if (csr.data != 1).any() or (csr != csr.T).nnz:
            raise DomainError("adjacency matrix must be a symmetric 0/1 matrix")
        graph = cls.__new__(cls)
        graph._matrix = csr
        return graph

    @property
    def vertex_count(self) -> int:
        return self._matrix.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self._matrix.nnz) // 2

    @property
    def matrix(self) -> sparse.csr_matrix:
        """Adjacency matrix; callers must not mutate it"""
        return self._matrix

    @property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        m = self._matrix
        return tuple(tuple(int(u) for u in m.indices[m.indptr[v]:m.indptr[v + 1]])
                     for v in range(self.vertex_count))

    def neighbors(self, v: int) -> np.ndarray:
        m = self._matrix
        return m.indices[m.indptr[v]:m.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self._matrix.indptr).astype(np.int64)

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Each undirected edge once, as (u, v) with u < v"""
        for u in range(self.vertex_count):
            for v in self.neighbors(u):
                if u < v:
                    yield u, int(v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.vertex_count == other.vertex_count
                and np.array_equal(self._matrix.indptr, other._matrix.indptr)
                and np.array_equal(self._matrix.indices, other._matrix.indices))

    def __hash__(self) -> int:
        return hash((self.vertex_count, self._matrix.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(vertex_count={self.vertex_count}, edge_count={self.edge_count})"


class BipartiteGraph:
    """Bipartite graph given by its biadjacency rows (left vertex -> right neighbors)"""

    __slots__ = ('_matrix',)

    def __init__(self, left_count: int, right_count: int, rows: Sequence[Sequence[int]]):
        if left_count < 1 or right_count < 1:
            raise DomainError("both partite sets must be non-empty")
        if len(rows) != left_count:
            raise DomainError(f"expected {left_count} rows, got {len(rows)}")
        clean = []
        for u, row in enumerate(rows):
            row = sorted(int(w) for w in row)
            if len(set(row)) != len(row):
                raise DomainError(f"duplicate right neighbor in row {u}")
            if row and (row[0] < 0 or row[-1] >= right_count):
                raise DomainError(f"right index out of range in row {u}")
            clean.append(row)
        self._matrix = _csr_from_rows(clean, right_count)

    @classmethod
    def from_matrix(cls, matrix: sparse.spmatrix) -> 'BipartiteGraph':
        csr = sparse.csr_matrix(matrix, dtype=np.int64)
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        if (csr.data != 1).any():
            raise DomainError("biadjacency matrix must be a 0/1 matrix")
        bg = cls.__new__(cls)
        bg._matrix = csr
        return bg

    @property
    def left_count(self) -> int:
        return self._matrix.shape[0]

    @property
    def right_count(self) -> int:
        return self._matrix.shape[1]

    @property
    def edge_count(self) -> int:
        return int(self._matrix.nnz)

    @property
    def matrix(self) -> sparse.csr_matrix:
        """Biadjacency matrix B (rows = left vertices)"""
        return self._matrix

    @property
    def rows(self) -> Tuple[Tuple[int, ...], ...]:
        m = self._matrix
        return tuple(tuple(int(w) for w in m.indices[m.indptr[u]:m.indptr[u + 1]])
                     for u in range(self.left_count))

    def left_degrees(self) -> np.ndarray:
        return np.diff(self._matrix.indptr).astype(np.int64)

    def right_degrees(self) -> np.ndarray:
        return np.bincount(self._matrix.indices, minlength=self.right_count).astype(np.int64)

    def transpose(self) -> 'BipartiteGraph':
        return BipartiteGraph.from_matrix(self._matrix.T)

    def to_graph(self) -> Graph:
        """The same graph as a plain Graph, left vertices first"""
        m, n = self.left_count, self.right_count
        B = self._matrix
        return Graph.from_matrix(sparse.bmat([[sparse.csr_matrix((m, m), dtype=np.int64), B],
                                              [B.T, sparse.csr_matrix((n, n), dtype=np.int64)]]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self._matrix.shape == other._matrix.shape
                and np.array_equal(self._matrix.indptr, other._matrix.indptr)
                and np.array_equal(self._matrix.indices, other._matrix.indices))

    def __hash__(self) -> int:
        return hash((self._matrix.shape, self._matrix.indices.tobytes()))

    def __repr__(self) -> str:
        return (f"BipartiteGraph(left_count={self.left_count}, right_count={self.right_count}, "
                f"edge_count={self.edge_count})")


@dataclass(frozen=True)
class VertexSet:
    """Canonically sorted set of vertex indices"""
    members: Tuple[int, ...]

    @classmethod
    def of(cls, indices: Iterable[int]) -> 'VertexSet':
        return cls(tuple(sorted({int(i) for i in indices})))

    def indicator(self, size: int) -> np.ndarray:
        if self.members and (self.members[0] < 0 or self.members[-1] >= size):
            raise DomainError(f"vertex set {list(self.members)} exceeds range [0, {size})")
        delta = np.zeros(size, dtype=np.int64)
        delta[list(self.members)] = 1
        return delta

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)


class DegreeSequence:
    """Non-negative sequence with the normalized norms"""

    __slots__ = ('_values',)

    def __init__(self, values: Iterable[float]):
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        if arr.ndim != 1:
            raise DomainError("a degree sequence is one-dimensional")
        if (arr < 0).any():
            raise DomainError("degree sequence entries must be non-negative")
        self._values = arr.copy()
        self._values.setflags(write=False)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return len(self._values)

    @property
    def mean(self) -> float:
        """||d||_1 (normalized)"""
        return float(self._values.mean()) if len(self._values) else 0.0

    @property
    def rms(self) -> float:
        """||d||_2 (normalized): root-mean-square"""
        return math.sqrt(float(np.mean(self._values ** 2))) if len(self._values) else 0.0

    @property
    def max(self) -> float:
        """||d||_inf"""
        return float(self._values.max()) if len(self._values) else 0.0

    def __repr__(self) -> str:
        return f"DegreeSequence({self._values.tolist()})"


@dataclass(frozen=True)
class LoadReport:
    """Side information produced while loading a graph file"""
    labels: Tuple[int, ...]
    remapped: bool
    duplicates_collapsed: int
    source_format: str


@dataclass(frozen=True)
class SpectralResult:
    lambda_max: float
    perron: np.ndarray = field(repr=False, compare=False)
    iterations: int
    residual: float
    converged: bool


class LemmaTag(Enum):
    PREFIX = "prefix"
    THRESHOLD = "threshold"
    SMOOTH = "smooth"


@dataclass(frozen=True)
class RoundingOutcome:
    support: Tuple[int, ...]
    achieved_ratio: float
    guarantee: float
    lemma_tag: LemmaTag
    level: Optional[int] = None
    rho: Optional[float] = None

    def indicator(self, size: int) -> np.ndarray:
        return VertexSet(self.support).indicator(size)


class CertificateVariant(Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"

    @classmethod
    def parse(cls, value: str) -> 'CertificateVariant':
        try:
            return cls(value.upper())
        except ValueError:
            raise DomainError(f"unknown certificate variant {value!r} (expected t1, t2 or t3)")


@dataclass(frozen=True)
class Certificate:
    variant: CertificateVariant
    x_set: VertexSet
    y_set: VertexSet
    edges: int
    density: float
    lambda_max: float
    guarantee_factor: float
    side_note: str
    converged: bool
    extra: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def squared_density(self) -> Fraction:
        return Fraction(self.edges * self.edges, len(self.x_set) * len(self.y_set))

    def to_dict(self) -> Dict[str, Any]:
        """Stable-order JSON object"""
        out: Dict[str, Any] = {
            'variant': self.variant.value,
            'x': list(self.x_set.members),
            'y': list(self.y_set.members),
            'edges': int(self.edges),
            'x_size': len(self.x_set),
            'y_size': len(self.y_set),
            'lambda': float(self.lambda_max),
            'density': float(self.density),
            'guarantee_factor': float(self.guarantee_factor),
            'guarantee_bound': float(self.guarantee_factor * self.lambda_max),
            'side': self.side_note,
            'converged': bool(self.converged),
        }
        for key in sorted(self.extra):
            out[key] = self.extra[key]
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Certificate':
        known = {'variant', 'x', 'y', 'edges', 'x_size', 'y_size', 'lambda', 'density',
                 'guarantee_factor', 'guarantee_bound', 'side', 'converged'}
        return cls(
            variant=CertificateVariant.parse(data['variant']),
            x_set=VertexSet.of(data['x']),
            y_set=VertexSet.of(data['y']),
            edges=int(data['edges']),
            density=float(data['density']),
            lambda_max=float(data['lambda']),
            guarantee_factor=float(data['guarantee_factor']),
            side_note=str(data.get('side', 'B')),
            converged=bool(data.get('converged', True)),
            extra={k: v for k, v in data.items() if k not in known},
        )


@dataclass(frozen=True)
class ExactMResult:
    value: float
    x_witness: VertexSet
    y_witness: VertexSet
    edges: int
    subsets_scanned: int

    @property
    def squared(self) -> Fraction:
        """value^2 as an exact rational e^2 / (|X||Y|)"""
        return Fraction(self.edges * self.edges, len(self.x_witness) * len(self.y_witness))


@dataclass(frozen=True)
class GapGraphSpec:
    s: int
    t: int

    def __post_init__(self):
        if self.s < 1 or self.t < 1:
            raise DomainError("s and t must both be at least 1")

    @property
    def vertex_count(self) -> int:
        return (2 * self.s) ** self.t

    @property
    def ordered_pairs(self) -> int:
        return (self.s * self.s + self.s) ** self.t


@dataclass(frozen=True)
class LevelVector:
    """Implicit vector with C(t,j) s^t coordinates equal to lambda^(t-j), j in [0,t]"""
    lam: float
    s: int
    t: int

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("level vector needs lambda > 0")
        if self.s < 1 or self.t < 1:
            raise DomainError("level vector needs s, t >= 1")

    @property
    def log_norm_squared(self) -> float:
        """log ||z||^2 = t log s + t log(lambda^2 + 1)"""
        return self.t * (math.log(self.s) + math.log1p(self.lam * self.lam))
