"""
Graph data model operations: IO, bipartite double cover, degree statistics,
bi-average degree and the rho smoothness functional.

e(X, Y) counts ORDERED adjacent pairs (u, v) in X x Y, so an edge with both
ends in X & Y contributes 2 and e(V, V) = 2|E|. This is the count of edges of
the bipartite double cover between the copies of X and Y.
"""

from typing import Any, BinaryIO, Dict, Iterable, List, Optional, Tuple, Union
import io
import logging
import math
import os

import numpy as np
from scipy import io as scipy_io, sparse

from .base import BaseAdapter, BaseAnalysis, DomainError, GraphParseError
from ..models import BipartiteGraph, DegreeSequence, Graph, LoadReport, VertexSet

logger = logging.getLogger(__name__)

EDGE_LIST = 'edge-list'
MATRIX_MARKET = 'matrix-market'
FORMATS = (EDGE_LIST, MATRIX_MARKET)

VertexArg = Union[VertexSet, Iterable[int]]

# ==============================================
# FORMAT ADAPTERS
# ==============================================


def _token_columns(line: str) -> List[Tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based column"""
    tokens = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        start = i
        while i < len(line) and not line[i].isspace():
            i += 1
        tokens.append((line[start:i], start + 1))
    return tokens


def _parse_index(token: str, line_no: int, column: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GraphParseError(f"expected a vertex id, found {token!r}", line_no, column)
    if value < 0:
        raise GraphParseError(f"negative vertex id {value}", line_no, column)
    return value


class EdgeListAdapter(BaseAdapter):
    """'u v' per line, '#' comments, optional '# vertices n' header"""

    def __init__(self):
        super().__init__("edge_list_adapter")

    def adapt(self, text: str) -> Tuple[Graph, LoadReport]:
        declared: Optional[int] = None
        pairs: List[Tuple[int, int]] = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            body, _, comment = raw.partition('#')
            header = comment.split()
            if len(header) == 2 and header[0].lower() == 'vertices' and not body.strip():
                declared = _parse_index(header[1], line_no, raw.index(header[1]) + 1)
                continue
            tokens = _token_columns(body)
            if not tokens:
                continue
            if len(tokens) != 2:
                column = tokens[2][1] if len(tokens) > 2 else tokens[-1][1]
                raise GraphParseError(f"expected 'u v', found {len(tokens)} token(s)", line_no, column)
            u = _parse_index(tokens[0][0], line_no, tokens[0][1])
            v = _parse_index(tokens[1][0], line_no, tokens[1][1])
            if u == v:
                raise GraphParseError(f"self-loop at vertex {u}", line_no, tokens[0][1])
            pairs.append((u, v))

        if declared is not None:
            for u, v in pairs:
                if max(u, v) >= declared:
                    raise GraphParseError(f"vertex id {max(u, v)} exceeds declared count {declared}")
            labels = tuple(range(declared))
            mapping = None
        else:
            labels = tuple(sorted({w for pair in pairs for w in pair}))
            if not labels:
                raise GraphParseError("edge list has no edges and no '# vertices n' header")
            mapping = None if labels == tuple(range(len(labels))) else {w: i for i, w in enumerate(labels)}

        if mapping is not None:
            pairs = [(mapping[u], mapping[v]) for u, v in pairs]
        unique = {(min(u, v), max(u, v)) for u, v in pairs}
        try:
            graph = Graph.from_edges(len(labels), unique)
        except DomainError as e:
            raise GraphParseError(str(e))
        report = LoadReport(labels=labels, remapped=mapping is not None,
                            duplicates_collapsed=len(pairs) - len(unique), source_format=EDGE_LIST)
        return graph, report

    def can_handle(self, data: Any) -> bool:
        return isinstance(data, str) and not data.lstrip().startswith('%%')


class MatrixMarketAdapter(BaseAdapter):
    """
    Matrix Market coordinate pattern format (symmetric, or general with symmetric entries).

    A line-by-line pass reports malformed headers and entries with their
    position; the matrix itself is read with scipy.io.mmread.
    """

    def __init__(self):
        super().__init__("matrix_market_adapter")

    def _check_header(self, lines: List[str]) -> str:
        if not lines or not lines[0].startswith('%%MatrixMarket'):
            raise GraphParseError("missing '%%MatrixMarket' header", 1, 1)
        header = lines[0].split()
        if len(header) != 5:
            raise GraphParseError("header must read '%%MatrixMarket matrix coordinate pattern symmetric'", 1)
        _, obj, fmt, field, symmetry = (h.lower() for h in header)
        if obj != 'matrix' or fmt != 'coordinate':
            raise GraphParseError(f"unsupported Matrix Market layout {obj} {fmt}", 1)
        if field != 'pattern':
            raise GraphParseError(f"only pattern matrices describe simple graphs, found {field}", 1)
        if symmetry not in ('symmetric', 'general'):
            raise GraphParseError(f"unsupported symmetry {symmetry}", 1)
        return symmetry

    def _check_body(self, lines: List[str]) -> Tuple[int, int]:
        """Validates the size line and every entry; returns (rows, entries)"""
        size_line = None
        entries = 0
        for line_no, raw in enumerate(lines[1:], start=2):
            if not raw.strip() or raw.lstrip().startswith('%'):
                continue
            tokens = _token_columns(raw)
            if size_line is None:
                if len(tokens) != 3:
                    raise GraphParseError("size line must be 'rows cols entries'", line_no)
                size_line = tuple(_parse_index(tok, line_no, col) for tok, col in tokens)
                rows, cols, _ = size_line
                if rows != cols:
                    raise GraphParseError(f"adjacency matrix must be square, found {rows}x{cols}", line_no)
                if rows < 1:
                    raise GraphParseError("adjacency matrix needs at least one row", line_no)
                continue
            if len(tokens) != 2:
                raise GraphParseError(f"pattern entry needs 2 indices, found {len(tokens)}", line_no,
                                      tokens[min(2, len(tokens) - 1)][1])
            i = _parse_index(tokens[0][0], line_no, tokens[0][1])
            j = _parse_index(tokens[1][0], line_no, tokens[1][1])
            if not (1 <= i <= rows and 1 <= j <= rows):
                raise GraphParseError(f"entry ({i}, {j}) outside a {rows}x{rows} matrix", line_no)
            if i == j:
                raise GraphParseError(f"self-loop at vertex {i - 1}", line_no)
            entries += 1
        if size_line is None:
            raise GraphParseError("missing size line")
        if entries != size_line[2]:
            raise GraphParseError(f"size line announces {size_line[2]} entries, found {entries}")
        return size_line[0], entries

    def adapt(self, text: str) -> Tuple[Graph, LoadReport]:
        lines = text.splitlines()
        symmetry = self._check_header(lines)
        rows, entries = self._check_body(lines)
        try:
            coo = scipy_io.mmread(io.BytesIO(text.encode('utf-8')))
        except (ValueError, IndexError) as e:
            raise GraphParseError(f"unreadable Matrix Market body: {e}")
        pattern = sparse.csr_matrix(coo, shape=(rows, rows), dtype=np.int64)
        pattern.data[:] = 1
        mirror_gaps = (pattern - pattern.T).tocoo()
        missing = sorted(zip(mirror_gaps.row[mirror_gaps.data > 0].tolist(),
                             mirror_gaps.col[mirror_gaps.data > 0].tolist()))
        if missing:
            i, j = missing[0]
            raise GraphParseError(f"asymmetric matrix: entry ({i + 1}, {j + 1}) has no mirror")
        graph = Graph.from_matrix(pattern)
        stored = graph.edge_count * (2 if symmetry == 'general' else 1)
        report = LoadReport(labels=tuple(range(rows)), remapped=False,
                            duplicates_collapsed=entries - stored, source_format=MATRIX_MARKET)
        return graph, report

    def can_handle(self, data: Any) -> bool:
        return isinstance(data, str) and data.lstrip().startswith('%%MatrixMarket')


class GraphLoader(BaseAnalysis):
    """Picks the format adapter (explicit or auto-detected) and loads a graph"""

    def __init__(self, config: Dict[str, Any] = None):
        super().__init__("graph_loader", config)
        self.adapters = [MatrixMarketAdapter(), EdgeListAdapter()]

    def execute(self, source: Union[BinaryIO, bytes], fmt: Optional[str] = None) -> Tuple[Graph, LoadReport]:
        raw = source if isinstance(source, (bytes, bytearray)) else source.read()
        try:
            text = raw.decode('utf-8')
        except UnicodeDecodeError as e:
            raise GraphParseError(f"input is not valid UTF-8: {e.reason}")
        adapter = self._find_adapter(text, fmt)
        graph, report = adapter.adapt(text)
        self.log_metric("graph_loaded", 1, {
            "format": report.source_format,
            "vertices": graph.vertex_count,
            "edges": graph.edge_count,
        })
        if report.remapped:
            self.logger.info(f"Vertex ids remapped to 0..{graph.vertex_count - 1}")
        return graph, report

    def _find_adapter(self, text: str, fmt: Optional[str]) -> BaseAdapter:
        if fmt:
            if fmt not in FORMATS:
                raise DomainError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")
            wanted = f"{fmt.replace('-', '_')}_adapter"
            return next(a for a in self.adapters if a.name == wanted)
        for adapter in self.adapters:
            if adapter.can_handle(text):
                return adapter
        raise GraphParseError("could not detect the graph format")

    def validate_config(self) -> bool:
        return len(self.adapters) > 0


def load_graph(source: Union[BinaryIO, bytes], fmt: Optional[str] = EDGE_LIST) -> Graph:
    """Parse a graph from a byte stream; see docs/formats.md"""
    graph, _ = GraphLoader().execute(source, fmt)
    return graph


def read_graph_file(path: str, fmt: Optional[str] = None) -> Tuple[Graph, LoadReport]:
    """Load from disk; the format defaults to the extension (.mtx -> Matrix Market)"""
    if fmt is None and os.path.splitext(path)[1].lower() == '.mtx':
        fmt = MATRIX_MARKET
    try:
        with open(path, 'rb') as fh:
            return GraphLoader().execute(fh, fmt)
    except OSError as e:
        raise GraphParseError(f"cannot read {path}: {e.strerror}")


def write_edge_list(g: Graph) -> str:
    lines = [f"# vertices {g.vertex_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def write_matrix_market(g: Graph) -> str:
    """Symmetric pattern file, one lower-triangle entry per edge"""
    buffer = io.BytesIO()
    scipy_io.mmwrite(buffer, g.matrix, field='pattern', symmetry='symmetric')
    return buffer.getvalue().decode('utf-8')


# ==============================================
# STRUCTURE
# ==============================================

def double_cover(g: Graph) -> BipartiteGraph:
    """G x K2: the biadjacency matrix equals the adjacency matrix of g"""
    return BipartiteGraph.from_matrix(g.matrix)


def _as_vertex_set(vertices: VertexArg, size: int, label: str) -> VertexSet:
    vs = vertices if isinstance(vertices, VertexSet) else VertexSet.of(vertices)
    if not vs:
        raise DomainError(f"{label} must be non-empty")
    if vs.members[0] < 0 or vs.members[-1] >= size:
        raise DomainError(f"{label} has an index outside [0, {size})")
    return vs


def e_between(g: Graph, x: VertexArg, y: VertexArg) -> int:
    """Number of ordered pairs (u, v) in X x Y with u ~ v"""
    xs = _as_vertex_set(x, g.vertex_count, "X")
    ys = _as_vertex_set(y, g.vertex_count, "Y")
    return int(g.matrix[list(xs.members)][:, list(ys.members)].nnz)


def e_between_bipartite(bg: BipartiteGraph, x: VertexArg, y: VertexArg) -> int:
    """Edges between X (left) and Y (right)"""
    xs = _as_vertex_set(x, bg.left_count, "X")
    ys = _as_vertex_set(y, bg.right_count, "Y")
    return int(bg.matrix[list(xs.members)][:, list(ys.members)].nnz)


def bi_average_degree(g: Graph, x: VertexArg, y: VertexArg) -> float:
    """e(X,Y) / sqrt(|X||Y|)"""
    xs = _as_vertex_set(x, g.vertex_count, "X")
    ys = _as_vertex_set(y, g.vertex_count, "Y")
    return e_between(g, xs, ys) / math.sqrt(len(xs) * len(ys))


def degree_stats(g: Graph) -> Tuple[DegreeSequence, float, int, float]:
    """(d, ||d||_1, Delta, ||d||_2) with normalized norms (mean, max, root-mean-square)"""
    d = DegreeSequence(g.degrees())
    return d, d.mean, int(d.max), d.rms


def side_degree_stats(bg: BipartiteGraph) -> Dict[str, float]:
    """Normalized norms of the left and right degree sequences"""
    d_u = DegreeSequence(bg.left_degrees())
    d_w = DegreeSequence(bg.right_degrees())
    return {
        'left_mean': d_u.mean, 'left_rms': d_u.rms, 'left_max': d_u.max,
        'right_mean': d_w.mean, 'right_rms': d_w.rms, 'right_max': d_w.max,
    }


def rho_witness(d: Union[DegreeSequence, Iterable[float]]) -> Tuple[float, int]:
    """
    rho(d) together with the 1-based index k of the definition.

    Sort non-increasingly (stable), let k be the smallest index with
    d_1^2 + ... + d_k^2 >= d_{k+1}^2 + ... + d_n^2 and return d_1/d_k, or 1
    when d_k = 0 (the zero sequence).
    """
    values = d.values if isinstance(d, DegreeSequence) else DegreeSequence(d).values
    if len(values) == 0:
        return 1.0, 0
    ordered = values[np.argsort(-values, kind='stable')]
    squares = ordered * ordered
    prefix = np.cumsum(squares)
    suffix = np.concatenate((np.cumsum(squares[::-1])[::-1][1:], [0.0]))
    k = int(np.argmax(prefix >= suffix)) + 1
    d_k = ordered[k - 1]
    if d_k == 0:
        return 1.0, k
    return float(ordered[0] / d_k), k


def rho(d: Union[DegreeSequence, Iterable[float]]) -> float:
    return rho_witness(d)[0]


# ==============================================
# NAMED GRAPHS
# ==============================================

def empty_graph(n: int) -> Graph:
    return Graph(n, [[] for _ in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise DomainError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with the centre at index 0"""
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def complete_bipartite(n1: int, n2: int) -> Graph:
    """K_{n1,n2} with the first part at indices [0, n1)"""
    return Graph.from_edges(n1 + n2, ((i, n1 + j) for i in range(n1) for j in range(n2)))


def complete_bipartite_bg(n1: int, n2: int) -> BipartiteGraph:
    return BipartiteGraph(n1, n2, [list(range(n2)) for _ in range(n1)])


def petersen_graph() -> Graph:
    outer = ((i, (i + 1) % 5) for i in range(5))
    spokes = ((i, i + 5) for i in range(5))
    inner = ((5 + i, 5 + (i + 2) % 5) for i in range(5))
    return Graph.from_edges(10, [*outer, *spokes, *inner])


def disjoint_union(g: Graph, h: Graph) -> Graph:
    return Graph.from_matrix(sparse.block_diag((g.matrix, h.matrix), format='csr'))


def gnp_random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi G(n, p) drawn from a seeded generator"""
    if not 0.0 <= p <= 1.0:
        raise DomainError("edge probability must lie in [0, 1]")
    upper = np.triu(rng.random((n, n)) < p, k=1)
    rows, cols = np.nonzero(upper)
    return Graph.from_edges(n, zip(rows.tolist(), cols.tolist()))
