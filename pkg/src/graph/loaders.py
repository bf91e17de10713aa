"""Parsers for edge-list, METIS and Matrix Market graph files."""
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.io
from loguru import logger

from src.exceptions import EmptyGraphError, GraphFormatError
from src.graph.csr import Graph


class GraphFormat(str, Enum):
    EDGE_LIST = "edgelist"
    METIS = "metis"
    MATRIX_MARKET = "mtx"

    @classmethod
    def from_name(cls, name: str) -> "GraphFormat":
        aliases = {
            "edge-list": cls.EDGE_LIST, "edgelist": cls.EDGE_LIST, "el": cls.EDGE_LIST,
            "metis": cls.METIS, "graph": cls.METIS,
            "matrix-market": cls.MATRIX_MARKET, "mtx": cls.MATRIX_MARKET, "mm": cls.MATRIX_MARKET,
        }
        try:
            return aliases[name.lower()]
        except KeyError:
            raise GraphFormatError(f"unknown graph format '{name}'") from None


def load_graph(path: str | Path, format: GraphFormat | str = GraphFormat.EDGE_LIST) -> Graph:
    """
    Main entry point. Reads a file and delegates to the format parser.
    Missing weights default to 1; duplicate undirected records are merged.
    """
    fmt = format if isinstance(format, GraphFormat) else GraphFormat.from_name(format)
    path = Path(path)
    if fmt is GraphFormat.EDGE_LIST:
        g = _load_edge_list(path)
    elif fmt is GraphFormat.METIS:
        g = _load_metis(path)
    else:
        g = _load_matrix_market(path)
    logger.info(f"Loaded {path.name}: n={g.num_vertices} M={g.num_edges} m={g.total_weight:g}"
                f" ({g.merged_duplicates} duplicate records merged)")
    return g


def _parse_weight(token: str, line_number: int) -> float:
    try:
        w = float(token)
    except ValueError:
        raise GraphFormatError(f"bad weight '{token}'", line_number) from None
    if not np.isfinite(w) or w <= 0:
        raise GraphFormatError(f"non-positive weight {token}", line_number)
    return w


def _load_edge_list(path: Path) -> Graph:
    """
    Whitespace separated `u v [w]` lines with `#` comments. Ids are relabelled
    densely in first-appearance order unless a `# vertices n` header is
    present, in which case ids are taken literally as 0..n-1.
    """
    declared_n: int | None = None
    ids: dict[str, int] = {}
    src: list[int] = []
    dst: list[int] = []
    wts: list[float] = []
    saw_content = False

    with open(path, encoding="utf-8") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.split("#", 1)
            body = line[0].strip()
            if not body:
                if len(line) > 1:
                    saw_content = True
                    header = line[1].split()
                    if len(header) == 2 and header[0] == "vertices" and not src:
                        try:
                            declared_n = int(header[1])
                        except ValueError:
                            raise GraphFormatError(f"bad vertex count '{header[1]}'", line_number) from None
                continue
            saw_content = True
            tokens = body.split()
            if len(tokens) not in (2, 3):
                raise GraphFormatError(f"expected 'u v [w]', got {len(tokens)} fields", line_number)

            if declared_n is None:
                u = ids.setdefault(tokens[0], len(ids))
                v = ids.setdefault(tokens[1], len(ids))
            else:
                try:
                    u, v = int(tokens[0]), int(tokens[1])
                except ValueError:
                    raise GraphFormatError("vertex ids must be integers under '# vertices'", line_number) from None
                if not (0 <= u < declared_n and 0 <= v < declared_n):
                    raise GraphFormatError(f"vertex id out of range 0..{declared_n - 1}", line_number)
            src.append(u)
            dst.append(v)
            wts.append(_parse_weight(tokens[2], line_number) if len(tokens) == 3 else 1.0)

    if not saw_content:
        raise EmptyGraphError("empty file")
    n = declared_n if declared_n is not None else len(ids)
    return Graph.from_edges(n, src, dst, wts)


def _load_metis(path: Path) -> Graph:
    """
    METIS: header `n M [fmt [ncon]]`, then one line per vertex listing its
    1-based neighbors (and weights when fmt ends in 1). `%` lines are
    comments. Each edge is listed at both endpoints; only the copy at the
    lower endpoint is kept.
    """
    with open(path, encoding="utf-8") as f:
        lines = [(no, raw.strip()) for no, raw in enumerate(f, start=1) if not raw.lstrip().startswith("%")]

    while lines and not lines[0][1]:
        lines.pop(0)
    if not lines:
        raise EmptyGraphError("empty file")

    header_no, header = lines[0]
    fields = header.split()
    if len(fields) < 2:
        raise GraphFormatError("header must be 'n M [fmt [ncon]]'", header_no)
    try:
        n, declared_m = int(fields[0]), int(fields[1])
    except ValueError:
        raise GraphFormatError("non-integer header", header_no) from None
    fmt = fields[2].zfill(3) if len(fields) > 2 else "000"
    has_size, has_vwgt, has_ewgt = (c == "1" for c in fmt[-3:])
    try:
        ncon = int(fields[3]) if len(fields) > 3 else (1 if has_vwgt else 0)
    except ValueError:
        raise GraphFormatError(f"bad ncon '{fields[3]}'", header_no) from None
    skip = int(has_size) + ncon
    step = 2 if has_ewgt else 1

    body = lines[1:]
    while len(body) > n and not body[-1][1]:
        body.pop()
    if len(body) != n:
        raise GraphFormatError(f"expected {n} vertex lines, found {len(body)}", header_no)

    src: list[int] = []
    dst: list[int] = []
    wts: list[float] = []
    for i, (line_number, line) in enumerate(body):
        tokens = line.split()[skip:]
        if len(tokens) % step:
            raise GraphFormatError("neighbor/weight pairs are incomplete", line_number)
        for k in range(0, len(tokens), step):
            try:
                j = int(tokens[k]) - 1
            except ValueError:
                raise GraphFormatError(f"bad neighbor id '{tokens[k]}'", line_number) from None
            if not 0 <= j < n:
                raise GraphFormatError(f"neighbor id {j + 1} out of range 1..{n}", line_number)
            if j < i:
                continue
            src.append(i)
            dst.append(j)
            wts.append(_parse_weight(tokens[k + 1], line_number) if has_ewgt else 1.0)

    g = Graph.from_edges(n, src, dst, wts)
    if g.num_edges != declared_m:
        logger.warning(f"METIS header declares {declared_m} edges, file lists {g.num_edges}")
    return g


def _load_matrix_market(path: Path) -> Graph:
    """
    Coordinate Matrix Market (real, integer or pattern). Symmetric files may
    store either triangle; general files are read as one record per entry.
    """
    try:
        with open(path, encoding="utf-8") as f:
            banner = f.readline()
        if not banner.strip():
            raise EmptyGraphError("empty file")
        mtx = scipy.io.mmread(str(path))
        _, _, _, fmt, field, symmetry = scipy.io.mminfo(str(path))
    except (ValueError, TypeError, IndexError) as e:
        raise GraphFormatError(f"invalid Matrix Market file: {e}") from e

    if fmt != "coordinate":
        raise GraphFormatError("only coordinate Matrix Market files are supported", 1)
    coo = mtx.tocoo()
    if coo.shape[0] != coo.shape[1]:
        raise GraphFormatError(f"adjacency matrix must be square, got {coo.shape}", 1)

    rows = coo.row.astype(np.int64)
    cols = coo.col.astype(np.int64)
    vals = np.ones(rows.size) if field == "pattern" else coo.data.astype(np.float64)
    if symmetry in ("symmetric", "hermitian"):
        # mmread mirrors the stored triangle; keep one copy of each pair
        keep = rows >= cols
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    if vals.size and not np.all(vals > 0):
        raise GraphFormatError("non-positive weight")
    return Graph.from_edges(coo.shape[0], rows, cols, vals)
