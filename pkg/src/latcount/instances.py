"""Line-oriented instance files.

Canonical and standard form::

    canonical 4 2          # or: standard k n [with-mult]
    1 0
    -1 0
    0 1
    0 -1
    rhs 2 0 2 0            # rationals such as 3/2 are allowed
    mult 2 2               # standard with-mult only
    objective 1 1          # optional

Hypergraphs (vertices are 1-based)::

    hypergraph 3 3
    1 2
    2 3
    1 3
    edgebounds -inf 1      # one line per edge, or one line for all edges
    vertexbounds 1 inf     # likewise per vertex
    weights 1 1 1
    mult 2 2 2

``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import LatcountError
from .hypergraph import HypergraphInstance
from .polyhedron import CanonicalSystem, StandardSystem


class ParseError(LatcountError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class InstanceFile:
    kind: str                       # canonical | standard | hypergraph
    system: object
    objective: tuple[int, ...] | None = None


class _Line:
    def __init__(self, number: int, raw: str):
        self.number = number
        self.raw = raw
        self.tokens: list[tuple[str, int]] = []
        code = raw.split("#", 1)[0]
        pos = 0
        for tok in code.split():
            pos = code.index(tok, pos)
            self.tokens.append((tok, pos + 1))
            pos += len(tok)

    def error(self, msg: str, k: int | None = None) -> ParseError:
        col = self.tokens[k][1] if k is not None and k < len(self.tokens) else None
        return ParseError(msg, self.number, col)

    def word(self, k: int = 0) -> str:
        return self.tokens[k][0].lower()

    def ints(self, start: int = 0, count: int | None = None) -> list[int]:
        vals = []
        for k in range(start, len(self.tokens)):
            tok = self.tokens[k][0]
            try:
                vals.append(int(tok))
            except ValueError:
                raise self.error(f"expected an integer, got {tok!r}", k) from None
        if count is not None and len(vals) != count:
            raise self.error(f"expected {count} integers, got {len(vals)}")
        return vals

    def rats(self, start: int, count: int) -> list[Fraction]:
        vals = []
        for k in range(start, len(self.tokens)):
            tok = self.tokens[k][0]
            try:
                if "." in tok or "e" in tok.lower():
                    raise ValueError
                vals.append(Fraction(tok))
            except (ValueError, ZeroDivisionError):
                raise self.error(f"expected a rational p/q, got {tok!r}", k) from None
        if len(vals) != count:
            raise self.error(f"expected {count} rationals, got {len(vals)}")
        return vals

    def bound(self, k: int, side: str):
        tok = self.tokens[k][0].lower()
        if side == "lo" and tok == "-inf":
            return None
        if side == "hi" and tok in ("inf", "+inf"):
            return None
        try:
            v = int(tok)
        except ValueError:
            raise self.error(f"expected an integer or {'-inf' if side == 'lo' else 'inf'}, "
                             f"got {tok!r}", k) from None
        if v < 0:
            raise self.error("finite bounds must be nonnegative", k)
        return v


def _lines(text: str) -> list[_Line]:
    out = []
    for i, raw in enumerate(text.splitlines(), 1):
        ln = _Line(i, raw)
        if ln.tokens:
            out.append(ln)
    return out


def parse_instance(text: str) -> InstanceFile:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty instance")
    head = lines[0]
    kind = head.word()
    if kind in ("canonical", "standard"):
        return _parse_linear(head, lines[1:])
    if kind == "hypergraph":
        return _parse_hypergraph(head, lines[1:])
    raise head.error(f"unknown instance kind {head.tokens[0][0]!r}", 0)


def _header_dims(head: _Line, extra_ok: tuple[str, ...] = ()) -> tuple[int, int, list[str]]:
    if len(head.tokens) < 3:
        raise head.error("header needs two dimensions")
    try:
        a, b = int(head.tokens[1][0]), int(head.tokens[2][0])
    except ValueError:
        raise head.error("dimensions must be integers", 1) from None
    if a < 0 or b < 0:
        raise head.error("dimensions must be nonnegative", 1)
    extras = [head.word(k) for k in range(3, len(head.tokens))]
    for k, e in enumerate(extras):
        if e not in extra_ok:
            raise head.error(f"unexpected header word {e!r}", 3 + k)
    return a, b, extras


def _parse_linear(head: _Line, body: list[_Line]) -> InstanceFile:
    kind = head.word()
    m, n, extras = _header_dims(head, ("with-mult",) if kind == "standard" else ())
    if n < 1:
        raise head.error("at least one variable is required", 2)
    with_mult = "with-mult" in extras
    if len(body) < m:
        raise ParseError(f"expected {m} matrix rows", head.number)
    rows = [ln.ints(0, n) for ln in body[:m]]
    rest = body[m:]
    rhs = mult = obj = None
    for ln in rest:
        key = ln.word()
        if key == "rhs" and rhs is None:
            rhs = ln.rats(1, m)
        elif key == "mult" and mult is None:
            if not with_mult:
                raise ln.error("mult line needs a 'standard ... with-mult' header", 0)
            mult = ln.ints(1, n)
            if any(u < 0 for u in mult):
                raise ln.error("multiplicities must be nonnegative")
        elif key == "objective" and obj is None:
            obj = tuple(ln.ints(1, n))
        else:
            raise ln.error(f"unexpected line starting with {ln.tokens[0][0]!r}", 0)
    if rhs is None:
        if m:
            raise ParseError("missing rhs line", body[-1].number if body else head.number)
        rhs = []
    if with_mult and mult is None:
        raise ParseError("with-mult header but no mult line", head.number)
    if kind == "canonical":
        return InstanceFile("canonical", CanonicalSystem(rows, rhs, n), obj)
    return InstanceFile("standard", StandardSystem(rows, rhs, mult, n=n), obj)


def _parse_hypergraph(head: _Line, body: list[_Line]) -> InstanceFile:
    nv, ne, _ = _header_dims(head)
    if len(body) < ne:
        raise ParseError(f"expected {ne} hyperedge lines", head.number)
    edges = []
    for ln in body[:ne]:
        vs = ln.ints()
        for k, v in enumerate(vs):
            if not 1 <= v <= nv:
                raise ln.error(f"vertex {v} outside 1..{nv}", k)
        if not vs:
            raise ln.error("empty hyperedge")
        edges.append(tuple(v - 1 for v in vs))
    eb: list[_Line] = []
    vb: list[_Line] = []
    weights = mult = None
    for ln in body[ne:]:
        key = ln.word()
        if key == "edgebounds":
            eb.append(ln)
        elif key == "vertexbounds":
            vb.append(ln)
        elif key == "weights" and weights is None:
            weights = ln.ints(1)
        elif key == "mult" and mult is None:
            mult = ln.ints(1)
            if any(u < 0 for u in mult):
                raise ln.error("multiplicities must be nonnegative")
        else:
            raise ln.error(f"unexpected line starting with {ln.tokens[0][0]!r}", 0)

    def bounds(lines: list[_Line], count: int, what: str):
        if not lines:
            return None, None
        if len(lines) == 1 and count != 1:
            lines = lines * count
        if len(lines) != count:
            raise lines[-1].error(f"expected 1 or {count} {what} lines")
        lo, hi = [], []
        for ln in lines:
            if len(ln.tokens) != 3:
                raise ln.error(f"{what} needs a lower and an upper bound")
            lo.append(ln.bound(1, "lo"))
            hi.append(ln.bound(2, "hi"))
        return lo, hi

    elo, ehi = bounds(eb, ne, "edgebounds")
    vlo, vhi = bounds(vb, nv, "vertexbounds")
    H = HypergraphInstance(nv, edges, edge_lower=elo, edge_upper=ehi, vertex_lower=vlo,
                           vertex_upper=vhi, weights=weights, mult=mult)
    return InstanceFile("hypergraph", H, None)


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_bound(x, side: str) -> str:
    if x is None:
        return "-inf" if side == "lo" else "inf"
    return str(x)


def write_instance(inst: InstanceFile) -> str:
    """Normalised text form; ``parse_instance(write_instance(x))`` equals ``x``."""
    out: list[str] = []
    S = inst.system
    if inst.kind == "canonical":
        out.append(f"canonical {S.m} {S.n}")
        out += [" ".join(str(a) for a in row) for row in S.A]
        out.append(" ".join(["rhs"] + [_fmt(x) for x in S.b]))
    elif inst.kind == "standard":
        out.append(f"standard {S.k} {S.n}" + (" with-mult" if S.u is not None else ""))
        out += [" ".join(str(a) for a in row) for row in S.A]
        out.append(" ".join(["rhs"] + [_fmt(x) for x in S.b]))
        if S.u is not None:
            out.append(" ".join(["mult"] + [str(u) for u in S.u]))
    elif inst.kind == "hypergraph":
        H = S
        out.append(f"hypergraph {H.vertex_count} {H.edge_count}")
        out += [" ".join(str(v + 1) for v in e) for e in H.edges]
        if any(x is not None for x in H.edge_lower + H.edge_upper):
            out += [f"edgebounds {_fmt_bound(lo, 'lo')} {_fmt_bound(hi, 'hi')}"
                    for lo, hi in zip(H.edge_lower, H.edge_upper)]
        if any(x is not None for x in H.vertex_lower + H.vertex_upper):
            out += [f"vertexbounds {_fmt_bound(lo, 'lo')} {_fmt_bound(hi, 'hi')}"
                    for lo, hi in zip(H.vertex_lower, H.vertex_upper)]
        if H.weights is not None:
            out.append(" ".join(["weights"] + [str(w) for w in H.weights]))
        if H.mult is not None:
            out.append(" ".join(["mult"] + [str(u) for u in H.mult]))
    else:
        raise ValueError(f"unknown instance kind {inst.kind!r}")
    if inst.objective is not None:
        out.append(" ".join(["objective"] + [str(c) for c in inst.objective]))
    return "\n".join(out) + "\n"
