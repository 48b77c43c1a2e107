"""Text model files: charts, polynomial fields, maps and distributions.

    chart Y lam mu nu tau sigma
    field eta1 = [1, nu, 0, -(lam*nu - mu), nu^2]
    map pi : Z -> Y = [lam, x + lam*y, ...]
    distribution D = eta1 eta2

Fields belong to the most recently declared chart. ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .exactcore import ParseError, parse_expr
from .geometry import (Chart, Distribution, PolyMap, VectorField, derived_flag, frame_rank, growth_at,
                       random_rational_points)

_IDENT = r"[A-Za-z][A-Za-z0-9_]*"


@dataclass
class Model:
    name: str
    charts: dict[str, Chart] = field(default_factory=dict)
    fields: dict[str, VectorField] = field(default_factory=dict)
    maps: dict[str, PolyMap] = field(default_factory=dict)
    distributions: dict[str, Distribution] = field(default_factory=dict)

    def distribution(self, name: str | None) -> Distribution:
        if name is None:
            if len(self.distributions) != 1:
                raise KeyError(f"model declares {len(self.distributions)} distributions; choose one with --dist")
            return next(iter(self.distributions.values()))
        try:
            return self.distributions[name]
        except KeyError:
            raise KeyError(f"unknown distribution {name!r}; known: {', '.join(self.distributions) or 'none'}") from None


def _split_list(body: str, line: int, col: int) -> list[tuple[str, int]]:
    """Split '[e1, e2, ...]' at top-level commas; returns (text, column) pairs."""
    s = body.rstrip()
    lead = len(body) - len(body.lstrip())
    s = s.lstrip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("expected a bracketed list '[...]'", line, col + lead)
    items, depth, start = [], 0, 1
    for i, ch in enumerate(s[1:-1], 1):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            items.append((s[start:i], col + lead + start))
            start = i + 1
    items.append((s[start:-1], col + lead + start))
    if len(items) == 1 and not items[0][0].strip():
        return []
    return items


def _exprs(body: str, variables, line: int, col: int):
    out = []
    for text, c in _split_list(body, line, col):
        stripped = text.lstrip()
        out.append(parse_expr(stripped, variables, line=line, column=c + len(text) - len(stripped)))
    return out


def _growth_score(d: Distribution) -> tuple:
    return tuple(growth_at(derived_flag(d, kind), d.base_point).ranks for kind in ("small", "big"))


def _distribution(frame: list[VectorField], name: str) -> Distribution:
    """Distribution based at the origin, or at the first seeded point with the fullest growth.

    Derived flags are pruned at the base point, so a point where brackets
    degenerate (e.g. q = 0 for z' = (y'')^3) would lose generators.
    """
    chart = frame[0].chart
    best, best_score = None, None
    for pt in [chart.origin()] + random_rational_points(chart.dim, 20, seed=0):
        if frame_rank(frame, pt) != len(frame):
            continue
        d = Distribution(chart, tuple(frame), pt, name=name)
        score = _growth_score(d)
        if best is None or score > best_score:
            best, best_score = d, score
    if best is None:
        raise ValueError(f"frame of {name!r} is dependent at all sampled points")
    return best


def parse_model(text: str, name: str = "model") -> Model:
    model = Model(name)
    current: Chart | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        words = line.split()
        kw = words[0]
        if kw == "chart":
            if len(words) < 3:
                raise ParseError("chart needs a name and at least one variable", lineno, indent + 1)
            for w in words[1:]:
                if not re.fullmatch(_IDENT, w):
                    raise ParseError(f"invalid identifier {w!r}", lineno, line.index(w) + 1)
            if words[1] in model.charts:
                raise ParseError(f"chart {words[1]!r} declared twice", lineno, line.index(words[1]) + 1)
            if len(set(words[2:])) != len(words) - 2:
                raise ParseError("duplicate chart variable", lineno, indent + 1)
            current = Chart(words[1], tuple(words[2:]))
            model.charts[current.name] = current
        elif kw == "field":
            m = re.match(rf"\s*field\s+({_IDENT})\s*=(.*)$", line)
            if not m:
                raise ParseError("expected 'field <name> = [<expr>, ...]'", lineno, indent + 1)
            if current is None:
                raise ParseError("field declared before any chart", lineno, indent + 1)
            coeffs = _exprs(m.group(2), current.variables, lineno, m.start(2) + 1)
            if len(coeffs) != current.dim:
                raise ParseError(f"field {m.group(1)!r} has {len(coeffs)} components, chart "
                                 f"{current.name!r} has {current.dim} variables", lineno, m.start(2) + 1)
            model.fields[m.group(1)] = VectorField(current, coeffs)
        elif kw == "map":
            m = re.match(rf"\s*map\s+({_IDENT})\s*:\s*({_IDENT})\s*->\s*({_IDENT})\s*=(.*)$", line)
            if not m:
                raise ParseError("expected 'map <name> : <chart> -> <chart> = [...]'", lineno, indent + 1)
            for g in (2, 3):
                if m.group(g) not in model.charts:
                    raise ParseError(f"unknown chart {m.group(g)!r}", lineno, m.start(g) + 1)
            src, tgt = model.charts[m.group(2)], model.charts[m.group(3)]
            comps = _exprs(m.group(4), src.variables, lineno, m.start(4) + 1)
            if len(comps) != tgt.dim:
                raise ParseError(f"map {m.group(1)!r} needs {tgt.dim} components", lineno, m.start(4) + 1)
            model.maps[m.group(1)] = PolyMap(src, tgt, tuple(comps))
        elif kw == "distribution":
            m = re.match(rf"\s*distribution\s+({_IDENT})\s*=(.*)$", line)
            if not m:
                raise ParseError("expected 'distribution <name> = <field> <field> ...'", lineno, indent + 1)
            names = m.group(2).split()
            if not names:
                raise ParseError("distribution needs at least one field", lineno, m.start(2) + 1)
            frame = []
            for n in names:
                if n not in model.fields:
                    raise ParseError(f"unknown field {n!r}", lineno, line.index(n, m.start(2)) + 1)
                frame.append(model.fields[n])
            charts = {f.chart.name for f in frame}
            if len(charts) != 1:
                raise ParseError("distribution fields live on different charts", lineno, m.start(2) + 1)
            try:
                model.distributions[m.group(1)] = _distribution(frame, m.group(1))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, m.start(2) + 1) from None
        else:
            raise ParseError(f"unknown declaration {kw!r}", lineno, indent + 1)
    return model


def load_model(path: str | Path) -> Model:
    p = Path(path)
    return parse_model(p.read_text(), p.stem)
