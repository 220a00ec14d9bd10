"""Category file format: parse and emit SkeletalCategory data.

Files are human-auditable: numeric values are written with exact tokens
(``exp(ipi p/q)``, ``sqrt(n)``, ``1/sqrt(n)``, integers, rationals and '*'
products thereof) whenever the value lies on that lattice, with a decimal
``a+bi`` fallback.  Exact tokens round-trip bit-identically; computation in
memory is ordinary double-precision complex.

Sections::

    [category]   name = ..., group = cyclic <n>, orientation = R|Rinv,
                 partial = true|false
    [objects]    <label> <sector> <dual>
    [fusion]     a b -> c1 c2:2 ...        (":m" marks multiplicity m > 1)
    [action]     g : a->b a'->b' ...       (identity element omitted)
    [F]          a b c d e f = <token>
    [R]          a b c = <token>
    [U]          k a b c = <token>
    [eta]        x g h = <token>
    [twist]      a = <token>
    [S]          <label> : <token> ...     (rows over trivial-sector labels)
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .catdata import SkeletalCategory
from .errors import GxError
from .fusion import FusionRing, cyclic_group

__all__ = ["parse_category_file", "emit_category_file", "CatParseError", "value_to_token", "token_to_value"]


class CatParseError(GxError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


# -- numeric tokens ---------------------------------------------------------

def _phase_fraction(value: complex) -> Fraction | None:
    ang = math.atan2(value.imag, value.real) / math.pi
    frac = Fraction(ang).limit_denominator(48)
    if abs(ang - float(frac)) < 1e-12:
        return frac
    return None


def value_to_token(value: complex) -> str:
    value = complex(value)
    if abs(value) < 1e-14:
        return "0"
    mod2 = abs(value) ** 2
    mod2_frac = Fraction(mod2).limit_denominator(10**6)
    phase = _phase_fraction(value)
    if phase is None or abs(mod2 - float(mod2_frac)) > 1e-12:
        re, im = value.real, value.imag
        return f"{re!r}{im:+}i".replace("+-", "-")
    parts: list[str] = []
    if phase == 1:
        parts.append("-1")
    elif phase != 0:
        parts.append(f"exp(ipi {phase.numerator}/{phase.denominator})")
    num, den = mod2_frac.numerator, mod2_frac.denominator
    rnum = math.isqrt(num)
    rden = math.isqrt(den)
    if rnum * rnum == num and rden * rden == den:
        if rnum != rden:
            parts.append(f"{rnum}/{rden}" if rden > 1 else f"{rnum}")
    else:
        if num > 1 or (num == 1 and den == 1):
            parts.append(f"{rnum}" if rnum * rnum == num else f"sqrt({num})")
        if den > 1:
            parts.append(f"1/{rden}" if rden * rden == den else f"1/sqrt({den})")
    if not parts:
        parts.append("1")
    return "*".join(parts)


def _parse_factor(tok: str, line: int) -> complex:
    tok = tok.strip()
    if tok.startswith("exp(ipi") and tok.endswith(")"):
        body = tok[len("exp(ipi") : -1].strip()
        if "/" in body:
            p, q = body.split("/")
            frac = Fraction(int(p), int(q))
        else:
            frac = Fraction(int(body))
        return complex(np.exp(1j * np.pi * float(frac)))
    if tok.startswith("1/sqrt(") and tok.endswith(")"):
        return 1.0 / math.sqrt(int(tok[len("1/sqrt(") : -1]))
    if tok.startswith("sqrt(") and tok.endswith(")"):
        return complex(math.sqrt(int(tok[len("sqrt(") : -1])))
    if tok.endswith("i"):
        body = tok[:-1]
        for k in range(1, len(body)):
            if body[k] in "+-" and body[k - 1] not in "eE":
                return complex(float(body[:k]), float(body[k:] or "1"))
        return complex(0.0, float(body or "1"))
    if "/" in tok:
        p, q = tok.split("/")
        return complex(Fraction(int(p), int(q)))
    try:
        return complex(float(tok))
    except ValueError:
        raise CatParseError(line, f"bad numeric token {tok!r}")


def token_to_value(token: str, line: int = 0) -> complex:
    val = 1.0 + 0.0j
    for factor in token.split("*"):
        val *= _parse_factor(factor, line)
    return val


def split_tokens(text: str) -> list[str]:
    """Split on whitespace outside parentheses (exp tokens contain a space)."""
    out: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch.isspace() and depth == 0:
            if current:
                out.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        out.append("".join(current))
    return out


# -- emit ---------------------------------------------------------------------

def emit_category_file(cat: SkeletalCategory) -> str:
    ring = cat.ring
    out: list[str] = []
    out.append("[category]")
    out.append(f"name = {cat.name}")
    out.append(f"group = cyclic {ring.group.order}")
    out.append(f"orientation = {cat.positive_braid}")
    if cat.partial:
        out.append("partial = true")
    out.append("")
    out.append("[objects]")
    for a in ring.labels:
        out.append(f"{a} {ring.sector(a)} {ring.dual[a]}")
    out.append("")
    out.append("[fusion]")
    for a in ring.labels:
        for b in ring.labels:
            outs = ring.fusion_outcomes(a, b)
            if not outs:
                continue
            toks = [c if m == 1 else f"{c}:{m}" for c, m in outs]
            out.append(f"{a} {b} -> {' '.join(toks)}")
    out.append("")
    nontrivial_action = [
        g
        for g in ring.group.elements
        if g != ring.group.identity and any(ring.act(g, a) != a for a in ring.labels)
    ]
    if nontrivial_action or ring.group.order > 1:
        out.append("[action]")
        for g in ring.group.elements:
            if g == ring.group.identity:
                continue
            moved = [f"{a}->{ring.act(g, a)}" for a in ring.labels if ring.act(g, a) != a]
            out.append(f"{g} : {' '.join(moved)}" if moved else f"{g} :")
        out.append("")
    for section, table in (("F", cat.F), ("R", cat.R), ("U", cat.U), ("eta", cat.eta)):
        if not table:
            continue
        out.append(f"[{section}]")
        for key in sorted(table):
            out.append(f"{' '.join(key)} = {value_to_token(table[key])}")
        out.append("")
    if cat.twists:
        out.append("[twist]")
        for a in ring.labels:
            if a in cat.twists:
                out.append(f"{a} = {value_to_token(cat.twists[a])}")
        out.append("")
    if cat.smatrix is not None:
        out.append("[S]")
        trivial = ring.trivial_sector
        for i, a in enumerate(trivial):
            toks = [value_to_token(cat.smatrix[i, j]) for j in range(len(trivial))]
            out.append(f"{a} : {' '.join(toks)}")
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"


# -- parse --------------------------------------------------------------------

def parse_category_file(text: str, name: str | None = None) -> SkeletalCategory:
    section = None
    meta: dict[str, str] = {}
    objects: list[tuple[str, str, str]] = []
    fusion_lines: list[tuple[int, str]] = []
    action_lines: list[tuple[int, str]] = []
    tables: dict[str, dict] = {"F": {}, "R": {}, "U": {}, "eta": {}}
    twists: dict[str, complex] = {}
    s_rows: list[tuple[str, list[complex]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise CatParseError(lineno, "unterminated section header")
            section = line[1:-1]
            if section not in ("category", "objects", "fusion", "action", "F", "R", "U", "eta", "twist", "S"):
                raise CatParseError(lineno, f"unknown section {section!r}")
            continue
        if section == "category":
            if "=" not in line:
                raise CatParseError(lineno, "expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            meta[key] = val
        elif section == "objects":
            parts = line.split()
            if len(parts) != 3:
                raise CatParseError(lineno, "expected '<label> <sector> <dual>'")
            objects.append(tuple(parts))
        elif section == "fusion":
            fusion_lines.append((lineno, line))
        elif section == "action":
            action_lines.append((lineno, line))
        elif section in tables:
            if "=" not in line:
                raise CatParseError(lineno, "expected '<key...> = <token>'")
            key_str, tok = line.split("=", 1)
            key = tuple(key_str.split())
            want = {"F": 6, "R": 3, "U": 4, "eta": 3}[section]
            if len(key) != want:
                raise CatParseError(lineno, f"[{section}] key needs {want} labels")
            tables[section][key] = token_to_value(tok.strip(), lineno)
        elif section == "twist":
            if "=" not in line:
                raise CatParseError(lineno, "expected '<label> = <token>'")
            a, tok = (s.strip() for s in line.split("=", 1))
            twists[a] = token_to_value(tok, lineno)
        elif section == "S":
            if ":" not in line:
                raise CatParseError(lineno, "expected '<label> : <tokens>'")
            a, rest = line.split(":", 1)
            s_rows.append((a.strip(), [token_to_value(t, lineno) for t in split_tokens(rest)]))
        else:
            raise CatParseError(lineno, "content before any section header")

    if not objects:
        raise CatParseError(1, "missing [objects] section")
    grp_spec = meta.get("group", "cyclic 1").split()
    if grp_spec[0] != "cyclic":
        raise CatParseError(1, f"unsupported group spec {meta.get('group')!r}")
    group = cyclic_group(int(grp_spec[1]))
    labels = tuple(o[0] for o in objects)
    grading = {o[0]: o[1] for o in objects}
    dual = {o[0]: o[2] for o in objects}
    unit_candidates = [a for a in labels if a == dual[a] and grading[a] == group.identity]
    n_map: dict[tuple[str, str, str], int] = {}
    for lineno, line in fusion_lines:
        if "->" not in line:
            raise CatParseError(lineno, "expected 'a b -> channels'")
        lhs, rhs = line.split("->", 1)
        ab = lhs.split()
        if len(ab) != 2:
            raise CatParseError(lineno, "fusion line needs two inputs")
        a, b = ab
        for tok in rhs.split():
            if ":" in tok:
                c, mult = tok.split(":")
                n_map[(a, b, c)] = int(mult)
            else:
                n_map[(a, b, tok)] = 1
    unit = None
    for a in unit_candidates:
        if all(n_map.get((a, b, b), 0) == 1 for b in labels):
            unit = a
            break
    if unit is None:
        raise CatParseError(1, "could not identify the unit object from the fusion table")
    action = {g: {a: a for a in labels} for g in group.elements}
    for lineno, line in action_lines:
        if ":" not in line:
            raise CatParseError(lineno, "expected '<g> : a->b ...'")
        g, rest = line.split(":", 1)
        g = g.strip()
        if g not in group.elements:
            raise CatParseError(lineno, f"unknown group element {g!r}")
        for pair in rest.split():
            if "->" not in pair:
                raise CatParseError(lineno, f"bad mapping {pair!r}")
            src, dst = pair.split("->")
            action[g][src] = dst
    ring = FusionRing(
        labels=labels, N=n_map, unit=unit, dual=dual, group=group, grading=grading, action=action
    )
    smatrix = None
    if s_rows:
        trivial = ring.trivial_sector
        row_map = dict(s_rows)
        smatrix = np.array([row_map[a] for a in trivial], dtype=complex)
    return SkeletalCategory(
        name=meta.get("name", name or "unnamed"),
        ring=ring,
        F=tables["F"],
        R=tables["R"],
        U=tables["U"],
        eta=tables["eta"],
        twists=twists,
        smatrix=smatrix,
        positive_braid=meta.get("orientation", "R"),
        partial=meta.get("partial", "false").lower() == "true",
    )
