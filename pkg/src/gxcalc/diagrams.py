"""Text DSL, intermediate representation and evaluator for string diagrams.

Diagrams are read bottom to top.  The evaluator lowers a diagram to a
composition of elementary matrices over left-combed tree bases: crossings are
resolved through the exposed pair channel, loops through the S-ratio of the
enclosed channel, twists through the ribbon phase and bubbles through the
sqrt(d) vertex factors.  Open diagrams produce the matrix of Markov-trace
inner products <target tree | D | source tree>; closed diagrams produce a
scalar.

Grammar (line oriented, '#' starts a comment, strand indices are 1-based)::

    strands <n> : <label> [<label> ...]
    braid+ <i>           left strand crosses over (R convention)
    braid- <i>           inverse crossing
    cup <i> <label>      create a pair (label, dual) at position i
    cap <i> <label>      annihilate the pair at (i, i+1)
    loop <label> <i> <j> free loop encircling strands i..j
    twist <i>
    split <i> <a> <b> <c>    vertex c -> (a, b) on strand i
    fuse <i> <a> <b> <c>     vertex (a, b) -> c at strands (i, i+1)
    project <i> <a> <b> <c>  measurement projector onto channel c
    lasso+ <i> <j> <k>   strand i throws a loop around strands j..k
    lasso- <i> <j> <k>   same excursion with reversed orientation

``lasso`` is a protocol extension beyond the basic move set: it encodes an
anyon excursion that stays attached to the tree (the defect T-gate protocol
braids an anyon around the middle defects).  It is supported exactly when the
lassoing strand sits in the trivial sector right of an identical partner with
abelian pair channels, the encircled block has trivial-sector channels, and
all U/eta data is trivial; anything else raises UnsupportedConfiguration.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .catdata import SkeletalCategory
from .errors import (
    AdmissibilityError,
    DiagramSyntaxError,
    MissingSymbol,
    NonConfluent,
    SectorError,
    UnsupportedConfiguration,
)
from .numerics import DEFAULT_TOL, Tolerance
from .trees import TreeBasis, enumerate_basis, exposed_slot, recouple

__all__ = [
    "Op",
    "Diagram",
    "EvalResult",
    "parse_diagram",
    "typecheck",
    "evaluate",
    "measurement_projector",
    "reverse_diagram",
]


@dataclass(frozen=True)
class Op:
    kind: str
    pos: int
    labels: tuple[str, ...] = ()
    hi: int = 0
    line: int = 0


@dataclass(frozen=True)
class Diagram:
    strands: int
    labels: tuple[str, ...]
    ops: tuple[Op, ...]
    slices: tuple[tuple[str, ...], ...] | None = None  # filled in by typecheck

    @property
    def closed(self) -> bool:
        final = self.slices[-1] if self.slices else self.labels
        return self.strands == 0 and not final


_OP_ARITY = {
    "braid+": 1,
    "braid-": 2,
    "twist": 1,
    "cup": 2,
    "cap": 2,
    "loop": 3,
    "split": 4,
    "fuse": 4,
    "project": 4,
    "lasso+": 3,
    "lasso-": 3,
}


def parse_diagram(text: str) -> Diagram:
    """Parse DSL text to a Diagram.  Performs no category lookups."""
    labels: tuple[str, ...] | None = None
    strands = 0
    ops: list[Op] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if labels is None:
            if tokens[0] != "strands":
                raise DiagramSyntaxError(lineno, 1, "'strands <n> : <labels>' header")
            if len(tokens) < 3 or tokens[2] != ":":
                raise DiagramSyntaxError(lineno, len(tokens[0]) + 2, "'strands <n> :'")
            try:
                strands = int(tokens[1])
            except ValueError:
                raise DiagramSyntaxError(lineno, len(tokens[0]) + 2, "integer strand count")
            labels = tuple(tokens[3:])
            if len(labels) != strands:
                raise DiagramSyntaxError(
                    lineno, len(line), f"{strands} labels, got {len(labels)}"
                )
            continue
        kind = tokens[0]
        args = tokens[1:]
        if kind not in _OP_ARITY:
            raise DiagramSyntaxError(lineno, 1, f"an op keyword, got {kind!r}")

        def want_int(ix: int) -> int:
            try:
                return int(args[ix])
            except (ValueError, IndexError):
                raise DiagramSyntaxError(lineno, len(kind) + 2, f"integer argument {ix + 1}")

        if kind in ("braid+", "braid-", "twist"):
            if len(args) != 1:
                raise DiagramSyntaxError(lineno, len(line), f"{kind} <i>")
            ops.append(Op(kind=kind, pos=want_int(0), line=lineno))
        elif kind in ("cup", "cap"):
            if len(args) != 2:
                raise DiagramSyntaxError(lineno, len(line), f"{kind} <i> <label>")
            ops.append(Op(kind=kind, pos=want_int(0), labels=(args[1],), line=lineno))
        elif kind == "loop":
            if len(args) != 3:
                raise DiagramSyntaxError(lineno, len(line), "loop <label> <i> <j>")
            ops.append(
                Op(kind=kind, pos=want_int(1), hi=want_int(2), labels=(args[0],), line=lineno)
            )
        elif kind in ("split", "fuse", "project"):
            if len(args) != 4:
                raise DiagramSyntaxError(lineno, len(line), f"{kind} <i> <a> <b> <c>")
            ops.append(
                Op(kind=kind, pos=want_int(0), labels=(args[1], args[2], args[3]), line=lineno)
            )
        elif kind in ("lasso+", "lasso-"):
            if len(args) != 3:
                raise DiagramSyntaxError(lineno, len(line), f"{kind} <i> <j> <k>")
            ops.append(Op(kind=kind, pos=want_int(0), hi=want_int(2), labels=(str(want_int(1)),), line=lineno))
    if labels is None:
        raise DiagramSyntaxError(1, 1, "'strands' header before any op")
    return Diagram(strands=strands, labels=labels, ops=tuple(ops))


def _apply_labels(cat: SkeletalCategory, leaves: tuple[str, ...], op: Op) -> tuple[str, ...]:
    """Leaf labels above the op, validating label bookkeeping.

    Raises DiagramSyntaxError for malformed positions (caught at type-check
    stage per the op's source line), SectorError for label mismatches, and
    AdmissibilityError for vertices with N = 0.
    """
    n = len(leaves)
    i = op.pos

    def bad_pos(expected: str):
        raise DiagramSyntaxError(op.line, 1, expected)

    if op.kind in ("braid+", "braid-"):
        if not 1 <= i <= n - 1:
            bad_pos(f"braid position in 1..{n - 1}")
        x, y = leaves[i - 1], leaves[i]
        if op.kind == "braid+":
            k = cat.sector(x)
            return leaves[: i - 1] + (cat.act(k, y), x) + leaves[i + 1 :]
        k = cat.sector(y)
        kbar = cat.ring.group.inv(k)
        return leaves[: i - 1] + (y, cat.act(kbar, x)) + leaves[i + 1 :]
    if op.kind == "twist":
        if not 1 <= i <= n:
            bad_pos(f"strand position in 1..{n}")
        return leaves
    if op.kind == "cup":
        if not 1 <= i <= n + 1:
            bad_pos(f"cup position in 1..{n + 1}")
        a = op.labels[0]
        if a not in cat.labels:
            raise SectorError(f"line {op.line}: unknown label {a!r}")
        return leaves[: i - 1] + (a, cat.dual(a)) + leaves[i - 1 :]
    if op.kind == "cap":
        if not 1 <= i <= n - 1:
            bad_pos(f"cap position in 1..{n - 1}")
        a = op.labels[0]
        if leaves[i - 1] != a:
            raise SectorError(
                f"line {op.line}: cap declares {a!r} but strand {i} is {leaves[i - 1]!r}"
            )
        if leaves[i] != cat.dual(a):
            raise AdmissibilityError(
                f"line {op.line}: strands {i},{i + 1} = ({leaves[i - 1]},{leaves[i]}) "
                "cannot annihilate"
            )
        return leaves[: i - 1] + leaves[i + 1 :]
    if op.kind == "loop":
        lo, hi = i, op.hi
        if not 1 <= lo <= hi <= n:
            bad_pos(f"loop range in 1..{n}")
        if op.labels[0] not in cat.labels:
            raise SectorError(f"line {op.line}: unknown loop label {op.labels[0]!r}")
        return leaves
    if op.kind == "split":
        a, b, c = op.labels
        if not 1 <= i <= n:
            bad_pos(f"strand position in 1..{n}")
        if leaves[i - 1] != c:
            raise SectorError(
                f"line {op.line}: split declares stem {c!r} but strand {i} is {leaves[i - 1]!r}"
            )
        if cat.n(a, b, c) == 0:
            raise AdmissibilityError(f"line {op.line}: N[{a},{b};{c}] = 0")
        return leaves[: i - 1] + (a, b) + leaves[i:]
    if op.kind in ("fuse", "project"):
        a, b, c = op.labels
        if not 1 <= i <= n - 1:
            bad_pos(f"pair position in 1..{n - 1}")
        if (leaves[i - 1], leaves[i]) != (a, b):
            raise SectorError(
                f"line {op.line}: {op.kind} declares ({a},{b}) but strands are "
                f"({leaves[i - 1]},{leaves[i]})"
            )
        if cat.n(a, b, c) == 0:
            raise AdmissibilityError(f"line {op.line}: N[{a},{b};{c}] = 0")
        if op.kind == "fuse":
            return leaves[: i - 1] + (c,) + leaves[i + 1 :]
        return leaves
    if op.kind in ("lasso+", "lasso-"):
        lo, hi = int(op.labels[0]), op.hi
        if not (2 <= i <= n and i + 1 < lo <= hi <= n):
            bad_pos("lasso needs 2 <= i, i+1 < j <= k <= n")
        return leaves
    raise DiagramSyntaxError(op.line, 1, f"unknown op kind {op.kind!r}")


def typecheck(diagram: Diagram, cat: SkeletalCategory) -> Diagram:
    """Resolve the leaf labels of every slice and validate each op."""
    for lab in diagram.labels:
        if lab not in cat.labels:
            raise SectorError(f"unknown label {lab!r} in strand header")
    slices = [diagram.labels]
    leaves = diagram.labels
    for op in diagram.ops:
        leaves = _apply_labels(cat, leaves, op)
        slices.append(leaves)
    return replace(diagram, slices=tuple(slices))


@dataclass
class EvalResult:
    kind: str  # "scalar" | "matrix"
    value: complex | np.ndarray
    source_basis: TreeBasis
    target_basis: TreeBasis
    consumed: dict[str, int]

    @property
    def scalar(self) -> complex:
        if self.kind != "scalar":
            raise ValueError("diagram is open; use .value as a matrix")
        return complex(self.value)

    @property
    def matrix(self) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.value))


class _Evaluator:
    def __init__(self, cat: SkeletalCategory, root: str, tol: Tolerance):
        self.cat = cat
        self.root = root
        self.tol = tol
        self.consumed = {"F": 0, "R": 0, "U": 0, "eta": 0, "S_ratio": 0, "theta": 0}

    # -- helpers -----------------------------------------------------------
    def basis(self, leaves) -> TreeBasis:
        return enumerate_basis(self.cat, leaves, self.root)

    def _recouple(self, basis, p):
        m, keys = recouple(self.cat, basis, p)
        if p > 1:
            self.consumed["F"] += int(np.count_nonzero(m))
        return m, keys

    def _r_value(self, a, b, f, invert: bool) -> complex:
        self.consumed["R"] += 1
        val = self.cat.r_symbol(a, b, f)
        if val == 0.0:
            raise MissingSymbol(f"R[{a},{b};{f}] on an inadmissible channel")
        return 1.0 / val if invert else val

    def _require_trivial_symfactors(self, reason: str):
        if not self.cat.trivial_symmetry_factors:
            raise UnsupportedConfiguration(
                f"{reason} requires trivial U and eta data (category has nontrivial entries)"
            )
        self.consumed["U"] += 1
        self.consumed["eta"] += 1

    # -- op matrices --------------------------------------------------------
    def op_matrix(self, leaves, new_leaves, op: Op) -> np.ndarray:
        cat = self.cat
        b_src = self.basis(leaves)
        b_dst = self.basis(new_leaves)
        kind = op.kind
        if kind in ("braid+", "braid-"):
            i = op.pos
            m_src, keys_src = self._recouple(b_src, i)
            m_dst, keys_dst = self._recouple(b_dst, i)
            ix_dst = {k: u for u, k in enumerate(keys_dst)}
            x, y = leaves[i - 1], leaves[i]
            inv_conv = cat.positive_braid == "Rinv"
            d = np.zeros((len(keys_dst), len(keys_src)), dtype=complex)
            for u, (f, ctx) in enumerate(keys_src):
                if (f, ctx) not in ix_dst:
                    raise NonConfluent(f"braid at {i}: exposed state {f} lost")
                if kind == "braid+":
                    k = cat.sector(x)
                    val = self._r_value(cat.act(k, y), x, f, invert=inv_conv)
                else:
                    val = self._r_value(x, y, f, invert=not inv_conv)
                d[ix_dst[(f, ctx)], u] = val
            return m_dst.conj().T @ d @ m_src
        if kind == "twist":
            self.consumed["theta"] += 1
            return cat.theta(leaves[op.pos - 1]) * np.eye(b_src.dimension, dtype=complex)
        if kind == "loop":
            return self._loop_matrix(b_src, leaves, op)
        if kind == "cup":
            return self._cup_matrix(b_src, b_dst, leaves, op)
        if kind == "cap":
            return self._cap_matrix(b_src, b_dst, leaves, op)
        if kind == "split":
            return self._split_matrix(b_src, b_dst, leaves, op)
        if kind == "fuse":
            return self._fuse_matrix(b_src, b_dst, leaves, op)
        if kind == "project":
            i = op.pos
            ch = op.labels[2]
            m, keys = self._recouple(b_src, i)
            sel = np.array([1.0 if f == ch else 0.0 for f, _ in keys])
            return m.conj().T @ (sel[:, None] * m)
        if kind in ("lasso+", "lasso-"):
            return self._lasso_matrix(b_src, leaves, op)
        raise DiagramSyntaxError(op.line, 1, f"unknown op kind {kind!r}")

    def _loop_matrix(self, b_src, leaves, op: Op) -> np.ndarray:
        cat = self.cat
        lo, hi = op.pos, op.hi
        a = op.labels[0]
        ident = cat.ring.group.identity
        if cat.sector(a) != ident:
            raise UnsupportedConfiguration(
                f"loop label {a!r} carries flux; only trivial-sector loops are evaluable"
            )
        enclosed_defect = any(cat.sector(x) != ident for x in leaves[lo - 1 : hi])
        if enclosed_defect:
            self._require_trivial_symfactors("a loop encircling defect strands")
        if hi == lo:
            gamma = leaves[lo - 1]
            if cat.sector(gamma) != ident:
                raise UnsupportedConfiguration(
                    f"loop around a single {gamma!r} strand: its channel is not trivial-sector"
                )
            self.consumed["S_ratio"] += 1
            return cat.loop_ratio(a, gamma) * np.eye(b_src.dimension, dtype=complex)
        if hi != lo + 1:
            raise UnsupportedConfiguration("loops around blocks of more than two strands")
        m, keys = self._recouple(b_src, lo)
        diag = np.zeros(len(keys), dtype=complex)
        for u, (gamma, _ctx) in enumerate(keys):
            if cat.sector(gamma) != ident:
                raise UnsupportedConfiguration(
                    f"loop around strands {lo},{hi}: enclosed channel {gamma!r} carries flux"
                )
            self.consumed["S_ratio"] += 1
            diag[u] = cat.loop_ratio(a, gamma)
        return m.conj().T @ (diag[:, None] * m)

    def _cup_matrix(self, b_src, b_dst, leaves, op: Op) -> np.ndarray:
        cat = self.cat
        i = op.pos
        a = op.labels[0]
        coeff = np.sqrt(cat.d(a))
        m_dst, keys_dst = self._recouple(b_dst, i)
        ix_dst = {k: u for u, k in enumerate(keys_dst)}
        sel = np.zeros((len(keys_dst), b_src.dimension), dtype=complex)
        for t_ix, t in enumerate(b_src.trees):
            path = t.channel_path()
            if i == 1:
                ctx = (a,) + path
            else:
                ctx = path[: i - 1] + (path[i - 2],) + path[i - 1 :]
            key = (cat.unit, ctx)
            if key in ix_dst:
                sel[ix_dst[key], t_ix] = coeff
        return m_dst.conj().T @ sel

    def _cap_matrix(self, b_src, b_dst, leaves, op: Op) -> np.ndarray:
        cat = self.cat
        i = op.pos
        a = op.labels[0]
        coeff = np.sqrt(cat.d(a))
        m_src, keys_src = self._recouple(b_src, i)
        dst_ix = {t.channel_path(): ix for ix, t in enumerate(b_dst.trees)}
        sel = np.zeros((b_dst.dimension, len(keys_src)), dtype=complex)
        for u, (f, ctx) in enumerate(keys_src):
            if f != cat.unit:
                continue
            if i == 1:
                tgt = ctx[1:]
            else:
                tgt = ctx[: i - 1] + ctx[i:]
            if tgt in dst_ix:
                sel[dst_ix[tgt], u] = coeff
        return sel @ m_src

    def _split_matrix(self, b_src, b_dst, leaves, op: Op) -> np.ndarray:
        cat = self.cat
        i = op.pos
        a, b, c = op.labels
        coeff = (cat.d(a) * cat.d(b) / cat.d(c)) ** 0.25
        m_dst, keys_dst = self._recouple(b_dst, i)
        ix_dst = {k: u for u, k in enumerate(keys_dst)}
        sel = np.zeros((len(keys_dst), b_src.dimension), dtype=complex)
        for t_ix, t in enumerate(b_src.trees):
            path = t.channel_path()
            ctx = ((a,) + path[1:]) if i == 1 else path
            key = (c, ctx)
            if key in ix_dst:
                sel[ix_dst[key], t_ix] = coeff
        return m_dst.conj().T @ sel

    def _fuse_matrix(self, b_src, b_dst, leaves, op: Op) -> np.ndarray:
        cat = self.cat
        i = op.pos
        a, b, c = op.labels
        coeff = (cat.d(a) * cat.d(b) / cat.d(c)) ** 0.25
        m_src, keys_src = self._recouple(b_src, i)
        dst_ix = {t.channel_path(): ix for ix, t in enumerate(b_dst.trees)}
        sel = np.zeros((b_dst.dimension, len(keys_src)), dtype=complex)
        for u, (f, ctx) in enumerate(keys_src):
            if f != c:
                continue
            tgt = (ctx[1:] and ((c,) + ctx[1:])) if i == 1 else ctx
            if i == 1:
                tgt = (c,) + ctx[1:]
            if tgt in dst_ix:
                sel[dst_ix[tgt], u] = coeff
        return sel @ m_src

    def _lasso_matrix(self, b_src, leaves, op: Op) -> np.ndarray:
        cat = self.cat
        tol = self.tol
        i, lo, hi = op.pos, int(op.labels[0]), op.hi
        ident = cat.ring.group.identity
        x = leaves[i - 1]
        if leaves[i - 2] != x:
            raise UnsupportedConfiguration(
                "lasso strand must sit right of an identical partner strand"
            )
        if cat.sector(x) != ident:
            raise UnsupportedConfiguration("lasso strand must be trivial-sector")
        if hi != lo + 1:
            raise UnsupportedConfiguration("lasso supports two-strand blocks only")
        if any(cat.sector(l) != ident for l in leaves[i : hi]):
            self._require_trivial_symfactors("a lasso crossing defect strands")
        # expose the pair channel w = ch(i-1, i) and the block channel gamma
        keys, transform = self._expose_two(b_src, i - 1, lo)
        ix = {k: u for u, k in enumerate(keys)}
        block = np.zeros((len(keys), len(keys)), dtype=complex)
        lasso_cache: dict = {}
        for u, (w, gamma, ctx) in enumerate(keys):
            if cat.sector(gamma) != ident:
                raise UnsupportedConfiguration(
                    f"lasso block channel {gamma!r} carries flux"
                )
            if abs(cat.d(w) - 1.0) > tol.eq_tol:
                raise UnsupportedConfiguration(
                    f"lasso pair channel {w!r} is not abelian; excursion not reducible"
                )
            lmat, ws = self._lasso3(x, gamma, op.kind == "lasso+", lasso_cache)
            w_ix = ws.index(w)
            for wp_ix, wp in enumerate(ws):
                amp = lmat[wp_ix, w_ix]
                if abs(amp) < 1e-15:
                    continue
                tgt = self._shift_key(ctx, w, wp, gamma, i, lo)
                if tgt is None:
                    if abs(amp) > tol.eq_tol:
                        raise NonConfluent(
                            f"lasso amplitude {amp:.3g} onto an inadmissible shifted tree"
                        )
                    continue
                key2 = (wp, gamma, tgt)
                if key2 not in ix:
                    raise NonConfluent("lasso target state missing from exposed basis")
                block[ix[key2], u] += amp
        return transform.conj().T @ block @ transform

    def _lasso3(self, x: str, gamma: str, positive: bool, cache: dict):
        """Monodromy of one member of an x-pair around a gamma line.

        Computed on the three-leaf space [x, x, gamma] for each joint total u:
        conjugate the diagonal of double-crossing eigenvalues R^{gx}_d R^{xg}_d
        by [F^{x x gamma}_u].  Returns the pair-channel mixing matrix and the
        ordered list of pair channels (u is a function of the abelian pair
        channel, so one matrix covers all totals).
        """
        key = (x, gamma, positive)
        if key in cache:
            return cache[key]
        cat = self.cat
        ws = cat.channels(x, x)
        mat = np.zeros((len(ws), len(ws)), dtype=complex)
        # group pair channels by joint total u = w x gamma (abelian w: unique)
        totals: dict[str, list[int]] = {}
        for w_ix, w in enumerate(ws):
            (u_tot,) = cat.channels(w, gamma)
            totals.setdefault(u_tot, []).append(w_ix)
        for u_tot, members in totals.items():
            fmat, fs, es = cat.f_matrix(x, x, gamma, u_tot)
            diag = []
            for dlt in fs:
                self.consumed["R"] += 2
                m_val = cat.r_symbol(gamma, x, dlt) * cat.r_symbol(x, gamma, dlt)
                diag.append(m_val if positive else 1.0 / m_val)
            conj = np.linalg.inv(fmat) @ (np.array(diag)[:, None] * fmat)
            self.consumed["F"] += fmat.size
            for r_loc, w_r in enumerate(es):
                for c_loc, w_c in enumerate(es):
                    mat[ws.index(w_r), ws.index(w_c)] = conj[r_loc, c_loc]
        cache[key] = (mat, ws)
        return cache[key]

    def _shift_key(self, ctx, w, wp, gamma, i, lo):
        """Channel path context after the pair channel changes w -> wp.

        The abelian difference d = wp . dual(w) flows along the comb edges
        between the pair and the block; edges containing both (index >= lo-1
        in the packed context) are unchanged.
        """
        cat = self.cat
        if wp == w:
            return ctx
        (d_lab,) = cat.channels(wp, cat.dual(w))
        # ctx packs the channel path minus the two exposed slots (i-1 and lo-1)
        out = list(ctx)
        lo_slot = lo - 1
        pair_slot = exposed_slot(i - 1)
        for path_ix in range(i - 1, lo - 1):
            packed = path_ix
            if path_ix > pair_slot:
                packed -= 1
            else:
                continue
            cand = cat.channels(d_lab, out[packed])
            if len(cand) != 1:
                return None
            out[packed] = cand[0]
        return tuple(out)

    def _expose_two(self, b_src, p1: int, p2: int):
        """Simultaneous exposure of the pair channels at positions p1 and p2.

        Requires p2 >= p1 + 2 so the two F-moves act on disjoint slots.
        Returns keys (f1, f2, ctx) and the unitary transform from comb
        coordinates, with ctx the channel path minus both exposed slots.
        """
        if p2 < p1 + 2:
            raise UnsupportedConfiguration("overlapping exposures")
        m1, keys1 = self._recouple(b_src, p1)
        # second exposure acts on the exposed basis of the first: the slot of
        # p2 is untouched by the first move, so the F-coefficients are those of
        # the underlying comb trees.
        slot1 = exposed_slot(p1)
        slot2 = p2 - 1
        cat = self.cat
        leaves = b_src.leaves
        keys_out: list[tuple] = []
        ix_out: dict[tuple, int] = {}
        rows = []
        for u, (f1, ctx1) in enumerate(keys1):
            # reconstruct the path with slot1 filled by f1
            path = list(ctx1[:slot1]) + [f1] + list(ctx1[slot1:])
            a_prev = path[slot2 - 1]
            e = path[slot2]
            c_up = path[slot2 + 1] if slot2 + 1 < len(path) else None
            if c_up is None:
                raise UnsupportedConfiguration("block exposure at the last edge")
            xs, xs1 = leaves[p2 - 1], leaves[p2]
            col: dict[int, complex] = {}
            for f2 in cat.channels(xs, xs1):
                if cat.n(a_prev, f2, c_up) == 0:
                    continue
                coeff = cat.f_symbol(a_prev, xs, xs1, c_up, e, f2)
                if coeff == 0.0:
                    continue
                self.consumed["F"] += 1
                ctx = tuple(path[:slot2] + path[slot2 + 1 :])
                ctx_packed = ctx[:slot1] + ctx[slot1 + 1 :]
                key = (f1, f2, ctx_packed)
                if key not in ix_out:
                    ix_out[key] = len(keys_out)
                    keys_out.append(key)
                col[ix_out[key]] = coeff
            rows.append(col)
        m2 = np.zeros((len(keys_out), len(keys1)), dtype=complex)
        for u, col in enumerate(rows):
            for v, coeff in col.items():
                m2[v, u] = coeff
        return keys_out, m2 @ m1


def evaluate(
    cat: SkeletalCategory,
    diagram: Diagram,
    root: str | None = None,
    tol: Tolerance = DEFAULT_TOL,
    strategy: str = "in_order",
) -> EvalResult:
    """Lower the diagram to a matrix between source and target comb bases.

    ``strategy`` selects the op-processing order: "in_order" follows the
    source, "loops_first" commutes loop and twist ops ahead of ops with
    disjoint strand support.  Both must agree; the confluence property tests
    quantify that.
    """
    if diagram.slices is None:
        diagram = typecheck(diagram, cat)
    root = root if root is not None else cat.unit
    ops = list(diagram.ops)
    slices = list(diagram.slices)
    if strategy == "loops_first":
        ops, slices = _commute_loops_first(ops, slices)
    elif strategy != "in_order":
        raise ValueError(f"unknown strategy {strategy!r}")
    ev = _Evaluator(cat, root, tol)
    src_basis = ev.basis(diagram.labels)
    a = np.eye(src_basis.dimension, dtype=complex)
    for op, leaves, new_leaves in zip(ops, slices[:-1], slices[1:]):
        m = ev.op_matrix(leaves, new_leaves, op)
        a = m @ a
    tgt_basis = ev.basis(slices[-1])
    if diagram.strands == 0 and not slices[-1]:
        value = complex(a[0, 0]) if a.size else 0.0j
        return EvalResult("scalar", value, src_basis, tgt_basis, ev.consumed)
    return EvalResult("matrix", a, src_basis, tgt_basis, ev.consumed)


def _op_support(op: Op, n: int) -> set[int]:
    if op.kind in ("braid+", "braid-", "fuse", "project"):
        return {op.pos, op.pos + 1}
    if op.kind == "twist":
        return {op.pos}
    if op.kind == "loop":
        return set(range(op.pos, op.hi + 1))
    if op.kind in ("lasso+", "lasso-"):
        return set(range(op.pos - 1, op.hi + 1))
    return set(range(1, n + 1))  # cup/cap/split renumber strands: block reordering


def _commute_loops_first(ops: list[Op], slices: list[tuple]) -> tuple[list[Op], list[tuple]]:
    """Stable-sort loop/twist ops before disjoint neighbors.

    Only adjacent swaps with provably commuting supports are performed, so the
    reordered op list denotes the same diagram; slices are recomputed by the
    swap (labels are untouched by loop/twist, so slices only swap rows).
    """
    ops = list(ops)
    slices = list(slices)
    changed = True
    while changed:
        changed = False
        for k in range(len(ops) - 1):
            first, second = ops[k], ops[k + 1]
            if second.kind not in ("loop", "twist") or first.kind in ("loop", "twist"):
                continue
            n_before = len(slices[k])
            if _op_support(first, n_before) & _op_support(second, len(slices[k + 1])):
                continue
            if len(slices[k]) != len(slices[k + 1]):
                continue  # strand-count changing op: keep order
            ops[k], ops[k + 1] = second, first
            # loop/twist preserves labels, so the intermediate slice equals the
            # slice before `first`
            slices[k + 1] = slices[k]
            changed = True
    return ops, slices


def reverse_diagram(diagram: Diagram) -> Diagram:
    """The vertical mirror of a braid/twist diagram (crossings flipped).

    Evaluating the mirror of a unitary braid diagram gives the conjugate
    transpose of the original evaluation.  Only label-preserving ops are
    supported here.
    """
    flip = {"braid+": "braid-", "braid-": "braid+", "twist": "twist"}
    ops = []
    for op in reversed(diagram.ops):
        if op.kind not in flip:
            raise UnsupportedConfiguration("reverse_diagram supports braid/twist ops only")
        ops.append(replace(op, kind=flip[op.kind]))
    return Diagram(strands=diagram.strands, labels=diagram.labels, ops=tuple(ops))


def measurement_projector(
    cat: SkeletalCategory,
    a: str,
    b: str,
    channel: str,
    basis: TreeBasis,
    position: int = 1,
) -> np.ndarray:
    """Projector onto fusion channel ``channel`` for the pair at ``position``.

    The split-fuse measurement diagram scaled to be idempotent: in the exposed
    basis it is the diagonal (0,1)-selector of the channel, conjugated back to
    the comb basis.
    """
    if cat.n(a, b, channel) == 0:
        raise AdmissibilityError(f"N[{a},{b};{channel}] = 0")
    if (basis.leaves[position - 1], basis.leaves[position]) != (a, b):
        raise SectorError(
            f"basis strands {position},{position + 1} are "
            f"({basis.leaves[position - 1]},{basis.leaves[position]}), not ({a},{b})"
        )
    m, keys = recouple(cat, basis, position)
    sel = np.array([1.0 if f == channel else 0.0 for f, _ in keys])
    return m.conj().T @ (sel[:, None] * m)
