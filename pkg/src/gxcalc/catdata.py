"""Skeletal category data: F, R, U, eta symbols, twists and S-matrices.

Conventions
-----------
F-symbols are stored sparsely under keys ``(a, b, c, d, e, f)`` where ``e`` is
the channel of ``a x b`` (left-combed tree) and ``f`` the channel of ``b x c``.
The stored value is the coefficient of the right tree in the expansion of the
left tree, i.e. the matrix entry usually written ``[F^{abc}_d]_{f,e}``.
Admissible entries with a unit leg default to 1 (triangle axioms); all other
admissible entries must be stored explicitly, and reading an absent one raises
:class:`~gxcalc.errors.MissingSymbol`.

R-symbols live under ``(a, b, c)`` meaning ``R^{ab}_c``: the eigenvalue of the
crossing in which the *left* input strand passes over, attached to a splitting
vertex ``c -> (a, b)`` after the move.  U and eta default to 1 when the table
carries no entry, which is the convention used by every catalog entry here.

All theories are multiplicity-free at the level of symbol-carrying channels;
fusion rings themselves may have higher multiplicities (they then carry no
F/R data, see the partial bilayer entry).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateBicharacter, MissingSymbol
from .fusion import FusionRing, GroupSpec, cyclic_group, quantum_dimensions, trivial_group
from .numerics import DEFAULT_TOL, Tolerance

__all__ = [
    "SkeletalCategory",
    "Bicharacter",
    "make_tambara_yamagami",
    "deligne_product",
    "verify_unitarity",
]


@dataclass(eq=False)
class SkeletalCategory:
    """A fusion ring together with its skeletal symbol tables.

    Instances are treated as immutable after construction; quantum dimensions
    are computed lazily and cached.  ``positive_braid`` records which crossing
    orientation the braid generators use ('R' or 'Rinv'); ``partial`` marks
    entries that deliberately carry only a subset of the symbol data.
    """

    name: str
    ring: FusionRing
    F: dict[tuple[str, str, str, str, str, str], complex] = field(default_factory=dict)
    R: dict[tuple[str, str, str], complex] = field(default_factory=dict)
    U: dict[tuple[str, str, str, str], complex] = field(default_factory=dict)
    eta: dict[tuple[str, str, str], complex] = field(default_factory=dict)
    twists: dict[str, complex] = field(default_factory=dict)
    smatrix: np.ndarray | None = None
    positive_braid: str = "R"
    partial: bool = False
    _dims: dict[str, float] | None = field(default=None, repr=False)
    _total_dim: float | None = field(default=None, repr=False)

    # -- ring shortcuts ---------------------------------------------------
    @property
    def labels(self) -> tuple[str, ...]:
        return self.ring.labels

    @property
    def unit(self) -> str:
        return self.ring.unit

    def n(self, a: str, b: str, c: str) -> int:
        return self.ring.n(a, b, c)

    def channels(self, a: str, b: str) -> list[str]:
        return self.ring.channels(a, b)

    def sector(self, a: str) -> str:
        return self.ring.sector(a)

    def act(self, g: str, a: str) -> str:
        return self.ring.act(g, a)

    def dual(self, a: str) -> str:
        return self.ring.dual[a]

    # -- derived numerics --------------------------------------------------
    def _ensure_dims(self):
        if self._dims is None:
            dims, total = quantum_dimensions(self.ring)
            self._dims = dims
            self._total_dim = total

    def d(self, a: str) -> float:
        self._ensure_dims()
        return self._dims[a]

    @property
    def total_dim(self) -> float:
        self._ensure_dims()
        return self._total_dim

    def theta(self, a: str) -> complex:
        return self.twists[a]

    # -- symbol access -----------------------------------------------------
    def f_admissible(self, a, b, c, d, e, f) -> bool:
        return (
            self.n(a, b, e) > 0
            and self.n(e, c, d) > 0
            and self.n(b, c, f) > 0
            and self.n(a, f, d) > 0
        )

    def f_symbol(self, a, b, c, d, e, f) -> complex:
        if not self.f_admissible(a, b, c, d, e, f):
            return 0.0
        key = (a, b, c, d, e, f)
        if key in self.F:
            return self.F[key]
        if self.unit in (a, b, c):
            return 1.0
        raise MissingSymbol(f"F[{a},{b},{c};{d}]_({e},{f})")

    def f_matrix(self, a, b, c, d) -> tuple[np.ndarray, list[str], list[str]]:
        """The block [F^{abc}_d] with rows indexed by f = ch(bc), cols by e = ch(ab)."""
        es = [e for e in self.channels(a, b) if self.n(e, c, d)]
        fs = [f for f in self.channels(b, c) if self.n(a, f, d)]
        mat = np.array(
            [[self.f_symbol(a, b, c, d, e, f) for e in es] for f in fs], dtype=complex
        )
        return mat, fs, es

    def r_symbol(self, a, b, c) -> complex:
        if self.n(a, b, c) == 0:
            return 0.0
        key = (a, b, c)
        if key in self.R:
            return self.R[key]
        if self.unit in (a, b):
            return 1.0
        raise MissingSymbol(f"R[{a},{b};{c}]")

    def u_symbol(self, k, a, b, c) -> complex:
        return self.U.get((k, a, b, c), 1.0)

    def eta_symbol(self, x, g, h) -> complex:
        return self.eta.get((x, g, h), 1.0)

    @property
    def trivial_symmetry_factors(self) -> bool:
        """True when all stored U and eta entries are 1 (or the tables are empty)."""
        vals = list(self.U.values()) + list(self.eta.values())
        return all(abs(v - 1.0) < 1e-12 for v in vals)

    def loop_ratio(self, a: str, b: str) -> complex:
        """The loop-removal factor S_{ab}/S_{1b} computed from N, d and twists.

        For b the vacuum this is d_a.  Works for non-modular trivial sectors
        too, where a stored S-matrix would be unavailable or degenerate.
        """
        if self.sector(a) != self.ring.group.identity or self.sector(b) != self.ring.group.identity:
            raise MissingSymbol(f"loop factor S[{a},{b}]/S[1,{b}] needs trivial-sector labels")
        acc = 0.0 + 0.0j
        for c in self.channels(a, b):
            acc += self.n(a, b, c) * self.d(c) * self.theta(c)
        return acc / (self.theta(a) * self.theta(b) * self.d(b))

    def with_r_overrides(self, overrides: dict[tuple[str, str, str], complex]) -> "SkeletalCategory":
        new_r = dict(self.R)
        new_r.update(overrides)
        return replace(self, R=new_r, _dims=self._dims, _total_dim=self._total_dim)


@dataclass(frozen=True)
class Bicharacter:
    """A symmetric bicharacter on a finite abelian group plus a square root of 1/|A|."""

    group: GroupSpec
    values: dict[tuple[str, str], complex]
    tau: complex

    def chi(self, a: str, b: str) -> complex:
        return self.values[(a, b)]

    def check(self, tol: Tolerance = DEFAULT_TOL) -> list[str]:
        out = []
        grp = self.group
        for a, b in itertools.product(grp.elements, repeat=2):
            if (a, b) not in self.values:
                return [f"missing value at ({a},{b})"]
            if abs(self.chi(a, b) - self.chi(b, a)) > tol.eq_tol:
                out.append(f"not symmetric at ({a},{b})")
        for a, b, c in itertools.product(grp.elements, repeat=3):
            lhs = self.chi(grp.mul(a, b), c)
            if abs(lhs - self.chi(a, c) * self.chi(b, c)) > tol.eq_tol:
                out.append(f"bicharacter law fails at ({a},{b},{c})")
        rows = {}
        for a in grp.elements:
            rows[a] = tuple(np.round(self.chi(a, b), 9) for b in grp.elements)
        if len(set(rows.values())) != grp.order:
            out.append("degenerate: two group elements have identical character rows")
        if abs(self.tau**2 - 1.0 / grp.order) > tol.eq_tol:
            out.append("tau^2 != 1/|A|")
        return out


def make_tambara_yamagami(
    chi: Bicharacter,
    labels: dict[str, str] | None = None,
    defect_label: str = "m",
    name: str = "ty",
) -> SkeletalCategory:
    """Tambara-Yamagami category of a nondegenerate symmetric bicharacter.

    Objects are the elements of A plus one defect ``m`` with ``m x m`` the sum
    of all of A.  Nontrivial F-data: ``[F^{amb}_m] = [F^{mam}_b] = chi(a, b)``
    and ``[F^{mmm}_m]_{a,b} = tau * conj(chi(a, b))``; every other admissible
    entry is 1.  Z2-graded with A in the trivial sector; the group action is
    inversion on A.  R-symbols are not part of the construction and are left
    empty here (catalog entries add them).
    """
    problems = chi.check()
    if any("degenerate" in p for p in problems):
        raise DegenerateBicharacter("; ".join(problems))
    if problems:
        raise ValueError("; ".join(problems))
    grp = chi.group
    if labels is None:
        labels = {g: g for g in grp.elements}
    a_labels = [labels[g] for g in grp.elements]
    by_label = {labels[g]: g for g in grp.elements}
    m = defect_label
    all_labels = tuple(a_labels) + (m,)
    unit = labels[grp.identity]

    N: dict[tuple[str, str, str], int] = {}
    for g, h in itertools.product(grp.elements, repeat=2):
        N[(labels[g], labels[h], labels[grp.mul(g, h)])] = 1
    for g in grp.elements:
        N[(labels[g], m, m)] = 1
        N[(m, labels[g], m)] = 1
        N[(m, m, labels[g])] = 1

    dual = {labels[g]: labels[grp.inv(g)] for g in grp.elements}
    dual[m] = m
    z2 = cyclic_group(2)
    grading = {lab: "0" for lab in a_labels}
    grading[m] = "1"
    conj = {labels[g]: labels[grp.inv(g)] for g in grp.elements}
    conj[m] = m
    action = {"0": {lab: lab for lab in all_labels}, "1": conj}
    ring = FusionRing(
        labels=all_labels, N=N, unit=unit, dual=dual, group=z2, grading=grading, action=action
    )

    F: dict[tuple, complex] = {}
    for g, h in itertools.product(grp.elements, repeat=2):
        a, b = labels[g], labels[h]
        ab = labels[grp.mul(g, h)]
        F[(a, m, b, m, m, m)] = chi.chi(g, h)  # [F^{a m b}_m]
        F[(m, a, m, b, m, m)] = chi.chi(g, h)  # [F^{m a m}_b]
        F[(m, m, m, m, a, b)] = chi.tau * np.conj(chi.chi(g, h))
        if unit not in (a, b):
            F[(a, b, m, m, ab, m)] = 1.0
            F[(m, a, b, m, m, ab)] = 1.0
        if a != unit:
            # (a, m, m) with total a.h and (m, m, a) with total h.a
            F[(a, m, m, ab, m, b)] = 1.0
            F[(m, m, a, labels[grp.mul(h, g)], b, m)] = 1.0
    for g, h, k in itertools.product(grp.elements, repeat=3):
        a, b, c = labels[g], labels[h], labels[k]
        if unit in (a, b, c):
            continue
        total = labels[grp.mul(grp.mul(g, h), k)]
        F[(a, b, c, total, labels[grp.mul(g, h)], labels[grp.mul(h, k)])] = 1.0

    twists = {lab: 1.0 + 0.0j for lab in all_labels}
    return SkeletalCategory(name=name, ring=ring, F=F, twists=twists)


def deligne_product(
    c1: SkeletalCategory,
    c2: SkeletalCategory,
    namer=None,
    name: str | None = None,
) -> SkeletalCategory:
    """Deligne (stacking) product of two trivially graded categories.

    Labels become pairs, every symbol multiplies componentwise, and the
    S-matrix is the Kronecker product.  The result is trivially graded; callers
    model bilayer exchange symmetry by attaching a group action afterwards.
    """
    for c in (c1, c2):
        ident = c.ring.group.identity
        if any(c.sector(a) != ident for a in c.labels):
            raise ValueError("deligne_product expects trivially graded inputs")
    if namer is None:
        namer = lambda a, b: f"{a}|{b}"
    pairs = [(a, b) for a in c1.labels for b in c2.labels]
    lab = {p: namer(*p) for p in pairs}
    labels = tuple(lab[p] for p in pairs)
    unit = lab[(c1.unit, c2.unit)]

    N = {}
    for (a1, a2), (b1, b2) in itertools.product(pairs, repeat=2):
        for ch1 in c1.channels(a1, b1):
            for ch2 in c2.channels(a2, b2):
                mult = c1.n(a1, b1, ch1) * c2.n(a2, b2, ch2)
                N[(lab[(a1, a2)], lab[(b1, b2)], lab[(ch1, ch2)])] = mult
    dual = {lab[(a, b)]: lab[(c1.dual(a), c2.dual(b))] for (a, b) in pairs}
    ring = FusionRing(labels=labels, N=N, unit=unit, dual=dual, group=trivial_group())

    # Componentwise F.  Entries where only one factor has a unit leg must be
    # stored explicitly, so enumerate all admissible product channels.
    F = {}
    for p_a, p_b, p_c in itertools.product(pairs, repeat=3):
        a = lab[p_a]
        b = lab[p_b]
        cc = lab[p_c]
        if unit in (a, b, cc):
            continue
        for e1 in c1.channels(p_a[0], p_b[0]):
            for e2 in c2.channels(p_a[1], p_b[1]):
                for f1 in c1.channels(p_b[0], p_c[0]):
                    for f2 in c2.channels(p_b[1], p_c[1]):
                        for d1 in c1.channels(e1, p_c[0]):
                            if c1.n(p_a[0], f1, d1) == 0:
                                continue
                            for d2 in c2.channels(e2, p_c[1]):
                                if c2.n(p_a[1], f2, d2) == 0:
                                    continue
                                key = (a, b, cc, lab[(d1, d2)], lab[(e1, e2)], lab[(f1, f2)])
                                F[key] = c1.f_symbol(p_a[0], p_b[0], p_c[0], d1, e1, f1) * c2.f_symbol(
                                    p_a[1], p_b[1], p_c[1], d2, e2, f2
                                )
    R = {}
    for p_a, p_b in itertools.product(pairs, repeat=2):
        a, b = lab[p_a], lab[p_b]
        if unit in (a, b):
            continue
        for ch1 in c1.channels(p_a[0], p_b[0]):
            for ch2 in c2.channels(p_a[1], p_b[1]):
                R[(a, b, lab[(ch1, ch2)])] = c1.r_symbol(p_a[0], p_b[0], ch1) * c2.r_symbol(
                    p_a[1], p_b[1], ch2
                )
    twists = {lab[(a, b)]: c1.theta(a) * c2.theta(b) for (a, b) in pairs}
    smatrix = None
    if c1.smatrix is not None and c2.smatrix is not None:
        smatrix = np.kron(c1.smatrix, c2.smatrix)
    return SkeletalCategory(
        name=name or f"{c1.name}(x){c2.name}",
        ring=ring,
        F=F,
        R=R,
        twists=twists,
        smatrix=smatrix,
    )


def verify_unitarity(cat: SkeletalCategory, tol: Tolerance = DEFAULT_TOL) -> list[str]:
    """List every F-block or R-entry failing unitarity; empty for sound data.

    Also flags twists and U/eta entries off the unit circle and, when an
    S-matrix is stored, checks that it is symmetric and unitary.
    """
    out = []
    seen_blocks = set()
    for (a, b, c, d, _e, _f) in cat.F:
        key = (a, b, c, d)
        if key in seen_blocks:
            continue
        seen_blocks.add(key)
        mat, fs, es = cat.f_matrix(a, b, c, d)
        if len(fs) != len(es):
            out.append(f"F block {key} is not square ({len(fs)}x{len(es)})")
            continue
        dev = np.max(np.abs(mat @ mat.conj().T - np.eye(len(fs))))
        if dev > tol.eq_tol:
            out.append(f"F block {key} not unitary (deviation {dev:.3g})")
    for key, val in cat.R.items():
        if abs(abs(val) - 1.0) > tol.eq_tol:
            out.append(f"R entry {key} has modulus {abs(val):.6g}")
    for a, th in cat.twists.items():
        if abs(abs(th) - 1.0) > tol.eq_tol:
            out.append(f"twist of {a} has modulus {abs(th):.6g}")
    for key, val in list(cat.U.items()) + list(cat.eta.items()):
        if abs(abs(val) - 1.0) > tol.eq_tol:
            out.append(f"symmetry factor {key} has modulus {abs(val):.6g}")
    if cat.smatrix is not None:
        s = cat.smatrix
        if np.max(np.abs(s - s.T)) > tol.eq_tol:
            out.append("S-matrix is not symmetric")
        dev = np.max(np.abs(s @ s.conj().T - np.eye(s.shape[0])))
        if dev > tol.eq_tol:
            out.append(f"normalized S-matrix not unitary (deviation {dev:.3g})")
    return out
