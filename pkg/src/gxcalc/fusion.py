"""Fusion rings with group grading and group action.

A :class:`FusionRing` is the integer skeleton of a (possibly G-crossed) fusion
category: labels, fusion multiplicities ``N^{ab}_c``, duals, a grading of each
label by a finite group element, and the group action as a permutation of
labels.  All consistency checks at this level are exact integer arithmetic;
quantum dimensions are the only floating-point quantity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergent, NotClosed
from .numerics import DEFAULT_TOL, Tolerance

__all__ = [
    "GroupSpec",
    "FusionRing",
    "trivial_group",
    "cyclic_group",
    "validate_ring",
    "quantum_dimensions",
    "abelian_subgroup",
    "defect_counts",
]

MAX_GROUP_ORDER = 16


@dataclass(frozen=True)
class GroupSpec:
    """A finite group given extensionally by its multiplication table.

    The identity is named "0" by convention.  Only groups up to order 16 are
    supported, which keeps all validation exhaustive.
    """

    elements: tuple[str, ...]
    table: dict[tuple[str, str], str]
    identity: str = "0"

    def __post_init__(self):
        for problem in self.check():
            raise ValueError(problem)

    def check(self) -> list[str]:
        out = []
        elems = self.elements
        if len(elems) != len(set(elems)):
            out.append("duplicate group elements")
        if len(elems) > MAX_GROUP_ORDER:
            out.append(f"group order {len(elems)} exceeds supported maximum {MAX_GROUP_ORDER}")
        if self.identity not in elems:
            out.append("identity missing from element list")
            return out
        for g, h in itertools.product(elems, repeat=2):
            if self.table.get((g, h)) not in elems:
                out.append(f"table incomplete at ({g},{h})")
                return out
        for g in elems:
            if self.mul(self.identity, g) != g or self.mul(g, self.identity) != g:
                out.append(f"identity law fails at {g}")
        for g, h, k in itertools.product(elems, repeat=3):
            if self.mul(self.mul(g, h), k) != self.mul(g, self.mul(h, k)):
                out.append(f"associativity fails at ({g},{h},{k})")
                return out
        for g in elems:
            if not any(self.mul(g, h) == self.identity for h in elems):
                out.append(f"no inverse for {g}")
        return out

    def mul(self, g: str, h: str) -> str:
        return self.table[(g, h)]

    def inv(self, g: str) -> str:
        for h in self.elements:
            if self.mul(g, h) == self.identity:
                return h
        raise KeyError(g)

    @property
    def order(self) -> int:
        return len(self.elements)


def trivial_group() -> GroupSpec:
    return GroupSpec(elements=("0",), table={("0", "0"): "0"})


def cyclic_group(n: int) -> GroupSpec:
    names = tuple(str(i) for i in range(n))
    table = {(str(i), str(j)): str((i + j) % n) for i in range(n) for j in range(n)}
    return GroupSpec(elements=names, table=table)


@dataclass(frozen=True)
class FusionRing:
    """Labels, multiplicities, duals, grading and group action.

    ``N`` is sparse: absent keys mean multiplicity zero.  ``grading`` maps each
    label to a group element of ``group``; ``action`` maps each group element
    to a permutation of labels (stored as a dict).
    """

    labels: tuple[str, ...]
    N: dict[tuple[str, str, str], int]
    unit: str
    dual: dict[str, str]
    group: GroupSpec = field(default_factory=trivial_group)
    grading: dict[str, str] = field(default_factory=dict)
    action: dict[str, dict[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.grading:
            object.__setattr__(self, "grading", {a: self.group.identity for a in self.labels})
        if not self.action:
            ident = {a: a for a in self.labels}
            object.__setattr__(self, "action", {g: dict(ident) for g in self.group.elements})

    def n(self, a: str, b: str, c: str) -> int:
        return self.N.get((a, b, c), 0)

    def fusion_outcomes(self, a: str, b: str) -> list[tuple[str, int]]:
        return [(c, self.n(a, b, c)) for c in self.labels if self.n(a, b, c)]

    def channels(self, a: str, b: str) -> list[str]:
        return [c for c in self.labels if self.n(a, b, c)]

    def fusion_matrix(self, a: str) -> np.ndarray:
        """(N_a)_{bc} = N^{ab}_c as an integer matrix in label order."""
        idx = {lab: i for i, lab in enumerate(self.labels)}
        mat = np.zeros((len(self.labels), len(self.labels)), dtype=np.int64)
        for (x, b, c), mult in self.N.items():
            if x == a:
                mat[idx[b], idx[c]] = mult
        return mat

    def sector(self, a: str) -> str:
        return self.grading[a]

    def act(self, g: str, a: str) -> str:
        return self.action[g][a]

    def sector_labels(self, g: str) -> tuple[str, ...]:
        return tuple(a for a in self.labels if self.grading[a] == g)

    @property
    def trivial_sector(self) -> tuple[str, ...]:
        return self.sector_labels(self.group.identity)


def validate_ring(ring: FusionRing) -> list[str]:
    """Return the list of violated invariants (empty iff the ring is valid).

    Checks unit laws, existence of duals, associativity of fusion, that the
    grading respects fusion, and that the action is a grading-compatible
    permutation fixing the unit and commuting with duals.  Everything here is
    exact integer/group arithmetic.
    """
    out: list[str] = []
    labels = ring.labels
    if not labels:
        return ["empty label set"]
    lset = set(labels)
    if ring.unit not in lset:
        return [f"unit {ring.unit!r} not a label"]
    for (a, b, c), mult in ring.N.items():
        if mult < 0:
            out.append(f"negative multiplicity N[{a},{b},{c}]")
        if not {a, b, c} <= lset:
            out.append(f"N entry ({a},{b},{c}) uses unknown label")
    for a, b in itertools.product(labels, repeat=2):
        want = 1 if a == b else 0
        if ring.n(ring.unit, a, b) != want or ring.n(a, ring.unit, b) != want:
            out.append(f"unit law fails at ({a},{b})")
    for a in labels:
        astar = ring.dual.get(a)
        if astar not in lset:
            out.append(f"missing dual for {a}")
            continue
        if ring.n(a, astar, ring.unit) < 1:
            out.append(f"N^[{a},{astar}]_1 = 0, dual pairing fails")
        if ring.dual.get(astar) != a:
            out.append(f"dual is not an involution at {a}")
    for a, b, c, d in itertools.product(labels, repeat=4):
        lhs = sum(ring.n(a, b, e) * ring.n(e, c, d) for e in labels)
        rhs = sum(ring.n(b, c, f) * ring.n(a, f, d) for f in labels)
        if lhs != rhs:
            out.append(f"associativity fails at ({a},{b},{c},{d}): {lhs} != {rhs}")
            return out
    grp = ring.group
    for (a, b, c), mult in ring.N.items():
        if mult and grp.mul(ring.sector(a), ring.sector(b)) != ring.sector(c):
            out.append(f"grading violates fusion at ({a},{b},{c})")
    if ring.sector(ring.unit) != grp.identity:
        out.append("unit label is not in the trivial sector")
    for g in grp.elements:
        perm = ring.action[g]
        if sorted(perm.values()) != sorted(labels):
            out.append(f"action of {g} is not a permutation")
            continue
        if perm[ring.unit] != ring.unit:
            out.append(f"action of {g} moves the unit")
        for a in labels:
            want = grp.mul(grp.mul(g, ring.sector(a)), grp.inv(g))
            if ring.sector(perm[a]) != want:
                out.append(f"action-grading compatibility fails at ({g},{a})")
            if perm[ring.dual[a]] != ring.dual[perm[a]]:
                out.append(f"action of {g} does not commute with dual at {a}")
    ident_perm = ring.action[grp.identity]
    if any(ident_perm[a] != a for a in labels):
        out.append("identity group element acts nontrivially")
    for g, h in itertools.product(grp.elements, repeat=2):
        gh = grp.mul(g, h)
        for a in labels:
            if ring.action[g][ring.action[h][a]] != ring.action[gh][a]:
                out.append(f"action is not a homomorphism at ({g},{h},{a})")
                break
    return out


def quantum_dimensions(
    ring: FusionRing, tol: Tolerance = DEFAULT_TOL, pf_tol: float = 1e-13, max_iter: int = 100_000
) -> tuple[dict[str, float], float]:
    """Perron-Frobenius quantum dimensions and the total dimension D.

    d_a is the leading eigenvalue of the fusion matrix (N_a)_{bc} = N^{ab}_c,
    obtained by power iteration; D = sqrt(sum_a d_a^2).  The identity
    d_a d_b = sum_c N^{ab}_c d_c is not assumed, it is what the property tests
    verify downstream.
    """
    dims: dict[str, float] = {}
    for a in ring.labels:
        mat = ring.fusion_matrix(a).astype(float)
        if a == ring.unit:
            dims[a] = 1.0
            continue
        v = np.ones(mat.shape[0])
        lam_prev = 0.0
        for _ in range(max_iter):
            w = mat @ v + v  # shift by identity keeps the iteration aperiodic
            nrm = np.linalg.norm(w)
            if nrm == 0:
                raise NonConvergent(f"fusion matrix of {a} is nilpotent")
            v = w / nrm
            lam = float(v @ (mat @ v))
            if abs(lam - lam_prev) < pf_tol:
                break
            lam_prev = lam
        else:
            raise NonConvergent(f"power iteration for {a} did not settle in {max_iter} steps")
        dims[a] = lam
    total = float(np.sqrt(sum(d * d for d in dims.values())))
    return dims, total


def abelian_subgroup(
    ring: FusionRing, tol: Tolerance = DEFAULT_TOL, dims: dict[str, float] | None = None
) -> GroupSpec:
    """The group of dimension-one labels under fusion.

    Raises :class:`NotClosed` if two dimension-one labels fuse into more than
    one channel, which signals corrupted data rather than genuine physics.
    """
    if dims is None:
        dims, _ = quantum_dimensions(ring, tol)
    invertible = [a for a in ring.labels if abs(dims[a] - 1.0) < tol.eq_tol]
    table: dict[tuple[str, str], str] = {}
    for a, b in itertools.product(invertible, repeat=2):
        outcomes = ring.channels(a, b)
        if len(outcomes) != 1 or outcomes[0] not in invertible:
            raise NotClosed(f"{a} x {b} -> {outcomes}")
        table[(a, b)] = outcomes[0]
    return GroupSpec(elements=tuple(invertible), table=table, identity=ring.unit)


def defect_counts(ring: FusionRing) -> dict[str, int]:
    """Number of fixed points of each nontrivial group element on the trivial sector.

    This equals the number of defect types in each nontrivial sector of a
    G-crossed extension.
    """
    trivial = ring.trivial_sector
    return {
        g: sum(1 for a in trivial if ring.act(g, a) == a)
        for g in ring.group.elements
        if g != ring.group.identity
    }
