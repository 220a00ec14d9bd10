"""Projective braid-group representations over fusion-tree bases.

The generator sigma_i exchanges strands i and i+1.  With the positive
convention 'R' the left strand crosses over and a pair fused to channel c
picks up R^{xx}_c; with 'Rinv' the inverse value is used.  Away from the first
pair the generator is the recoupling-conjugated diagonal.  Braided objects
must be fixed points of their own flux action, otherwise the generator does
not even preserve the leaf sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catdata import SkeletalCategory
from .errors import NotFixedPoint
from .numerics import DEFAULT_TOL, Tolerance, phase_canonicalize
from .trees import TreeBasis, enumerate_basis, recouple

__all__ = [
    "BraidRep",
    "ClosureResult",
    "DensityVerdict",
    "build_rep",
    "check_braid_relations",
    "projective_distance",
    "projective_closure",
    "density_probe",
]


@dataclass(frozen=True)
class BraidRep:
    n: int
    basis: TreeBasis
    generators: tuple[np.ndarray, ...]
    convention: str = "R"

    @property
    def dimension(self) -> int:
        return self.basis.dimension


@dataclass(frozen=True)
class ClosureResult:
    order: int | str  # count or "exceeds_bound"
    elements: tuple[np.ndarray, ...]
    bound: int

    @property
    def closed(self) -> bool:
        return isinstance(self.order, int)


@dataclass(frozen=True)
class DensityVerdict:
    kind: str  # "closure_found" | "no_closure_within"
    order: int | None
    steps: int
    note: str


def build_rep(
    cat: SkeletalCategory, x: str, n: int, total: str, convention: str | None = None
) -> BraidRep:
    """Matrices of sigma_1 ... sigma_{n-1} on Hom(total, x^{x n}).

    sigma_1 is diagonal in the left-combed basis with the R^{xx}_c eigenvalues;
    sigma_i for i > 1 is recouple^{-1} diag(R) recouple at position i.
    """
    flux = cat.sector(x)
    if cat.act(flux, x) != x:
        raise NotFixedPoint(f"{x} is not fixed by its own flux {flux}")
    conv = convention or cat.positive_braid
    basis = enumerate_basis(cat, (x,) * n, total)
    gens = []
    for i in range(1, n):
        m, exposed = recouple(cat, basis, i)
        diag = np.array(
            [cat.r_symbol(x, x, f) for f, _tree in exposed], dtype=complex
        )
        if conv == "Rinv":
            diag = 1.0 / diag
        gens.append(m.conj().T @ (diag[:, None] * m))
    return BraidRep(n=n, basis=basis, generators=tuple(gens), convention=conv)


def projective_distance(a: np.ndarray, b: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> float:
    """min over unit phases of the entrywise max difference |a - e^{i phi} b|."""
    pivot = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[pivot]) < tol.dedup_tol:
        return float(np.max(np.abs(a - b)))
    phase = a[pivot] / b[pivot]
    if abs(phase) < tol.dedup_tol:
        return float(np.max(np.abs(a - b)))
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))


def check_braid_relations(rep: BraidRep, tol: Tolerance = DEFAULT_TOL) -> float:
    """Max projective residual over the braid and far-commutation relations."""
    gens = rep.generators
    worst = 0.0
    for i in range(len(gens) - 1):
        lhs = gens[i] @ gens[i + 1] @ gens[i]
        rhs = gens[i + 1] @ gens[i] @ gens[i + 1]
        worst = max(worst, projective_distance(lhs, rhs, tol))
    for i in range(len(gens)):
        for j in range(i + 2, len(gens)):
            lhs = gens[i] @ gens[j]
            rhs = gens[j] @ gens[i]
            worst = max(worst, projective_distance(lhs, rhs, tol))
    return worst


def _canon_key(m: np.ndarray, grid: float) -> tuple:
    flat = m.ravel()
    reim = np.concatenate([flat.real, flat.imag])
    return tuple(np.round(reim / grid).astype(np.int64).tolist())


def projective_closure(
    rep_or_gens, bound: int = 100_000, tol: Tolerance = DEFAULT_TOL
) -> ClosureResult:
    """Breadth-first closure of the phase-canonicalized generator products.

    Elements are deduplicated on a rounded-entry grid with an exact-distance
    confirmation on collision, so the dedup tolerance keeps its meaning while
    the search stays linear in the group order.  Returns "exceeds_bound" as a
    value when the closure fails to stabilize below ``bound``.
    """
    if isinstance(rep_or_gens, BraidRep):
        gens = rep_or_gens.generators
    else:
        gens = tuple(rep_or_gens)
    canon_gens = [phase_canonicalize(g, tol) for g in gens]
    dim = canon_gens[0].shape[0]
    grid = tol.dedup_tol
    elements: list[np.ndarray] = []
    index: dict[tuple, list[int]] = {}

    def add(m: np.ndarray) -> bool:
        key = _canon_key(m, grid)
        bucket = index.setdefault(key, [])
        for ix in bucket:
            if np.max(np.abs(elements[ix] - m)) <= tol.dedup_tol:
                return False
        bucket.append(len(elements))
        elements.append(m)
        return True

    frontier = [np.eye(dim, dtype=complex)]
    add(frontier[0])
    while frontier:
        new_frontier = []
        for m in frontier:
            for g in canon_gens:
                prod = phase_canonicalize(g @ m, tol)
                if len(elements) > bound:
                    return ClosureResult(order="exceeds_bound", elements=tuple(elements), bound=bound)
                if add(prod):
                    new_frontier.append(prod)
        frontier = new_frontier
    return ClosureResult(order=len(elements), elements=tuple(elements), bound=bound)


def density_probe(rep: BraidRep, steps: int = 10_000, tol: Tolerance = DEFAULT_TOL) -> DensityVerdict:
    """Wrap projective_closure as a density heuristic.

    A closure that stabilizes proves the projective image finite; failure to
    close within ``steps`` elements is NOT a proof of density, and the verdict
    says so explicitly.
    """
    res = projective_closure(rep, bound=steps, tol=tol)
    if res.closed:
        return DensityVerdict(
            kind="closure_found",
            order=res.order,
            steps=steps,
            note="projective image is finite",
        )
    return DensityVerdict(
        kind="no_closure_within",
        order=None,
        steps=steps,
        note="no closure within bound; this is not a proof of density",
    )
