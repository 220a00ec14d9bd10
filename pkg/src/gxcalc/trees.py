"""Fusion-tree bases of Hom spaces and recoupling between tree shapes.

Only left-combed ("staircase") trees are first-class: the tree for leaves
``(x1, ..., xn)`` with root ``r`` carries internal edges ``c1 = ch(x1 x2)``,
``c2 = ch(c1 x3)``, ..., with the last channel equal to ``r``.  Other shapes
appear transiently inside :func:`recouple`.  Basis vectors are normalized with
respect to the Markov-trace inner product; the sqrt(d) factors of raw vertices
belong to the diagram evaluator, not to basis bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catdata import SkeletalCategory

__all__ = ["FusionTree", "TreeBasis", "enumerate_basis", "recouple"]


@dataclass(frozen=True)
class FusionTree:
    """An admissibly labeled left-combed tree: one basis vector of Hom(root, leaves)."""

    leaves: tuple[str, ...]
    internals: tuple[str, ...]
    root: str

    def channel_path(self) -> tuple[str, ...]:
        """The comb channels (ch(x1), ch(x1 x2), ..., root); empty for no leaves."""
        if not self.leaves:
            return ()
        if len(self.leaves) == 1:
            return (self.root,)
        return (self.leaves[0], *self.internals, self.root)


@dataclass(frozen=True)
class TreeBasis:
    leaves: tuple[str, ...]
    root: str
    trees: tuple[FusionTree, ...]

    @property
    def dimension(self) -> int:
        return len(self.trees)

    def index(self, tree: FusionTree) -> int:
        return self.trees.index(tree)


def enumerate_basis(cat: SkeletalCategory, leaves, root: str) -> TreeBasis:
    """All admissible left-combed labelings, ordered lexicographically.

    The order on internal labels is the category's label order, which makes
    basis enumeration deterministic across runs; grading admissibility is
    implied by fusion admissibility for a valid ring.
    """
    leaves = tuple(leaves)
    order = {lab: i for i, lab in enumerate(cat.labels)}
    trees: list[FusionTree] = []
    if len(leaves) == 0:
        if root == cat.unit:
            trees.append(FusionTree(leaves=(), internals=(), root=root))
    elif len(leaves) == 1:
        if leaves[0] == root:
            trees.append(FusionTree(leaves=leaves, internals=(), root=root))
    else:

        def extend(current: str, position: int, acc: tuple[str, ...]):
            if position == len(leaves):
                if current == root:
                    trees.append(FusionTree(leaves=leaves, internals=acc[:-1], root=root))
                return
            for ch in sorted(cat.channels(current, leaves[position]), key=order.__getitem__):
                extend(ch, position + 1, acc + (ch,))

        extend(leaves[0], 1, ())
    return TreeBasis(leaves=leaves, root=root, trees=tuple(trees))


def exposed_slot(position: int) -> int:
    """Index in the channel path that the exposed channel occupies."""
    return max(position - 1, 1)


def recouple(cat: SkeletalCategory, basis: TreeBasis, position: int) -> tuple[np.ndarray, list]:
    """Change of basis exposing the channel of leaves (position, position+1).

    Returns the unitary M and the list of exposed-state keys; comb state ``t``
    expands as ``sum_u M[u, t] |exposed_u>``.  Each key is ``(f, ctx)`` with
    ``f`` the exposed channel and ``ctx`` the channel path with the exposed
    slot removed, which lets callers align exposed spaces across bases whose
    leaves differ only at the recoupled pair.  For ``position == 1`` the comb
    itself exposes the channel and M is the identity.
    """
    n = len(basis.leaves)
    if not 1 <= position <= n - 1:
        raise ValueError(f"position {position} out of range for {n} leaves")
    p = position
    slot = exposed_slot(p)
    order = {lab: i for i, lab in enumerate(cat.labels)}
    exposed_keys: list[tuple] = []
    exposed_index: dict[tuple, int] = {}
    columns = []
    for t in basis.trees:
        path = t.channel_path()  # path[k] = ch(leaves 1..k+1)
        col: dict[int, complex] = {}
        if p == 1:
            key = (path[1], path[:1] + path[2:])
            if key not in exposed_index:
                exposed_index[key] = len(exposed_keys)
                exposed_keys.append(key)
            col[exposed_index[key]] = 1.0
        else:
            a_prev = path[p - 2]
            c_up = path[p]
            e = path[p - 1]
            xs, xs1 = basis.leaves[p - 1], basis.leaves[p]
            for f in sorted(cat.channels(xs, xs1), key=order.__getitem__):
                if cat.n(a_prev, f, c_up) == 0:
                    continue
                coeff = cat.f_symbol(a_prev, xs, xs1, c_up, e, f)
                if coeff == 0.0:
                    continue
                key = (f, path[: p - 1] + path[p:])
                if key not in exposed_index:
                    exposed_index[key] = len(exposed_keys)
                    exposed_keys.append(key)
                col[exposed_index[key]] = coeff
        columns.append(col)
    m = np.zeros((len(exposed_keys), basis.dimension), dtype=complex)
    for t_ix, col in enumerate(columns):
        for u_ix, coeff in col.items():
            m[u_ix, t_ix] = coeff
    return m, exposed_keys
