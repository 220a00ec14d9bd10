"""Residuals of the polynomial consistency equations and defect R-phase fitting.

The pentagon is evaluated in the standard multiplicity-free form.  The
G-crossed compatibility of associator and braiding is evaluated operationally:
a strand crossing over (or under) a fused pair is resolved in two ways, once
through the fused channel and once strand by strand, and both coefficient
chains must agree.  On trivial-sector labels with trivial action this reduces
literally to the two hexagon identities, and check_hexagon is that restriction
of the same code path.

With the crossing conventions of this package (left strand over = R), the two
families read, for x in sector k crossing over/under the pair (a, b) fused to
c with total d:

  over:   F[x,a,b;d]_{c,e} * U_k(ka, kb; kc) * R^{kc,x}_d
            = R^{ka,x}_e * sum_f F[ka,x,b;d]_{f,e} * R^{kb,x}_f * Finv[ka,kb,x;d]_{kc,f}

  under:  sum_f F[a,b,x;d]_{f,c} * (R^{b,x}_f)^{-1} * Finv[a,x,k'b;d]_{e,f} * (R^{a,x}_e)^{-1}
            = eta_x(g,h) * (R^{c,x}_d)^{-1} * Finv[x,k'a,k'b;d]_{e,k'c}

with k' the inverse flux and Finv the inverse F-block.  Every summand is a
product in which each R-value appears with exponent +-1, which is what lets
the fitting objective be compiled once and evaluated against whole batches of
trial phases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .catdata import SkeletalCategory
from .errors import NoConvergence
from .numerics import DEFAULT_TOL, Tolerance

__all__ = [
    "ResidualReport",
    "PhaseAnsatz",
    "check_pentagon",
    "check_hexagon",
    "check_heptagon",
    "heptagon_residual_fn",
    "solve_defect_R",
]


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    worst_instance: tuple
    count_checked: int

    def __str__(self):
        return (
            f"max residual {self.max_residual:.3e} over {self.count_checked} instances"
            f" (worst at {self.worst_instance})"
        )


@dataclass(frozen=True)
class PhaseAnsatz:
    unknowns: tuple[tuple[str, str, str], ...]
    values: tuple[complex, ...]
    residual: float

    def as_overrides(self) -> dict[tuple[str, str, str], complex]:
        return dict(zip(self.unknowns, self.values))


def _finv(cat: SkeletalCategory, cache: dict, a, b, c, d):
    key = (a, b, c, d)
    if key not in cache:
        mat, fs, es = cat.f_matrix(a, b, c, d)
        try:
            inv = np.linalg.inv(mat)
        except np.linalg.LinAlgError:
            # corrupted data can make a block singular; the pseudo-inverse
            # keeps residual sweeps meaningful (and large) instead of crashing
            inv = np.linalg.pinv(mat)
        cache[key] = (inv, fs, es)
    return cache[key]


def _finv_entry(cat, cache, a, b, c, d, row_e, col_f) -> complex:
    inv, fs, es = _finv(cat, cache, a, b, c, d)
    if row_e not in es or col_f not in fs:
        return 0.0
    return complex(inv[es.index(row_e), fs.index(col_f)])


def check_pentagon(cat: SkeletalCategory) -> ResidualReport:
    """Max deviation of the pentagon identity over all admissible label tuples.

    Defect sectors are included; for a G-crossed theory this is the enlarged
    pentagon system.
    """
    labels = cat.labels
    worst = 0.0
    worst_at: tuple = ()
    count = 0
    for a, b, c, d in itertools.product(labels, repeat=4):
        for e1 in cat.channels(a, b):
            for e2 in cat.channels(e1, c):
                for f1 in cat.channels(c, d):
                    for f2 in cat.channels(b, f1):
                        for rt in cat.channels(e2, d):
                            if cat.n(a, f2, rt) == 0 or cat.n(e1, f1, rt) == 0:
                                continue
                            lhs = cat.f_symbol(e1, c, d, rt, e2, f1) * cat.f_symbol(
                                a, b, f1, rt, e1, f2
                            )
                            rhs = 0.0
                            for g in cat.channels(b, c):
                                rhs += (
                                    cat.f_symbol(a, b, c, e2, e1, g)
                                    * cat.f_symbol(a, g, d, rt, e2, f2)
                                    * cat.f_symbol(b, c, d, f2, g, f1)
                                )
                            dev = abs(lhs - rhs)
                            count += 1
                            if dev > worst:
                                worst = dev
                                worst_at = (a, b, c, d, e1, e2, f1, f2, rt)
    return ResidualReport(max_residual=worst, worst_instance=worst_at, count_checked=count)


def _heptagon_terms(cat: SkeletalCategory, labels, r_sym, finv_cache):
    """Yield (instance_key, sign, term_value) over both heptagon families.

    The residual of an instance is |sum of sign * term|.  ``r_sym(a, b, c)``
    may return any value supporting * and /, which is how the phase-fitting
    objective reuses this enumeration symbolically.
    """
    grp = cat.ring.group
    for x, a, b in itertools.product(labels, repeat=3):
        k = cat.sector(x)
        ka, kb = cat.act(k, a), cat.act(k, b)
        for c in cat.channels(a, b):
            kc = cat.act(k, c)
            for d in cat.channels(x, c):
                for e in cat.channels(x, a):
                    if cat.n(e, b, d) == 0:
                        continue
                    key = ("over", x, a, b, d, e, c)
                    yield key, +1, (
                        cat.f_symbol(x, a, b, d, e, c) * cat.u_symbol(k, ka, kb, kc)
                    ) * r_sym(kc, x, d)
                    for f in cat.channels(x, b):
                        if cat.n(ka, f, d) == 0:
                            continue
                        yield key, -1, (
                            cat.f_symbol(ka, x, b, d, e, f)
                            * _finv_entry(cat, finv_cache, ka, kb, x, d, kc, f)
                        ) * r_sym(ka, x, e) * r_sym(kb, x, f)
        kbar = grp.inv(k)
        g, h = cat.sector(a), cat.sector(b)
        ka_, kb_ = cat.act(kbar, a), cat.act(kbar, b)
        for c in cat.channels(a, b):
            kc_ = cat.act(kbar, c)
            for d in cat.channels(c, x):
                for e in cat.channels(a, x):
                    if cat.n(e, kb_, d) == 0:
                        continue
                    key = ("under", x, a, b, d, e, c)
                    for f in cat.channels(b, x):
                        if cat.n(a, f, d) == 0:
                            continue
                        yield key, +1, (
                            cat.f_symbol(a, b, x, d, c, f)
                            * _finv_entry(cat, finv_cache, a, x, kb_, d, e, f)
                        ) / r_sym(b, x, f) / r_sym(a, x, e)
                    yield key, -1, (
                        cat.eta_symbol(x, g, h)
                        * _finv_entry(cat, finv_cache, x, ka_, kb_, d, e, kc_)
                    ) / r_sym(c, x, d)


def check_heptagon(
    cat: SkeletalCategory,
    sectors: tuple[str, ...] | None = None,
    r_overrides: dict[tuple[str, str, str], complex] | None = None,
) -> ResidualReport:
    """Residual of both G-crossed braiding compatibility families.

    ``sectors`` restricts the swept labels (check_hexagon passes the trivial
    sector); ``r_overrides`` substitutes trial R-values without copying the
    category.
    """
    labels = cat.labels
    if sectors is not None:
        labels = tuple(l for l in labels if cat.sector(l) in sectors)
    overrides = r_overrides or {}

    def r_sym(a, b, c):
        key = (a, b, c)
        if key in overrides:
            return overrides[key]
        return cat.r_symbol(a, b, c)

    finv_cache: dict = {}
    sums: dict[tuple, complex] = {}
    for key, sign, term in _heptagon_terms(cat, labels, r_sym, finv_cache):
        sums[key] = sums.get(key, 0.0) + sign * term
    if not sums:
        return ResidualReport(max_residual=0.0, worst_instance=(), count_checked=0)
    worst_at = max(sums, key=lambda k: abs(sums[k]))
    return ResidualReport(
        max_residual=float(abs(sums[worst_at])),
        worst_instance=worst_at,
        count_checked=len(sums),
    )


def check_hexagon(cat: SkeletalCategory) -> ResidualReport:
    """Hexagon residual (R and R^{-1} families) on the trivial sector.

    Literally the heptagon sweep restricted to trivial-sector labels: there the
    action is trivial and U = eta = 1, so the same code evaluates the ordinary
    hexagon identities.
    """
    return check_heptagon(cat, sectors=(cat.ring.group.identity,))


class _Marked:
    """Product of a complex constant and integer powers of the unknowns."""

    __slots__ = ("const", "exp")

    def __init__(self, const, exp):
        self.const = complex(const)
        self.exp = exp

    def __mul__(self, other):
        if isinstance(other, _Marked):
            return _Marked(self.const * other.const, self.exp + other.exp)
        return _Marked(self.const * complex(other), self.exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _Marked):
            return _Marked(self.const / other.const, self.exp - other.exp)
        return _Marked(self.const / complex(other), self.exp)

    def __rtruediv__(self, other):
        return _Marked(complex(other) / self.const, -self.exp)


def heptagon_residual_fn(cat: SkeletalCategory, unknowns: list[tuple[str, str, str]]):
    """Compile the heptagon residual as a function of the unknown R values.

    One sweep with symbolic markers records, per term, a constant and the
    exponent of each unknown; the returned function evaluates the residual for
    a single assignment (shape ``(n,)``) or a batch (shape ``(n, m)``).
    """
    unknown_ix = {key: i for i, key in enumerate(unknowns)}
    n = len(unknowns)
    zero = np.zeros(n, dtype=np.int64)

    def r_probe(a, b, c):
        key = (a, b, c)
        if key in unknown_ix:
            e = zero.copy()
            e[unknown_ix[key]] = 1
            return _Marked(1.0, e)
        return _Marked(cat.r_symbol(a, b, c), zero)

    finv_cache: dict = {}
    inst_index: dict[tuple, int] = {}
    rows: list[int] = []
    consts: list[complex] = []
    exps: list[np.ndarray] = []
    for key, sign, term in _heptagon_terms(cat, cat.labels, r_probe, finv_cache):
        if key not in inst_index:
            inst_index[key] = len(inst_index)
        rows.append(inst_index[key])
        if isinstance(term, _Marked):
            consts.append(sign * term.const)
            exps.append(term.exp)
        else:
            consts.append(sign * complex(term))
            exps.append(zero)
    inst_ids = np.array(rows, dtype=np.int64)
    const_arr = np.array(consts, dtype=complex)
    exp_arr = np.vstack(exps) if exps else np.zeros((0, n), dtype=np.int64)
    n_inst = len(inst_index)

    def residual(values, reduce: str = "max"):
        vals = np.asarray(values, dtype=complex)
        single = vals.ndim == 1
        if single:
            vals = vals[:, None]
        factors = np.ones((len(const_arr), vals.shape[1]), dtype=complex)
        for j in range(n):
            col = exp_arr[:, j]
            nz = col != 0
            if np.any(nz):
                factors[nz] *= vals[j][None, :] ** col[nz][:, None]
        acc = np.zeros((n_inst, vals.shape[1]), dtype=complex)
        np.add.at(acc, inst_ids, const_arr[:, None] * factors)
        if n_inst == 0:
            out = np.zeros(vals.shape[1])
        elif reduce == "max":
            out = np.max(np.abs(acc), axis=0)
        else:
            out = np.sum(np.abs(acc) ** 2, axis=0)
        return float(out[0]) if single else out

    return residual


def solve_defect_R(
    cat: SkeletalCategory,
    unknowns: list[tuple[str, str, str]],
    seed: int = 0,
    restarts: int = 64,
    max_iter: int = 10_000,
    target: float = 1e-6,
) -> PhaseAnsatz:
    """Fit unit-modulus values for the given R-keys against the heptagon system.

    Coordinate descent on the angles of the least-squares objective (sum of
    squared instance residuals): each coordinate is scanned globally on the
    circle, then refined by interval halving; up to 64 random restarts under
    an overall sweep cap, deterministic for a fixed seed.  The reported
    residual is the max instance residual of the best point.  Raises
    :class:`NoConvergence` when that stays above ``target``, which is how a
    pentagon-inconsistent F shows up.
    """
    objective = heptagon_residual_fn(cat, unknowns)
    rng = np.random.default_rng(seed)
    n = len(unknowns)
    best_angles = None
    best_obj = np.inf
    sweeps_left = max_iter
    coarse = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)

    def sweep_coordinate(angles, obj, i):
        """Global scan of coordinate i on the circle, then interval halving."""
        trial = np.repeat(angles[:, None], len(coarse), axis=1)
        trial[i, :] = coarse
        vals = objective(np.exp(1j * trial), reduce="sumsq")
        j = int(np.argmin(vals))
        best_i, obj_i = coarse[j], float(vals[j])
        span = np.pi / len(coarse)
        while span > 1e-12:
            cands = np.array([best_i - span, best_i + span])
            trial = np.repeat(angles[:, None], 2, axis=1)
            trial[i, :] = cands
            vals = objective(np.exp(1j * trial), reduce="sumsq")
            k = int(np.argmin(vals))
            if vals[k] < obj_i:
                obj_i = float(vals[k])
                best_i = cands[k]
            else:
                span /= 2
        if obj_i < obj:
            angles[i] = best_i % (2 * np.pi)
            return obj_i, True
        return obj, False

    for _ in range(restarts):
        if sweeps_left <= 0:
            break
        angles = rng.uniform(0.0, 2 * np.pi, size=n)
        obj = objective(np.exp(1j * angles), reduce="sumsq")
        while sweeps_left > 0:
            sweeps_left -= 1
            improved = False
            for i in range(n):
                obj, hit = sweep_coordinate(angles, obj, i)
                improved |= hit
            if not improved:
                break
        if obj < best_obj:
            best_obj = obj
            best_angles = angles.copy()
            if objective(np.exp(1j * best_angles), reduce="max") < 0.1 * target:
                break

    if best_angles is None:
        raise NoConvergence("no descent progress")
    best_res = objective(np.exp(1j * best_angles), reduce="max")
    if best_res > target:
        raise NoConvergence(f"best heptagon residual {best_res:.3e} above target {target:.1e}")
    values = tuple(complex(v) for v in np.exp(1j * best_angles))
    return PhaseAnsatz(unknowns=tuple(unknowns), values=values, residual=float(best_res))
