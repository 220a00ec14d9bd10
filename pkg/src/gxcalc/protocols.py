"""The bilayer-Ising defect T-gate protocol.

Two independent routes to the same matrix entries:

* :func:`tgate_closed_form` plugs the conjectured defect data into the
  closed-form expressions for <1|T|1> and <psi|T|psi> (sums over the defect
  pair channel c in {11, sigmasigma, psipsi} with the squared defect R, the
  squared F-column and the anyon/fermion loop factors).
* :func:`tgate_diagrammatic` evaluates the protocol diagram through the
  diagram evaluator: an anyon lasso around the middle defects, a forced
  measurement of the anyon pair, a full exchange of the middle defects, and
  the reverse lasso.

:func:`run_protocol` evaluates a protocol script (diagram DSL, typically the
shipped ``tgate_protocol.gxd`` which appends the defect-pair readout
projections) over Hom(11, sigma1^4 x X1^4) and reports the 2x2 logical block
together with the leakage left outside it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catdata import SkeletalCategory
from .diagrams import Diagram, evaluate, parse_diagram, typecheck
from .errors import MissingSymbol, UnsupportedConfiguration
from .numerics import DEFAULT_TOL, Tolerance
from .trees import FusionTree, enumerate_basis

__all__ = [
    "ProtocolResult",
    "ProtocolRun",
    "tgate_closed_form",
    "tgate_diagrammatic",
    "run_protocol",
    "tgate_core_script",
    "tgate_protocol_script",
    "PROTOCOL_LEAVES",
]

PROTOCOL_LEAVES = ("sigma1", "sigma1", "sigma1", "sigma1", "X1", "X1", "X1", "X1")
_DEFECT_CHANNELS = ("11", "sigmasigma", "psipsi")


@dataclass(frozen=True)
class ProtocolResult:
    t11: complex
    tpsipsi: complex
    offdiag_max: float
    ratio: complex
    method: str
    consumed: dict | None = None


@dataclass(frozen=True)
class ProtocolRun:
    block: np.ndarray  # raw 2x2 logical block
    leakage: float
    ratio: complex

    @property
    def normalized_block(self) -> np.ndarray:
        return self.block / self.block[0, 0]


def _data_dir() -> Path:
    return Path(__file__).parent / "data" / "diagrams"


def tgate_core_script() -> str:
    """The T-gate morphism itself (steps 3-6), without the readout."""
    return (_data_dir() / "tgate_core.gxd").read_text()


def tgate_protocol_script() -> str:
    """The full protocol: T-gate core plus defect-pair readout projections."""
    return (_data_dir() / "tgate_protocol.gxd").read_text()


def _smatrix_index(cat: SkeletalCategory) -> dict[str, int]:
    trivial = cat.ring.trivial_sector
    if cat.smatrix is None or cat.smatrix.shape[0] != len(trivial):
        raise MissingSymbol("category carries no trivial-sector S-matrix")
    return {lab: i for i, lab in enumerate(trivial)}


def tgate_closed_form(cat: SkeletalCategory, tol: Tolerance = DEFAULT_TOL) -> ProtocolResult:
    """Closed-form diagonal entries of the protocol, up to common normalization.

    <1|T|1>    = d_s1 d_X^2 sum_c (R^{XX}_c)^2 |[F^{XXX}_X]_{c,11}|^2 (S_{s1,c}/S_{11,c})^2
    <psi|T|psi>= d_s1 d_X^2 sum_c (R^{XX}_c)^2 |[F^{XXX}_X]_{c,11}|^2 (1 - S_{p1,c}/S_{11,c})

    The off-diagonal entries vanish identically: the two leftmost strands of
    the trace diagram are through strands, so the entry is a morphism between
    distinct simple objects.
    """
    six = _smatrix_index(cat)
    s = cat.smatrix
    d_s1 = cat.d("sigma1")
    d_x = cat.d("X1")
    t11 = 0.0 + 0.0j
    tpp = 0.0 + 0.0j
    for c in _DEFECT_CHANNELS:
        r2 = cat.r_symbol("X1", "X1", c) ** 2
        fc = cat.f_symbol("X1", "X1", "X1", "X1", c, "11")
        w = r2 * abs(fc) ** 2
        t11 += w * (s[six["sigma1"], six[c]] / s[six["11"], six[c]]) ** 2
        tpp += w * (1.0 - s[six["psi1"], six[c]] / s[six["11"], six[c]])
    t11 *= d_s1 * d_x**2
    tpp *= d_s1 * d_x**2
    return ProtocolResult(
        t11=complex(t11),
        tpsipsi=complex(tpp),
        offdiag_max=0.0,
        ratio=complex(tpp / t11),
        method="closed_form",
    )


def _logical_indices(cat: SkeletalCategory, basis) -> tuple[int, int]:
    log1 = FusionTree(
        leaves=PROTOCOL_LEAVES,
        internals=("11", "sigma1", "11", "X1", "11", "X1"),
        root="11",
    )
    logp = FusionTree(
        leaves=PROTOCOL_LEAVES,
        internals=("psi1", "sigma1", "11", "X1", "11", "X1"),
        root="11",
    )
    return basis.index(log1), basis.index(logp)


def tgate_diagrammatic(
    cat: SkeletalCategory, tol: Tolerance = DEFAULT_TOL
) -> ProtocolResult:
    """Diagonal entries via diagram evaluation of the protocol core.

    Evaluates the trace diagram of the protocol over the physical fusion
    space; requires the U = eta = 1 convention (the calculation is then
    independent of the unknown symmetry factors).
    """
    if not cat.trivial_symmetry_factors:
        raise UnsupportedConfiguration("diagrammatic T-gate requires the U=eta=1 flag")
    diagram = typecheck(parse_diagram(tgate_core_script()), cat)
    res = evaluate(cat, diagram, root="11", tol=tol)
    i1, ip = _logical_indices(cat, res.source_basis)
    mat = res.matrix
    t11 = complex(mat[i1, i1])
    tpp = complex(mat[ip, ip])
    off = max(abs(mat[i1, ip]), abs(mat[ip, i1]))
    return ProtocolResult(
        t11=t11,
        tpsipsi=tpp,
        offdiag_max=float(off),
        ratio=tpp / t11,
        method="diagrammatic",
        consumed=res.consumed,
    )


def run_protocol(
    cat: SkeletalCategory,
    script: str | Diagram | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> ProtocolRun:
    """Evaluate a protocol script and return the logical block plus leakage.

    The script is diagram-DSL text (default: the shipped protocol file) acting
    on Hom(11, sigma1^4 x X1^4).  The logical block is the 2x2 submatrix over
    {|1>, |psi>}; leakage is the Frobenius mass the logical columns leave
    outside those two rows after the script (readout projections included).
    """
    if script is None:
        script = tgate_protocol_script()
    diagram = parse_diagram(script) if isinstance(script, str) else script
    diagram = typecheck(diagram, cat)
    if diagram.labels != PROTOCOL_LEAVES:
        raise UnsupportedConfiguration(
            f"protocol scripts act on strands {' '.join(PROTOCOL_LEAVES)}"
        )
    res = evaluate(cat, diagram, root="11", tol=tol)
    mat = res.matrix
    i1, ip = _logical_indices(cat, res.source_basis)
    block = np.array(
        [[mat[i1, i1], mat[i1, ip]], [mat[ip, i1], mat[ip, ip]]], dtype=complex
    )
    mask = np.ones(mat.shape[0], dtype=bool)
    mask[[i1, ip]] = False
    leak = float(np.linalg.norm(mat[mask][:, [i1, ip]]))
    return ProtocolRun(block=block, leakage=leak, ratio=complex(block[1, 1] / block[0, 0]))
