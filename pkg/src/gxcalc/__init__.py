"""gxcalc: skeletal G-crossed braided fusion categories and defect braiding.

Library layout mirrors the computation pipeline: fusion rings (`fusion`),
symbol tables and catalog (`catdata`, `catalog`), fusion-tree bases (`trees`),
consistency residuals and phase fitting (`consistency`), braid representations
(`braids`), the diagram DSL and evaluator (`diagrams`), and the bilayer
defect T-gate protocol (`protocols`).  `cli` exposes everything as the
``gxcalc`` command.
"""

from .numerics import Tolerance, DEFAULT_TOL

__all__ = ["Tolerance", "DEFAULT_TOL"]
__version__ = "0.1.0"
