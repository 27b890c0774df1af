"""Named Fuchsian operators used by the self-checks and the test-suite."""

from __future__ import annotations

from .parsing import parse_operator
from .weyl import DiffOp

GOMPERTZ = "z*(1-z)*Dz - z"

CORPUS: dict[str, str] = {
    "gompertz": GOMPERTZ,
    # mu > delta: solutions 1 and log z
    "log": "z*Dz^2 + Dz",
    # apparent singularity at 0: solutions 1 and z^2 are both polynomial
    "apparent": "z*Dz^2 - Dz",
    # complete elliptic integral K: logarithms at 0 and 1
    "elliptic": "z*(1-z)*Dz^2 + (1-2*z)*Dz - 1/4",
    # sqrt(z/(1-z)): fractional exponents 1/2 and -1/2
    "algebraic": "2*z*(1-z)*Dz - 1",
    # Legendre Q_0: singularities at -1 and 1
    "legendre": "(1-z^2)*Dz^2 - 2*z*Dz",
    "sqrt": "2*z*Dz - 1",
}


def operator(name: str) -> DiffOp:
    return parse_operator(CORPUS[name])
