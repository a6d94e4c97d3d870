"""Thomas algorithm that works for any field type (float or Fraction)."""
from .errors import SingularSystem


def thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system.

    Row ``i`` reads ``lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i]``;
    ``lower[0]`` and ``upper[-1]`` are ignored. No pivoting: intended for the
    diagonally dominant hitting-time systems in this package.
    """
    n = len(diag)
    c = [None] * n
    d = [None] * n
    piv = diag[0]
    if piv == 0:
        raise SingularSystem("zero pivot in row 0")
    c[0] = upper[0] / piv if n > 1 else 0
    d[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i] * c[i - 1]
        if piv == 0:
            raise SingularSystem(f"zero pivot in row {i}")
        c[i] = upper[i] / piv if i < n - 1 else 0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv
    x = [None] * n
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x
