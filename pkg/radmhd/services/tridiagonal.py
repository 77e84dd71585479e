import numpy as np
import scipy.linalg

from ..core.errors import SolverCorruptionError


def solve_tridiagonal(
    lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray
) -> np.ndarray:
    """Solve lower[j] x[j-1] + diag[j] x[j] + upper[j] x[j+1] = rhs[j].

    ``lower[0]`` and ``upper[-1]`` are ignored. ``rhs`` may carry extra
    trailing columns that share the matrix.
    """
    ab = np.zeros((3, diag.shape[0]))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    if not (np.all(np.isfinite(ab)) and np.all(np.isfinite(rhs))):
        raise SolverCorruptionError("non-finite coefficients in tridiagonal system")
    try:
        solution = scipy.linalg.solve_banded((1, 1), ab, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverCorruptionError(f"singular tridiagonal system: {exc}") from exc
    if not np.all(np.isfinite(solution)):
        raise SolverCorruptionError("tridiagonal solve produced non-finite values")
    return solution
