"""Central finite-difference oracles for the forward-mode engine."""
import numpy as np

from finsler_cone.utils.autodiff import Lagrangian, fundamental_matrix, lagrangian_value


def fd_fundamental_matrix(L: Lagrangian, x, v, step: float = 1e-4) -> np.ndarray:
    """g_ij = 1/2 d^2 L / dv^i dv^j from four-point central differences of L."""
    x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
    dim = v.shape[0]
    h = step * max(1.0, float(np.max(np.abs(v))))
    shifts = h * np.eye(dim)
    g = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            a, b = shifts[i], shifts[j]
            second = (lagrangian_value(L, x, v + a + b) - lagrangian_value(L, x, v + a - b)
                      - lagrangian_value(L, x, v - a + b) + lagrangian_value(L, x, v - a - b)) / (4.0 * h * h)
            g[i, j] = g[j, i] = 0.5 * second
    return g


def fd_metric_derivative(L: Lagrangian, x, v, step: float = 1e-5) -> np.ndarray:
    """dg[a, b, c] = d g_ab / d x^c at fixed v, central differences in x."""
    x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
    dim = x.shape[0]
    h = step * max(1.0, float(np.max(np.abs(x))))
    dg = np.empty((dim, dim, dim))
    for c in range(dim):
        e = np.zeros(dim)
        e[c] = h
        dg[:, :, c] = (fundamental_matrix(L, x + e, v) - fundamental_matrix(L, x - e, v)) / (2.0 * h)
    return dg


def fd_christoffel(L: Lagrangian, x, v, step: float = 1e-5) -> np.ndarray:
    """gamma[k, i, j] = 1/2 g^kl (d_j g_li + d_i g_lj - d_l g_ij) with differenced dg."""
    g = fundamental_matrix(L, x, v)
    g = 0.5 * (g + g.T)
    dg = fd_metric_derivative(L, x, v, step)
    dim = g.shape[0]
    first_kind = np.empty((dim, dim, dim))
    for l in range(dim):
        for i in range(dim):
            for j in range(dim):
                first_kind[l, i, j] = dg[l, i, j] + dg[l, j, i] - dg[i, j, l]
    gamma = 0.5 * np.linalg.solve(g, first_kind.reshape(dim, dim * dim)).reshape(dim, dim, dim)
    return 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))


def relative_gap(reference: np.ndarray, value: np.ndarray) -> float:
    reference, value = np.asarray(reference, dtype=float), np.asarray(value, dtype=float)
    return float(np.max(np.abs(reference - value))) / max(1.0, float(np.max(np.abs(reference))))
