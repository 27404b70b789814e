"""Dense reference implementations used as test oracles (small n only)."""
import itertools

import numpy as np


def dense_model(model):
    """Full ``n^3`` array of a factor model."""
    n = model.n
    T = np.zeros((n, n, n))
    for s, u in zip(model.sigmas, model.U.T):
        T += s * np.einsum("i,j,k->ijk", u, u, u)
    return T


def dense_sparse(omega):
    """Full array of a sparse symmetric tensor with zeros off the support, and its 0/1 mask."""
    n = omega.n
    T = np.zeros((n, n, n))
    M = np.zeros((n, n, n))
    for (i, j, k), v in omega.items():
        for a, b, c in set(itertools.permutations((i, j, k))):
            T[a, b, c] = v
            M[a, b, c] = 1.0
    return T, M


def triple_loop(T, x, y, z):
    n = T.shape[0]
    total = 0.0
    for a in range(n):
        for b in range(n):
            for c in range(n):
                total += T[a, b, c] * x[a] * y[b] * z[c]
    return total


def dense_power_norm(T, restarts=20, iters=300, seed=0):
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        x = rng.standard_normal(T.shape[0])
        x /= np.linalg.norm(x)
        for _ in range(iters):
            y = np.einsum("ijk,j,k->i", T, x, x)
            ny = np.linalg.norm(y)
            if ny == 0:
                break
            x = y / ny
            best = max(best, abs(np.einsum("ijk,i,j,k->", T, x, x, x)))
    return best


def lstsq_mode1_update(T_obs, mask, sigmas, U, q):
    """Solve ``min_v sum_mask (T - v(a) u_q(b) u_q(c) - others)^2`` as one generic least-squares system.

    Unknowns are the ``n`` coordinates of ``v``; every observed entry
    ``(a, b, c)`` contributes one row with coefficient ``u_q(b) u_q(c)`` in
    column ``a``. ``lstsq`` returns the minimum-norm solution, so coordinates
    without any observation come out as zero.
    """
    n = U.shape[0]
    others = np.zeros((n, n, n))
    for l in range(len(sigmas)):
        if l != q:
            u = U[:, l]
            others += sigmas[l] * np.einsum("i,j,k->ijk", u, u, u)
    rows, rhs = [], []
    uq = U[:, q]
    for a, b, c in zip(*np.nonzero(mask)):
        row = np.zeros(n)
        row[a] = uq[b] * uq[c]
        rows.append(row)
        rhs.append(T_obs[a, b, c] - others[a, b, c])
    A = np.array(rows).reshape(-1, n)
    sol, *_ = np.linalg.lstsq(A, np.array(rhs), rcond=None)
    return sol


def random_unit(rng, n):
    x = rng.standard_normal(n)
    return x / np.linalg.norm(x)


def at_distance(rng, u, dist, spiky=False):
    """Unit vector at exactly Euclidean distance ``dist`` from unit ``u``."""
    n = len(u)
    if spiky:
        # push the largest coordinate further out so clipping engages
        w = np.zeros(n)
        top = int(np.argmax(np.abs(u)))
        w[top] = np.sign(u[top]) * (1 + rng.random())
        w[rng.integers(n)] += rng.standard_normal()
    else:
        w = rng.standard_normal(n)
    w -= (w @ u) * u
    while np.linalg.norm(w) < 1e-6:
        w = rng.standard_normal(n)
        w -= (w @ u) * u
    w /= np.linalg.norm(w)
    theta = 2 * np.arcsin(dist / 2)
    return np.cos(theta) * u + np.sin(theta) * w
