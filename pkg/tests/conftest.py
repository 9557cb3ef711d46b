import numpy as np
import scipy.linalg as la

from jointeig import CommutingFamily


def random_commuting_family(n, d, seed, kappa=None, complex_diags=False):
    """Ground-truth commuting family X diag(D_k) X^{-1} with known tuples.

    Built independently of the package's synthesis module so it can serve
    as an oracle for it: plain Gaussian X (optionally conditioned by
    rescaling singular values), diagonals drawn uniformly.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n))
    if kappa is not None:
        u, s, vt = np.linalg.svd(x)
        s = np.linspace(1.0, 1.0 / kappa, n) * s[0]
        x = u @ np.diag(s) @ vt
    x_inv = la.inv(x)
    diags = []
    for _ in range(d):
        vals = rng.uniform(-2.0, 2.0, size=n)
        if complex_diags:
            vals = vals + 1j * rng.uniform(-2.0, 2.0, size=n)
        diags.append(vals)
    mats = [(x * diag) @ x_inv for diag in diags]
    truth = np.stack([np.asarray(d_, dtype=complex) for d_ in diags], axis=1)
    return CommutingFamily(mats), truth, x


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])
