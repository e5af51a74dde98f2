"""Shared random generators for the test suite.

Generators deliberately control conditioning: interpolation nodes keep a
minimum coordinate gap so that 1e-12 oracle tolerances are meaningful in
double precision, and row contractions are scaled strictly inside their
contractivity bound so hard inequalities carry no rounding excuses.
"""

import numpy as np

from ncfock import BallPoint, NcPolynomial, RowContraction


def random_polynomial(rng, n, degree, terms=5, scale=1.0, homogeneous=False,
                      integer=False):
    out = {}
    for _ in range(terms):
        k = degree if homogeneous else int(rng.integers(0, degree + 1))
        word = tuple(int(i) for i in rng.integers(1, n + 1, size=k))
        if integer:
            coeff = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        else:
            coeff = scale * complex(rng.normal(), rng.normal())
        out[word] = out.get(word, 0.0) + coeff
    p = NcPolynomial(n, out)
    if p.is_zero:
        p = NcPolynomial(n, {(1,) * degree if homogeneous else (): 1.0})
    return p


def random_point(rng, n, radius=0.6):
    v = rng.uniform(-1.0, 1.0, size=(n, 2))
    coords = (v[:, 0] + 1j * v[:, 1]) * (radius / np.sqrt(2 * n))
    return BallPoint(coords)


def separated_points(rng, n, k, radius=0.6, min_gap=0.2, attempts=2000):
    """k points with pairwise max-coordinate gap at least min_gap."""
    for _ in range(attempts):
        pts = [random_point(rng, n, radius) for _ in range(k)]
        ok = True
        for i in range(k):
            for j in range(i + 1, k):
                if np.abs(pts[i].coords - pts[j].coords).max() < min_gap:
                    ok = False
        if ok:
            return pts
    raise RuntimeError("could not sample separated points")


def random_row_contraction(rng, n, d, rho=0.9):
    """Tuple with sum T_i T_i* <= rho * I, strictly (margin 1e-8)."""
    g = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    s = np.linalg.norm(np.einsum("iab,icb->ac", g, g.conj()), 2)
    return RowContraction(g * np.sqrt(rho * (1.0 - 1e-8) / s))


def random_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
