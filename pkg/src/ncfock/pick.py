"""Operator-valued Nevanlinna-Pick interpolation over the unit ball.

The solvability data is the block Pick matrix built from the kernel Gram
matrix G[i][j] = 1 / (1 - <lambda_i, lambda_j>).  Our block layout is fixed
once and for all: block (i, j) of pick_matrix(problem, c) is
G[i][j] * (c^2 I - W_i W_j*).  Relabelings of that convention are transposes
with the same spectrum; Hermiticity is asserted on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .freealg import BallPoint, NcMatrixPolynomial, NcPolynomial, evaluate, tensor_product
from .numerics import (DEFAULT_TOL, PsdVerdict, as_hermitian,
                       max_generalized_eigenvalue, operator_norm, psd_check)

POINT_SEPARATION = 1e-14


class PickProblem:
    """k distinct nodes in the open unit ball with N x N matrix targets.

    Scalar targets may be passed as plain numbers; they become 1 x 1 blocks.
    """

    def __init__(self, points, targets):
        pts = [p if isinstance(p, BallPoint) else BallPoint(p) for p in points]
        if not pts:
            raise ValueError("need at least one interpolation node")
        n = pts[0].n
        for j, p in enumerate(pts):
            if p.n != n:
                raise ValueError(f"points[{j}] has dimension {p.n}, expected {n}")
            if p.norm >= 1.0:
                raise DomainError(f"points[{j}] has |lambda| = {p.norm:.6g} >= 1")
        mats = []
        for j, w in enumerate(targets):
            w = np.atleast_2d(np.asarray(w, dtype=complex))
            if w.ndim != 2 or w.shape[0] != w.shape[1]:
                raise ValueError(f"targets[{j}] is not square")
            mats.append(w)
        if len(mats) != len(pts):
            raise ValueError(f"{len(pts)} points but {len(mats)} targets")
        dim = mats[0].shape[0]
        for j, w in enumerate(mats):
            if w.shape[0] != dim:
                raise ValueError(f"targets[{j}] has size {w.shape[0]}, expected {dim}")
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                gap = np.abs(pts[i].coords - pts[j].coords).max()
                if gap <= POINT_SEPARATION:
                    raise DomainError(f"points {i} and {j} coincide (gap {gap:.3e})")
        self.points = pts
        self.targets = np.stack(mats)
        self.n = n

    @property
    def k(self) -> int:
        return len(self.points)

    @property
    def target_dim(self) -> int:
        return int(self.targets.shape[1])


@dataclass(frozen=True)
class PickCertificate:
    feasible: bool
    min_eigenvalue: float
    min_norm: float
    gram: np.ndarray = field(repr=False)
    marginal: bool
    tol: float


def _coords(problem: PickProblem) -> np.ndarray:
    return np.stack([p.coords for p in problem.points])


def gram(problem: PickProblem) -> np.ndarray:
    """Kernel Gram matrix G[i][j] = 1 / (1 - sum_t lambda_it conj(lambda_jt)).

    This is the m -> infinity limit of the truncated kernel-vector Gram
    matrices; it is Hermitian positive definite for distinct nodes.
    """
    lam = _coords(problem)
    ip = lam @ lam.conj().T
    return as_hermitian(1.0 / (1.0 - ip))


def _target_products(problem: PickProblem) -> np.ndarray:
    # out[i, j] = W_i W_j*
    W = problem.targets
    return np.einsum("iab,jcb->ijac", W, W.conj())


def _assemble_blocks(blocks: np.ndarray) -> np.ndarray:
    k, _, N, _ = blocks.shape
    return np.ascontiguousarray(blocks.transpose(0, 2, 1, 3).reshape(k * N, k * N))


def pick_matrix(problem: PickProblem, c: float) -> np.ndarray:
    """Block matrix with (i, j) entry G[i][j] * (c^2 I - W_i W_j*).

    At c = 1 its positive semidefiniteness is the solvability criterion for
    interpolation by a multiplier of norm at most 1.
    """
    if c < 0:
        raise ValueError("the norm level c must be nonnegative")
    G = gram(problem)
    N = problem.target_dim
    blocks = G[:, :, None, None] * (c ** 2 * np.eye(N)[None, None] - _target_products(problem))
    return as_hermitian(_assemble_blocks(blocks))


def min_interpolation_norm(problem: PickProblem) -> float:
    """The least multiplier norm c* among all interpolants of the problem.

    Computed as the norm of the model operator on the span of the kernel
    vectors: c*^2 is the top generalized eigenvalue of the pair
    (G[i][j] W_i W_j*, G[i][j] I).  pick_matrix(problem, c) is PSD exactly
    for c >= c*.
    """
    G = gram(problem)
    N = problem.target_dim
    A = np.kron(G, np.eye(N))
    B = _assemble_blocks(G[:, :, None, None] * _target_products(problem))
    top = max_generalized_eigenvalue(B, A)
    return float(np.sqrt(max(top, 0.0)))


def certify(problem: PickProblem, tol: float = DEFAULT_TOL) -> PickCertificate:
    """Feasibility certificate at norm level 1, cross-checked against c*."""
    G = gram(problem)
    verdict = psd_check(pick_matrix(problem, 1.0), tol)
    cstar = min_interpolation_norm(problem)
    consistent = verdict.is_psd == (cstar <= 1.0 + tol)
    return PickCertificate(
        feasible=verdict.is_psd,
        min_eigenvalue=verdict.min_eigenvalue,
        min_norm=cstar,
        gram=G,
        marginal=verdict.is_marginal or not consistent,
        tol=float(tol),
    )


def _separating_coordinate(base: BallPoint, other: BallPoint) -> int:
    # smallest index among those maximizing |lambda_{base,q} - lambda_{other,q}|
    diffs = np.abs(base.coords - other.coords)
    return int(np.argmax(diffs))


def lagrange_interpolant(problem: PickProblem) -> NcMatrixPolynomial:
    """An explicit interpolant with no norm control.

    For each node i0 a product of linear factors e_q - lambda_{jq} vanishes
    at every other node and is normalized to 1 at lambda_{i0}; the output is
    the target-weighted sum of these scalar cardinal polynomials.  Degree is
    at most k - 1.
    """
    n = problem.n
    cardinals = []
    for i0, base in enumerate(problem.points):
        psi = NcPolynomial.unit(n)
        for j, other in enumerate(problem.points):
            if j == i0:
                continue
            q = _separating_coordinate(base, other)
            factor = NcPolynomial(n, {(q + 1,): 1.0, (): -other.coords[q]})
            psi = tensor_product(psi, factor)
        value = evaluate(psi, base)
        cardinals.append(psi.scale(1.0 / value))
    N = problem.target_dim
    entries = [[NcPolynomial.zero(n) for _ in range(N)] for _ in range(N)]
    for i, phi in enumerate(cardinals):
        W = problem.targets[i]
        for a in range(N):
            for b in range(N):
                if W[a, b] != 0:
                    entries[a][b] = entries[a][b] + phi.scale(W[a, b])
    return NcMatrixPolynomial(n, entries)


def classical_ball_matrix(problem: PickProblem) -> np.ndarray:
    """Necessary-condition matrix for bounded analytic interpolation on the ball:
    entry (i, j) is (1 - w_i conj(w_j)) / (1 - <lambda_i, lambda_j>)^n.

    Scalar targets only.  Positivity here is implied by, but weaker than,
    positivity of pick_matrix at c = 1.
    """
    if problem.target_dim != 1:
        raise ValueError("the classical comparison needs scalar targets")
    w = problem.targets[:, 0, 0]
    lam = _coords(problem)
    ip = lam @ lam.conj().T
    return as_hermitian((1.0 - np.outer(w, w.conj())) / (1.0 - ip) ** problem.n)


def sample_membership_check(samples, tol: float = DEFAULT_TOL) -> PsdVerdict:
    """Finite-stage test that sampled values extend to a norm-one multiplier.

    samples is a sequence of (point, value) pairs with |value| < 1; the
    verdict is the PSD check of the scalar Pick matrix at c = 1.  Running it
    over every finite sample set characterizes restrictions of unit-ball
    multipliers.
    """
    points = []
    values = []
    for idx, (point, value) in enumerate(samples):
        value = complex(value)
        if abs(value) >= 1.0:
            raise DomainError(f"samples[{idx}] has |F(lambda)| = {abs(value):.6g} >= 1")
        points.append(point if isinstance(point, BallPoint) else BallPoint(point))
        values.append(value)
    problem = PickProblem(points, values)
    return psd_check(pick_matrix(problem, 1.0), tol)
