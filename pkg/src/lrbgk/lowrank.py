"""Factored low-rank matrices over the velocity grid.

A rank-r matrix A in R^{Nv x Nv} is stored as A = left @ diag(core) @ right.T
with orthonormal factor columns and a nonnegative, nonincreasing core (the
discrete Schmidt form).  Rank 0 encodes the zero matrix with empty factors, so
cancellation and zero initial data need no special cases.

Sums are truncated with a QR-SVD compression: reduced QR of the horizontally
concatenated factors, SVD of the small coupling matrix, and an absolute cut of
the singular values at the tolerance.
"""

import numpy as np
from scipy.linalg import qr as _qr, svd as _svd
from scipy.linalg import LinAlgError

from .errors import ConfigurationError, NumericalError

__all__ = [
    "LowRankMatrix",
    "rank1",
    "scaled",
    "combine",
    "truncated_sum",
    "hierarchical_sum",
    "scale_rows",
    "scale_cols",
    "lrdi",
]


class LowRankMatrix:
    """Velocity-space matrix in factored form left @ diag(core) @ right.T."""

    __slots__ = ("left", "core", "right")

    def __init__(self, left, core, right):
        self.left = left
        self.core = core
        self.right = right

    @property
    def rank(self):
        return self.core.shape[0]

    @property
    def dim(self):
        return self.left.shape[0]

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, 0)), np.zeros(0), np.zeros((n, 0)))

    def densify(self):
        """Materialize the full Nv x Nv matrix (diagnostics and oracles only)."""
        return (self.left * self.core) @ self.right.T

    def copy(self):
        return LowRankMatrix(self.left, self.core, self.right)

    def check(self, tol=1e-12):
        """Raise AssertionError if the Schmidt-form invariants are violated."""
        r = self.rank
        ident = np.eye(r)
        assert np.max(np.abs(self.left.T @ self.left - ident), initial=0.0) <= tol
        assert np.max(np.abs(self.right.T @ self.right - ident), initial=0.0) <= tol
        assert np.all(self.core >= 0.0)
        assert np.all(np.diff(self.core) <= 0.0)


def rank1(col, scale, row):
    """Build a rank-1 matrix scale * col @ row.T in normalized factored form."""
    col = np.asarray(col, dtype=float)
    row = np.asarray(row, dtype=float)
    if col.shape != row.shape or col.ndim != 1:
        raise ConfigurationError(
            f"rank1 factor shapes {col.shape} and {row.shape} do not match a grid"
        )
    nc = np.linalg.norm(col)
    nr = np.linalg.norm(row)
    sigma = scale * nc * nr
    if sigma == 0.0:
        return LowRankMatrix.zero(col.shape[0])
    sign = 1.0 if sigma > 0 else -1.0
    return LowRankMatrix(
        (col / nc)[:, None], np.array([abs(sigma)]), (sign * row / nr)[:, None]
    )


def scaled(A, alpha):
    """Return alpha * A; the sign of alpha is folded into the right factor."""
    if alpha == 0.0 or A.rank == 0:
        return LowRankMatrix.zero(A.dim)
    if alpha > 0:
        return LowRankMatrix(A.left, alpha * A.core, A.right)
    return LowRankMatrix(A.left, -alpha * A.core, -A.right)


def _truncate_factored(X, Y, tol, context="factored truncation"):
    # X carries the (signed) core weights; Y holds unit-norm direction columns.
    try:
        qx, rx = _qr(X, mode="economic", check_finite=False)
        qy, ry = _qr(Y, mode="economic", check_finite=False)
        u, sv, vt = _svd(rx @ ry.T, check_finite=False)
    except LinAlgError as exc:  # pragma: no cover - LAPACK failures are rare
        raise NumericalError(f"SVD failed during {context}") from exc
    r = int(np.searchsorted(-sv, -tol))  # sv sorted descending; keep sv > tol
    if r == 0:
        return LowRankMatrix.zero(X.shape[0])
    return LowRankMatrix(qx @ u[:, :r], sv[:r], qy @ vt[:r].T)


def combine(terms, tol):
    """Truncated sum of scalar multiples of low-rank matrices.

    ``terms`` is an iterable of (coefficient, LowRankMatrix) pairs.  The
    concatenated factors are compressed in a single QR-SVD pass, which is the
    pairwise summation algorithm applied once to the whole collection.
    """
    xs = []
    ys = []
    dim = None
    for c, A in terms:
        dim = A.dim if dim is None else dim
        if c == 0.0 or A.rank == 0:
            continue
        xs.append(A.left * (c * A.core))
        ys.append(A.right)
    if dim is None:
        raise ConfigurationError("combine requires at least one term")
    if not xs:
        return LowRankMatrix.zero(dim)
    if len(xs) == 1:
        # Already a valid Schmidt form up to the sign of the coefficient.
        c, A = [(c, A) for c, A in terms if c != 0.0 and A.rank != 0][0]
        B = scaled(A, c)
        r = int(np.sum(B.core > tol))
        if r == B.rank:
            return B
        return LowRankMatrix(B.left[:, :r], B.core[:r], B.right[:, :r])
    ranks = [x.shape[1] for x in xs]
    return _truncate_factored(
        np.hstack(xs), np.hstack(ys), tol, context=f"sum of ranks {ranks}"
    )


def truncated_sum(A, B, tol):
    """SVD-truncation of A + B keeping singular values above ``tol``."""
    if A.dim != B.dim:
        raise ConfigurationError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if tol <= 0:
        raise ConfigurationError("truncation tolerance must be positive")
    return combine(((1.0, A), (1.0, B)), tol)


def hierarchical_sum(terms, tol):
    """Pairwise-tree reduction of a list of low-rank matrices via truncated_sum."""
    terms = list(terms)
    if not terms:
        raise ConfigurationError("hierarchical_sum requires at least one term")
    while len(terms) > 1:
        nxt = [
            truncated_sum(terms[j], terms[j + 1], tol)
            for j in range(0, len(terms) - 1, 2)
        ]
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0]


def scale_rows(A, d):
    """Factored form of diag(d) @ A, re-orthonormalized."""
    d = np.asarray(d, dtype=float)
    if d.shape != (A.dim,):
        raise ConfigurationError(f"row scaling length {d.shape} != {A.dim}")
    if A.rank == 0:
        return LowRankMatrix.zero(A.dim)
    return _truncate_factored(
        d[:, None] * (A.left * A.core), A.right, 0.0, context="row scaling"
    )


def scale_cols(A, d):
    """Factored form of A @ diag(d), re-orthonormalized."""
    d = np.asarray(d, dtype=float)
    if d.shape != (A.dim,):
        raise ConfigurationError(f"column scaling length {d.shape} != {A.dim}")
    if A.rank == 0:
        return LowRankMatrix.zero(A.dim)
    return _truncate_factored(
        A.left * A.core, d[:, None] * A.right, 0.0, context="column scaling"
    )


def lrdi(A, wx, wy):
    """Weighted double sum sum_{m,n} wx_m wy_n A_mn without densifying.

    Contracts the weight vectors against each factor separately; O(Nv*r + r^2).
    """
    if A.rank == 0:
        return 0.0
    return float(np.dot((wx @ A.left) * A.core, wy @ A.right))
