"""Elementary symmetric functions, k-mean curvatures, and Newton tensors.

Pure linear/multilinear algebra on principal curvatures and symmetric
matrices, independent of any ambient geometry.  Conventions:

* ``S_k`` is the k-th elementary symmetric function of the eigenvalues,
  ``S_0 = 1``.
* ``H_k = S_k / binomial(n, k)`` is the normalized k-mean curvature.
* Newton tensors follow the recursion ``P_0 = I``,
  ``P_k = S_k I - A P_{k-1}``, so that ``Tr P_k = (n-k) S_k`` and
  ``Tr(A P_k) = (k+1) S_{k+1}``.
* ``c_k = (n-k) binomial(n, k) = (k+1) binomial(n, k+1)``.

Dimension is capped at 8: every claim checked here has a brute-force
oracle, and exhaustive enumeration must stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_DIM = 8

_SYM_TOL = 1e-10


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)


def trace_coefficient(n: int, k: int) -> int:
    """The constant c_k = (n-k)*binomial(n,k)."""
    return (n - k) * math.comb(n, k)


# ---------------------------------------------------------------------------
# eigen solver
# ---------------------------------------------------------------------------

def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60,
                       return_vectors: bool = False):
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.

    This is the claim-bearing eigensolver for the desk-scale algebra
    (n <= 8); it is cross-checked against ``numpy.linalg.eigh`` in the
    test suite.  Eigenvalues are returned in ascending order.

    Parameters
    ----------
    A : (n, n) array
        Symmetric matrix.
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm,
        relative to the matrix scale.
    return_vectors : bool
        When set, also return the accumulated rotation matrix whose
        columns are the eigenvectors (same ordering).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the desk-scale cap {MAX_DIM}")
    B = A.copy()
    V = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(B))))
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.tril(B, -1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = B[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # classical 2x2 rotation annihilating B[p, q]
                theta = (B[q, q] - B[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                B = rot.T @ B @ rot
                V = V @ rot
    idx = np.argsort(np.diag(B), kind="stable")
    vals = np.diag(B)[idx]
    if return_vectors:
        return vals, V[:, idx]
    return vals


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumData:
    """Principal curvatures at a point: dimension ``n`` and the kappas."""

    n: int
    kappas: tuple

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if self.n > MAX_DIM:
            raise ValueError(f"dimension {self.n} exceeds cap {MAX_DIM}")
        ks = tuple(float(k) for k in self.kappas)
        if len(ks) != self.n:
            raise ValueError("need exactly n principal curvatures")
        if not all(math.isfinite(k) for k in ks):
            raise ValueError("non-finite principal curvature")
        object.__setattr__(self, "kappas", ks)

    @classmethod
    def from_matrix(cls, A: np.ndarray) -> "SpectrumData":
        vals = jacobi_eigenvalues(_symmetrized(A))
        return cls(len(vals), tuple(vals))


@dataclass(frozen=True)
class SymmetricPack:
    """S_0..S_n, H_0..H_n and the trace constants c_0..c_{n-1}."""

    S: tuple
    H: tuple
    c: tuple

    @property
    def n(self) -> int:
        return len(self.S) - 1


@dataclass
class NewtonFamily:
    """The Newton tensors P_0..P_{n-1} generated by a symmetric matrix."""

    P: list
    A: np.ndarray
    pack: SymmetricPack = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.A.shape[0]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def elementary_symmetric(kappas) -> SymmetricPack:
    """Elementary symmetric functions via the product-polynomial recurrence.

    Builds the coefficients of prod_i (1 + kappa_i t) with the stable
    descending-index update; subset enumeration is retained as a test
    oracle only.
    """
    if isinstance(kappas, SpectrumData):
        kappas = kappas.kappas
    ks = [float(k) for k in kappas]
    n = len(ks)
    if n == 0:
        raise ValueError("empty curvature list")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds cap {MAX_DIM}")
    if not all(math.isfinite(k) for k in ks):
        raise ValueError("non-finite principal curvature")
    S = [0.0] * (n + 1)
    S[0] = 1.0
    for i, kap in enumerate(ks):
        for j in range(i + 1, 0, -1):
            S[j] += kap * S[j - 1]
    H = tuple(S[k] / math.comb(n, k) for k in range(n + 1))
    c = tuple(trace_coefficient(n, k) for k in range(n))
    return SymmetricPack(S=tuple(S), H=H, c=c)


def _symmetrized(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(A))))
    if float(np.max(np.abs(A - A.T))) > _SYM_TOL * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    return 0.5 * (A + A.T)


def newton_family(A: np.ndarray) -> NewtonFamily:
    """Newton tensors P_0..P_{n-1} of a symmetric matrix.

    In any eigenbasis of ``A`` the tensor ``P_k`` is diagonal, with the
    eigenvalue at kappa_i equal to S_k of the remaining eigenvalues.
    """
    A = _symmetrized(A)
    n = A.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds cap {MAX_DIM}")
    pack = elementary_symmetric(jacobi_eigenvalues(A))
    P = [np.eye(n)]
    for k in range(1, n):
        P.append(pack.S[k] * np.eye(n) - A @ P[k - 1])
    return NewtonFamily(P=P, A=A, pack=pack)


def trace_and_norm_identities(A: np.ndarray) -> dict:
    """Residuals of the trace identities and of |A|^2 = n^2 H_1^2 - n(n-1) H_2.

    Every residual must sit below 1e-10 times the reported scale.
    """
    fam = newton_family(A)
    n = fam.n
    S, H = fam.pack.S, fam.pack.H
    trace_p = [abs(np.trace(fam.P[k]) - (n - k) * S[k]) for k in range(n)]
    trace_ap = [abs(np.trace(fam.A @ fam.P[k]) - (k + 1) * S[k + 1]) for k in range(n)]
    norm_sq = float(np.trace(fam.A @ fam.A))
    norm_res = abs(norm_sq - (n * n * H[1] ** 2 - n * (n - 1) * H[2]))
    scale = 1.0 + max(abs(s) for s in S) * n + norm_sq
    max_res = max(max(trace_p), max(trace_ap), norm_res)
    return {
        "trace_p": trace_p,
        "trace_ap": trace_ap,
        "norm_sq_residual": norm_res,
        "scale": scale,
        "max_residual": max_res,
        "passed": max_res <= 1e-10 * scale,
    }


def bk_telescope(A: np.ndarray, k: int) -> float:
    """Max-entry residual of the telescoping sum against -(n-k) P_{k-1}.

    The sum is B_k = sum_{j=0}^{k-1} (-1)^{k-j-1} (P_j - c_j H_j I) A^{k-1-j},
    evaluated directly; the base case is B_1 = (1-n) I.
    """
    fam = newton_family(A)
    n = fam.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} out of range 1..{n - 1}")
    H, c = fam.pack.H, fam.pack.c
    powers = [np.eye(n)]
    for _ in range(k - 1):
        powers.append(powers[-1] @ fam.A)
    B = np.zeros((n, n))
    for j in range(k):
        sign = (-1.0) ** (k - j - 1)
        B += sign * (fam.P[j] @ powers[k - 1 - j] - c[j] * H[j] * powers[k - 1 - j])
    return float(np.max(np.abs(B + (n - k) * fam.P[k - 1])))


@dataclass(frozen=True)
class GardingReport:
    applicable: bool
    margins: tuple
    holds: bool
    umbilical: bool
    message: str = ""


def garding_chain(pack: SymmetricPack, k: int, rel_tol: float = 1e-8) -> GardingReport:
    """Margins of the chain H_1 >= H_2^(1/2) >= ... >= H_k^(1/k) > 0.

    Equality within ``rel_tol`` (relative; root-taking loses half the
    digits) at every stage flags an umbilical point.  If some H_j with
    j <= k is non-positive the chain does not apply and the report says
    so instead of raising.
    """
    n = pack.n
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    bad = [j for j in range(1, k + 1) if pack.H[j] <= 0.0]
    if bad:
        return GardingReport(
            applicable=False, margins=(), holds=False, umbilical=False,
            message=f"H_{bad[0]} <= 0: chain not applicable",
        )
    roots = [pack.H[j] ** (1.0 / j) for j in range(1, k + 1)]
    margins = tuple(roots[j] - roots[j + 1] for j in range(k - 1))
    scale = max(1.0, roots[0])
    holds = all(m >= -rel_tol * scale for m in margins) and roots[-1] > 0.0
    umbilical = bool(margins) and all(abs(m) <= rel_tol * scale for m in margins)
    if not margins:
        umbilical = False
    return GardingReport(applicable=True, margins=margins, holds=holds,
                         umbilical=umbilical)


@dataclass(frozen=True)
class EllipticityReport:
    applicable: bool
    margins: tuple
    min_margin: float
    positive: bool
    consistency_residual: float
    flipped: bool
    message: str = ""


def p1_ellipticity_check(A: np.ndarray) -> EllipticityReport:
    """Positivity of P_1 when H_2 > 0: the margins n H_1 - kappa_i.

    Orientation is normalized so that H_1 > 0 (flipping A -> -A when
    needed); with H_2 <= 0 the check is not applicable.  The margins are
    cross-checked against the eigenvalues of P_1 itself.
    """
    A = _symmetrized(A)
    kappas = jacobi_eigenvalues(A)
    pack = elementary_symmetric(kappas)
    n = pack.n
    if pack.H[2] <= 0.0:
        return EllipticityReport(applicable=False, margins=(), min_margin=float("nan"),
                                 positive=False, consistency_residual=float("nan"),
                                 flipped=False, message="H_2 <= 0: not applicable")
    flipped = pack.H[1] < 0.0
    if flipped:
        A = -A
        kappas = -kappas[::-1]
        pack = elementary_symmetric(kappas)
    margins = tuple(n * pack.H[1] - kap for kap in kappas)
    fam = newton_family(A)
    p1_eigs = jacobi_eigenvalues(fam.P[1])
    consistency = float(np.max(np.abs(np.sort(np.asarray(margins)) - p1_eigs)))
    return EllipticityReport(
        applicable=True,
        margins=margins,
        min_margin=float(min(margins)),
        positive=min(margins) > 0.0,
        consistency_residual=consistency,
        flipped=flipped,
    )


# ---------------------------------------------------------------------------
# batched helpers for grid sweeps
# ---------------------------------------------------------------------------
# The per-point API above is the claim-bearing route; the batched variants
# below exist so that grid sweeps stay vectorized.  numpy's batched `eigvalsh`
# is used for the spectra; the test suite pins it against the Jacobi solver.

def elementary_symmetric_batch(kappas: np.ndarray) -> np.ndarray:
    """S_0..S_n along the last axis; input shape (..., n)."""
    kappas = np.asarray(kappas, dtype=float)
    n = kappas.shape[-1]
    S = np.zeros(kappas.shape[:-1] + (n + 1,))
    S[..., 0] = 1.0
    for i in range(n):
        kap = kappas[..., i]
        for j in range(i + 1, 0, -1):
            S[..., j] += kap * S[..., j - 1]
    return S


def h_from_s(S: np.ndarray) -> np.ndarray:
    """Normalize S_k to H_k = S_k / binomial(n, k) along the last axis."""
    n = S.shape[-1] - 1
    denom = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    return S / denom


def newton_family_batch(A: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Stack P_0..P_{n-1}; input A shape (..., n, n), output (..., n, n, n).

    The stack is indexed ``P[..., k, :, :]``.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    eye = np.eye(n)
    P = np.zeros(A.shape[:-2] + (n, n, n))
    P[..., 0, :, :] = eye
    for k in range(1, n):
        P[..., k, :, :] = S[..., k, None, None] * eye - A @ P[..., k - 1, :, :]
    return P
