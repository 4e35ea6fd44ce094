"""Finite truncations and their spectra.

Three matrix shapes: symmetric tridiagonal truncations of scalar
recurrence data, Hermitian block-tridiagonal truncations, and unitary
five-diagonal truncations of circle recurrence data.  Only eigenvalues
are ever needed downstream, so the tridiagonal path uses bisection on
Sturm sign counts (no vectors, embarrassingly parallel across
eigenvalue indices) with a QL route available as a cross-check.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .sequences import BlockJacobiParams, JacobiParams, VerblunskyParams, _freeze


class NoConvergence(ArithmeticError):
    """Eigenvalue iteration failed to meet tolerance; indicates a bug or
    a violated input invariant, not a property of valid data."""

    def __init__(self, detail: str):
        super().__init__(detail)


class NotUnitary(ValueError):
    """Matrix handed to a unitary eigensolver fails the unitarity check."""

    def __init__(self, defect: float):
        super().__init__(f"unitarity defect {defect} exceeds tolerance")
        self.defect = defect


class DuplicateEigenvalues(UserWarning):
    """Numerically coincident eigenvalues where simplicity is guaranteed;
    points at an invariant violation upstream."""


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix: diagonal of length N, positive
    off-diagonal of length N-1."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = _freeze(np.asarray(self.diag, dtype=float))
        e = _freeze(np.asarray(self.offdiag, dtype=float))
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if d.ndim != 1 or e.ndim != 1 or len(e) != len(d) - 1:
            raise ValueError("need len(offdiag) == len(diag) - 1")
        if np.any(e <= 0):
            raise ValueError("off-diagonal entries must be positive")

    @property
    def n(self) -> int:
        return len(self.diag)

    def gershgorin(self):
        """Enclosing interval for the spectrum."""
        d, e = self.diag, self.offdiag
        pad = np.zeros(len(d))
        pad[:-1] += e
        pad[1:] += e
        return float(np.min(d - pad)), float(np.max(d + pad))

    def dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        m[idx, idx + 1] = self.offdiag
        m[idx + 1, idx] = self.offdiag
        return m


class EmpiricalMeasure:
    """Sorted sample points with equal weights 1/N.

    ``domain`` is "line" for real points or "circle" for angles in
    (-pi, pi].
    """

    def __init__(self, points, domain: str = "line"):
        points = np.sort(np.asarray(points, dtype=float))
        if domain not in ("line", "circle"):
            raise ValueError("domain must be 'line' or 'circle'")
        if len(points) == 0:
            raise ValueError("empty sample")
        self.points = _freeze(points)
        self.domain = domain

    def __len__(self) -> int:
        return len(self.points)

    def mean_power(self, k: int) -> float:
        """(1/N) sum x^k for line samples."""
        return math.fsum((self.points ** k).tolist()) / len(self.points)

    def mean_phase(self) -> complex:
        """(1/N) sum e^{i theta} for circle samples."""
        z = np.exp(1j * self.points)
        return complex(math.fsum(z.real.tolist()),
                       math.fsum(z.imag.tolist())) / len(self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "point"])
        for i, x in enumerate(self.points):
            w.writerow([i, repr(float(x))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, domain: str = "line") -> "EmpiricalMeasure":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["index", "point"]:
            raise ValueError("expected header index,point")
        return cls(np.array([float(r[1]) for r in rows[1:]]), domain)


def truncate(params: JacobiParams, N: int) -> TridiagonalMatrix:
    """N-point truncation: diag b_1..b_N, offdiag a_1..a_{N-1}."""
    if N < 1:
        raise ValueError("N >= 1 required")
    b = params.b_window(N)
    a = params.a_window(N - 1) if N > 1 else np.empty(0)
    return TridiagonalMatrix(b, a)


_SAFMIN = np.finfo(float).tiny


def _sturm_counts(d: np.ndarray, e2: np.ndarray, xs: np.ndarray,
                  pivmin: float) -> np.ndarray:
    """Number of eigenvalues below each shift in xs, via the signs of the
    LDL^T pivots q_k = d_k - x - e_{k-1}^2 / q_{k-1}."""
    counts = np.zeros(len(xs), dtype=np.int64)
    q = d[0] - xs
    counts += q < 0.0
    for k in range(1, len(d)):
        small = np.abs(q) < pivmin
        if small.any():
            q = np.where(small, np.where(q < 0.0, -pivmin, pivmin), q)
        q = d[k] - xs - e2[k - 1] / q
        counts += q < 0.0
    return counts


def eig_sym_tridiag(T: TridiagonalMatrix, method: str = "bisect",
                    maxiter: int = 200) -> np.ndarray:
    """All eigenvalues of T, ascending.

    method "bisect": Sturm-count bisection, every eigenvalue bracketed
    independently and refined to 1e-13 relative to the Gershgorin bound.
    method "ql": the classic tridiagonal QL iteration (LAPACK sterf),
    kept as an independent cross-check path.

    Positive off-diagonals force simple eigenvalues; numerically
    coincident ones trigger a DuplicateEigenvalues warning.
    """
    n = T.n
    if n == 1:
        return np.array([float(T.diag[0])])
    if method == "ql":
        vals = sla.eigvalsh_tridiagonal(T.diag, T.offdiag, lapack_driver="sterf")
        vals = np.sort(vals)
    elif method == "bisect":
        d = T.diag
        e2 = T.offdiag ** 2
        gl, gu = T.gershgorin()
        bound = max(abs(gl), abs(gu))
        if bound == 0.0:
            return np.zeros(n)
        tol = 1e-13 * bound
        pivmin = _SAFMIN * max(1.0, float(e2.max()))
        lo = np.full(n, gl)
        hi = np.full(n, gu)
        need = np.arange(1, n + 1)  # eigenvalue i has count >= i+1 above it
        for _ in range(maxiter):
            mid = 0.5 * (lo + hi)
            c = _sturm_counts(d, e2, mid, pivmin)
            above = c >= need
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
            if float(np.max(hi - lo)) <= tol:
                break
        else:
            raise NoConvergence(
                f"bisection stalled: residual interval {float(np.max(hi - lo))}"
            )
        vals = 0.5 * (lo + hi)
        vals = np.sort(vals)
    else:
        raise ValueError(f"unknown method {method!r}")
    gaps = np.diff(vals)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if len(gaps) and float(gaps.min()) < 1e-12 * scale:
        warnings.warn(
            "numerically duplicate eigenvalues in a simple-spectrum matrix",
            DuplicateEigenvalues,
        )
    return vals


def zero_counting(params: JacobiParams, N: int,
                  method: str = "bisect") -> EmpiricalMeasure:
    """Normalized counting measure of the N-truncation eigenvalues."""
    return EmpiricalMeasure(eig_sym_tridiag(truncate(params, N), method), "line")


def trace_square(params: JacobiParams, N: int, method: str = "bisect"):
    """Mean squared eigenvalue of the N-truncation, both ways.

    Returns (via_formula, via_eigs): the coefficient-side expression
    (1/N)(sum b^2 + 2 sum a^2) and the spectral side (1/N) sum x_j^2.
    The two agree to roundoff; keeping both routes is the point.
    """
    b = params.b_window(N)
    a = params.a_window(N - 1) if N > 1 else np.empty(0)
    via_formula = (math.fsum((b ** 2).tolist())
                   + 2.0 * math.fsum((a ** 2).tolist())) / N
    eigs = eig_sym_tridiag(truncate(params, N), method)
    via_eigs = math.fsum((eigs ** 2).tolist()) / N
    return via_formula, via_eigs


class CmvMatrix:
    """Unitary five-diagonal truncation built from circle recurrence
    coefficients.

    The matrix is the product of two block-diagonal unitaries: one made
    of the 2x2 rotors [[-a_j, rho_j], [rho_j, conj(a_j)]] at even j, one
    with a leading 1 and the rotors at odd j.  The rotor signs follow
    the recursion Phi_{n+1} = z Phi_n + alpha_n Phi_n^* used by the
    moment machinery, under which the constant sequence alpha_j = a > 0
    is the gap-around-1 arc measure with nothing in the gap.  The rotor
    that would straddle the truncation boundary degenerates to the
    single entry -beta with a unimodular boundary phase beta standing in
    for the N-th coefficient; eigenvalues are then the zeros of
    z Phi_{N-1} + beta Phi_{N-1}^*.

    By default beta = alpha_{N-1}/|alpha_{N-1}| (beta = 1 when that
    coefficient vanishes), which for constant positive coefficient
    sequences parks the boundary-controlled zero inside the essential
    arc instead of mid-gap; any fixed unimodular choice is legitimate,
    and this one is pinned down by the spectrum-location tests.
    """

    def __init__(self, mat: np.ndarray, boundary: complex):
        self.mat = _freeze(np.asarray(mat, dtype=complex))
        self.boundary = complex(boundary)

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def unitarity_defect(self) -> float:
        c = self.mat
        return float(np.max(np.abs(c.conj().T @ c - np.eye(self.n))))


def cmv(params: VerblunskyParams, N: int, boundary=None) -> CmvMatrix:
    """Assemble the N x N unitary truncation from alpha_0..alpha_{N-2}
    plus a boundary phase (see CmvMatrix docstring for the default)."""
    if N < 1:
        raise ValueError("N >= 1 required")
    alpha = np.array(params.alpha_window(N), dtype=complex)
    if boundary is None:
        tail = alpha[N - 1]
        boundary = tail / abs(tail) if abs(tail) > 0 else 1.0 + 0.0j
    boundary = complex(boundary)
    if abs(abs(boundary) - 1.0) > 1e-12:
        raise ValueError("boundary phase must be unimodular")
    eff = alpha.copy()
    eff[N - 1] = boundary
    rho = np.zeros(N)
    rho[: N - 1] = np.sqrt(1.0 - np.abs(alpha[: N - 1]) ** 2)

    def factor(start: int) -> np.ndarray:
        f = np.zeros((N, N), dtype=complex)
        for i in range(start):
            f[i, i] = 1.0
        j = start
        while j < N:
            if j + 1 < N:
                f[j, j] = -eff[j]
                f[j, j + 1] = rho[j]
                f[j + 1, j] = rho[j]
                f[j + 1, j + 1] = np.conj(eff[j])
            else:
                f[j, j] = -eff[j]
            j += 2
        return f

    mat = factor(0) @ factor(1)
    out = CmvMatrix(mat, boundary)
    defect = out.unitarity_defect()
    if defect > 1e-12:
        raise NotUnitary(defect)
    return out


def eig_unitary(C: CmvMatrix) -> EmpiricalMeasure:
    """Eigenvalue angles of a unitary matrix, sorted in (-pi, pi].

    Checks the unitarity invariant on entry, and on exit that every
    eigenvalue is unimodular to 1e-9 and every residual ||Cv - zv|| is
    below 1e-9.
    """
    defect = C.unitarity_defect()
    if defect > 1e-10:
        raise NotUnitary(defect)
    vals, vecs = sla.eig(C.mat)
    moduli = np.abs(vals)
    if float(np.max(np.abs(moduli - 1.0))) > 1e-9:
        raise NoConvergence(
            f"eigenvalue modulus off the circle by {np.max(np.abs(moduli - 1.0))}"
        )
    resid = C.mat @ vecs - vecs * vals
    worst = float(np.max(np.abs(resid)))
    if worst > 1e-9:
        raise NoConvergence(f"eigenpair residual {worst}")
    angles = np.angle(vals)
    # np.angle returns (-pi, pi]; -pi can appear from rounding, fold it
    angles[angles <= -math.pi] += 2.0 * math.pi
    return EmpiricalMeasure(angles, "circle")


def block_dense(params: BlockJacobiParams, K: int) -> np.ndarray:
    """Dense Hermitian K-block truncation."""
    ell = params.block_size
    B = params.b_blocks(K)
    A = params.a_blocks(K - 1) if K > 1 else []
    m = np.zeros((K * ell, K * ell), dtype=complex)
    for k in range(K):
        m[k * ell:(k + 1) * ell, k * ell:(k + 1) * ell] = B[k]
    for k in range(K - 1):
        m[k * ell:(k + 1) * ell, (k + 1) * ell:(k + 2) * ell] = A[k]
        m[(k + 1) * ell:(k + 2) * ell, k * ell:(k + 1) * ell] = A[k].conj().T
    return m


def eig_block(params: BlockJacobiParams, K: int) -> np.ndarray:
    """All K*ell eigenvalues of the Hermitian block truncation,
    ascending.  Dense Hermitian solve; the trace identities in
    block_trace_square are the independent check on it."""
    if K < 1:
        raise ValueError("K >= 1 required")
    return np.linalg.eigvalsh(block_dense(params, K))


def block_trace_square(params: BlockJacobiParams, K: int):
    """Mean squared eigenvalue of the K-block truncation, both ways:
    (1/(K ell))[sum Tr B_k^2 + 2 sum Tr A_k^dag A_k] versus the
    eigenvalue sum."""
    ell = params.block_size
    B = params.b_blocks(K)
    A = params.a_blocks(K - 1) if K > 1 else []
    s = sum(float(np.trace(b @ b).real) for b in B)
    s += 2.0 * sum(float(np.trace(a.conj().T @ a).real) for a in A)
    via_formula = s / (K * ell)
    eigs = eig_block(params, K)
    via_eigs = float(np.sum(eigs ** 2)) / (K * ell)
    return via_formula, via_eigs
