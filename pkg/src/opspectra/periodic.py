"""Periodic recurrence data: discriminants, band sets, the polynomial
block map, type-1/type-3 normalization, and the isospectral torus.

The discriminant of a period-p generator is the trace of its one-period
transfer-matrix product, computed in exact polynomial-coefficient
arithmetic.  Evaluating that degree-p polynomial on a one-sided
tridiagonal matrix produces a block-tridiagonal matrix with p x p
blocks whose off-diagonal blocks are lower triangular with positive
diagonal; the evaluation here runs Horner directly on banded diagonal
storage, so the bandwidth (and hence the block structure) is tracked
exactly and no dense intermediate ever exists.

The isospectral torus of a band set with all gaps open is parametrized
by p - 1 angles.  p = 1 is a point and p = 2 has a closed form (the
coefficient constraints leave a circle's worth of generators); p = 3
runs a Newton continuation on the discriminant coefficients plus two
divisor-position conditions.  Distance from a coefficient sequence to
the torus is a grid minimum refined by golden-section descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npp

from .potential import FiniteGapSet
from .sequences import (BlockJacobiParams, JacobiParams, SingularBlock,
                        UnitaryChain, _freeze, validate_blocks)


class ComplexRoots(ValueError):
    """Band-edge polynomial has genuinely nonreal roots: the coefficients
    do not come from a valid periodic generator."""


class GapClosed(ValueError):
    """Torus construction asked for a band set with a closed gap."""


class ContinuationDiverged(ArithmeticError):
    """Newton continuation failed to reach coefficient tolerance."""

    def __init__(self, residual: float):
        super().__init__(f"continuation stalled at residual {residual}")
        self.residual = residual


class BandwidthExceeded(ValueError):
    """Input sequence too short for the requested number of blocks."""


class DimensionTooLarge(ValueError):
    """Torus-distance search supports period <= 3 only."""


class NotType3(ArithmeticError):
    """Block map output failed its guaranteed structure check; this
    signals an implementation error, not bad input."""


@dataclass(frozen=True)
class PeriodicJacobi:
    """Period-p coefficient pattern: a = (a_1..a_p) positive, b likewise."""

    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        b = tuple(float(x) for x in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if len(a) != len(b) or len(a) == 0:
            raise ValueError("need matching nonempty a and b patterns")
        if any(x <= 0 for x in a):
            raise ValueError("off-diagonal pattern must be positive")

    @property
    def p(self) -> int:
        return len(self.a)

    def windows(self, n: int, offset: int = 0):
        """One-sided arrays (a_1..a_n, b_1..b_n) of the periodic
        extension, starting ``offset`` sites into the pattern."""
        idx = (offset + np.arange(n)) % self.p
        return np.array(self.a)[idx], np.array(self.b)[idx]

    def as_jacobi(self, n: int) -> JacobiParams:
        a, b = self.windows(n)
        dev = max(abs(x - 1.0) for x in self.a) + max(abs(x) for x in self.b)
        return JacobiParams(a[: n - 1], b, bound=dev)


@dataclass(frozen=True)
class Discriminant:
    """Degree-p polynomial (ascending coefficients) with positive leading
    coefficient equal to the reciprocal off-diagonal product of its
    generator.

    ``t21`` carries the lower-left polynomial entry of the transfer
    product (degree p - 1); its roots are the one-per-gap divisor
    points used by the torus parametrization.  ``source`` remembers the
    generator when the discriminant was built from one.
    """

    coeffs: np.ndarray
    t21: Optional[np.ndarray] = None
    source: Optional[PeriodicJacobi] = None

    def __post_init__(self):
        c = _freeze(np.asarray(self.coeffs, dtype=float))
        object.__setattr__(self, "coeffs", c)
        if self.t21 is not None:
            object.__setattr__(self, "t21", _freeze(np.asarray(self.t21, dtype=float)))
        if len(c) < 2 or c[-1] <= 0.0:
            raise ValueError("discriminant needs degree >= 1 and a positive "
                             "leading coefficient")

    @property
    def p(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    @property
    def cap(self) -> float:
        """Geometric mean of the generator off-diagonals."""
        return float(self.leading ** (-1.0 / self.p))

    def value(self, x):
        return npp.polyval(x, self.coeffs)

    def derivative(self, x):
        return npp.polyval(x, npp.polyder(self.coeffs))

    def bands(self) -> FiniteGapSet:
        return bands(self)

    def to_csv(self) -> str:
        lines = ["k,coeff"]
        lines += [f"{k},{repr(float(v))}" for k, v in enumerate(self.coeffs)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "Discriminant":
        rows = [r.split(",") for r in text.strip().splitlines()]
        if rows[0] != ["k", "coeff"]:
            raise ValueError("expected header k,coeff")
        coeffs = np.zeros(len(rows) - 1)
        for k, v in rows[1:]:
            coeffs[int(k)] = float(v)
        return cls(coeffs)


def _poly_mat_mul(x, y):
    """Product of 2x2 matrices with polynomial (ascending-coefficient)
    entries."""
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            out[i][j] = npp.polyadd(npp.polymul(x[i][0], y[0][j]),
                                    npp.polymul(x[i][1], y[1][j]))
    return out


def discriminant(J0: PeriodicJacobi) -> Discriminant:
    """Trace of the one-period transfer product of J0.

    The n-th one-step matrix is [[(x - b_n)/a_n, -a_{n-1}/a_n], [1, 0]]
    with a_0 = a_p; the product runs n = 1..p applied left to right, so
    the result is A_p ... A_1 and its trace is the discriminant.
    """
    p = J0.p
    T = [[np.array([1.0]), np.array([0.0])],
         [np.array([0.0]), np.array([1.0])]]
    a_prev = J0.a[-1]
    for n in range(p):
        an, bn = J0.a[n], J0.b[n]
        step = [[np.array([-bn / an, 1.0 / an]), np.array([-a_prev / an])],
                [np.array([1.0]), np.array([0.0])]]
        T = _poly_mat_mul(step, T)
        a_prev = an
    delta = npp.polyadd(T[0][0], T[1][1])
    coeffs = np.zeros(p + 1)
    coeffs[: len(delta)] = delta
    lead = 1.0
    for x in J0.a:
        lead /= x
    if abs(coeffs[-1] - lead) > 1e-12 * lead:
        raise ArithmeticError("transfer product lost the leading coefficient")
    t21 = np.zeros(p)
    t21[: len(T[1][0])] = T[1][0]
    return Discriminant(coeffs, t21=t21, source=J0)


def bands(disc: Discriminant) -> FiniteGapSet:
    """Band set: closure of the preimage of [-2, 2] under the
    discriminant.

    Edges are the roots of D(x) -+ 2 via companion matrices.  A closed
    gap shows up as a (numerically split) double root; roots whose small
    imaginary part comes from that splitting are accepted through a
    residual check, while genuinely complex roots raise ComplexRoots.
    Touching proto-bands are merged.
    """
    edges = []
    cscale = float(np.max(np.abs(disc.coeffs))) + 2.0
    for sign in (-2.0, 2.0):
        shifted = disc.coeffs.copy()
        shifted[0] -= sign
        roots = npp.polyroots(shifted)
        for r in roots:
            x = float(np.real(r))
            im = abs(float(np.imag(r)))
            scale = max(1.0, abs(x))
            if im > 1e-9 * scale:
                resid = abs(float(disc.value(x)) - sign)
                if resid > 1e-7 * cscale or im > 1e-5 * scale:
                    raise ComplexRoots(
                        f"root {r} of discriminant {'-' if sign > 0 else '+'} 2 "
                        "is not real"
                    )
            edges.append(x)
    edges.sort()
    proto = [(edges[2 * i], edges[2 * i + 1]) for i in range(len(edges) // 2)]
    span = max(1.0, abs(edges[0]), abs(edges[-1]))
    merged = [list(proto[0])]
    for lo, hi in proto[1:]:
        if lo - merged[-1][1] <= 1e-8 * span:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    if disc.source is not None:
        pattern = tuple(disc.source.a)
    else:
        pattern = (disc.cap,) * disc.p
    return FiniteGapSet(tuple((lo, hi) for lo, hi in merged), period_a=pattern)


# -- polynomial of a tridiagonal matrix on banded storage ---------------


def _band_mul_tridiag(R: dict, w: int, a: np.ndarray, b: np.ndarray,
                      n: int) -> dict:
    """One Horner step: symmetric banded R (diagonals 0..w) times the
    tridiagonal matrix with diagonal b and off-diagonal a."""
    out = {}
    for dp in range(w + 2):
        m = n - dp
        if m <= 0:
            continue
        j = np.arange(dp, n)
        acc = np.zeros(m)
        if dp <= w:
            acc += R[dp][:m] * b[j]
        if dp >= 1 and dp - 1 <= w:
            acc += R[dp - 1][:m] * a[j - 1]
        elif dp == 0 and w >= 1:
            acc[1:] += R[1][: m - 1] * a[: m - 1]
        if dp + 1 <= w:
            acc[: m - 1] += R[dp + 1][: m - 1] * a[j[: m - 1]]
        out[dp] = acc
    return out


def _poly_of_tridiag(coeffs: np.ndarray, a: np.ndarray, b: np.ndarray,
                     n: int):
    """Banded evaluation of a polynomial (ascending coeffs) of the
    tridiagonal matrix with diagonal b[0..n-1], off-diagonal a[0..n-2].
    Returns (diagonals dict, bandwidth); entry (i, i+d) = diags[d][i]."""
    deg = len(coeffs) - 1
    R = {0: np.full(n, float(coeffs[deg]))}
    w = 0
    for k in range(deg - 1, -1, -1):
        R = _band_mul_tridiag(R, w, a, b, n)
        w += 1
        R[0] = R[0] + coeffs[k]
    return R, w


def delta_of_J(J0: PeriodicJacobi, J: JacobiParams, K: int) -> BlockJacobiParams:
    """Evaluate the discriminant of J0 on the one-sided matrix of J and
    cut the result into p x p blocks: K + 1 diagonal blocks and K
    off-diagonal blocks.

    The result bandwidth equals p exactly, so the off-diagonal blocks
    are lower triangular by construction with diagonal entries that are
    ratios of p-fold products of J's off-diagonals to the period
    product.  The returned parameters carry the type3 tag after
    verification; failure of that structure is an implementation bug and
    raises NotType3.
    """
    if K < 1:
        raise ValueError("K >= 1 required")
    p = J0.p
    n_sites = (K + 2) * p + p
    if J.is_finite and not J.available(n_sites - 1, n_sites):
        raise BandwidthExceeded(
            f"need {n_sites} sites for K={K} blocks of size {p}"
        )
    b_arr = J.b_window(n_sites)
    a_arr = J.a_window(n_sites - 1)
    disc = discriminant(J0)
    R, w = _poly_of_tridiag(disc.coeffs, a_arr, b_arr, n_sites)
    B_blocks = []
    for k in range(K + 1):
        base = k * p
        blk = np.zeros((p, p))
        for r in range(p):
            for s in range(r, p):
                blk[r, s] = R[s - r][base + r]
                blk[s, r] = blk[r, s]
        B_blocks.append(_freeze(blk.astype(complex)))
    A_blocks = []
    for k in range(K):
        base = k * p
        blk = np.zeros((p, p))
        for r in range(p):
            for s in range(0, r + 1):
                d = p + s - r
                blk[r, s] = R[d][base + r]
        A_blocks.append(_freeze(blk.astype(complex)))
    out = BlockJacobiParams(block_size=p, A=tuple(A_blocks),
                            B=tuple(B_blocks), type_tag="type3")
    try:
        validate_blocks(out)
    except (ValueError, TypeError) as exc:
        raise NotType3(str(exc)) from exc
    return out


# -- equivalence-class representatives ---------------------------------


def _phase_diag(d: np.ndarray) -> np.ndarray:
    out = np.ones_like(d)
    nz = np.abs(d) > 0.0
    out[nz] = d[nz] / np.abs(d[nz])
    return out


def _exactly_type3(M: np.ndarray) -> bool:
    d = np.diagonal(M)
    return (not np.any(np.triu(M, k=1)) and not np.any(d.imag)
            and bool(np.all(d.real > 0.0)))


def _exactly_type1(M: np.ndarray) -> bool:
    if not np.array_equal(M, M.conj().T):
        return False
    return bool(np.linalg.eigvalsh(M)[0] > 0.0)


def _identity_chain(params: BlockJacobiParams, tag: str):
    ell = params.block_size
    eye = _freeze(np.eye(ell, dtype=complex))
    chain = UnitaryChain((eye,) * max(len(params.B), len(params.A) + 1))
    out = BlockJacobiParams(ell, params.A, params.B, tag)
    return out, chain


def normalize_type3(Jb: BlockJacobiParams):
    """Equivalent parameter set whose off-diagonal blocks are lower
    triangular with positive diagonal, plus the realizing unitary chain.

    Built left to right: each u_{j+1} is the Q factor (phase-fixed) of
    the QR factorization of (u_j^* A_j)^*.  Applying the returned chain
    to the original input reproduces the returned parameters.  Input
    that is already exactly in form comes back unchanged with the
    identity chain.
    """
    if all(_exactly_type3(A) for A in Jb.A):
        return _identity_chain(Jb, "type3")
    ell = Jb.block_size
    u = [np.eye(ell, dtype=complex)]
    for j, A in enumerate(Jb.A, start=1):
        M = u[-1].conj().T @ A
        q, r = np.linalg.qr(M.conj().T)
        rd = np.diagonal(r).copy()
        if np.any(np.abs(rd) <= 1e-12 * max(1.0, float(np.max(np.abs(A))))):
            raise SingularBlock(j, float(np.min(np.abs(rd))), 0.0)
        u.append(q @ np.diag(_phase_diag(rd)))
    while len(u) < len(Jb.B):
        u.append(np.eye(ell, dtype=complex))
    chain = UnitaryChain(tuple(_freeze(m) for m in u))
    out = chain.apply(Jb, type_tag="type3")
    # snap the roundoff dust off the structural zeros so the result is
    # exactly in form (idempotent under re-normalization)
    A = []
    for blk in out.A:
        blk = np.tril(blk)
        np.fill_diagonal(blk, np.diagonal(blk).real)
        A.append(_freeze(blk))
    out = BlockJacobiParams(out.block_size, tuple(A), out.B, "type3")
    validate_blocks(out)
    return out, chain


def normalize_type1(Jb: BlockJacobiParams):
    """Equivalent parameter set whose off-diagonal blocks are positive
    definite (polar factors), plus the realizing chain.  Each output
    block is checked against the determinant-versus-diagonal-product
    inequality for positive definite matrices."""
    if all(_exactly_type1(A) for A in Jb.A):
        return _identity_chain(Jb, "type1")
    ell = Jb.block_size
    u = [np.eye(ell, dtype=complex)]
    for j, A in enumerate(Jb.A, start=1):
        M = u[-1].conj().T @ A
        uu, s, vh = np.linalg.svd(M)
        if s[-1] <= 1e-12 * max(s[0], 1.0):
            raise SingularBlock(j, float(s[-1]), float(1e-12 * s[0]))
        u.append((uu @ vh).conj().T)
    while len(u) < len(Jb.B):
        u.append(np.eye(ell, dtype=complex))
    chain = UnitaryChain(tuple(_freeze(m) for m in u))
    out = chain.apply(Jb, type_tag="type1")
    # make the polar factors exactly Hermitian
    A = tuple(_freeze((blk + blk.conj().T) / 2.0) for blk in out.A)
    out = BlockJacobiParams(out.block_size, A, out.B, "type1")
    validate_blocks(out)
    for j, A in enumerate(out.A, start=1):
        det = float(np.linalg.det(A).real)
        diag_prod = float(np.prod(np.diagonal(A).real))
        if det > diag_prod + 1e-12:
            raise ArithmeticError(
                f"determinant bound violated on block {j}: {det} > {diag_prod}"
            )
    return out, chain


# -- isospectral torus -------------------------------------------------


@dataclass(frozen=True)
class TorusPoint:
    """A periodic generator sharing a reference discriminant, tagged with
    its angle coordinates."""

    jacobi: PeriodicJacobi
    theta: Tuple[float, ...]
    reference: Discriminant

    def __post_init__(self):
        own = discriminant(self.jacobi)
        diff = float(np.max(np.abs(own.coeffs - self.reference.coeffs)))
        if diff > 1e-9 * max(1.0, float(np.max(np.abs(self.reference.coeffs)))):
            raise ValueError(f"discriminant mismatch {diff} for torus point")


class _P2Family:
    """Closed-form one-parameter family of period-2 generators with a
    fixed discriminant.

    Matching (x^2 - S x + Q')/P forces a_1 a_2 = P, b_1 + b_2 = S and
    b_1 b_2 - a_1^2 - a_2^2 = Q'.  With t = a_1^2, realness of the b's
    confines t to [t_-, t_+] around the fixed product; sweeping
    t = mid + half cos(phi) and flipping the b-assignment with the sign
    of sin(phi) closes the family into a circle.  phi = phi0 (the anchor
    phase) reproduces the source generator.
    """

    def __init__(self, dref: Discriminant):
        c = dref.coeffs
        if len(c) != 3:
            raise ValueError("period-2 family needs a degree-2 discriminant")
        self.P = 1.0 / c[2]
        self.S = -c[1] * self.P
        self.Q = c[0] * self.P
        R = (self.S ** 2 - 4.0 * self.Q) / 4.0
        disc = R * R - 4.0 * self.P ** 2
        if R <= 2.0 * self.P * (1.0 + 1e-12) or disc <= 0.0:
            raise GapClosed("period-2 torus degenerates: gap closed")
        root = math.sqrt(disc)
        self.t_lo = (R - root) / 2.0
        self.t_hi = (R + root) / 2.0
        self.mid = 0.5 * (self.t_lo + self.t_hi)
        self.half = 0.5 * (self.t_hi - self.t_lo)
        self.R = R
        if dref.source is not None and dref.source.p == 2:
            a1, _ = dref.source.a
            b1, b2 = dref.source.b
            t0 = min(max(a1 * a1, self.t_lo), self.t_hi)
            base = math.acos(min(1.0, max(-1.0, (t0 - self.mid) / self.half)))
            self.phi0 = base if b1 >= b2 else -base
        else:
            self.phi0 = 0.0

    def pattern(self, theta: float):
        phi = self.phi0 + theta
        t = self.mid + self.half * math.cos(phi)
        t = min(max(t, self.t_lo), self.t_hi)
        a1 = math.sqrt(t)
        a2 = self.P / a1
        d = max(self.S ** 2 - 4.0 * (self.Q + t + self.P ** 2 / t), 0.0)
        s = 1.0 if math.sin(phi) >= 0.0 else -1.0
        b1 = 0.5 * self.S + 0.5 * s * math.sqrt(d)
        return a1, a2, b1, self.S - b1

    def pattern_vec(self, thetas: np.ndarray):
        phi = self.phi0 + np.asarray(thetas, dtype=float)
        t = np.clip(self.mid + self.half * np.cos(phi), self.t_lo, self.t_hi)
        a1 = np.sqrt(t)
        a2 = self.P / a1
        d = np.maximum(self.S ** 2 - 4.0 * (self.Q + t + self.P ** 2 / t), 0.0)
        s = np.where(np.sin(phi) >= 0.0, 1.0, -1.0)
        b1 = 0.5 * self.S + 0.5 * s * np.sqrt(d)
        return a1, a2, b1, self.S - b1


def _p3_residual(v: np.ndarray, cref: np.ndarray, targets):
    if np.min(v[:3]) <= 0.0:
        return None
    D = discriminant(PeriodicJacobi(tuple(v[:3]), tuple(v[3:])))
    r = np.empty(6)
    r[:4] = D.coeffs - cref
    r[4] = npp.polyval(targets[0], D.t21)
    r[5] = npp.polyval(targets[1], D.t21)
    return r


def _p3_newton(v0: np.ndarray, cref: np.ndarray, targets,
               tol: float = 1e-11, maxiter: int = 60) -> np.ndarray:
    v = v0.copy()
    r = _p3_residual(v, cref, targets)
    if r is None:
        raise ContinuationDiverged(math.inf)
    for _ in range(maxiter):
        rn = float(np.max(np.abs(r)))
        if rn <= tol:
            return v
        jac = np.empty((6, 6))
        for i in range(6):
            h = 1e-7 * max(1.0, abs(v[i]))
            vp = v.copy()
            vp[i] += h
            rp = _p3_residual(vp, cref, targets)
            if rp is None:
                vp[i] -= 2.0 * h
                rp = _p3_residual(vp, cref, targets)
                if rp is None:
                    raise ContinuationDiverged(rn)
                jac[:, i] = (r - rp) / h
            else:
                jac[:, i] = (rp - r) / h
        try:
            dv = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            raise ContinuationDiverged(rn) from None
        lam = 1.0
        for _ in range(12):
            vn = v + lam * dv
            rtry = _p3_residual(vn, cref, targets)
            if rtry is not None and float(np.max(np.abs(rtry))) < rn:
                v, r = vn, rtry
                break
            lam *= 0.5
        else:
            raise ContinuationDiverged(rn)
    rn = float(np.max(np.abs(r)))
    if rn <= tol:
        return v
    raise ContinuationDiverged(rn)


class _P3Family:
    """Newton-continued two-parameter family for period 3.

    Coordinates theta = (theta_1, theta_2) steer the two divisor points
    across their gaps through targets m_j + h_j (1 - 1e-6) cos(theta_j +
    phase_j); the six unknowns (a_1..a_3, b_1..b_3) solve the four
    coefficient-matching equations plus the two divisor conditions.
    """

    EPS = 1e-6

    def __init__(self, dref: Discriminant):
        if dref.source is None or dref.t21 is None:
            raise ValueError("period-3 torus needs a discriminant built from "
                             "its generator")
        fgs = dref.bands()
        if fgs.n_bands < 3:
            raise GapClosed("period-3 torus needs both gaps open")
        gaps = [(fgs.bands[j][1], fgs.bands[j + 1][0]) for j in range(2)]
        self.mg = [0.5 * (lo + hi) for lo, hi in gaps]
        self.hg = [0.5 * (hi - lo) for lo, hi in gaps]
        g0 = np.sort(np.real(npp.polyroots(dref.t21)))
        self.phase = []
        for j in range(2):
            c = (g0[j] - self.mg[j]) / (self.hg[j] * (1.0 - self.EPS))
            self.phase.append(math.acos(min(1.0, max(-1.0, c))))
        self.cref = dref.coeffs
        self.v_ref = np.array(dref.source.a + dref.source.b)

    def targets(self, theta1: float, theta2: float):
        th = (theta1, theta2)
        return [self.mg[j] + self.hg[j] * (1.0 - self.EPS)
                * math.cos(th[j] + self.phase[j]) for j in range(2)]

    def solve(self, theta1: float, theta2: float,
              warm: Optional[np.ndarray] = None) -> np.ndarray:
        if warm is not None:
            try:
                return _p3_newton(warm, self.cref,
                                  self.targets(theta1, theta2))
            except ContinuationDiverged:
                pass
        v = self.v_ref.copy()
        span = max(abs(theta1), abs(theta2), 1e-9)
        steps = max(4, int(math.ceil(span / 0.2)))
        for s in np.linspace(1.0 / steps, 1.0, steps):
            v = _p3_newton(v, self.cref,
                           self.targets(theta1 * s, theta2 * s))
        return v


def torus_point(dref: Discriminant, theta) -> TorusPoint:
    """Member of the isospectral family of dref at angle coordinates
    theta (length p - 1); theta = 0 is the generator itself.

    Requires all gaps open (GapClosed otherwise); periods above 3 are
    not parametrized here.
    """
    theta = tuple(np.atleast_1d(np.asarray(theta, dtype=float)).tolist())
    p = dref.p
    if len(theta) != max(p - 1, 0):
        raise ValueError(f"period {p} needs {p - 1} torus coordinates")
    if all(t == 0.0 for t in theta) and dref.source is not None:
        return TorusPoint(dref.source, theta, dref)
    if p == 1:
        jac = PeriodicJacobi((1.0 / dref.leading,),
                             (-float(dref.coeffs[0]) / dref.leading,))
        return TorusPoint(jac, theta, dref)
    if p == 2:
        fam = _P2Family(dref)
        a1, a2, b1, b2 = fam.pattern(theta[0])
        return TorusPoint(PeriodicJacobi((a1, a2), (b1, b2)), theta, dref)
    if p == 3:
        fam = _p3_family_cached(dref)
        v = fam.solve(theta[0], theta[1])
        return TorusPoint(PeriodicJacobi(tuple(v[:3]), tuple(v[3:])),
                          theta, dref)
    raise DimensionTooLarge(f"torus parametrization implemented for p <= 3, "
                            f"got {p}")


def _p3_family_cached(dref: Discriminant) -> _P3Family:
    fam = getattr(dref, "_p3_family", None)
    if fam is None:
        fam = _P3Family(dref)
        object.__setattr__(dref, "_p3_family", fam)
    return fam


# -- distance to the torus ---------------------------------------------

def dm_weights(bound: float) -> np.ndarray:
    """Geometric weights e^{-k}, k = 0..K, with K chosen so the dropped
    tail of a series with terms bounded by ``bound`` stays below 1e-15."""
    K = max(40, int(math.ceil(math.log(max(bound, 1.0) / 1e-15))))
    return np.exp(-np.arange(K + 1, dtype=float))


def _deviation_bound(J: JacobiParams, upto: int) -> float:
    if J.declared_bound is not None:
        return float(J.declared_bound)
    from .sequences import sup_deviation
    return sup_deviation(J, upto)


def d_to_torus(J: JacobiParams, m: int, dref: Discriminant,
               grid_points: int = 64, refine_step: float = 1e-7) -> float:
    """Distance at offset m from J to the isospectral family of dref:
    the exponentially weighted coefficient distance minimized over the
    family.  Grid minimum over 64^{p-1} angle samples, refined by
    golden-section (coordinate-wise for p = 3) until the bracket is
    below ``refine_step``; the result is an upper bound on the true
    infimum and no worse than the best grid sample."""
    return float(d_to_torus_batch(J, np.array([m]), dref, grid_points,
                                  refine_step)[0])


def _window_mats(J: JacobiParams, ms: np.ndarray, K: int):
    hi = int(ms.max()) + K
    a = J.a_window(hi)
    b = J.b_window(hi)
    aw = np.lib.stride_tricks.sliding_window_view(a, K + 1)
    bw = np.lib.stride_tricks.sliding_window_view(b, K + 1)
    return aw[ms - 1], bw[ms - 1]


def d_to_torus_batch(J: JacobiParams, ms: np.ndarray, dref: Discriminant,
                     grid_points: int = 64,
                     refine_step: float = 1e-7) -> np.ndarray:
    """Vectorized d_to_torus over a set of offsets (see d_to_torus)."""
    ms = np.asarray(ms, dtype=int)
    if np.any(ms < 1):
        raise ValueError("offsets are 1-based")
    p = dref.p
    if p > 3:
        raise DimensionTooLarge(f"torus distance implemented for p <= 3, got {p}")
    if dref.source is not None:
        ref_dev = (max(abs(x - 1.0) for x in dref.source.a)
                   + max(abs(x) for x in dref.source.b))
    else:
        ref_dev = abs(dref.cap - 1.0)
    bound = 2.0 * (_deviation_bound(J, int(ms.max())) + ref_dev + 2.0)
    w = dm_weights(bound)
    K = len(w) - 1
    aw, bw = _window_mats(J, ms, K)

    if p == 1:
        pt = torus_point(dref, ())
        a0, b0 = pt.jacobi.a[0], pt.jacobi.b[0]
        return (np.abs(aw - a0) @ w) + (np.abs(bw - b0) @ w)

    if p == 2:
        fam = _P2Family(dref)
        offs = (ms - 1) % 2
        idx = (offs[:, None] + np.arange(K + 1)[None, :]) % 2

        def dist_at(thetas: np.ndarray) -> np.ndarray:
            a1, a2, b1, b2 = fam.pattern_vec(thetas)
            pa = np.stack([a1, a2], axis=1)
            pb = np.stack([b1, b2], axis=1)
            ta = np.take_along_axis(pa, idx, axis=1)
            tb = np.take_along_axis(pb, idx, axis=1)
            return (np.abs(aw - ta) @ w) + (np.abs(bw - tb) @ w)

        grid = 2.0 * math.pi * np.arange(grid_points) / grid_points
        best_val = np.full(len(ms), np.inf)
        best_th = np.zeros(len(ms))
        for g in grid:
            vals = dist_at(np.full(len(ms), g))
            better = vals < best_val
            best_val = np.where(better, vals, best_val)
            best_th = np.where(better, g, best_th)
        span = 2.0 * math.pi / grid_points
        lo = best_th - span
        hi = best_th + span
        inv = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - inv * (hi - lo)
        x2 = lo + inv * (hi - lo)
        f1 = dist_at(x1)
        f2 = dist_at(x2)
        best_val = np.minimum(best_val, np.minimum(f1, f2))
        while float(np.max(hi - lo)) > refine_step:
            left = f1 < f2
            hi = np.where(left, x2, hi)
            lo = np.where(left, lo, x1)
            x1n = hi - inv * (hi - lo)
            x2n = lo + inv * (hi - lo)
            fe = dist_at(np.where(left, x1n, x2n))
            x1, x2, f1, f2 = (np.where(left, x1n, x2),
                              np.where(left, x1, x2n),
                              np.where(left, fe, f2),
                              np.where(left, f1, fe))
            best_val = np.minimum(best_val, fe)
        return best_val

    # p == 3: scalar search per offset over a cached solved grid
    fam = _p3_family_cached(dref)
    table = _p3_grid_cached(dref, fam, grid_points)
    out = np.empty(len(ms))
    for i, m in enumerate(ms):
        off = (int(m) - 1) % 3
        sel = (off + np.arange(K + 1)) % 3

        def dist_of(v: np.ndarray) -> float:
            ta = v[:3][sel]
            tb = v[3:][sel]
            return float(np.abs(aw[i] - ta) @ w + np.abs(bw[i] - tb) @ w)

        best = math.inf
        best_j = 0
        for jdx, (_, v) in enumerate(table):
            val = dist_of(v)
            if val < best:
                best, best_j = val, jdx
        th = np.array(table[best_j][0])
        step = 2.0 * math.pi / grid_points
        warm = table[best_j][1].copy()
        while step > refine_step:
            moved = False
            for c in range(2):
                for sgn in (1.0, -1.0):
                    cand = th.copy()
                    cand[c] += sgn * step
                    try:
                        v = fam.solve(cand[0], cand[1], warm=warm)
                    except ContinuationDiverged:
                        continue
                    val = dist_of(v)
                    if val < best:
                        best, th, warm, moved = val, cand, v, True
            if not moved:
                step *= 0.5
        out[i] = best
    return out


def _p3_grid_cached(dref: Discriminant, fam: _P3Family, grid_points: int):
    cache = getattr(dref, "_p3_grid", None)
    if cache is not None and cache[0] == grid_points:
        return cache[1]
    step = 2.0 * math.pi / grid_points
    table = []
    warm = None
    for i in range(grid_points):
        rng = range(grid_points) if i % 2 == 0 else range(grid_points - 1, -1, -1)
        for j in rng:
            th = (i * step, j * step)
            try:
                v = fam.solve(th[0], th[1], warm=warm)
            except ContinuationDiverged:
                continue
            warm = v
            table.append((th, v))
    object.__setattr__(dref, "_p3_grid", (grid_points, table))
    return table
