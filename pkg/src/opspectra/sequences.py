"""Recurrence-coefficient sequences and their elementary functionals.

Three families of coefficient data appear throughout the toolkit:

* Jacobi parameters ``{a_n, b_n}`` (1-indexed) of a real tridiagonal
  recurrence, with ``a_n > 0``;
* Verblunsky coefficients ``{alpha_j}`` (0-indexed) in the open unit
  disc, with companion ``rho_j = sqrt(1 - |alpha_j|^2)``;
* block Jacobi parameters ``{A_j, B_j}`` of square complex blocks with
  ``A_j`` nonsingular and ``B_j`` Hermitian.

Sequences are either finite arrays or pure index->value generators with
a declared deviation bound; every downstream statistic asks for an
explicit window length, so generator-backed sequences are never
materialized beyond the largest window requested.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


class NonPositiveA(ValueError):
    """An off-diagonal coefficient a_n <= 0 was found (1-based index stored)."""

    def __init__(self, index: int, value: float):
        super().__init__(f"a_{index} = {value} must be > 0")
        self.index = index
        self.value = value


class UnboundedDeviation(ValueError):
    """sup_n(|a_n - 1| + |b_n|) exceeded a declared bound."""

    def __init__(self, index: int, value: float, bound: float):
        super().__init__(
            f"deviation |a-1|+|b| = {value} at n = {index} exceeds bound {bound}"
        )
        self.index = index
        self.value = value
        self.bound = bound


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


class JacobiParams:
    """Jacobi parameters a_1, a_2, ... (> 0) and b_1, b_2, ...

    Backed either by finite arrays or by index functions ``a_fn(n)``,
    ``b_fn(n)`` (n >= 1) with a declared deviation bound.  Windows are
    cached so repeated statistics over a ladder of N's stay cheap.
    """

    def __init__(self, a, b, bound: Optional[float] = None):
        a = _freeze(np.asarray(a, dtype=float))
        b = _freeze(np.asarray(b, dtype=float))
        if a.ndim != 1 or b.ndim != 1:
            raise ValueError("a and b must be one-dimensional")
        if len(b) == 0:
            raise ValueError("empty coefficient sequences")
        if len(a) not in (len(b), len(b) - 1):
            raise ValueError("need len(a) == len(b) or len(b) - 1")
        self._a = a
        self._b = b
        self._a_fn = None
        self._b_fn = None
        self.declared_bound = bound

    @classmethod
    def from_functions(cls, a_fn: Callable[[int], float],
                       b_fn: Callable[[int], float],
                       bound: float) -> "JacobiParams":
        """Unbounded sequence from 1-based index functions with a declared
        bound on |a_n - 1| + |b_n|."""
        self = cls.__new__(cls)
        self._a = None
        self._b = None
        self._a_fn = a_fn
        self._b_fn = b_fn
        self.declared_bound = float(bound)
        self._cache_n = 0
        self._cache_a = np.empty(0)
        self._cache_b = np.empty(0)
        return self

    @classmethod
    def free(cls, n: Optional[int] = None) -> "JacobiParams":
        """The free case a == 1, b == 0 (finite length n, or unbounded)."""
        if n is None:
            return cls.from_functions(lambda k: 1.0, lambda k: 0.0, bound=0.0)
        return cls(np.ones(n), np.zeros(n), bound=0.0)

    @property
    def is_finite(self) -> bool:
        return self._a_fn is None

    def __len__(self) -> int:
        if not self.is_finite:
            raise TypeError("generator-backed sequence has no length")
        return len(self._b)

    def available(self, want_a: int, want_b: int) -> bool:
        if not self.is_finite:
            return True
        return len(self._a) >= want_a and len(self._b) >= want_b

    def _fill_cache(self, n: int) -> None:
        if n <= self._cache_n:
            return
        m = max(n, 2 * self._cache_n, 64)
        ks = range(self._cache_n + 1, m + 1)
        new_a = np.array([self._a_fn(k) for k in ks], dtype=float)
        new_b = np.array([self._b_fn(k) for k in ks], dtype=float)
        self._cache_a = np.concatenate([self._cache_a, new_a])
        self._cache_b = np.concatenate([self._cache_b, new_b])
        self._cache_n = m

    def a_window(self, n: int) -> np.ndarray:
        """a_1..a_n as an array."""
        if n < 0:
            raise ValueError("window length must be >= 0")
        if self.is_finite:
            if n > len(self._a):
                raise ValueError(f"requested a_1..a_{n}, have {len(self._a)}")
            return self._a[:n]
        self._fill_cache(n)
        return self._cache_a[:n]

    def b_window(self, n: int) -> np.ndarray:
        """b_1..b_n as an array."""
        if n < 0:
            raise ValueError("window length must be >= 0")
        if self.is_finite:
            if n > len(self._b):
                raise ValueError(f"requested b_1..b_{n}, have {len(self._b)}")
            return self._b[:n]
        self._fill_cache(n)
        return self._cache_b[:n]

    def to_csv(self) -> str:
        """CSV with header ``n,a,b``; a blank a-field when a_N is absent."""
        if not self.is_finite:
            raise TypeError("serialize a finite window, not a generator")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a", "b"])
        for i in range(len(self._b)):
            a_val = repr(float(self._a[i])) if i < len(self._a) else ""
            w.writerow([i + 1, a_val, repr(float(self._b[i]))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "JacobiParams":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["n", "a", "b"]:
            raise ValueError("expected header n,a,b")
        a = [float(r[1]) for r in rows[1:] if r[1] != ""]
        b = [float(r[2]) for r in rows[1:]]
        return cls(np.array(a), np.array(b))


def validate_jacobi(params: JacobiParams, bound: Optional[float] = None,
                    probe: int = 1024) -> JacobiParams:
    """Check positivity of the a's and (optionally) a deviation bound.

    Finite sequences are checked in full; generator-backed ones over the
    first ``probe`` indices.  On success the checked params are returned
    and ``params.sup_deviation_checked`` records the windowed sup of
    |a_n - 1| + |b_n|.
    """
    n = probe if not params.is_finite else len(params._a)
    a = params.a_window(n)
    b = params.b_window(min(n + 1, probe) if not params.is_finite else len(params._b))
    bad = np.nonzero(a <= 0.0)[0]
    if len(bad):
        i = int(bad[0])
        raise NonPositiveA(i + 1, float(a[i]))
    dev = np.abs(a - 1.0) + np.abs(b[: len(a)])
    extra = np.abs(b[len(a):])  # b_N when a stops at N-1
    sup = float(max(dev.max(initial=0.0), extra.max(initial=0.0)))
    if bound is not None and sup > bound:
        idx = int(np.argmax(dev)) + 1
        raise UnboundedDeviation(idx, sup, bound)
    params.sup_deviation_checked = sup
    return params


def sup_deviation(params: JacobiParams, n: int) -> float:
    """max over the first n sites of |a_k - 1| + |b_k|.

    Monotone nondecreasing in n; zero exactly on a free window.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    a = params.a_window(n) if params.available(n, n) or not params.is_finite \
        else params.a_window(len(params._a))
    b = params.b_window(n)
    m = min(len(a), n)
    dev = np.abs(a[:m] - 1.0) + np.abs(b[:m])
    sup = float(dev.max(initial=0.0))
    if m < n:  # trailing b-sites with no paired a (finite a of length N-1)
        sup = max(sup, float(np.abs(b[m:n]).max(initial=0.0)))
    return sup


def rayleigh_cesaro(params: JacobiParams, n: int) -> float:
    """Quadratic form of the tridiagonal matrix on the normalized
    indicator of the first n sites: (1/n)(sum b_1..b_n + 2 sum a_1..a_{n-1}).

    Always bounded by the operator norm of the n-site truncation, which
    is how it constrains coefficient averages when the spectrum is known.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    b = params.b_window(n)
    a = params.a_window(n - 1) if n > 1 else np.empty(0)
    return (math.fsum(b) + 2.0 * math.fsum(a)) / n


class VerblunskyParams:
    """Verblunsky coefficients alpha_0, alpha_1, ... with |alpha_j| < 1.

    ``rho`` is the derived sequence sqrt(1 - |alpha_j|^2) in (0, 1].
    """

    def __init__(self, alpha):
        alpha = np.asarray(alpha, dtype=complex)
        if alpha.ndim != 1:
            raise ValueError("alpha must be one-dimensional")
        mod = np.abs(alpha)
        if np.any(mod >= 1.0):
            j = int(np.nonzero(mod >= 1.0)[0][0])
            raise ValueError(f"|alpha_{j}| = {mod[j]} must be < 1")
        self._alpha = _freeze(alpha)
        self._alpha_fn = None

    @classmethod
    def from_function(cls, alpha_fn: Callable[[int], complex]) -> "VerblunskyParams":
        """Unbounded sequence from a 0-based index function."""
        self = cls.__new__(cls)
        self._alpha = None
        self._alpha_fn = alpha_fn
        self._cache_n = 0
        self._cache = np.empty(0, dtype=complex)
        return self

    @property
    def is_finite(self) -> bool:
        return self._alpha_fn is None

    def __len__(self) -> int:
        if not self.is_finite:
            raise TypeError("generator-backed sequence has no length")
        return len(self._alpha)

    def alpha_window(self, n: int) -> np.ndarray:
        """alpha_0..alpha_{n-1}."""
        if self.is_finite:
            if n > len(self._alpha):
                raise ValueError(f"requested {n} coefficients, have {len(self._alpha)}")
            return self._alpha[:n]
        if n > self._cache_n:
            m = max(n, 2 * self._cache_n, 64)
            new = np.array([self._alpha_fn(j) for j in range(self._cache_n, m)],
                           dtype=complex)
            mod = np.abs(new)
            if np.any(mod >= 1.0):
                j = self._cache_n + int(np.nonzero(mod >= 1.0)[0][0])
                raise ValueError(f"|alpha_{j}| >= 1 from generator")
            self._cache = np.concatenate([self._cache, new])
            self._cache_n = m
        return self._cache[:n]

    def rho_window(self, n: int) -> np.ndarray:
        """rho_0..rho_{n-1} with rho_j^2 + |alpha_j|^2 = 1."""
        a = self.alpha_window(n)
        return np.sqrt(1.0 - np.abs(a) ** 2)

    def to_csv(self) -> str:
        """CSV with header ``j,re_alpha,im_alpha``, j from 0."""
        if not self.is_finite:
            raise TypeError("serialize a finite window, not a generator")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "re_alpha", "im_alpha"])
        for j, al in enumerate(self._alpha):
            w.writerow([j, repr(float(al.real)), repr(float(al.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "VerblunskyParams":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["j", "re_alpha", "im_alpha"]:
            raise ValueError("expected header j,re_alpha,im_alpha")
        alpha = [complex(float(r[1]), float(r[2])) for r in rows[1:]]
        return cls(np.array(alpha, dtype=complex))


class SingularBlock(ValueError):
    """An off-diagonal block failed the nonsingularity threshold."""

    def __init__(self, index: int, sigma_min: float, threshold: float):
        super().__init__(
            f"A_{index}: smallest singular value {sigma_min} <= {threshold}"
        )
        self.index = index


class WrongType(TypeError):
    """Operation requires a type-1 or type-3 tagged block sequence."""


@dataclass(frozen=True)
class BlockJacobiParams:
    """Block Jacobi parameters: off-diagonal blocks A_j, diagonal blocks B_j.

    ``A`` has one block fewer than ``B`` or the same count; blocks are
    ell x ell.  ``type_tag`` is one of "general", "type1" (each A_j
    positive definite), "type3" (each A_j lower triangular with positive
    diagonal).  Validation happens in :func:`validate_blocks`.
    """

    block_size: int
    A: tuple
    B: tuple
    type_tag: str = "general"

    def a_blocks(self, n: int) -> list:
        if n > len(self.A):
            raise ValueError(f"requested {n} A-blocks, have {len(self.A)}")
        return list(self.A[:n])

    def b_blocks(self, n: int) -> list:
        if n > len(self.B):
            raise ValueError(f"requested {n} B-blocks, have {len(self.B)}")
        return list(self.B[:n])

    def to_csv(self) -> str:
        """CSV ``k,kind(A|B),i,j,re,im``: 1-based block index k, 0-based
        row-major entry indices."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "kind", "i", "j", "re", "im"])
        ell = self.block_size
        for k, blk in enumerate(self.B, start=1):
            for i in range(ell):
                for j in range(ell):
                    z = complex(blk[i, j])
                    w.writerow([k, "B", i, j, repr(z.real), repr(z.imag)])
        for k, blk in enumerate(self.A, start=1):
            for i in range(ell):
                for j in range(ell):
                    z = complex(blk[i, j])
                    w.writerow([k, "A", i, j, repr(z.real), repr(z.imag)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, type_tag: str = "general") -> "BlockJacobiParams":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["k", "kind", "i", "j", "re", "im"]:
            raise ValueError("expected header k,kind,i,j,re,im")
        ell = 1 + max(int(r[2]) for r in rows[1:])
        data = {"A": {}, "B": {}}
        for r in rows[1:]:
            k, kind, i, j = int(r[0]), r[1], int(r[2]), int(r[3])
            blk = data[kind].setdefault(k, np.zeros((ell, ell), dtype=complex))
            blk[i, j] = complex(float(r[4]), float(r[5]))
        a = tuple(_freeze(data["A"][k]) for k in sorted(data["A"]))
        b = tuple(_freeze(data["B"][k]) for k in sorted(data["B"]))
        return cls(block_size=ell, A=a, B=b, type_tag=type_tag)


def validate_blocks(params: BlockJacobiParams,
                    singular_rtol: float = 1e-12,
                    hermitian_tol: float = 1e-12,
                    type_tol: float = 1e-10) -> BlockJacobiParams:
    """Check block shapes, nonsingularity of the A's, Hermiticity of the
    B's, and the declared type tag.

    The nonsingularity threshold is ``singular_rtol`` times the spectral
    norm of the block (configurable; the theory only demands
    nonsingular).
    """
    ell = params.block_size
    if len(params.A) not in (len(params.B), len(params.B) - 1):
        raise ValueError("need len(A) == len(B) or len(B) - 1")
    for k, blk in enumerate(params.B, start=1):
        if blk.shape != (ell, ell):
            raise ValueError(f"B_{k} has shape {blk.shape}, expected ({ell},{ell})")
        if np.max(np.abs(blk - blk.conj().T)) > hermitian_tol * max(1.0, np.max(np.abs(blk))):
            raise ValueError(f"B_{k} is not Hermitian to tolerance")
    for k, blk in enumerate(params.A, start=1):
        if blk.shape != (ell, ell):
            raise ValueError(f"A_{k} has shape {blk.shape}, expected ({ell},{ell})")
        s = np.linalg.svd(blk, compute_uv=False)
        if s[-1] <= singular_rtol * s[0]:
            raise SingularBlock(k, float(s[-1]), float(singular_rtol * s[0]))
        if params.type_tag == "type1":
            h = np.max(np.abs(blk - blk.conj().T))
            w = np.linalg.eigvalsh((blk + blk.conj().T) / 2.0)
            if h > type_tol * s[0] or w[0] <= 0.0:
                raise WrongType(f"A_{k} is not positive definite (type1 tag)")
        elif params.type_tag == "type3":
            upper = np.triu(blk, k=1)
            if np.max(np.abs(upper)) > type_tol * max(1.0, s[0]):
                raise WrongType(f"A_{k} has upper-triangular mass (type3 tag)")
            d = np.diagonal(blk)
            if np.max(np.abs(d.imag)) > type_tol or np.min(d.real) <= 0.0:
                raise WrongType(f"A_{k} diagonal not strictly positive (type3 tag)")
    return params


@dataclass(frozen=True)
class UnitaryChain:
    """Unitaries u_1 = I, u_2, u_3, ... realizing a block-parameter
    equivalence: B~_j = u_j^* B_j u_j, A~_j = u_j^* A_j u_{j+1}."""

    u: tuple

    def __post_init__(self):
        ell = self.u[0].shape[0]
        if np.max(np.abs(self.u[0] - np.eye(ell))) != 0.0:
            raise ValueError("u_1 must be the identity exactly")
        for k, m in enumerate(self.u, start=1):
            if np.max(np.abs(m.conj().T @ m - np.eye(ell))) > 1e-12:
                raise ValueError(f"u_{k} is not unitary to tolerance")

    def apply(self, params: BlockJacobiParams, type_tag: str = "general") -> BlockJacobiParams:
        """Transform block parameters by this chain (needs one unitary per
        B block plus a trailing one for the last A block)."""
        if len(self.u) < max(len(params.B), len(params.A) + 1):
            raise ValueError("chain shorter than block sequence")
        B = tuple(_freeze(self.u[j].conj().T @ params.B[j] @ self.u[j])
                  for j in range(len(params.B)))
        A = tuple(_freeze(self.u[j].conj().T @ params.A[j] @ self.u[j + 1])
                  for j in range(len(params.A)))
        return BlockJacobiParams(params.block_size, A, B, type_tag)

    def inverse(self) -> "UnitaryChain":
        return UnitaryChain(tuple(_freeze(m.conj().T) for m in self.u))
