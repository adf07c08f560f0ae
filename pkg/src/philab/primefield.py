"""Exact dense linear algebra over a prime field F_p.

All matrices are numpy int64 arrays with entries reduced to [0, p).  The
default modulus is the Mersenne prime 2^31 - 1, so a product of two residues
fits in an int64.  Matrix products are computed exactly by splitting factors
into 16-bit halves; no floating point rounding is ever allowed to reach a
stored entry.

Empty matrices (0 x n and n x 0) are legal throughout and represent maps to
or from the zero space.
"""

from __future__ import annotations

import numpy as np
from sympy import isprime

DEFAULT_PRIME = 2147483647

# int64 accumulation bounds for the split-multiply strategies
_INT64_CHUNK = 32768
_FLOAT_CHUNK = 1 << 19


class FieldConfigError(ValueError):
    """The configured modulus cannot support the requested computation."""


class NoSolutionError(ValueError):
    """A linear system that was required to be consistent is not."""


class PrimeField:
    """Arithmetic and Gaussian elimination over F_p, p an odd prime < 2^31."""

    __slots__ = ("p",)

    def __init__(self, p: int = DEFAULT_PRIME):
        if not isinstance(p, int) or p < 3 or p >= (1 << 31):
            raise FieldConfigError(f"modulus must be an odd prime below 2^31, got {p}")
        if not isprime(p):
            raise FieldConfigError(f"modulus {p} is not prime")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    # -- construction ------------------------------------------------------

    def asarray(self, data) -> np.ndarray:
        a = np.array(data, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
        return a % self.p

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def random_matrix(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)

    # -- scalar helpers ----------------------------------------------------

    def inv_scalar(self, x: int) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(x, self.p - 2, self.p)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return (-a) % self.p

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self.p

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a - b) % self.p

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        return (int(c) % self.p) * a % self.p

    # -- exact matrix product ----------------------------------------------

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact a @ b mod p."""
        m, k = a.shape
        k2, n = b.shape
        if k != k2:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if m == 0 or n == 0 or k == 0:
            return self.zeros(m, n)
        if m * n >= 4096 and k >= 64:
            return self._mul_float(a, b)
        return self._mul_int(a, b)

    def _mul_int(self, a, b):
        # a = hi*2^16 + lo; each partial product accumulates safely in int64
        # provided the inner dimension is chunked.
        p = self.p
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for s in range(0, a.shape[1], _INT64_CHUNK):
            ac = a[:, s:s + _INT64_CHUNK]
            bc = b[s:s + _INT64_CHUNK, :]
            hi = (ac >> 16) @ bc % p
            lo = (ac & 0xFFFF) @ bc % p
            out = (out + (hi << 16) + lo) % p
        return out

    def _mul_float(self, a, b):
        # four BLAS products on 16-bit halves; every float64 value stays
        # below 2^53 so the arithmetic is exact
        p = self.p
        r32 = (1 << 32) % p
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for s in range(0, a.shape[1], _FLOAT_CHUNK):
            ac = a[:, s:s + _FLOAT_CHUNK]
            bc = b[s:s + _FLOAT_CHUNK, :]
            a1 = (ac >> 16).astype(np.float64)
            a0 = (ac & 0xFFFF).astype(np.float64)
            b1 = (bc >> 16).astype(np.float64)
            b0 = (bc & 0xFFFF).astype(np.float64)
            m11 = (a1 @ b1).astype(np.int64) % p
            m10 = (a1 @ b0).astype(np.int64)
            m01 = (a0 @ b1).astype(np.int64)
            m00 = (a0 @ b0).astype(np.int64) % p
            mid = (m10 + m01) % p
            term = (m11 * r32 % p + (mid << 16) % p + m00) % p
            out = (out + term) % p
        return out

    def mul_many(self, *mats) -> np.ndarray:
        out = mats[0]
        for m in mats[1:]:
            out = self.mul(out, m)
        return out

    # -- elimination --------------------------------------------------------

    def rref(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot column indices."""
        p = self.p
        m = (np.array(a, dtype=np.int64)) % p
        rows, cols = m.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(m[r:, c])[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                m[[r, i]] = m[[i, r]]
            inv = pow(int(m[r, c]), p - 2, p)
            m[r] = m[r] * inv % p
            col = m[:, c].copy()
            col[r] = 0
            hit = np.nonzero(col)[0]
            if hit.size:
                m[hit] = (m[hit] - np.outer(col[hit], m[r])) % p
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self, a: np.ndarray) -> int:
        if a.shape[0] == 0 or a.shape[1] == 0:
            return 0
        return len(self.rref(a)[1])

    def kernel_basis(self, a: np.ndarray) -> np.ndarray:
        """Columns form a basis of {v : a v = 0}; width = cols - rank."""
        rows, cols = a.shape
        if cols == 0:
            return self.zeros(0, 0)
        if rows == 0:
            return self.identity(cols)
        red, pivots = self.rref(a)
        free = [c for c in range(cols) if c not in set(pivots)]
        ker = self.zeros(cols, len(free))
        for j, c in enumerate(free):
            ker[c, j] = 1
            for i, pc in enumerate(pivots):
                ker[pc, j] = (-red[i, c]) % self.p
        return ker

    def solve_right(self, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
        """Some x with a x = b, or None when b is outside the column space."""
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"shape mismatch solve {a.shape} vs {b.shape}")
        if b.shape[1] == 0 or a.shape[1] == 0:
            x = self.zeros(a.shape[1], b.shape[1])
            if np.any(b % self.p):
                return None
            return x
        aug = np.concatenate([a % self.p, b % self.p], axis=1)
        red, pivots = self.rref(aug)
        if pivots and pivots[-1] >= a.shape[1]:
            return None
        x = self.zeros(a.shape[1], b.shape[1])
        for i, pc in enumerate(pivots):
            x[pc] = red[i, a.shape[1]:]
        return x

    def require_solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        x = self.solve_right(a, b)
        if x is None:
            raise NoSolutionError("linear system has no solution")
        return x

    def solve_left(self, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
        """Some x with x a = b."""
        xt = self.solve_right(a.T.copy(), b.T.copy())
        return None if xt is None else xt.T.copy()

    def inv(self, a: np.ndarray) -> np.ndarray | None:
        if a.shape[0] != a.shape[1]:
            return None
        x = self.solve_right(a, self.identity(a.shape[0]))
        if x is None or self.rank(a) != a.shape[0]:
            return None
        return x

    def is_invertible(self, a: np.ndarray) -> bool:
        return a.shape[0] == a.shape[1] and self.rank(a) == a.shape[0]

    # -- spaces --------------------------------------------------------------

    def column_space_pivots(self, a: np.ndarray) -> list[int]:
        """Indices of columns of a forming a basis of the column space."""
        return self.rref(a)[1]

    def complement_unit_coords(self, basis: np.ndarray) -> list[int]:
        """Unit coordinates extending colspace(basis) to the full space.

        basis is d x r; the returned indices j are such that the unit vectors
        e_j together with the columns of basis span F_p^d.
        """
        d = basis.shape[0]
        if basis.shape[1] == 0:
            return list(range(d))
        _, pivots = self.rref(basis.T.copy())
        taken = set(pivots)
        return [j for j in range(d) if j not in taken]


def block_matrix(field: PrimeField, blocks, row_dims, col_dims) -> np.ndarray:
    """Assemble a matrix from a 2-d grid of blocks; None means a zero block."""
    out = field.zeros(sum(row_dims), sum(col_dims))
    r0 = 0
    for i, rd in enumerate(row_dims):
        c0 = 0
        for j, cd in enumerate(col_dims):
            blk = blocks[i][j]
            if blk is not None:
                if blk.shape != (rd, cd):
                    raise ValueError(f"block ({i},{j}) has shape {blk.shape}, expected {(rd, cd)}")
                out[r0:r0 + rd, c0:c0 + cd] = blk % field.p
            c0 += cd
        r0 += rd
    return out


def frozen(a: np.ndarray) -> np.ndarray:
    """Mark an array immutable (shared values are never mutated in place)."""
    a.flags.writeable = False
    return a
