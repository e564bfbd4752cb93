"""Finite-dimensional C*-algebras ``M_{n_1}(C) + ... + M_{n_K}(C)``.

Elements are tuples of square complex blocks. A flat coordinate vector
(blocks concatenated, each row-major) is used wherever linear algebra over
the algebra is needed; on flat vectors the Euclidean inner product is the
tracial pairing ``Tr(a* b)`` summed over blocks.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, GrammarError, ShapeError
from .jacobi import jacobi_eigh
from .tolerances import DEFAULT_TOL, Tolerances, scaled


@dataclass(frozen=True)
class AlgebraDescriptor:
    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(n) for n in self.blocks)
        if not blocks or any(n < 1 for n in blocks):
            raise ShapeError(f"invalid block dimensions {self.blocks!r}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def parse(cls, text: str) -> "AlgebraDescriptor":
        """Parse ``"M2+M3+C"`` into blocks ``(2, 3, 1)``."""
        parts = [p.strip() for p in text.split("+")]
        blocks = []
        for part in parts:
            if part == "C":
                blocks.append(1)
                continue
            m = re.fullmatch(r"M(\d+)", part)
            if not m or int(m.group(1)) < 1:
                raise GrammarError(f"bad algebra block {part!r} in {text!r}")
            blocks.append(int(m.group(1)))
        return cls(tuple(blocks))

    def __str__(self) -> str:
        return "+".join("C" if n == 1 else f"M{n}" for n in self.blocks)

    @cached_property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, pos = [], 0
        for n in self.blocks:
            out.append(pos)
            pos += n * n
        return tuple(out)

    def zero(self) -> "AlgElement":
        return AlgElement(self, tuple(np.zeros((n, n), dtype=complex) for n in self.blocks))

    def unit(self) -> "AlgElement":
        return AlgElement(self, tuple(np.eye(n, dtype=complex) for n in self.blocks))

    def matrix_unit(self, block: int, i: int, j: int) -> "AlgElement":
        """``e_{ij}`` in block ``block`` (all indices 0-based)."""
        mats = [np.zeros((n, n), dtype=complex) for n in self.blocks]
        mats[block][i, j] = 1.0
        return AlgElement(self, tuple(mats))

    def block_unit(self, block: int) -> "AlgElement":
        mats = [np.zeros((n, n), dtype=complex) for n in self.blocks]
        mats[block] = np.eye(self.blocks[block], dtype=complex)
        return AlgElement(self, tuple(mats))

    def basis(self) -> list["AlgElement"]:
        """Matrix units, in flat-coordinate order."""
        return [
            self.matrix_unit(k, i, j)
            for k, n in enumerate(self.blocks)
            for i in range(n)
            for j in range(n)
        ]

    def from_flat(self, vec) -> "AlgElement":
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (self.dim,):
            raise ShapeError(f"flat vector of length {vec.shape} for algebra of dim {self.dim}")
        return AlgElement(
            self,
            tuple(vec[o:o + n * n].reshape(n, n).copy() for o, n in zip(self.offsets, self.blocks)),
        )

    def parse_element(self, text: str) -> "AlgElement":
        """Parse a sum of ``1``, ``blockK``, ``eIJ`` or ``eIJ@K`` tokens (1-based)."""
        total = self.zero()
        for token in (t.strip() for t in text.split("+")):
            if token == "1":
                total = total + self.unit()
                continue
            m = re.fullmatch(r"block(\d+)", token)
            if m:
                k = int(m.group(1)) - 1
                if not 0 <= k < len(self.blocks):
                    raise GrammarError(f"block index out of range in {token!r}")
                total = total + self.block_unit(k)
                continue
            m = re.fullmatch(r"e(\d)(\d)(?:@(\d+))?", token)
            if not m:
                raise GrammarError(f"bad element token {token!r}")
            i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
            k = int(m.group(3)) - 1 if m.group(3) else 0
            if not (0 <= k < len(self.blocks) and 0 <= i < self.blocks[k] and 0 <= j < self.blocks[k]):
                raise GrammarError(f"matrix unit out of range in {token!r}")
            total = total + self.matrix_unit(k, i, j)
        return total


class AlgElement:
    """Immutable block-diagonal element of a finite-dimensional C*-algebra."""

    __slots__ = ("descriptor", "blocks")

    def __init__(self, descriptor: AlgebraDescriptor, blocks: Sequence[np.ndarray]):
        blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
        if len(blocks) != len(descriptor.blocks) or any(
            b.shape != (n, n) for b, n in zip(blocks, descriptor.blocks)
        ):
            raise ShapeError(f"block shapes {[b.shape for b in blocks]} do not match {descriptor}")
        for b in blocks:
            b.flags.writeable = False
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgElement is immutable")

    def _check(self, other: "AlgElement"):
        if not isinstance(other, AlgElement) or other.descriptor != self.descriptor:
            raise ShapeError("algebra elements over different descriptors")

    def __add__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.descriptor, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.descriptor, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgElement":
        return AlgElement(self.descriptor, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            self._check(other)
            return AlgElement(self.descriptor, [a @ b for a, b in zip(self.blocks, other.blocks)])
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    def scale(self, lam: complex) -> "AlgElement":
        return AlgElement(self.descriptor, [lam * a for a in self.blocks])

    def star(self) -> "AlgElement":
        return AlgElement(self.descriptor, [a.conj().T for a in self.blocks])

    def flat(self) -> np.ndarray:
        return np.concatenate([b.reshape(-1) for b in self.blocks])

    def norm(self) -> float:
        return norm(self)

    def __repr__(self) -> str:
        return f"AlgElement({self.descriptor}, {[b.tolist() for b in self.blocks]})"

    def to_json(self) -> list:
        return element_to_json(self)


def add(a: AlgElement, b: AlgElement) -> AlgElement:
    return a + b


def mul(a: AlgElement, b: AlgElement) -> AlgElement:
    return a * b


def scal(lam: complex, a: AlgElement) -> AlgElement:
    return a.scale(lam)


def star(a: AlgElement) -> AlgElement:
    return a.star()


def unit(descriptor: AlgebraDescriptor) -> AlgElement:
    return descriptor.unit()


def basis(descriptor: AlgebraDescriptor) -> list[AlgElement]:
    return descriptor.basis()


class Spectrum(NamedTuple):
    eigenvalues: tuple[np.ndarray, ...]
    unitaries: tuple[np.ndarray, ...]

    def min(self) -> float:
        return min(float(w[-1]) for w in self.eigenvalues)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(w))) for w in self.eigenvalues)


class PositivityVerdict(NamedTuple):
    positive: bool
    witness: float | str | None
    min_eigenvalue: float | None

    def __bool__(self) -> bool:
        return self.positive


def _fro(a: AlgElement) -> float:
    return math.sqrt(sum(float(np.vdot(b, b).real) for b in a.blocks))


def hermitian_defect(a: AlgElement) -> tuple[float, float]:
    """Return ``(defect, scale)`` bounding ``norm(a - a*)`` and ``norm(a)``.

    Frobenius norms give an upper bound on the defect and, divided by
    ``sqrt(n)``, a lower bound on the scale, so the test they feed is never
    looser than the spectral-norm version.
    """
    defect = math.sqrt(sum(float(np.sum(np.abs(b - b.conj().T) ** 2)) for b in a.blocks))
    scale = max(
        math.sqrt(float(np.vdot(b, b).real) / b.shape[0]) for b in a.blocks
    )
    return defect, scale


def is_hermitian(a: AlgElement, tol: Tolerances = DEFAULT_TOL) -> bool:
    defect, scale = hermitian_defect(a)
    return defect <= scaled(tol.herm, scale)


def hermitian_eig(a: AlgElement, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    if not is_hermitian(a, tol):
        raise DomainError("hermitian_eig: element is not self-adjoint")
    ws, us = [], []
    for b in a.blocks:
        w, u = jacobi_eigh(b, tol=tol.jacobi)
        ws.append(w)
        us.append(u)
    return Spectrum(tuple(ws), tuple(us))


def is_positive(a: AlgElement, tol: Tolerances = DEFAULT_TOL) -> PositivityVerdict:
    if not is_hermitian(a, tol):
        return PositivityVerdict(False, "not self-adjoint", None)
    spec = hermitian_eig(a, tol)
    lo = spec.min()
    if lo >= -scaled(tol.pos, spec.max_abs()):
        return PositivityVerdict(True, None, lo)
    return PositivityVerdict(False, lo, lo)


def sqrt_positive(a: AlgElement, tol: Tolerances = DEFAULT_TOL) -> AlgElement:
    if not is_hermitian(a, tol):
        raise DomainError("sqrt_positive: element is not self-adjoint")
    spec = hermitian_eig(a, tol)
    floor = -scaled(tol.pos, spec.max_abs())
    out = []
    for w, u in zip(spec.eigenvalues, spec.unitaries):
        if w[-1] < floor:
            raise DomainError(f"sqrt_positive: negative eigenvalue {w[-1]:.3e}")
        r = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
        out.append(0.5 * (r + r.conj().T))
    return AlgElement(a.descriptor, out)


def norm(a: AlgElement) -> float:
    """C*-norm: largest singular value over all blocks."""
    best = 0.0
    for b in a.blocks:
        if b.shape[0] == 1:
            best = max(best, abs(b[0, 0]))
            continue
        w, _ = jacobi_eigh(b.conj().T @ b)
        best = max(best, math.sqrt(max(0.0, float(w[0]))))
    return best


def is_zero(a: AlgElement, tol: Tolerances = DEFAULT_TOL) -> bool:
    return all(float(np.max(np.abs(b))) <= tol.zero for b in a.blocks)


def left_mult_matrix(a: AlgElement) -> np.ndarray:
    """Flat-coordinate matrix of ``c -> a c``."""
    return _block_diag([np.kron(b, np.eye(b.shape[0])) for b in a.blocks])


def right_mult_matrix(a: AlgElement) -> np.ndarray:
    """Flat-coordinate matrix of ``c -> c a``."""
    return _block_diag([np.kron(np.eye(b.shape[0]), b.T) for b in a.blocks])


def _block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    size = sum(m.shape[0] for m in mats)
    out = np.zeros((size, size), dtype=complex)
    pos = 0
    for m in mats:
        k = m.shape[0]
        out[pos:pos + k, pos:pos + k] = m
        pos += k
    return out


def random_element(descriptor: AlgebraDescriptor, rng: np.random.Generator) -> AlgElement:
    """Entries i.i.d. standard complex normal (unit variance)."""
    return AlgElement(
        descriptor,
        [(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
         for n in descriptor.blocks],
    )


def random_hermitian(descriptor: AlgebraDescriptor, rng: np.random.Generator) -> AlgElement:
    a = random_element(descriptor, rng)
    return (a + a.star()).scale(0.5)


def random_positive(descriptor: AlgebraDescriptor, rng: np.random.Generator) -> AlgElement:
    a = random_element(descriptor, rng)
    return a.star() * a


def element_to_json(a: AlgElement) -> list:
    return [[[[float(z.real), float(z.imag)] for z in row] for row in b] for b in a.blocks]


def element_from_json(descriptor: AlgebraDescriptor, data: list) -> AlgElement:
    blocks = [np.array([[complex(re, im) for re, im in row] for row in b], dtype=complex) for b in data]
    return AlgElement(descriptor, blocks)
