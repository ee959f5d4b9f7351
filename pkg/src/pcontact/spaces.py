"""Coordinate views of invariant form spaces and the linear solves built on them.

Every bidegree space Λ^{p,q} is identified with a column space through its
canonical monomial basis; vector-valued (0,q)-forms use the basis
φ̄_J⊗ξ_k with J in canonical order and k varying fastest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from .exterior import basis_monomials
from .invariant import InvariantForm, InvariantVectorForm, WrongBidegreeError
from .scalars import (ONE, ZERO, Matrix, kernel_of_columns, rank_of, row_space_basis, rref_solve,
                      solve_columns)


class FormSpace:
    """Λ^{p,q} of the invariant complex with its monomial basis."""

    def __init__(self, n: int, p: int, q: int):
        self.n, self.p, self.q = n, p, q
        self.basis = basis_monomials(n, p, q)
        self.index = {m: i for i, m in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vec(self, u: InvariantForm) -> tuple:
        v = [ZERO] * self.dim
        for m, c in u.terms.items():
            i = self.index.get(m)
            if i is None:
                raise WrongBidegreeError(f"form has a term outside Λ^{{{self.p},{self.q}}}")
            v[i] = c
        return tuple(v)

    def element(self, v: Sequence) -> InvariantForm:
        return InvariantForm(self.n, {m: c for m, c in zip(self.basis, v) if c})

    def unit(self, i: int) -> InvariantForm:
        return InvariantForm(self.n, {self.basis[i]: ONE})

    def units(self) -> List[InvariantForm]:
        return [self.unit(i) for i in range(self.dim)]

    def label(self) -> str:
        return f"Λ^{{{self.p},{self.q}}}"


class VectorFormSpace:
    """Λ^{0,q} ⊗ g^{1,0}, basis φ̄_J⊗ξ_k (J-major, k fastest)."""

    def __init__(self, n: int, q: int):
        self.n, self.q = n, q
        self.forms = basis_monomials(n, 0, q)
        self.basis = [(J, k) for J in self.forms for k in range(n)]
        self.index = {b: i for i, b in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vec(self, theta: InvariantVectorForm) -> tuple:
        v = [ZERO] * self.dim
        for k, f in theta.components.items():
            for m, c in f.terms.items():
                i = self.index.get((m, k))
                if i is None:
                    raise WrongBidegreeError(f"vector form is not of type (0,{self.q})")
                v[i] = c
        return tuple(v)

    def element(self, v: Sequence) -> InvariantVectorForm:
        comps: dict = {}
        for (J, k), c in zip(self.basis, v):
            if c:
                comps.setdefault(k, {})[J] = c
        return InvariantVectorForm(self.n, {k: InvariantForm(self.n, t) for k, t in comps.items()})

    def unit(self, i: int) -> InvariantVectorForm:
        J, k = self.basis[i]
        return InvariantVectorForm(self.n, {k: InvariantForm(self.n, {J: ONE})})

    def units(self) -> list:
        return [self.unit(i) for i in range(self.dim)]

    def label(self) -> str:
        return f"Λ^{{0,{self.q}}}⊗g^{{1,0}}"


class FrameSpace:
    """Constant (1,0)-vectors, coordinates over ξ_1..ξ_n."""

    def __init__(self, n: int):
        self.n = n

    @property
    def dim(self) -> int:
        return self.n

    def vec(self, theta: InvariantVectorForm) -> tuple:
        v = [ZERO] * self.n
        for k, f in theta.components.items():
            v[k] = f.terms.get((), ZERO)
        return tuple(v)

    def element(self, v: Sequence) -> InvariantVectorForm:
        return InvariantVectorForm(self.n, {k: InvariantForm.scalar(self.n, c)
                                            for k, c in enumerate(v) if c})

    def unit(self, i: int) -> InvariantVectorForm:
        return InvariantVectorForm.xi(self.n, i + 1)

    def units(self) -> list:
        return [self.unit(i) for i in range(self.n)]

    def label(self) -> str:
        return "g^{1,0}"


@dataclass
class SubspaceBasis:
    """RREF-canonical basis of a subspace, with its ambient space."""

    ambient: str
    vectors: tuple
    elements: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def to_json(self) -> dict:
        from .notation import format_form, format_vform
        out = []
        for e in self.elements:
            out.append(format_form(e) if isinstance(e, InvariantForm) else format_vform(e))
        return {"ambient": self.ambient, "dim": self.dim,
                "basis": out,
                "coordinates": [[str(c) for c in v] for v in self.vectors]}


def make_subspace(space, vectors: Sequence[Sequence]) -> SubspaceBasis:
    basis = row_space_basis(vectors, space.dim)
    return SubspaceBasis(space.label(), tuple(basis), [space.element(v) for v in basis])


def columns_of(op: Callable, src, tgt) -> list:
    return [tgt.vec(op(e)) for e in src.units()]


def image_vectors(op: Callable, src, tgt) -> list:
    """RREF basis of op(src) inside tgt."""
    return row_space_basis(columns_of(op, src, tgt), tgt.dim)


def kernel_vectors(op: Callable, src, tgt) -> list:
    """RREF basis of ker op inside src."""
    if src.dim == 0:
        return []
    ker = kernel_of_columns(columns_of(op, src, tgt), tgt.dim) if tgt.dim else \
        [tuple(ONE if i == j else ZERO for i in range(src.dim)) for j in range(src.dim)]
    return row_space_basis(ker, src.dim)


def preimage(op: Callable, src, tgt, target) -> Optional[object]:
    """Particular solution x in src of op(x) = target, or None."""
    b = tgt.vec(target)
    if src.dim == 0:
        return src.element(()) if not any(b) else None
    sol = solve_columns(columns_of(op, src, tgt), tgt.dim, b)
    return None if sol is None else src.element(sol)


def in_span(vectors: Sequence[Sequence], v: Sequence, dim: int) -> bool:
    if not any(v):
        return True
    base = rank_of(vectors, dim) if vectors else 0
    return rank_of(list(vectors) + [v], dim) == base


def intersect(a: Sequence[Sequence], b: Sequence[Sequence], dim: int) -> list:
    """RREF basis of span(a) ∩ span(b)."""
    if not a or not b:
        return []
    cols = [list(v) for v in a] + [[-x for x in v] for v in b]
    ker = kernel_of_columns(cols, dim)
    out = []
    for k in ker:
        w = [ZERO] * dim
        for coef, v in zip(k[:len(a)], a):
            if coef:
                for i, x in enumerate(v):
                    if x:
                        w[i] = w[i] + coef * x
        out.append(w)
    return row_space_basis(out, dim)


def cokernel_functional(columns: Sequence[Sequence], b: Sequence, dim: int) -> Optional[tuple]:
    """λ with λ·c = 0 for every column c and λ·b = 1, or None if b is in the span."""
    rows = [list(c) for c in columns] + [list(b)]
    rhs = [ZERO] * len(columns) + [ONE]
    res = rref_solve(Matrix.from_rows(rows), rhs)
    return res.solution if res.consistent else None


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (a bug, not a user error)."""
