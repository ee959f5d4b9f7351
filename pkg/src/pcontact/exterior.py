"""Sign bookkeeping for exterior monomials.

A monomial is a strictly increasing tuple of generator indices.  With n
complex dimensions, index k < n stands for the (1,0)-generator number k+1
and index n + k for its conjugate, so plain ascending order is exactly the
canonical order "unbarred ascending, then barred ascending".
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations


@lru_cache(maxsize=None)
def wedge_mono(m1: tuple, m2: tuple):
    """Return (sign, m1 ^ m2) or None when a generator repeats."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    if m1[-1] < m2[0]:
        return 1, m1 + m2
    s2 = set(m2)
    for g in m1:
        if g in s2:
            return None
    # count inversions between m1 and m2 while merging
    inv = 0
    j = 0
    out = []
    i = 0
    l1, l2 = len(m1), len(m2)
    while i < l1 and j < l2:
        if m1[i] < m2[j]:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            inv += l1 - i
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return (-1 if inv & 1 else 1), tuple(out)


@lru_cache(maxsize=None)
def contract_mono(g: int, m: tuple):
    """Left interior product of the dual vector of generator g into m."""
    for pos, h in enumerate(m):
        if h == g:
            return (-1 if pos & 1 else 1), m[:pos] + m[pos + 1:]
        if h > g:
            break
    return None


@lru_cache(maxsize=None)
def conj_mono(m: tuple, n: int):
    """Swap barred and unbarred generators; return (sign, canonical monomial)."""
    unb = tuple(g + n for g in m if g < n)
    bar = tuple(g - n for g in m if g >= n)
    # conjugate of phi_I ^ phibar_J is phibar_I ^ phi_J = (-1)^{|I||J|} phi_J ^ phibar_I
    sign = -1 if (len(unb) * len(bar)) & 1 else 1
    return sign, bar + unb


@lru_cache(maxsize=None)
def bidegree(m: tuple, n: int) -> tuple:
    p = 0
    for g in m:
        if g < n:
            p += 1
    return p, len(m) - p


@lru_cache(maxsize=None)
def basis_monomials(n: int, p: int, q: int) -> tuple:
    """Canonical basis of bidegree (p,q): I lexicographic, then J lexicographic."""
    out = []
    for I in combinations(range(n), p):
        for J in combinations(range(n, 2 * n), q):
            out.append(I + J)
    return tuple(out)


@lru_cache(maxsize=None)
def degree_monomials(n: int, k: int) -> tuple:
    """All monomials of total degree k, grouped by bidegree (k,0), (k-1,1), ..."""
    out = []
    for p in range(min(k, n), -1, -1):
        q = k - p
        if q > n:
            continue
        out.extend(basis_monomials(n, p, q))
    return tuple(out)


def split_mono(m: tuple, n: int) -> tuple:
    """Return 1-based (I, J) index tuples."""
    return (tuple(g + 1 for g in m if g < n), tuple(g - n + 1 for g in m if g >= n))


def join_mono(I, J, n: int) -> tuple:
    """Build the canonical monomial and the sign of sorting phi_I ^ phibar_J."""
    gens = [i - 1 for i in I] + [n + j - 1 for j in J]
    for g in gens:
        if g < 0 or g >= 2 * n:
            raise ValueError(f"index out of range for n={n}")
    if len(set(gens)) != len(gens):
        return 0, None
    # parity of the sorting permutation
    sign = 1
    arr = list(gens)
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            if arr[i] > arr[j]:
                sign = -sign
    return sign, tuple(sorted(arr))
