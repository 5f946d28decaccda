"""GF(2) linear algebra on bitmask-encoded vectors.

Vectors live in F_2^n and are encoded as Python ints (bit i set = coordinate
i is 1).  Bitstrings like "10" map to ints with the leftmost character as the
most significant bit.
"""

from __future__ import annotations

from itertools import combinations


def parity(mask: int, value: int) -> int:
    """Dot product mask . value over GF(2)."""
    return (mask & value).bit_count() & 1


def rank(vectors) -> int:
    """Rank of the span of ``vectors`` (Gaussian elimination on ints)."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def is_independent(vectors) -> bool:
    vectors = list(vectors)
    return rank(vectors) == len(vectors)


def reduced_basis(vectors) -> tuple[int, ...]:
    """Canonical (reduced row echelon) basis of the span, rows descending.

    Two vector sets span the same subspace iff their reduced bases are equal,
    so this doubles as a subspace signature.
    """
    rows: list[int] = []
    for v in vectors:
        for r in rows:
            v = min(v, v ^ r)
        if v:
            rows.append(v)
            rows.sort(reverse=True)
    # back-substitute: clear every pivot bit from the other rows
    for i, r in enumerate(rows):
        pivot = 1 << (r.bit_length() - 1)
        rows = [row ^ r if (j != i and row & pivot) else row for j, row in enumerate(rows)]
    return tuple(sorted(rows, reverse=True))


def span(vectors) -> frozenset[int]:
    """All GF(2) combinations of ``vectors`` (includes 0)."""
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return frozenset(out)


def subspaces(n: int, r: int) -> list[tuple[int, ...]]:
    """All rank-r subspaces of F_2^n as canonical bases, sorted.

    Brute force over r-combinations of nonzero vectors; fine for the desk
    scale this package targets (n <= ~5).
    """
    if not 0 <= r <= n:
        raise ValueError(f"rank {r} out of range for n={n}")
    if r == 0:
        return [()]
    seen = set()
    for combo in combinations(range(1, 1 << n), r):
        if is_independent(combo):
            seen.add(reduced_basis(combo))
    return sorted(seen)


def complement_bases(n: int, basis) -> list[tuple[int, ...]]:
    """Canonical bases of all rank-(n - len(basis)) complements of ``basis``.

    A complement W satisfies span(basis) + W = F_2^n with trivial overlap.
    """
    basis = tuple(basis)
    r = n - len(basis)
    out = []
    for cand in subspaces(n, r):
        if rank(basis + cand) == n:
            out.append(cand)
    return out


def mask_to_bits(mask: int, n: int) -> str:
    return format(mask, f"0{n}b")


def bits_to_mask(bits: str) -> int:
    return int(bits, 2) if bits else 0
