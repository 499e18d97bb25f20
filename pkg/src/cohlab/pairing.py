"""Cantor pairing and the list/triple codings built on it."""
from math import isqrt


def pair(x: int, y: int) -> int:
    """Cantor pairing: ``(x + y)(x + y + 1)/2 + x``."""
    if x < 0 or y < 0:
        raise ValueError("pair() takes naturals")
    s = x + y
    return s * (s + 1) // 2 + x


def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("unpair() takes a natural")
    s = (isqrt(8 * n + 1) - 1) // 2
    x = n - s * (s + 1) // 2
    return x, s - x


def triple(a: int, b: int, c: int) -> int:
    return pair(pair(a, b), c)


def untriple(n: int) -> tuple[int, int, int]:
    ab, c = unpair(n)
    a, b = unpair(ab)
    return a, b, c


def _gamma(n: int) -> str:
    b = bin(n)[2:]
    return "0" * (len(b) - 1) + b


def encode_sequence(items) -> int:
    """Code a finite sequence of naturals as one natural, linear in total size.

    Each item ``v`` is written as the Elias gamma code of ``v + 1``; the
    concatenation, behind a leading 1 bit, is read in binary.
    """
    return int("1" + "".join(_gamma(v + 1) for v in items), 2)


def decode_sequence(code: int) -> list[int] | None:
    """Inverse of :func:`encode_sequence`; None when ``code`` is not in its image."""
    if code < 1:
        return None
    bits = bin(code)[3:]
    out, i, n = [], 0, len(bits)
    while i < n:
        zeros = 0
        while i < n and bits[i] == "0":
            zeros += 1
            i += 1
        if i + zeros + 1 > n:
            return None
        out.append(int(bits[i:i + zeros + 1], 2) - 1)
        i += zeros + 1
    return out
