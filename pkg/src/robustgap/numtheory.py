"""Small-integer number theory: primality, prime search, roots and CRT."""
from __future__ import annotations

# deterministic for every n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng, *, mod4: int | None = None, max_tries: int = 100_000) -> int:
    """Uniformly chosen candidate with top bit set, retried until prime."""
    if bits < 3:
        raise ValueError("need at least 3 bits")
    if bits > 80:
        raise ValueError("primality test is only deterministic below 80 bits")
    for _ in range(max_tries):
        c = rng.randbelow(1 << (bits - 1)) | (1 << (bits - 1)) | 1
        if mod4 is not None and c % 4 != mod4:
            continue
        if is_prime(c):
            return c
    raise RuntimeError(f"no {bits}-bit prime found in {max_tries} tries")


def factorize(n: int) -> dict[int, int]:
    """Trial division; adequate below 2**40."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def primitive_root(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    factors = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise AssertionError("unreachable for prime p")


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def crt_pair(a: int, p: int, b: int, q: int) -> int:
    """The x mod pq with x = a (mod p), x = b (mod q)."""
    return (a + p * ((b - a) * pow(p, -1, q) % q)) % (p * q)
