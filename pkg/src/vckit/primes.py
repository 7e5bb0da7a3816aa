"""Miller-Rabin primality testing.

Bases are drawn from a PRNG seeded with the candidate itself, so results
are deterministic across runs and platforms for a fixed round count.
"""

import random

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
_SIEVE_LIMIT = 1000
_sieve_primes = []
for _n in range(2, _SIEVE_LIMIT):
    if all(_n % _p for _p in _sieve_primes):
        _sieve_primes.append(_n)


def is_prime(n: int, rounds: int = 40) -> bool:
    """Miller-Rabin with `rounds` random bases, after small-prime sieving."""
    if n < 2:
        return False
    for p in _sieve_primes:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
