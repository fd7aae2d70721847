"""Shared random-instance generators for the property suites."""

from fractions import Fraction

from qrealize import Scalar


def random_poly(rng, alg, max_terms=3, max_degree=4, coeff_range=3):
    """Random exact-mode polynomial with bounded term count and degree."""
    p = alg.zero()
    n = alg.modes
    for _ in range(rng.randint(1, max_terms)):
        degree = rng.randint(0, max_degree)
        cre = [0] * n
        ann = [0] * n
        for _ in range(degree):
            slot = rng.randrange(2 * n)
            if slot < n:
                cre[slot] += 1
            else:
                ann[slot - n] += 1
        coeff = Scalar(
            Fraction(rng.randint(-coeff_range, coeff_range)),
            Fraction(rng.randint(-coeff_range, coeff_range)),
        )
        p = p + alg.monomial(cre, ann, coeff)
    return p
