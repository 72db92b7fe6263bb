"""Seeded tuple families shared by the test modules."""

import numpy as np

from sl2orbit.core import IDENTITY, NTuple, conjugate_tuple, random_sl2_element, random_tuple


def rng_for(seed):
    return np.random.default_rng(seed)


def cnormal(rng, size=None):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_upper_sl2(rng):
    a = cnormal(rng)
    while abs(a) < 0.2:
        a = cnormal(rng)
    return np.array([[a, cnormal(rng)], [0, 1 / a]])


def conjugated_upper(n, seed):
    """Upper-triangular SL2 tuple hidden by a random conjugation."""
    rng = rng_for(seed)
    U = NTuple([random_upper_sl2(rng) for _ in range(n)], sl2=True)
    return conjugate_tuple(random_sl2_element(rng), U)


def scalar_padded(n, seed):
    """A random pair (stable) or upper pair (reducible) followed by +-I."""
    rng = rng_for(seed)
    if seed % 2:
        head = list(random_tuple(2, seed).matrices)
    else:
        head = [random_upper_sl2(rng) for _ in range(2)]
    mats = head + [IDENTITY * rng.choice((-1, 1)) for _ in range(max(0, n - 2))]
    order = rng.permutation(len(mats))
    A = NTuple([mats[i] for i in order], sl2=True)
    return conjugate_tuple(random_sl2_element(rng), A)


def sigma3_triple(rng):
    """Stable triple with every sigma_jk = 0.

    A1 diagonal, A2 upper, A3 lower with e2 e3 + b2 c3 = 0 and e1 b2 c3 != 0.
    """
    while True:
        a1, a2, a3, b2 = cnormal(rng, 4)
        if min(abs(a1), abs(a2), abs(a3), abs(b2)) < 0.3:
            continue
        e1, e2, e3 = a1 - 1 / a1, a2 - 1 / a2, a3 - 1 / a3
        c3 = -e2 * e3 / b2
        if abs(e1 * b2 * c3) > 0.1:
            break
    return [
        np.diag([a1, 1 / a1]),
        np.array([[a2, b2], [0, 1 / a2]]),
        np.array([[a3, 0], [c3, 1 / a3]]),
    ]


def sigma3_instance(n, seed):
    """Sigma_3 triple padded to ``n`` with scalars and powers, then permuted and conjugated."""
    rng = rng_for(seed)
    mats = sigma3_triple(rng)
    while len(mats) < n:
        if rng.random() < 0.5:
            mats.append(IDENTITY * rng.choice((-1, 1)))
        else:
            mats.append(np.linalg.matrix_power(mats[int(rng.integers(3))], int(rng.integers(1, 3))))
    order = rng.permutation(len(mats))
    A = NTuple([mats[i] for i in order], sl2=True)
    return conjugate_tuple(random_sl2_element(rng), A)


def unipotent_pair(seed, stable):
    rng = rng_for(seed)
    b, c = cnormal(rng, 2)
    second = np.array([[1, 0], [c, 1]]) if stable else np.array([[1, b * 0.5], [0, 1]])
    A = NTuple([np.array([[1, b], [0, 1]]), second], sl2=True)
    return conjugate_tuple(random_sl2_element(rng), A)


def adversarial(seed):
    """One member of the adversarial families, chosen by ``seed``."""
    n = 1 + seed % 6
    kind = (seed // 6) % 4
    if kind == 0:
        return conjugated_upper(n, seed)
    if kind == 1:
        return scalar_padded(n, seed)
    if kind == 2:
        return sigma3_instance(max(3, n), seed)
    return unipotent_pair(seed, stable=bool(seed % 2))


def stability_corpus(random_count=1000, adversarial_count=240):
    out = []
    for s in range(random_count):
        out.append(random_tuple(1 + s % 6, 10_000 + s))
    for s in range(adversarial_count):
        out.append(adversarial(s))
    return out


def is_reducible_by_construction(A):
    """Reference answer not based on invariants: scan for a common eigenline."""
    from sl2orbit.structure import invariant_line_oracle

    return invariant_line_oracle(A) is not None
