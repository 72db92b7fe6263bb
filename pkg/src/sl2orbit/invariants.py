"""Conjugation invariants of n-tuples of 2x2 matrices.

With ``t_j = tr A_j``, ``t_jk = tr A_j A_k`` and ``t_jkl = tr A_j A_k A_l``:

* ``tau_jk   = t_jk - t_j t_k / 2``
* ``nu_j     = tau_jj``
* ``sigma_jk = tau_jk^2 - tau_jj tau_kk``
* ``delta_jkl = (t_jkl - t_lkj)^2``

All indices are 1-based. These hold on arbitrary tuples; on SL(2, C)
tuples ``sigma_jk = tr[A_j, A_k] - 2``.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .core import Word, as_tuple
from .errors import CoordinateUnavailable, InvalidInput, NotSL2

FINGERPRINT_TOL = 1e-7


def _comp(A, j):
    if not 1 <= j <= A.n:
        raise IndexError(f"index {j} out of range 1..{A.n}")
    return A.matrices[j - 1]


def _tr(*mats):
    m = mats[0]
    for other in mats[1:]:
        m = m @ other
    return complex(m[0, 0] + m[1, 1])


def tau(A, j, k):
    A = as_tuple(A)
    Aj, Ak = _comp(A, j), _comp(A, k)
    return _tr(Aj, Ak) - 0.5 * _tr(Aj) * _tr(Ak)


def nu(A, j):
    return tau(A, j, j)


def sigma(A, j, k):
    A = as_tuple(A)
    return tau(A, j, k) ** 2 - tau(A, j, j) * tau(A, k, k)


def delta(A, j, k, l):
    A = as_tuple(A)
    Aj, Ak, Al = _comp(A, j), _comp(A, k), _comp(A, l)
    return (_tr(Aj, Ak, Al) - _tr(Al, Ak, Aj)) ** 2


def delta_root(A, j, k, l):
    """``t_jkl - t_lkj``, a square root of ``delta`` that is linear in the entries."""
    A = as_tuple(A)
    Aj, Ak, Al = _comp(A, j), _comp(A, k), _comp(A, l)
    return _tr(Aj, Ak, Al) - _tr(Al, Ak, Aj)


def gram(A, j, k, l):
    """Symmetric 3x3 matrix of ``tau`` values on indices ``(j, k, l)``.

    Its leading 2x2 minor is ``-sigma_jk`` and its determinant is
    ``-delta_jkl / 2``.
    """
    A = as_tuple(A)
    idx = (j, k, l)
    G = np.empty((3, 3), dtype=complex)
    for r in range(3):
        for c in range(r, 3):
            G[r, c] = G[c, r] = tau(A, idx[r], idx[c])
    return G


# Entry formulas in terms of a, b, c, d and e = a - d; used as an
# independent check of the trace formulas.

def _abce(m):
    return m[0, 1], m[1, 0], m[0, 0] - m[1, 1]


def tau_entries(A, j, k):
    A = as_tuple(A)
    bj, cj, ej = _abce(_comp(A, j))
    bk, ck, ek = _abce(_comp(A, k))
    return complex(ej * ek / 2 + bj * ck + cj * bk)


def sigma_entries(A, j, k):
    A = as_tuple(A)
    bj, cj, ej = _abce(_comp(A, j))
    bk, ck, ek = _abce(_comp(A, k))
    return complex((bj * ck - cj * bk) ** 2 - (bj * ek - ej * bk) * (cj * ek - ej * ck))


def sigma_sl2(A, j, k):
    """``t_j^2 + t_k^2 + t_jk^2 - t_j t_k t_jk - 4``; equals sigma on SL(2, C)."""
    A = as_tuple(A)
    Aj, Ak = _comp(A, j), _comp(A, k)
    tj, tk, tjk = _tr(Aj), _tr(Ak), _tr(Aj, Ak)
    return tj * tj + tk * tk + tjk * tjk - tj * tk * tjk - 4


# Magnus coordinates: (z1, z2, z12, z3, z13, z23, ..., zn, z1n, z2n)

def magnus_length(n):
    return 3 * n - 3


def magnus_n(length):
    if length < 3 or length % 3:
        raise InvalidInput(f"trace vector length {length} is not 3n-3 for any n >= 2")
    return length // 3 + 1


def magnus_index(j, k=None):
    """Position of ``z_j`` (``k is None``) or ``z_jk`` in the Magnus layout."""
    if k is None:
        if j in (1, 2):
            return j - 1
        return 3 * (j - 3) + 3
    j, k = min(j, k), max(j, k)
    if j == k or j > 2:
        raise CoordinateUnavailable(f"z_{j}{k} is not a Magnus coordinate")
    if k == 2:
        return 2
    return 3 * (k - 3) + 3 + j


def _coords(z):
    arr = np.asarray(getattr(z, "coords", z), dtype=complex)
    if arr.ndim != 1:
        raise InvalidInput("trace vector must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("trace vector has non-finite entries")
    return arr


def _zget(z, n, j, k=None):
    if not 1 <= j <= n or (k is not None and not 1 <= k <= n):
        raise CoordinateUnavailable(f"index out of range 1..{n}")
    return complex(z[magnus_index(j, k)])


def nu_z(z, j):
    z = _coords(z)
    zj = _zget(z, magnus_n(len(z)), j)
    return zj * zj / 2 - 2


def tau_z(z, j, k):
    """``z_jk - z_j z_k / 2`` from Magnus coordinates (``j == k`` uses ``nu_z``)."""
    z = _coords(z)
    n = magnus_n(len(z))
    if j == k:
        return nu_z(z, j)
    return _zget(z, n, j, k) - 0.5 * _zget(z, n, j) * _zget(z, n, k)


def sigma_z(z, j, k):
    """``z_j^2 + z_k^2 + z_jk^2 - z_j z_k z_jk - 4`` from Magnus coordinates."""
    z = _coords(z)
    n = magnus_n(len(z))
    if j == k:
        _zget(z, n, j)
        return 0j
    zj, zk, zjk = _zget(z, n, j), _zget(z, n, k), _zget(z, n, j, k)
    return zj * zj + zk * zk + zjk * zjk - zj * zk * zjk - 4


# Fingerprint: traces over H_n = singles, pairs j<k, triples j<k<l (lex)

def fingerprint_size(n):
    return (n ** 3 + 5 * n) // 6


def fingerprint_words(n):
    """The words of H_n in fingerprint order."""
    words = [Word([j]) for j in range(1, n + 1)]
    words += [Word(list(c)) for c in combinations(range(1, n + 1), 2)]
    words += [Word(list(c)) for c in combinations(range(1, n + 1), 3)]
    return words


@dataclass(frozen=True, eq=False)
class Fingerprint:
    n: int
    values: np.ndarray

    def matches(self, other, tol=FINGERPRINT_TOL):
        return fingerprints_match(self, other, tol)


def fingerprints_match(f, g, tol=FINGERPRINT_TOL):
    """Per-coordinate ``|f_i - g_i| <= tol * max(1, |f_i|, |g_i|)``."""
    a = np.asarray(getattr(f, "values", f))
    b = np.asarray(getattr(g, "values", g))
    if a.shape != b.shape:
        return False
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return bool(np.all(np.abs(a - b) <= tol * scale))


def fingerprint(A):
    """Traces of the H_n words; determines the orbit of a stable SL(2, C) tuple."""
    A = as_tuple(A)
    if not A.sl2:
        raise NotSL2("fingerprint is defined for SL(2, C) tuples")
    return Fingerprint(A.n, kernels.lex_traces(A.matrices))


def raw_fingerprint(A):
    """H_n traces without the SL(2, C) check."""
    A = as_tuple(A)
    return Fingerprint(A.n, kernels.lex_traces(A.matrices))


def vn_words(n):
    """All positive words of length 1..3 (repeats allowed), for V_n orbits."""
    out = []
    for length in (1, 2, 3):
        for combo in np.ndindex(*([n] * length)):
            out.append(Word([c + 1 for c in combo]))
    return out


def vn_fingerprint(A):
    """Traces of every positive word of length at most 3; separates closed GL(2) orbits."""
    A = as_tuple(A)
    n = A.n
    idx, offsets = [], [0]
    for length in (1, 2, 3):
        for combo in np.ndindex(*([n] * length)):
            idx.extend(combo)
            offsets.append(len(idx))
    return Fingerprint(n, kernels.chain_traces(A.matrices, idx, offsets))


def invariant_table(A):
    """All tau, nu, sigma and delta values of a tuple, keyed by index string."""
    A = as_tuple(A)
    n = A.n
    out = {"nu": {}, "tau": {}, "sigma": {}, "delta": {}}
    for j in range(1, n + 1):
        out["nu"][f"{j}"] = nu(A, j)
    for j, k in combinations(range(1, n + 1), 2):
        out["tau"][f"{j},{k}"] = tau(A, j, k)
        out["sigma"][f"{j},{k}"] = sigma(A, j, k)
    for j, k, l in combinations(range(1, n + 1), 3):
        out["delta"][f"{j},{k},{l}"] = delta(A, j, k, l)
    return out

