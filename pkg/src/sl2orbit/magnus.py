"""The Magnus trace map, its inversion and fiber enumeration.

``forward_Tn`` sends an SL(2, C) n-tuple to

    (t1, t2, t12, t3, t13, t23, ..., tn, t1n, t2n)

in C^(3n-3). Off the locus ``sigma_12(z) = 0`` every fiber is a finite,
nonempty set of at most 2^(n-2) conjugation orbits, represented by a base
solution whose first two entries are symmetric and the variants obtained
by transposing entries 3..n. Inversion works in the quaternion form

    A = (alpha + i beta, gamma + i delta; -gamma + i delta, alpha - i beta)

for which ``tau_jk = -2 (beta_j beta_k + gamma_j gamma_k + delta_j delta_k)``
and transposition flips the sign of ``gamma``.

The V_n variant additionally records ``t_kk`` and drops the determinant
constraint; it separates closed GL(2, C) orbits.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .core import NTuple, as_tuple, quaternion_matrix
from .errors import InvalidBase, InvalidInput, NotApplicable, NotSL2
from .invariants import (
    fingerprint,
    fingerprints_match,
    magnus_index,
    magnus_length,
    magnus_n,
    vn_fingerprint,
)

DEFAULT_TOL_BRANCH = 1e-8
DEFAULT_TOL_RESIDUAL = 1e-8

NONEMPTY = "nonempty_finite"
EMPTY = "empty"
UNDETERMINED = "undetermined"


# -- trace vectors -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TraceVector:
    """Magnus coordinates ``(z1, z2, z12, ..., zk, z1k, z2k, ...)``."""

    n: int
    coords: np.ndarray

    @classmethod
    def from_coords(cls, z):
        z = _as_coords(z)
        return cls(magnus_n(len(z)), z)

    def single(self, j):
        return complex(self.coords[magnus_index(j)])

    def pair(self, j, k):
        return complex(self.coords[magnus_index(j, k)])

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True, eq=False)
class TraceVectorVn:
    """V_n coordinates ``(z1, z11, z2, z22, z12, ..., zk, zkk, z1k, z2k, ...)``."""

    n: int
    coords: np.ndarray

    @classmethod
    def from_coords(cls, z):
        z = _as_coords(z)
        return cls(vn_n(len(z)), z)


def _as_coords(z):
    arr = np.array(getattr(z, "coords", z), dtype=complex)
    if arr.ndim != 1:
        raise InvalidInput("trace vector must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("trace vector has non-finite entries")
    return arr


def vn_length(n):
    return 4 * n - 3


def vn_n(length):
    if length < 5 or (length + 3) % 4:
        raise InvalidInput(f"V_n trace vector length {length} is not 4n-3 for any n >= 2")
    return (length + 3) // 4


def _tn_chains(n):
    chains = [[0], [1], [0, 1]]
    for k in range(2, n):
        chains += [[k], [0, k], [1, k]]
    return chains


def _vn_chains(n):
    chains = [[0], [0, 0], [1], [1, 1], [0, 1]]
    for k in range(2, n):
        chains += [[k], [k, k], [0, k], [1, k]]
    return chains


def _chain_traces(mats, chains):
    idx = [i for c in chains for i in c]
    offsets = np.cumsum([0] + [len(c) for c in chains])
    return kernels.chain_traces(mats, idx, offsets)


def forward_Tn(A):
    """Magnus trace vector of an SL(2, C) tuple with ``n >= 2``."""
    A = as_tuple(A)
    if not A.sl2:
        raise NotSL2("the Magnus map is defined on SL(2, C) tuples")
    if A.n < 2:
        raise InvalidInput("the Magnus map needs n >= 2")
    return TraceVector(A.n, _chain_traces(A.matrices, _tn_chains(A.n)))


def forward_That_n(A):
    """V_n trace vector; no determinant constraint."""
    A = as_tuple(A)
    if A.n < 2:
        raise InvalidInput("the V_n trace map needs n >= 2")
    return TraceVectorVn(A.n, _chain_traces(A.matrices, _vn_chains(A.n)))


def _residual(A, z):
    return float(np.max(np.abs(forward_Tn(A).coords - z)))


def _residual_vn(A, z):
    return float(np.max(np.abs(forward_That_n(A).coords - z)))


# -- pullback invariants on Magnus coordinates -------------------------------------

def _zs(z, j):
    return complex(z[magnus_index(j)])


def _zp(z, j, k):
    return complex(z[magnus_index(j, k)])


def _tau(z, j, k):
    if j == k:
        return _zs(z, j) ** 2 / 2 - 2
    return _zp(z, j, k) - _zs(z, j) * _zs(z, k) / 2


def sigma12(z):
    z = _as_coords(z)
    return _tau(z, 1, 2) ** 2 - _tau(z, 1, 1) * _tau(z, 2, 2)


def swap12(z):
    """Coordinates after exchanging generators 1 and 2."""
    z = _as_coords(z)
    out = z.copy()
    out[0], out[1] = z[1], z[0]
    for k in range(3, magnus_n(len(z)) + 1):
        out[magnus_index(1, k)] = z[magnus_index(2, k)]
        out[magnus_index(2, k)] = z[magnus_index(1, k)]
    return out


# -- fibers --------------------------------------------------------------------------

@dataclass(frozen=True)
class Orbit:
    """A fiber representative; ``pattern[i]`` is ``-`` when entry ``i + 3`` is transposed."""

    tuple: NTuple
    pattern: str
    residual: float


@dataclass
class Fiber:
    status: str
    orbits: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    witness: Optional[NTuple] = None

    @property
    def nonempty(self):
        return self.status == NONEMPTY

    def __len__(self):
        return len(self.orbits)


def _patterns(m):
    """Sign patterns of length ``m`` in binary order, first entry most significant."""
    for code in range(2 ** m):
        yield "".join("-" if (code >> (m - 1 - i)) & 1 else "+" for i in range(m))


def _apply_pattern(mats, pattern):
    out = mats.copy()
    for i, s in enumerate(pattern):
        if s == "-":
            out[i + 2] = out[i + 2].T
    return out


def _enumerate(base, z, tol, forward, finger, residual_fn):
    mats = base.matrices
    n = base.n
    orbits, prints = [], []
    scale = max(1.0, float(np.max(np.abs(z))))
    for pattern in _patterns(n - 2):
        B = NTuple._trusted(_apply_pattern(mats, pattern), base.sl2)
        fp = finger(B)
        if any(fingerprints_match(fp, other) for other in prints):
            continue
        res = residual_fn(B, z)
        if res > tol * scale:
            raise InvalidBase(f"pattern {pattern!r} has forward residual {res:.3g}")
        orbits.append(Orbit(B, pattern, res))
        prints.append(fp)
    return orbits


def enumerate_fiber(base, z, tol=DEFAULT_TOL_RESIDUAL):
    """All transposition variants of ``base`` over ``z``, one per orbit.

    ``base`` must map to ``z``, have symmetric first and second entries and
    ``sigma_12 != 0``. Variants with equal fingerprints are merged.
    """
    base = as_tuple(base)
    z = _as_coords(z)
    if not base.sl2 or base.n < 2 or len(z) != magnus_length(base.n):
        raise InvalidBase("base must be an SL(2, C) tuple matching the trace vector")
    scale = max(1.0, float(np.max(np.abs(z))))
    res = _residual(base, z)
    if res > tol * scale:
        raise InvalidBase(f"base has forward residual {res:.3g}")
    for i in (0, 1):
        m = base.matrices[i]
        if abs(m[0, 1] - m[1, 0]) > tol * max(1.0, float(np.abs(m).max())):
            raise InvalidBase(f"entry {i + 1} of the base is not symmetric")
    if abs(sigma12(z)) <= tol * scale ** 4:
        raise InvalidBase("sigma_12 vanishes on the base")
    orbits = _enumerate(base, z, tol, forward_Tn, fingerprint, _residual)
    return Fiber(NONEMPTY, orbits, {"patterns": 2 ** (base.n - 2), "orbits": len(orbits)})


def _base_generic(z, n):
    """Base solution with ``A1`` diagonal and ``A2`` symmetric (needs ``nu_1 != 0``)."""
    alpha = np.array([_zs(z, k) / 2 for k in range(1, n + 1)])
    beta = np.zeros(n, complex)
    gamma = np.zeros(n, complex)
    dlt = np.zeros(n, complex)
    beta[0] = np.sqrt(1 - alpha[0] ** 2)
    for k in range(2, n + 1):
        beta[k - 1] = -_tau(z, 1, k) / (2 * beta[0])
    q22 = 1 - alpha[1] ** 2 - beta[1] ** 2
    dlt[1] = np.sqrt(q22)
    for k in range(3, n + 1):
        a, b = alpha[k - 1], beta[k - 1]
        q2k = alpha[1] * a - beta[1] * b - _zp(z, 2, k) / 2
        qkk = 1 - a * a - b * b
        dlt[k - 1] = q2k / dlt[1]
        gamma[k - 1] = np.sqrt(q22 * qkk - q2k * q2k) / dlt[1]
    return np.array([quaternion_matrix(*c) for c in zip(alpha, beta, gamma, dlt)])


def _base_parabolic(z, n):
    """Base solution when both ``nu_1`` and ``nu_2`` vanish (``z1, z2 = +-2``)."""
    a1, a2 = _zs(z, 1) / 2, _zs(z, 2) / 2
    lam = np.sqrt((2 * a1 * a2 - _zp(z, 1, 2)) / 4)
    mats = [
        np.array([[a1 + lam, 1j * lam], [1j * lam, a1 - lam]]),
        np.array([[a2 - lam, 1j * lam], [1j * lam, a2 + lam]]),
    ]
    for k in range(3, n + 1):
        ak = _zs(z, k) / 2
        P = (_zp(z, 1, k) - 2 * a1 * ak) / (2 * lam)
        Q = (_zp(z, 2, k) - 2 * a2 * ak) / (2 * lam)
        dk = -(P + Q) / 2
        bk = (P - Q) / 2j
        gk = np.sqrt(1 - ak * ak - bk * bk - dk * dk)
        mats.append(quaternion_matrix(ak, bk, gk, dk))
    return np.array(mats, dtype=complex)


def base_solution(z, tol_branch=DEFAULT_TOL_BRANCH):
    """Canonical base tuple over ``z`` (``sigma_12(z) != 0``) and the branch used."""
    z = _as_coords(z)
    n = magnus_n(len(z))
    if abs(sigma12(z)) <= tol_branch:
        raise NotApplicable("sigma_12(z) vanishes; no canonical base solution")
    if abs(_tau(z, 1, 1)) > tol_branch:
        mats, branch = _base_generic(z, n), "generic"
    elif abs(_tau(z, 2, 2)) > tol_branch:
        mats = _base_generic(swap12(z), n)
        mats[[0, 1]] = mats[[1, 0]]
        branch = "swap"
    else:
        mats, branch = _base_parabolic(z, n), "parabolic"
    return NTuple._trusted(mats, True), branch


def invert_Tn(z, tol=DEFAULT_TOL_RESIDUAL, tol_branch=DEFAULT_TOL_BRANCH):
    """Fiber of the Magnus map over ``z``.

    Off ``sigma_12(z) = 0`` the fiber is nonempty and finite; on that locus
    the work is delegated to :func:`invert_on_Z12`.
    """
    z = _as_coords(z)
    magnus_n(len(z))
    if abs(sigma12(z)) <= tol_branch:
        return invert_on_Z12(z, tol, tol_branch)
    base, branch = base_solution(z, tol_branch)
    fiber = enumerate_fiber(base, z, tol)
    fiber.notes["branch"] = branch
    return fiber


# -- the sigma_12 = 0 locus -----------------------------------------------------------

def _witness_fiber(mats, z, tol, notes):
    A = NTuple._trusted(np.array(mats, dtype=complex), True)
    res = _residual(A, z)
    notes = dict(notes, witness_residual=res)
    if res > tol * max(1.0, float(np.max(np.abs(z)))):
        notes["reason"] = "witness construction failed the forward check"
        return Fiber(UNDETERMINED, [], notes)
    return Fiber(UNDETERMINED, [], notes, witness=A)


def _z12_unipotent(z, n, tol, tol_branch):
    s1 = 1.0 if _zs(z, 1).real >= 0 else -1.0
    s2 = 1.0 if _zs(z, 2).real >= 0 else -1.0
    alpha = np.array([_zs(z, j) / 2 for j in range(3, n + 1)])
    u = np.array([s1 * _zp(z, 1, j) - _zs(z, j) for j in range(3, n + 1)])
    v = np.array([s2 * _zp(z, 2, j) - _zs(z, j) for j in range(3, n + 1)])
    best, where = 0.0, None
    for a in range(n - 2):
        for b in range(a + 1, n - 2):
            minor = abs(u[a] * v[b] - u[b] * v[a])
            if minor > best:
                best, where = minor, (a + 3, b + 3)
    if best > tol_branch:
        return Fiber(EMPTY, [], {"reason": "rank_two_obstruction", "indices": list(where), "minor": best})
    # rank <= 1: factor [u; v] = (b1, b2) (x) c
    cols = np.vstack([u, v]) if n > 2 else np.zeros((2, 0))
    if cols.size and np.max(np.abs(cols)) > tol_branch:
        i = int(np.argmax(np.sum(np.abs(cols) ** 2, axis=0)))
        b1, b2 = cols[0, i], cols[1, i]
        c = (np.conj(b1) * u + np.conj(b2) * v) / (abs(b1) ** 2 + abs(b2) ** 2)
    else:
        b1 = b2 = 1.0
        c = np.zeros(n - 2, complex)
    mats = [s1 * np.array([[1, b1], [0, 1]]), s2 * np.array([[1, b2], [0, 1]])]
    for a, cj in zip(alpha, c):
        bj = np.sqrt(1 - a * a)
        mats.append(np.array([[a + 1j * bj, 0], [cj, a - 1j * bj]]))
    notes = {"reason": "unipotent_pair_rank_le_one", "positive_dimensional_possible": True}
    return _witness_fiber(mats, z, tol, notes)


def _z12_diagonal_first(z, n, tol, tol_branch):
    """``nu_1(z) != 0``: ``A1`` diagonal, ``A2`` upper triangular."""
    a = np.array([_zs(z, k) / 2 for k in range(1, n + 1)])
    b1 = np.sqrt(1 - a[0] ** 2)
    beta = np.array([b1] + [-_tau(z, 1, k) / (2 * b1) for k in range(2, n + 1)])
    c = {k: _tau(z, 2, k) + 2 * beta[1] * beta[k - 1] for k in range(3, n + 1)}
    norm_gap = {k: a[k - 1] ** 2 + beta[k - 1] ** 2 - 1 for k in c}
    zero_c = [k for k in c if abs(c[k]) <= tol_branch]
    blocked = [k for k in zero_c if abs(norm_gap[k]) > tol_branch]
    live = [k for k in c if k not in zero_c]
    if blocked and live:
        return Fiber(EMPTY, [], {
            "reason": "diagonal_first_obstruction",
            "indices": [blocked[0], live[0]],
            "c": [c[live[0]].real, c[live[0]].imag],
        })
    diag = lambda k: np.diag([a[k - 1] + 1j * beta[k - 1], a[k - 1] - 1j * beta[k - 1]])
    mats = [diag(1)]
    if not blocked:
        mats.append(diag(2) + np.array([[0, 1], [0, 0]]))
        for k in range(3, n + 1):
            bk = norm_gap[k] / c[k] if k in live else 0.0
            mats.append(diag(k) + np.array([[0, bk], [c[k], 0]]))
        family = "upper_second"
    else:
        # all c_k vanish: A2 diagonal and the off-diagonal products are free
        mats.append(diag(2))
        for k in range(3, n + 1):
            mats.append(diag(k) + np.array([[0, norm_gap[k]], [1, 0]]))
        family = "diagonal_second"
    notes = {"reason": "diagonal_first_family", "family": family, "positive_dimensional_possible": True}
    return _witness_fiber(mats, z, tol, notes)


def invert_on_Z12(z, tol=DEFAULT_TOL_RESIDUAL, tol_branch=DEFAULT_TOL_BRANCH):
    """Fiber analysis on ``sigma_12(z) = 0``; never claims finiteness.

    Returns ``Empty`` with the obstructing indices, or ``Undetermined``
    carrying a witness tuple when one can be built.
    """
    z = _as_coords(z)
    n = magnus_n(len(z))
    nu1, nu2 = _tau(z, 1, 1), _tau(z, 2, 2)
    if abs(nu1) > tol_branch:
        return _z12_diagonal_first(z, n, tol, tol_branch)
    if abs(nu2) > tol_branch:
        fiber = _z12_diagonal_first(swap12(z), n, tol, tol_branch)
        if fiber.witness is not None:
            mats = fiber.witness.matrices.copy()
            mats[[0, 1]] = mats[[1, 0]]
            fiber.witness = NTuple._trusted(mats, True)
        if "indices" in fiber.notes:
            fiber.notes["swapped"] = True
        return fiber
    if abs(abs(_zp(z, 1, 2)) - 2) <= 1e3 * tol_branch:
        return _z12_unipotent(z, n, tol, tol_branch)
    return Fiber(UNDETERMINED, [], {"reason": "uncovered_sublocus"})


# -- V_n ------------------------------------------------------------------------

def _vi(j, kind, n):
    """Position in the V_n layout; kind is 's' (z_j), 'q' (z_jj), 1 or 2 (z_1j, z_2j)."""
    if j == 1:
        return {"s": 0, "q": 1}[kind]
    if j == 2:
        return {"s": 2, "q": 3, 1: 4}[kind]
    base = 5 + 4 * (j - 3)
    return base + {"s": 0, "q": 1, 1: 2, 2: 3}[kind]


def tau_vn(z, j, k):
    z = _as_coords(z)
    n = vn_n(len(z))
    if j > k:
        j, k = k, j
    zj, zk = z[_vi(j, "s", n)], z[_vi(k, "s", n)]
    zjk = z[_vi(j, "q", n)] if j == k else z[_vi(k, j, n)]
    return complex(zjk - zj * zk / 2)


def sigma12_vn(z):
    return tau_vn(z, 1, 2) ** 2 - tau_vn(z, 1, 1) * tau_vn(z, 2, 2)


def delta12k_vn(z, k):
    """Fricke discriminant ``Delta_12k`` from the V_n coordinates (Gram form)."""
    t = lambda a, b: tau_vn(z, a, b)
    return 2 * (
        t(1, 2) ** 2 * t(k, k) + t(1, k) ** 2 * t(2, 2) + t(2, k) ** 2 * t(1, 1)
        - 2 * t(1, 2) * t(1, k) * t(2, k) - t(1, 1) * t(2, 2) * t(k, k)
    )


def invert_That_n(z, tol=1e-7, tol_branch=DEFAULT_TOL_BRANCH):
    """Fiber of the V_n trace map over ``z`` (needs ``sigma_12``, ``tau_11 != 0``)."""
    zv = _as_coords(z)
    n = vn_n(len(zv))
    t11, s12 = tau_vn(zv, 1, 1), sigma12_vn(zv)
    if abs(s12) <= tol_branch or abs(t11) <= tol_branch:
        return Fiber(UNDETERMINED, [], {"reason": "sigma12_or_tau11_vanishes"})
    t = lambda a, b: tau_vn(zv, a, b)
    alpha = [zv[_vi(k, "s", n)] / 2 for k in range(1, n + 1)]
    b1 = np.sqrt(-t11 / 2)
    beta = [b1] + [-t(1, k) / (2 * b1) for k in range(2, n + 1)]
    d2 = np.sqrt(s12 / (2 * t11))
    gamma, dlt = [0j, 0j], [0j, d2]
    for k in range(3, n + 1):
        dlt.append((t(1, 2) * t(1, k) - t(2, k) * t11) / (2 * d2 * t11))
        gamma.append(np.sqrt(-delta12k_vn(zv, k) / (4 * s12)))
    mats = np.array([quaternion_matrix(*c) for c in zip(alpha, beta, gamma, dlt)])
    base = NTuple._trusted(mats, _is_sl2(mats))
    orbits = _enumerate(base, zv, tol, forward_That_n, vn_fingerprint, _residual_vn)
    return Fiber(NONEMPTY, orbits, {"branch": "vn", "orbits": len(orbits)})


def _is_sl2(mats):
    d = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    return bool(np.all(np.abs(d - 1) <= 1e-9 * np.maximum(1.0, np.abs(mats).max(axis=(1, 2)) ** 2)))


# -- end-to-end check ----------------------------------------------------------------

@dataclass
class CrossCheckReport:
    passed: bool
    z: TraceVector
    fiber: Fiber
    matches: list
    problems: list

    def __bool__(self):
        return self.passed


def fiber_cross_check(A, tol=DEFAULT_TOL_RESIDUAL, tol_branch=DEFAULT_TOL_BRANCH):
    """Map ``A`` forward, invert, and locate ``A``'s orbit in the fiber."""
    A = as_tuple(A)
    z = forward_Tn(A)
    fiber = invert_Tn(z.coords, tol, tol_branch)
    problems = []
    if fiber.status != NONEMPTY or not fiber.orbits:
        problems.append(f"fiber status {fiber.status} with {len(fiber.orbits)} orbits")
    if len(fiber.orbits) > 2 ** (A.n - 2):
        problems.append(f"{len(fiber.orbits)} orbits exceed the bound {2 ** (A.n - 2)}")
    scale = max(1.0, float(np.max(np.abs(z.coords))))
    for o in fiber.orbits:
        if o.residual > tol * scale:
            problems.append(f"pattern {o.pattern} residual {o.residual:.3g}")
    fp = fingerprint(A)
    matches = [o.pattern for o in fiber.orbits if fingerprints_match(fp, fingerprint(o.tuple))]
    if len(matches) != 1:
        problems.append(f"input fingerprint matches {len(matches)} orbits")
    return CrossCheckReport(not problems, z, fiber, matches, problems)
