"""Triangularization, stability, irreducibility and normal forms.

A tuple is simultaneously triangularizable exactly when every ``sigma_jk``
and every ``delta_jkl`` vanishes; on SL(2, C) this is reducibility of
the associated free-group representation, and its negation is GIT
stability. Witnesses are searched pairs first, then triples, both in
lexicographic order.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    IDENTITY,
    NTuple,
    Word,
    as_matrix,
    as_tuple,
    commutator,
    conjugate_tuple,
    det2,
    inverse,
    mnorm,
    near_zero,
    trace_words,
    word_eval,
)
from .errors import (
    DegenerateEigenvalues,
    InvalidInput,
    NotApplicable,
    NotIrreducible,
    NotSL2,
    NumericalFailure,
)
from .invariants import delta_root, nu, sigma

ROT = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)
MAX_SHIFT = 8
CS_MAX_LENGTH = 16
CS_MAX_DEPTH = 4


@dataclass(frozen=True)
class Witness:
    """A nonvanishing invariant: ``kind`` is ``"sigma"`` or ``"delta"``."""

    kind: str
    indices: tuple
    value: complex


@dataclass(frozen=True)
class TriangularizationResult:
    triangularizable: bool
    conjugator: Optional[np.ndarray] = None
    witness: Optional[Witness] = None


class StabilityVerdict(NamedTuple):
    stable: bool
    witness: Optional[Witness]


class IrreducibilityVerdict(NamedTuple):
    irreducible: bool
    witness: Optional[Witness]


def _norms(A):
    return [mnorm(m) for m in A.matrices]


def _sigma_scale(norms, j, k):
    return (norms[j - 1] * norms[k - 1]) ** 2


def _delta_scale(norms, j, k, l):
    return norms[j - 1] * norms[k - 1] * norms[l - 1]


def iter_witnesses(A, tol=DEFAULT_TOL):
    """Yield every nonvanishing sigma (pairs) then delta (triples), in scan order.

    The delta test is applied to ``t_jkl - t_lkj`` rather than its square so
    that the threshold is linear in the entries, like the sigma test's
    dependence on an off-triangular perturbation.
    """
    A = as_tuple(A)
    norms = _norms(A)
    n = A.n
    for j, k in combinations(range(1, n + 1), 2):
        s = sigma(A, j, k)
        if not near_zero(s, _sigma_scale(norms, j, k), tol):
            yield Witness("sigma", (j, k), s)
    for j, k, l in combinations(range(1, n + 1), 3):
        r = delta_root(A, j, k, l)
        if not near_zero(r, _delta_scale(norms, j, k, l), tol):
            yield Witness("delta", (j, k, l), r * r)


def find_witness(A, tol=DEFAULT_TOL):
    return next(iter_witnesses(A, tol), None)


# -- invariant lines ---------------------------------------------------------

def _best_column(m):
    c0, c1 = m[:, 0], m[:, 1]
    return c0 if np.linalg.norm(c0) >= np.linalg.norm(c1) else c1


def _normalize(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    i = int(np.argmax(np.abs(v)))
    return v * (abs(v[i]) / v[i])


def eigenlines(m, tol=DEFAULT_TOL):
    """Eigenvector candidates of a non-scalar 2x2 matrix (empty for scalars).

    Uses the trace-free part ``N``: with ``mu^2 = -det N`` every column of
    ``N + mu I`` lies in the ``mu`` eigenspace, which stays accurate when
    the eigenvalues nearly coincide. In that regime the kernel of ``N``
    (any column of ``N``) is added as well.
    """
    m = as_matrix(m)
    half = (m[0, 0] + m[1, 1]) / 2
    N = m - half * IDENTITY
    nrm = mnorm(N)
    if near_zero(nrm, mnorm(m), tol):
        return []
    mu = np.sqrt(-det2(N))
    out = []
    for sgn in (1, -1):
        col = _best_column(N + sgn * mu * IDENTITY)
        if np.linalg.norm(col) > 1e-300:
            out.append(_normalize(col))
    if abs(mu) ** 2 <= np.sqrt(tol) * nrm ** 2:
        out.append(_normalize(_best_column(N)))
    return out


def line_residual(v, m):
    """``|m v - lambda v|`` for unit ``v`` and its Rayleigh quotient ``lambda``."""
    w = m @ v
    lam = np.vdot(v, w)
    return float(np.linalg.norm(w - lam * v))


def _candidate_lines(A, tol):
    cands = []
    for m in A.matrices:
        cands.extend(eigenlines(m, tol))
    if not cands:
        cands = [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]
    return cands


def _line_score(v, A):
    """Largest per-component residual, each relative to ``max(1, |A_j|)``."""
    return max(line_residual(v, m) / max(1.0, mnorm(m)) for m in A.matrices)


def invariant_line_oracle(A, tol=DEFAULT_TOL):
    """Brute-force search for a line of C^2 fixed by every component.

    Returns a unit vector spanning the line or ``None``. Independent of the
    invariant-function criterion; used to cross-check it.
    """
    A = as_tuple(A)
    for v in _candidate_lines(A, tol):
        if _line_score(v, A) <= tol:
            return v
    return None


def _best_line(A, tol):
    cands = _candidate_lines(A, tol)
    scores = [_line_score(v, A) for v in cands]
    i = int(np.argmin(scores))
    return cands[i], scores[i]


def line_to_conjugator(v):
    """Determinant-one ``g`` with ``g v`` on the first axis (``g`` unitary)."""
    v = np.asarray(v, dtype=complex)
    nv = np.linalg.norm(v)
    if nv < 1e-300:
        raise NumericalFailure("cannot complete a zero vector to a basis")
    v = v / nv
    P = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]], dtype=complex)
    return P.conj().T


# -- decisions ----------------------------------------------------------------

def triangularize(A, tol=DEFAULT_TOL):
    """Decide simultaneous triangularizability and produce a conjugator.

    When triangularizable the returned ``g`` has determinant 1 and makes
    every ``g A_j g^-1`` upper triangular.
    """
    A = as_tuple(A)
    w = find_witness(A, tol)
    if w is not None:
        return TriangularizationResult(False, None, w)
    if all(not eigenlines(m, tol) for m in A.matrices):
        return TriangularizationResult(True, IDENTITY.copy(), None)
    v, score = _best_line(A, tol)
    if score > np.sqrt(tol):
        raise NumericalFailure(
            f"invariants vanish but no common eigenline found (residual {score:.3g})"
        )
    return TriangularizationResult(True, line_to_conjugator(v), None)


def is_stable(A, tol=DEFAULT_TOL):
    """Stable under simultaneous SL(2, C) conjugation iff not triangularizable."""
    w = find_witness(A, tol)
    return StabilityVerdict(w is not None, w)


def is_irreducible(A, tol=DEFAULT_TOL):
    """Irreducibility of ``e_j -> A_j`` for an SL(2, C) tuple."""
    A = as_tuple(A)
    if not A.sl2:
        raise NotSL2("irreducibility is decided for SL(2, C) tuples")
    w = find_witness(A, tol)
    return IrreducibilityVerdict(w is not None, w)


# -- sampled commutator traces -------------------------------------------------

@dataclass
class CullerShalenEvidence:
    """Outcome of sampling traces over the commutator subgroup.

    ``verdict`` is ``"irreducible"`` when some sampled trace is certifiably
    different from 2, ``"unknown"`` otherwise: small traces are evidence of
    reducibility, not proof.
    """

    samples: int
    max_deviation: float
    word: Optional[Word]
    trace: Optional[complex]
    verdict: str
    deviations: list = field(default_factory=list, repr=False)


def _reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def _inv(letters):
    return [-x for x in reversed(letters)]


def _random_letters(rng, n, lo, hi):
    while True:
        length = int(rng.integers(lo, hi + 1))
        gens = rng.integers(1, n + 1, size=length)
        signs = 2 * rng.integers(0, 2, size=length) - 1
        w = _reduce((gens * signs).tolist())
        if w:
            return w


def commutator_words(n, count, seed):
    """``count`` nontrivial words of the commutator subgroup of F_n.

    The basic commutators ``[e_j, e_k]`` (j < k, lex order) come first, then
    random products of at most four (possibly conjugated) commutators of
    short words, kept when the reduced length is at most 16.
    """
    return list(_commutator_words(n, count, seed))


@lru_cache(maxsize=64)
def _commutator_words(n, count, seed):
    if n < 2 or count <= 0:
        return ()
    out = []
    for j, k in combinations(range(1, n + 1), 2):
        if len(out) == count:
            return tuple(out)
        out.append(commutator([j], [k]))
    rng = np.random.default_rng(seed)
    while len(out) < count:
        depth = int(rng.integers(1, CS_MAX_DEPTH + 1))
        w = []
        for _ in range(depth):
            u, v = _random_letters(rng, n, 1, 3), _random_letters(rng, n, 1, 3)
            c = u + v + _inv(u) + _inv(v)
            if rng.random() < 0.5:
                h = _random_letters(rng, n, 1, 2)
                c = h + c + _inv(h)
            w = _reduce(w + c)
        if 0 < len(w) <= CS_MAX_LENGTH:
            out.append(Word(w))
    return tuple(out)


def culler_shalen_sample(A, samples, seed=0, cert_tol=1e-6):
    """Largest ``|tr(w) - 2|`` over sampled commutator-subgroup words ``w``."""
    A = as_tuple(A)
    if not A.sl2:
        raise NotSL2("commutator sampling needs an SL(2, C) tuple")
    words = commutator_words(A.n, samples, seed)
    if not words:
        return CullerShalenEvidence(0, 0.0, None, None, "unknown")
    traces = trace_words(words, A)
    devs = np.abs(traces - 2)
    i = int(np.argmax(devs))
    norms = _norms(A)
    # roundoff floor: a product of |w| letters can lose eps * prod(norms)
    floor = 1e3 * np.finfo(float).eps * np.prod([max(1.0, norms[k - 1]) for k, _ in words[i].letters])
    verdict = "irreducible" if devs[i] > max(cert_tol, floor) else "unknown"
    return CullerShalenEvidence(len(words), float(devs[i]), words[i], complex(traces[i]), verdict, devs.tolist())


# -- normal forms ---------------------------------------------------------------

def _require_upper(A, tol):
    s = A.scale()
    for j, m in enumerate(A.matrices, 1):
        if not near_zero(m[1, 0], s, tol):
            raise InvalidInput(f"component {j} is not upper triangular")


def diagonalize_component(A, j, tol=DEFAULT_TOL):
    """Conjugate an upper-triangular tuple so that component ``j`` is diagonal.

    Uses ``g = (1, y; 0, 1)`` with ``y = b_j / e_j``; all components stay
    upper triangular. Returns ``(g . A, g)``.
    """
    A = as_tuple(A)
    _require_upper(A, tol)
    m = A.component(j)
    e = m[0, 0] - m[1, 1]
    if near_zero(e, mnorm(m), tol):
        raise DegenerateEigenvalues(f"component {j} has a repeated eigenvalue")
    g = np.array([[1, m[0, 1] / e], [0, 1]], dtype=complex)
    B = conjugate_tuple(g, A)
    mats = B.matrices.copy()
    mats[:, 1, 0] = 0
    mats[j - 1, 0, 1] = 0
    return NTuple._trusted(mats, A.sl2), g


def _is_symmetric(m, tol, scale):
    return near_zero(m[0, 1] - m[1, 0], scale, tol)


def _diagonalizer(m, tol):
    """Determinant-one ``g`` with ``g m g^-1`` diagonal (distinct eigenvalues)."""
    lines = eigenlines(m, tol)[:2]
    P = np.column_stack(lines)
    d = det2(P)
    if near_zero(d, 1.0, 1e-12):
        raise DegenerateEigenvalues("eigenvectors are (nearly) parallel")
    P = P / np.sqrt(d)
    return inverse(P)


def _symmetrize_scaling(b, c):
    """``diag(x, 1/x)`` equalizing off-diagonal entries ``b x^2 = c x^-2``."""
    x = np.sqrt(np.sqrt(c / b))
    return np.array([[x, 0], [0, 1 / x]], dtype=complex)


def _normal_form_diag(A, first, tol):
    """Branch with component ``first`` diagonalizable (index 0 or 1)."""
    other = 1 - first
    g1 = _diagonalizer(A.matrices[first], tol)
    C = conjugate_tuple(g1, A).matrices[other]
    g2 = _symmetrize_scaling(C[0, 1], C[1, 0])
    return g2 @ g1


def _normal_form_parabolic(A, tol):
    """Both of the first two components have a repeated eigenvalue."""
    A1 = A.matrices[0]
    half = (A1[0, 0] + A1[1, 1]) / 2
    v = _best_column(A1 - half * IDENTITY)
    g = line_to_conjugator(v)
    C2 = conjugate_tuple(g, A).matrices[1]
    b2, c2, e2 = C2[0, 1], C2[1, 0], C2[0, 0] - C2[1, 1]
    # upper-unitriangular y kills the (1,2) entry of C2: c2 y^2 + e2 y - b2 = 0
    root = np.sqrt(e2 * e2 + 4 * b2 * c2)
    ys = [(-e2 + root) / (2 * c2), (-e2 - root) / (2 * c2)]
    y = min(ys, key=lambda t: abs(c2 * t * t + e2 * t - b2))
    g = np.array([[1, y], [0, 1]], dtype=complex) @ g
    C = conjugate_tuple(g, A).matrices
    g = _symmetrize_scaling(C[0][0, 1], C[1][1, 0]) @ g
    return ROT @ g


def transposition_normal_form(A, tol=DEFAULT_TOL):
    """Conjugate so that the first two components are symmetric matrices.

    Needs ``sigma_12 != 0``. If ``nu_1 != 0`` the first component becomes
    diagonal; if only ``nu_2 != 0`` the second one does; if both vanish the
    pair takes the form ``(a1 + l, i l; i l, a1 - l)``,
    ``(a2 - l, i l; i l, a2 + l)``. Returns ``(g . A, g)``.
    """
    A = as_tuple(A)
    if A.n < 2:
        raise NotApplicable("normal form needs at least two components")
    norms = _norms(A)
    s12 = sigma(A, 1, 2)
    if near_zero(s12, _sigma_scale(norms, 1, 2), tol):
        raise NotApplicable("sigma_12 vanishes; the pair is triangularizable")
    scale = max(1.0, norms[0], norms[1])
    if _is_symmetric(A.matrices[0], tol, scale) and _is_symmetric(A.matrices[1], tol, scale):
        return A, IDENTITY.copy()
    if not near_zero(nu(A, 1), norms[0] ** 2, tol):
        g = _normal_form_diag(A, 0, tol)
    elif not near_zero(nu(A, 2), norms[1] ** 2, tol):
        g = _normal_form_diag(A, 1, tol)
    else:
        g = _normal_form_parabolic(A, tol)
    B = conjugate_tuple(g, A)
    mats = B.matrices.copy()
    out_scale = max(1.0, mnorm(mats[0]), mnorm(mats[1]))
    for i in (0, 1):
        if not _is_symmetric(mats[i], np.sqrt(tol), out_scale):
            raise NumericalFailure("normal form is not symmetric to working accuracy")
        off = (mats[i, 0, 1] + mats[i, 1, 0]) / 2
        mats[i, 0, 1] = mats[i, 1, 0] = off
    return NTuple._trusted(mats, A.sl2), g


# -- generator changes --------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorChange:
    """A replayable sequence of free-group automorphisms.

    Moves are ``("swap", j, k)``, exchanging generators ``j`` and ``k``, and
    ``("shift", j, k, m)``, replacing ``e_j`` by ``e_j e_k^m``.
    """

    moves: tuple = ()

    def is_identity(self):
        return not self.moves

    def then(self, move):
        return GeneratorChange(self.moves + (tuple(move),))

    def apply(self, A):
        A = as_tuple(A)
        mats = [m for m in A.matrices]
        for mv in self.moves:
            if mv[0] == "swap":
                _, j, k = mv
                mats[j - 1], mats[k - 1] = mats[k - 1], mats[j - 1]
            else:
                _, j, k, m = mv
                mats[j - 1] = mats[j - 1] @ np.linalg.matrix_power(_inv_for_power(mats[k - 1], m), abs(m))
        return NTuple._trusted(np.array(mats), A.sl2)

    def words(self, n):
        """Words in the original generators giving each new generator."""
        ws = [Word([j]) for j in range(1, n + 1)]
        for mv in self.moves:
            if mv[0] == "swap":
                _, j, k = mv
                ws[j - 1], ws[k - 1] = ws[k - 1], ws[j - 1]
            else:
                _, j, k, m = mv
                ws[j - 1] = ws[j - 1] * ws[k - 1] ** m
        return ws

    def inverse(self):
        inv = []
        for mv in reversed(self.moves):
            inv.append(mv if mv[0] == "swap" else ("shift", mv[1], mv[2], -mv[3]))
        return GeneratorChange(tuple(inv))


def _inv_for_power(m, k):
    return m if k >= 0 else inverse(m)


def _robust(tol):
    return np.sqrt(tol)


def _pick(cands, tol):
    """First candidate whose normalized value clears sqrt(tol), else the largest."""
    for c in cands:
        if c[0] > _robust(tol):
            return c
    best = max(cands, key=lambda c: c[0], default=None)
    if best is None or best[0] <= tol:
        return None
    return best


def _bring_to_front(change, A, idx):
    """Swap moves placing original indices ``idx`` at positions 1, 2, ..."""
    pos = list(range(1, A.n + 1))
    for target, i in enumerate(idx, 1):
        cur = pos.index(i) + 1
        if cur != target:
            change = change.then(("swap", target, cur))
            pos[target - 1], pos[cur - 1] = pos[cur - 1], pos[target - 1]
    return change


def fix_generators(A, tol=DEFAULT_TOL):
    """Change generators so that ``sigma_12 != 0`` and ``nu_1 != 0``.

    Returns the new tuple and the :class:`GeneratorChange` producing it.
    """
    A = as_tuple(A)
    if not is_irreducible(A, tol).irreducible:
        raise NotIrreducible("tuple is reducible; no generator change helps")
    change = GeneratorChange()
    norms = _norms(A)

    pairs = [
        (abs(sigma(A, j, k)) / max(1.0, _sigma_scale(norms, j, k)), (j, k))
        for j, k in combinations(range(1, A.n + 1), 2)
    ]
    hit = _pick(pairs, tol)
    if hit is not None:
        change = _bring_to_front(change, A, hit[1])
    else:
        triples = [
            (abs(delta_root(A, j, k, l)) / max(1.0, _delta_scale(norms, j, k, l)), (j, k, l))
            for j, k, l in combinations(range(1, A.n + 1), 3)
        ]
        hit = _pick(triples, tol)
        if hit is None:
            raise NumericalFailure("no nonvanishing invariant found")
        change = _bring_to_front(change, A, hit[1])
        B = change.apply(A)
        shifts = []
        for mv in (("shift", 1, 3, 1), ("shift", 1, 3, -1), ("shift", 2, 3, 1), ("shift", 2, 3, -1)):
            C = GeneratorChange((mv,)).apply(B)
            nc = _norms(C)
            shifts.append((abs(sigma(C, 1, 2)) / max(1.0, _sigma_scale(nc, 1, 2)), mv))
        hit = _pick(shifts, tol)
        if hit is None:
            raise NumericalFailure("no shift produced sigma_12 != 0")
        change = change.then(hit[1])

    B = change.apply(A)
    if abs(nu(B, 1)) / max(1.0, _norms(B)[0] ** 2) <= _robust(tol):
        shifts = []
        for k in [*range(1, MAX_SHIFT + 1), *range(-1, -MAX_SHIFT - 1, -1)]:
            mv = ("shift", 1, 2, k)
            C = GeneratorChange((mv,)).apply(B)
            shifts.append((abs(nu(C, 1)) / max(1.0, _norms(C)[0] ** 2), mv))
        hit = _pick(shifts, tol)
        if hit is None:
            raise NumericalFailure(f"no shift e1 -> e1 e2^k with |k| <= {MAX_SHIFT} gives nu_1 != 0")
        change = change.then(hit[1])
        B = change.apply(A)
    return B, change


def replay_words(A, change):
    """Evaluate ``change.words(n)`` on ``A``; equals ``change.apply(A)``."""
    A = as_tuple(A)
    return NTuple._trusted(np.array([word_eval(w, A) for w in change.words(A.n)]), A.sl2)


# -- conjugator -------------------------------------------------------------------------

def _intertwiner_system(A, B):
    eye = np.eye(2)
    blocks = [np.kron(eye, a.T) - np.kron(b, eye) for a, b in zip(A.matrices, B.matrices)]
    return np.vstack(blocks)


def conjugator(A, B, tol=1e-8):
    """Find ``g`` with ``det g = 1`` and ``g A_j g^-1 = B_j`` for all ``j``.

    Solves the homogeneous system ``g A_j = B_j g`` for the four entries of
    ``g`` by SVD and searches the (numerical) nullspace for an invertible
    element. Returns ``None`` when no such ``g`` exists to tolerance.
    """
    A, B = as_tuple(A), as_tuple(B)
    if A.n != B.n:
        raise InvalidInput("tuples have different lengths")
    M = _intertwiner_system(A, B)
    _, s, vh = np.linalg.svd(M)
    scale = max(A.scale(), B.scale())
    null_cut = 1e-6 * max(1.0, s[0])
    basis = [vh[-i - 1].conj() for i in range(4) if s[3 - i] <= null_cut]
    if not basis:
        return None
    rng = np.random.default_rng(0)
    trials = list(basis)
    for _ in range(8 if len(basis) > 1 else 0):
        coef = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        trials.append(sum(c * b for c, b in zip(coef, basis)))
    best = None
    for vec in trials:
        g = vec.reshape(2, 2)
        d = det2(g)
        quality = abs(d) / max(mnorm(g) ** 2, 1e-300)
        if quality < 1e-8:
            continue
        g = g / np.sqrt(d)
        res = max(mnorm(g @ a - b @ g) for a, b in zip(A.matrices, B.matrices))
        if res <= tol * mnorm(g) * scale and (best is None or quality > best[0]):
            best = (quality, g)
    if best is None:
        return None
    g = best[1]
    if (g[0, 0] + g[1, 1]).real < 0 or ((g[0, 0] + g[1, 1]).real == 0 and g[0, 0].imag < 0):
        g = -g
    return g
