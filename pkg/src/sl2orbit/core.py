"""2x2 complex matrices, n-tuples, free-group words and word traces.

Matrices are numpy arrays of shape ``(2, 2)`` in row-major ``(a, b; c, d)``
layout. Generator indices are 1-based throughout the package, so that
``A.component(1)`` is the first matrix and ``Word([1, -2])`` is
``e1 e2^-1``.
"""

from dataclasses import dataclass
import re

import numpy as np

from . import kernels
from .errors import InvalidInput, InvalidWord, NotSL2, SingularConjugator

DEFAULT_TOL = 1e-9

IDENTITY = np.eye(2, dtype=complex)
IDENTITY.setflags(write=False)


def near_zero(x, scale=1.0, tol=DEFAULT_TOL):
    """Absolute-plus-relative zero test: ``|x| <= tol * max(1, scale)``."""
    return abs(x) <= tol * max(1.0, scale)


def as_matrix(m):
    """Coerce ``m`` to a finite complex 2x2 array."""
    arr = np.asarray(m, dtype=complex)
    if arr.shape != (2, 2):
        raise InvalidInput(f"expected a 2x2 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix has non-finite entries")
    return arr


def det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def mnorm(m):
    """Frobenius norm of a 2x2 matrix (or of a stack)."""
    return float(np.sqrt(np.sum(np.abs(m) ** 2)))


def sl2_inverse(m, tol=DEFAULT_TOL):
    """Inverse of a determinant-one matrix via the adjugate ``(d, -b, -c, a)``."""
    m = as_matrix(m)
    det = det2(m)
    if abs(det - 1) > tol * max(1.0, mnorm(m) ** 2):
        raise NotSL2(f"determinant {det} is not 1")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex)


def inverse(m):
    """General 2x2 inverse; raises :class:`SingularConjugator` when det ~ 0."""
    det = det2(m)
    if near_zero(det, mnorm(m) ** 2, 1e-14) or det == 0:
        raise SingularConjugator(f"matrix is singular (det={det})")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex) / det


def quaternion_matrix(alpha, beta, gamma, delta):
    """Matrix of a complexified quaternion, determinant alpha^2+beta^2+gamma^2+delta^2."""
    return np.array(
        [[alpha + 1j * beta, gamma + 1j * delta], [-gamma + 1j * delta, alpha - 1j * beta]],
        dtype=complex,
    )


def quaternion_coords(m):
    """Inverse of :func:`quaternion_matrix`: returns ``(alpha, beta, gamma, delta)``."""
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    return ((a + d) / 2, (a - d) / 2j, (b - c) / 2, (b + c) / 2j)


class NTuple:
    """An ordered tuple ``(A_1, ..., A_n)`` of complex 2x2 matrices.

    ``sl2`` marks membership of SL(2, C)^n. Passing ``sl2=None`` detects it
    from the determinants; passing ``True`` for matrices whose determinant
    is not 1 raises :class:`NotSL2`.
    """

    __slots__ = ("matrices", "sl2", "tol")

    def __init__(self, matrices, sl2=None, tol=DEFAULT_TOL):
        mats = np.array(matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1:] != (2, 2) or mats.shape[0] < 1:
            raise InvalidInput(f"expected an (n, 2, 2) stack with n >= 1, got {mats.shape}")
        if not np.all(np.isfinite(mats)):
            raise InvalidInput("tuple has non-finite entries")
        residuals = det_residuals(mats)
        ok = bool(np.all(residuals <= tol * np.maximum(1.0, _norms(mats) ** 2)))
        if sl2 and not ok:
            raise NotSL2(f"determinant residuals {residuals.max():.3g} exceed tol {tol:g}")
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "sl2", ok if sl2 is None else bool(sl2))
        object.__setattr__(self, "tol", tol)

    @classmethod
    def _trusted(cls, mats, sl2):
        obj = object.__new__(cls)
        mats = np.array(mats, dtype=complex)
        mats.setflags(write=False)
        object.__setattr__(obj, "matrices", mats)
        object.__setattr__(obj, "sl2", bool(sl2))
        object.__setattr__(obj, "tol", DEFAULT_TOL)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("NTuple is immutable")

    def __repr__(self):
        return f"NTuple(n={self.n}, sl2={self.sl2}, matrices={self.matrices.tolist()!r})"

    @property
    def n(self):
        return self.matrices.shape[0]

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.matrices)

    def component(self, j):
        """The 1-based ``j``-th matrix."""
        if not 1 <= j <= self.n:
            raise IndexError(f"component {j} out of range 1..{self.n}")
        return self.matrices[j - 1]

    def replace(self, j, m):
        """Copy with component ``j`` (1-based) replaced by ``m``."""
        mats = self.matrices.copy()
        mats[j - 1] = as_matrix(m)
        return NTuple._trusted(mats, self.sl2 and abs(det2(mats[j - 1]) - 1) <= 1e-9 * max(1.0, mnorm(m) ** 2))

    def permuted(self, order):
        """Tuple ``(A_{order[0]}, A_{order[1]}, ...)`` with 1-based ``order``."""
        return NTuple._trusted(self.matrices[[i - 1 for i in order]], self.sl2)

    def scale(self):
        """Largest component norm, floored at 1; used to scale tolerances."""
        return max(1.0, float(_norms(self.matrices).max()))


def _norms(mats):
    return np.sqrt(np.sum(np.abs(mats) ** 2, axis=(1, 2)))


def det_residuals(mats):
    dets = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    return np.abs(dets - 1)


def as_tuple(A):
    return A if isinstance(A, NTuple) else NTuple(A)


@dataclass(frozen=True)
class TupleDiagnostics:
    n: int
    residuals: tuple
    sl2: bool
    tuple: NTuple


def validate_tuple(A, tol=DEFAULT_TOL):
    """Check finiteness and determinant residuals; return the flagged tuple."""
    mats = A.matrices if isinstance(A, NTuple) else np.asarray(A, dtype=complex)
    if mats.ndim != 3 or mats.shape[1:] != (2, 2):
        raise InvalidInput(f"expected an (n, 2, 2) stack, got shape {mats.shape}")
    if not np.all(np.isfinite(mats)):
        raise InvalidInput("tuple has non-finite entries")
    res = det_residuals(mats)
    sl2 = bool(np.all(res <= tol * np.maximum(1.0, _norms(mats) ** 2)))
    return TupleDiagnostics(mats.shape[0], tuple(float(r) for r in res), sl2, NTuple._trusted(mats, sl2))


def conjugate_tuple(g, A):
    """Simultaneous conjugation ``(g A_1 g^-1, ..., g A_n g^-1)``."""
    g = as_matrix(g)
    ginv = inverse(g)
    A = as_tuple(A)
    return NTuple._trusted(kernels.conjugate_all(g, ginv, A.matrices), A.sl2)


_LETTER_RE = re.compile(r"^[a-zA-Z]+$")


class Word:
    """Reduced word in the free group on generators ``e1, e2, ...``.

    Letters are ``(index, sign)`` pairs with 1-based index and sign +-1.
    Construction reduces the word, so equal group elements compare equal.

    >>> Word([1, 2, -2, 3])
    Word('e1 e3')
    >>> Word("abA").to_ints()
    [1, 2, -1]
    """

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        if isinstance(letters, Word):
            self.letters = letters.letters
            return
        if isinstance(letters, str):
            letters = _parse_word(letters)
        stack = []
        for item in letters:
            if isinstance(item, (tuple, list)):
                idx, sign = int(item[0]), int(item[1])
            else:
                item = int(item)
                idx, sign = abs(item), (1 if item > 0 else -1)
            if idx < 1 or sign not in (1, -1):
                raise InvalidWord(f"bad letter {item!r}")
            if stack and stack[-1] == (idx, -sign):
                stack.pop()
            else:
                stack.append((idx, sign))
        self.letters = tuple(stack)

    @classmethod
    def generator(cls, j):
        return cls([(j, 1)])

    def to_ints(self):
        return [i * s for i, s in self.letters]

    def inverse(self):
        return Word([(i, -s) for i, s in reversed(self.letters)])

    def __mul__(self, other):
        return Word(self.letters + Word(other).letters)

    def __pow__(self, k):
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def max_index(self):
        return max((i for i, _ in self.letters), default=0)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"e{i}" if s > 0 else f"e{i}^-1" for i, s in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"


def _parse_word(text):
    text = text.strip()
    if not text or text == "1":
        return []
    if _LETTER_RE.match(text):
        # a, b, c ... generators; upper case for inverses
        return [(ord(ch.lower()) - 96, 1 if ch.islower() else -1) for ch in text]
    out = []
    for tok in text.replace(",", " ").split():
        m = re.fullmatch(r"e?(-?\d+)(\^-1)?", tok)
        if not m:
            raise InvalidWord(f"cannot parse letter {tok!r}")
        v = int(m.group(1))
        out.append(-v if m.group(2) else v)
    return out


def commutator(u, v):
    """The word ``u v u^-1 v^-1``."""
    u, v = Word(u), Word(v)
    return u * v * u.inverse() * v.inverse()


def _stack_with_inverses(A, need_inverse):
    mats = A.matrices
    if not need_inverse:
        return mats
    if A.sl2:
        invs = np.empty_like(mats)
        invs[:, 0, 0] = mats[:, 1, 1]
        invs[:, 0, 1] = -mats[:, 0, 1]
        invs[:, 1, 0] = -mats[:, 1, 0]
        invs[:, 1, 1] = mats[:, 0, 0]
    else:
        try:
            invs = np.array([inverse(m) for m in mats])
        except SingularConjugator as exc:
            raise InvalidInput(f"inverse letter on a singular component: {exc}") from None
    return np.concatenate([mats, invs])


def _kernel_indices(word, n):
    return [i - 1 if s > 0 else n + i - 1 for i, s in word.letters]


def _check_word(word, n):
    word = Word(word)
    if word.max_index() > n:
        raise InvalidWord(f"word {word} uses a generator beyond n={n}")
    return word


def word_eval(w, A):
    """Image of ``w`` under ``e_j -> A_j``."""
    A = as_tuple(A)
    w = _check_word(w, A.n)
    need_inv = any(s < 0 for _, s in w.letters)
    stack = _stack_with_inverses(A, need_inv)
    return kernels.chain_product(stack, _kernel_indices(w, A.n))


def trace_word(w, A):
    """``tr(word_eval(w, A))``."""
    m = word_eval(w, A)
    return complex(m[0, 0] + m[1, 1])


def trace_words(words, A):
    """Traces of several words in one kernel call."""
    A = as_tuple(A)
    words = [_check_word(w, A.n) for w in words]
    need_inv = any(s < 0 for w in words for _, s in w.letters)
    stack = _stack_with_inverses(A, need_inv)
    idx, offsets = [], [0]
    for w in words:
        idx.extend(_kernel_indices(w, A.n))
        offsets.append(len(idx))
    return kernels.chain_traces(stack, idx, offsets)


def random_sl2(seed, count):
    """``count`` pseudo-random SL(2, C) matrices from a seeded stream.

    Each is a complexified quaternion with standard complex normal
    coordinates, rescaled to unit quadratic norm; draws whose norm has
    magnitude below 1e-6 are rejected.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        q = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        norm2 = np.sum(q * q)
        if abs(norm2) < 1e-6:
            continue
        q = q / np.sqrt(norm2)
        out.append(quaternion_matrix(*q))
    return out


def random_tuple(n, seed):
    """Random SL(2, C) n-tuple, see :func:`random_sl2`."""
    return NTuple._trusted(np.array(random_sl2(seed, n)), True)


def random_sl2_element(rng):
    """One random SL(2, C) matrix drawn from an existing generator."""
    while True:
        q = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        norm2 = np.sum(q * q)
        if abs(norm2) >= 1e-6:
            return quaternion_matrix(*(q / np.sqrt(norm2)))
