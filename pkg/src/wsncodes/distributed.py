"""Two-node codecs exploiting correlation between the sensors' samples.

Node 1 (odd) holds ``x`` and node 2 (even) holds ``y``. Estimators take
``(n, 2)`` arrays of ``[x, y]`` pairs; ``transform`` returns
``[code_x, nbits_x, code_y, nbits_y]`` rows and ``inverse_transform`` decodes
them jointly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bitstream import bit_length
from .exceptions import CorruptStreamError
from .metrics import meter_or_null
from .scalar import from_sign_magnitude, sign_magnitude
from .validation import check_coded, check_pairs, check_sample

RESIDUE_NODE = 1
REFERENCE_NODE = 2


def hamming_distance(x, y) -> int:
    """Differing positions of two equal-length words (strings or sequences)."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")
    return sum(a != b for a, b in zip(x, y))


def _weight(v: int) -> int:
    return bin(v).count("1")


# -- Modulo-N ----------------------------------------------------------------

@dataclass(frozen=True)
class ModuloParams:
    N: int = 8

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("modulus must be at least 2")

    @property
    def residue_bits(self) -> int:
        return bit_length(self.N - 1)


def modulo_encode(v: int, node: int, params: ModuloParams = ModuloParams()) -> int:
    v = check_sample(v)
    return v % params.N if node % 2 == 1 else v


def modulo_joint_decode(ref: int, residue: int, params: ModuloParams = ModuloParams()) -> int:
    """Place the residue in the reference sample's bin of width N."""
    if not 0 <= residue < params.N:
        raise ValueError(f"residue {residue} outside 0..{params.N - 1}")
    return (ref // params.N) * params.N + residue


# -- integer Haar ------------------------------------------------------------

def haar_encode_pair(a: int, b: int) -> tuple[int, int]:
    a, b = check_sample(a), check_sample(b)
    return a + b, a - b


def haar_decode_pair(s: int, d: int) -> tuple[int, int]:
    if (s + d) % 2:
        raise CorruptStreamError(f"sum {s} and difference {d} differ in parity")
    a, b = (s + d) // 2, (s - d) // 2
    if not (0 <= a <= 255 and 0 <= b <= 255):
        raise CorruptStreamError(f"Haar pair decodes outside 0..255: {(a, b)}")
    return a, b


# -- GF(2) helpers -----------------------------------------------------------

def gf2_rref(M) -> tuple[np.ndarray, list]:
    M = np.array(M, dtype=np.uint8) % 2
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = next((i for i in range(r, rows) if M[i, c]), None)
        if hit is None:
            continue
        M[[r, hit]] = M[[hit, r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def gf2_rank(M) -> int:
    return len(gf2_rref(M)[1])


def gf2_nullspace(M) -> np.ndarray:
    """Basis (as rows) of ``{v : M v = 0}`` over GF(2)."""
    R, pivots = gf2_rref(M)
    cols = R.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = R[i, f]
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


def word_to_bits(x: int, n: int = 7) -> np.ndarray:
    return np.array([(x >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def bits_to_word(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _row_masks(M) -> tuple:
    return tuple(bits_to_word(row) for row in M)


def _syndrome(masks, x: int) -> int:
    s = 0
    for m in masks:
        s = (s << 1) | (_weight(m & x) & 1)
    return s


# -- DISCUS ------------------------------------------------------------------

HAMMING_G = np.array(
    [
        [1, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 1, 0, 1],
        [0, 0, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)


def _span(rows) -> list:
    masks = _row_masks(rows)
    out = set()
    for coeffs in product((0, 1), repeat=len(masks)):
        w = 0
        for c, m in zip(coeffs, masks):
            if c:
                w ^= m
        out.add(w)
    return sorted(out)


class JointDecode(NamedTuple):
    x: int
    y: int
    distance: int
    ambiguous: bool


class DiscusCode:
    """(7,4) Hamming code split into two 2-dimensional sub-codes.

    ``H1``/``H2`` are 5x7 parity checks of the sub-codes, so a word is sent
    as its 5-bit coset index; ``H`` is the 3x7 check of the full code.
    """

    def __init__(self, G=HAMMING_G, t=1):
        G = np.asarray(G, dtype=np.uint8)
        if G.shape != (4, 7) or gf2_rank(G) != 4:
            raise ValueError("generator must be a full-rank 4x7 binary matrix")
        self.G, self.t = G, t
        self.G1, self.G2 = G[:2], G[2:]
        self.H1, self.H2 = gf2_nullspace(self.G1), gf2_nullspace(self.G2)
        self.H = gf2_nullspace(G)
        self.C1, self.C2, self.C = _span(self.G1), _span(self.G2), _span(G)
        self._masks = {1: _row_masks(self.H1), 2: _row_masks(self.H2)}
        self._full_masks = _row_masks(self.H)
        self._reps = {1: {}, 2: {}}
        for sub in (1, 2):
            for w in range(128):
                self._reps[sub].setdefault(_syndrome(self._masks[sub], w), w)
        self._leaders = {}
        for e in [0] + [1 << i for i in range(7)]:
            self._leaders.setdefault(_syndrome(self._full_masks, e), e)
        self._split = {c1 ^ c2: (c1, c2) for c1 in self.C1 for c2 in self.C2}

    @property
    def syndrome_bits(self) -> int:
        return self.H1.shape[0]

    def syndrome(self, x: int, sub: int) -> int:
        return _syndrome(self._masks[sub], x)

    def coset(self, s: int, sub: int) -> list:
        base = self._reps[sub][s]
        return sorted(base ^ c for c in (self.C1 if sub == 1 else self.C2))

    def dump(self) -> str:
        """Binary rows of every matrix, for checking against other tools."""
        parts = []
        for name in ("G", "G1", "G2", "H1", "H2", "H"):
            parts.append(f"{name}:")
            parts.extend("".join(str(b) for b in row) for row in getattr(self, name))
        return "\n".join(parts) + "\n"


@lru_cache(maxsize=None)
def default_discus_code() -> DiscusCode:
    return DiscusCode(HAMMING_G)


def _check_word(x: int) -> int:
    if not 0 <= int(x) < 128:
        raise ValueError(f"DISCUS words are 7 bits, got {x}")
    return int(x)


def discus_encode(x: int, sub: int, code: DiscusCode | None = None, meter=None) -> int:
    code = code or default_discus_code()
    if sub not in (1, 2):
        raise ValueError("sub must be 1 or 2")
    meter_or_null(meter).tick("row", code.syndrome_bits)
    return code.syndrome(_check_word(x), sub)


def discus_joint_decode(s1: int, s2: int, code: DiscusCode | None = None, meter=None) -> JointDecode:
    """Closest pair (x, y) with x in coset s1 of C1 and y in coset s2 of C2.

    x ^ y lies in a coset of the full Hamming code whose leader has weight
    at most one; removing it leaves a codeword that splits uniquely into
    its C1 and C2 parts.
    """
    code = code or default_discus_code()
    meter = meter_or_null(meter)
    if not (0 <= s1 < 32 and 0 <= s2 < 32):
        raise ValueError("syndromes are 5 bits")
    meter.tick("probe", 2)
    a1, a2 = code._reps[1][s1], code._reps[2][s2]
    z = a1 ^ a2
    meter.tick("row", len(code._full_masks))
    e = code._leaders[_syndrome(code._full_masks, z)]
    meter.tick("probe", 2)
    c1, c2 = code._split[z ^ e]
    x, y = a1 ^ c1, a2 ^ c2
    dist = _weight(x ^ y)
    return JointDecode(x, y, dist, dist > code.t)


# -- estimators --------------------------------------------------------------

class PairCodec(TransformerMixin, BaseEstimator):
    lossless = True

    def fit(self, X=None, y=None):
        if X is not None:
            check_pairs(X)
        self._build()
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_pairs(X)
        out = np.zeros((len(X), 4), dtype=np.int64)
        for k, (a, b) in enumerate(X):
            out[k, :2] = self.encode_node(RESIDUE_NODE, int(a), int(b))
            out[k, 2:] = self.encode_node(REFERENCE_NODE, int(a), int(b))
        return out

    def inverse_transform(self, C):
        check_is_fitted(self)
        C = check_coded(C, 4)
        out = np.zeros((len(C), 2), dtype=np.int64)
        for k, row in enumerate(C):
            out[k] = self.decode_pair(*(int(v) for v in row))
        return out


class ModuloCodec(PairCodec):
    """Node 1 sends its sample modulo ``n``; node 2 sends its raw sample."""

    lossless = False

    def __init__(self, n=8):
        self.n = n

    def _build(self):
        self.params_ = ModuloParams(int(self.n))

    def encode_node(self, node, x, y, meter=None):
        meter_or_null(meter).tick("compute")
        if node % 2 == 1:
            return modulo_encode(x, node, self.params_), self.params_.residue_bits
        v = modulo_encode(y, node, self.params_)
        return v, bit_length(v)

    def decode_pair(self, c1, n1, c2, n2, meter=None):
        meter_or_null(meter).tick("compute")
        return modulo_joint_decode(c2, c1, self.params_), c2


class HaarCodec(PairCodec):
    """1-level integer Haar: node 1 sends the sum, node 2 the difference."""

    def _build(self):
        self.fitted_ = True

    def encode_node(self, node, x, y, meter=None):
        meter_or_null(meter).tick("compute")
        s, d = haar_encode_pair(x, y)
        if node % 2 == 1:
            return s, bit_length(s)
        return sign_magnitude(d)

    def decode_pair(self, c1, n1, c2, n2, meter=None):
        meter_or_null(meter).tick("compute", 2)
        return haar_decode_pair(c1, from_sign_magnitude(c2, n2))


class DiscusCodec(PairCodec):
    """Syndrome coding of 7-bit words; each node sends 5 bits."""

    lossless = False

    def __init__(self, generator=None):
        self.generator = generator

    def _build(self):
        G = HAMMING_G if self.generator is None else np.asarray(self.generator)
        self.code_ = default_discus_code() if self.generator is None else DiscusCode(G)

    def encode_node(self, node, x, y, meter=None):
        word = x if node % 2 == 1 else y
        sub = 1 if node % 2 == 1 else 2
        return discus_encode(word, sub, self.code_, meter), self.code_.syndrome_bits

    def decode_pair(self, c1, n1, c2, n2, meter=None):
        res = discus_joint_decode(c1, c2, self.code_, meter)
        return res.x, res.y
