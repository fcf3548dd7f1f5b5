"""Exterior algebra of the coframe theta_0..theta_3 and the conformal generators.

Theta monomials are bitmasks (bit i set iff theta_i appears), kept in the
canonical increasing order.  Generators are the conformal scaling s0, three
boosts s1,s2,s3, three rotations s23,s31,s12, and the coordinate derivations
d0..d3 (which annihilate every theta and, for the spatial ones, the
coordinate t).  A SignConvention fixes the undetermined action signs of the
boosts and rotations on the coframe; see `calibration` for how the winning
convention is selected.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

SIGMAS = ("s0", "s1", "s2", "s3", "s23", "s31", "s12")
DERS = ("d0", "d1", "d2", "d3")
GENS = SIGMAS + DERS

ROT_PAIR = {"s23": (2, 3), "s31": (3, 1), "s12": (1, 2)}
ROT_OF = {1: "s23", 2: "s31", 3: "s12"}
BOOST_OF = {1: "s1", 2: "s2", 3: "s3"}
DER_AXIS = {"d0": 0, "d1": 1, "d2": 2, "d3": 3}

ALL_MASKS = tuple(range(16))
FULL_MASK = 0b1111


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        if m & (1 << i):
            raise ValueError(f"repeated index {i}")
        m |= 1 << i
    return m


def mask_indices(mask: int):
    return tuple(i for i in range(4) if mask & (1 << i))


def mask_degree(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=None)
def wedge(m1: int, m2: int):
    """Sign and mask of theta_m1 ^ theta_m2; (0, 0) when they overlap."""
    if m1 & m2:
        return 0, 0
    sign = 1
    for i in mask_indices(m2):
        higher = m1 >> (i + 1)
        if bin(higher).count("1") % 2:
            sign = -sign
    return sign, m1 | m2


def canon_sign(seq):
    """Permutation sign sorting seq ascending; 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign, tuple(sorted(seq))


class ConventionError(ValueError):
    pass


@dataclass(frozen=True)
class SignConvention:
    """Boost signs eps/eps_prime and rotation signs eta, all in {+1,-1}.

    s_i theta_0 = eps_i theta_i,  s_i theta_i = eps'_i theta_0,
    s_jk theta_j = eta_i theta_k, s_jk theta_k = -eta_i theta_j
    for cyclic (i,j,k); s0 is the identity on W.
    """

    eps: tuple = (1, 1, 1)
    eps_prime: tuple = (1, 1, 1)
    eta: tuple = (-1, -1, -1)

    def __post_init__(self):
        for tup in (self.eps, self.eps_prime, self.eta):
            if len(tup) != 3 or any(v not in (1, -1) for v in tup):
                raise ConventionError(f"signs must be +-1 triples, got {tup}")

    def key(self) -> str:
        fmt = lambda t: "".join("+" if v == 1 else "-" for v in t)  # noqa: E731
        return f"eps={fmt(self.eps)} eps'={fmt(self.eps_prime)} eta={fmt(self.eta)}"

    def w_matrix(self, gen: str):
        """Matrix M with gen(theta_a) = sum_b M[b][a] theta_b; None for ders."""
        if gen in DERS:
            return None
        M = [[0] * 4 for _ in range(4)]
        if gen == "s0":
            for a in range(4):
                M[a][a] = 1
        elif gen in ("s1", "s2", "s3"):
            i = int(gen[1])
            M[i][0] = self.eps[i - 1]
            M[0][i] = self.eps_prime[i - 1]
        else:
            j, k = ROT_PAIR[gen]
            i = 6 - j - k
            M[k][j] = self.eta[i - 1]
            M[j][k] = -self.eta[i - 1]
        return M

    def is_matrix_symmetric(self) -> bool:
        """Boosts symmetric, rotations antisymmetric as matrices (so(1,3) style)."""
        return self.eps == self.eps_prime


@lru_cache(maxsize=None)
def sigma_on_monomial(conv: SignConvention, gen: str, mask: int):
    """Derivation extension of a sigma generator: list of (int coeff, mask)."""
    M = conv.w_matrix(gen)
    out = {}
    idxs = mask_indices(mask)
    for pos, a in enumerate(idxs):
        for b in range(4):
            c = M[b][a]
            if c == 0:
                continue
            seq = list(idxs)
            seq[pos] = b
            s, srt = canon_sign(seq)
            if s == 0:
                continue
            m2 = mask_of(srt)
            out[m2] = out.get(m2, 0) + c * s
    return tuple((c, m) for m, c in sorted(out.items()) if c != 0)


def omega_weight(gen: str) -> int:
    """Derivation-extension weight of a sigma on Omega = wedge^4 W."""
    return 4 if gen == "s0" else 0


@lru_cache(maxsize=None)
def sigma_commutator(conv: SignConvention, g1: str, g2: str):
    """[g1,g2] as a combination of sigma generators; error if outside the span."""
    M1, M2 = conv.w_matrix(g1), conv.w_matrix(g2)
    C = [
        [
            sum(M1[b][m] * M2[m][a] - M2[b][m] * M1[m][a] for m in range(4))
            for a in range(4)
        ]
        for b in range(4)
    ]
    combo = []
    for gen in SIGMAS:
        Mg = conv.w_matrix(gen)
        entries = [(b, a) for b in range(4) for a in range(4) if Mg[b][a] != 0]
        nz = [(b, a) for b, a in entries if C[b][a] != 0]
        if not nz:
            continue
        b0, a0 = entries[0]
        coef, rem = divmod(C[b0][a0], Mg[b0][a0])
        if rem != 0:
            raise ConventionError(f"[{g1},{g2}] not in the sigma span for {conv.key()}")
        if coef:
            combo.append((coef, gen))
            for b, a in entries:
                C[b][a] -= coef * Mg[b][a]
    if any(C[b][a] for b in range(4) for a in range(4)):
        raise ConventionError(f"[{g1},{g2}] not in the sigma span for {conv.key()}")
    return tuple(combo)


def generator_commutator(conv: SignConvention, g1: str, g2: str):
    """Commutator of two generators inside CDerEnd(W)."""
    if g1 in DERS or g2 in DERS:
        return ()  # coordinate ders commute; sigmas have constant matrices
    return sigma_commutator(conv, g1, g2)


# -- Z2 parities for the three orthogonal decompositions --------------------

# decomposition d: W0 = span(theta_0, theta_{d+1}), W1 = the other two
_W1 = {0: (2, 3), 1: (3, 1), 2: (1, 2)}


def mask_parity(mask: int, d: int) -> int:
    return sum(1 for i in _W1[d] if mask & (1 << i)) % 2


def gen_parity(gen: str, d: int) -> int:
    if gen in DERS or gen == "s0":
        return 0
    if gen in ("s1", "s2", "s3"):
        i = int(gen[1])
        return 1 if i in _W1[d] else 0
    j, k = ROT_PAIR[gen]
    return (int(j in _W1[d]) + int(k in _W1[d])) % 2


def slot_parity(mask: int, gen: str, d: int) -> int:
    return (mask_parity(mask, d) + gen_parity(gen, d)) % 2


def slot_parities(mask: int, gen: str):
    return tuple(slot_parity(mask, gen, d) for d in range(3))


def enumerate_conventions():
    """All 512 boost/rotation sign assignments."""
    for eps in product((1, -1), repeat=3):
        for epsp in product((1, -1), repeat=3):
            for eta in product((1, -1), repeat=3):
                yield SignConvention(eps, epsp, eta)


DEFAULT_CONVENTION = SignConvention()
