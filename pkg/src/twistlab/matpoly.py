"""Monic matrix polynomials and their spectral refactorizations.

A degree-d monic matrix polynomial is stored through the coefficient
list (a_1, ..., a_d) of

    p(t) = t^d - a_1 t^{d-1} + a_2 t^{d-2} - ... + (-1)^d a_d

so a factorization p(t) = (t - b_1)...(t - b_d) has a_1 = b_1 + ... and
a_d = b_1 ... b_d.  The md roots of det p(t) split across the factors:
choosing a partition of the roots into blocks of size m selects a unique
factorization whose i-th factor has the i-th block as spectrum.  The
two-factor exchange that swaps spectra while preserving sum and product
comes from the Sylvester equation a_2 L - L a_1 = 1 via

    b_1 = a_1 + L^{-1},  b_2 = a_2 - L^{-1}

and the block structure of adjacent transpositions makes the induced
S_{mN} action on ordered factor tuples local: transpositions interior
to a factor only relabel its ordered spectrum, boundary transpositions
refactor one adjacent pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NonGeneric,
    PartitionInvalid,
    ResidualTooLarge,
    SingularLambda,
    SizeMismatch,
)
from .linalg import (
    GENERICITY_TOL,
    as_square_matrix,
    canonical_order,
    eigen,
    min_cross_gap,
    min_pair_gap,
    nullspace_vector,
    poly_roots,
    solve_sylvester,
)
from .transpositions import MatrixDomain, TwistedMap, adjacent_word


@dataclass(frozen=True)
class MatrixPolynomial:
    m: int
    coeffs: tuple

    def __post_init__(self):
        for a in self.coeffs:
            if a.shape != (self.m, self.m):
                raise SizeMismatch(f"coefficient shape {a.shape} does not match m={self.m}")

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def standard_coeffs(self) -> list[np.ndarray]:
        """[P_0 = I, P_1, ..., P_d] with p(t) = sum_k P_k t^{d-k}."""
        out = [np.eye(self.m, dtype=np.complex128)]
        for k, a in enumerate(self.coeffs, start=1):
            out.append(((-1) ** k) * a)
        return out

    def value(self, t: complex) -> np.ndarray:
        return _value(self.standard_coeffs(), t)

    def scale(self) -> float:
        return max(1.0, max(float(np.linalg.norm(a)) for a in self.coeffs))


def matrix_polynomial(m: int, coeffs) -> MatrixPolynomial:
    return MatrixPolynomial(int(m), tuple(as_square_matrix(a) for a in coeffs))


def _value(std: list[np.ndarray], t: complex) -> np.ndarray:
    acc = std[0].copy()
    for p in std[1:]:
        acc = acc * t + p
    return acc


@dataclass(frozen=True)
class FactorTuple:
    """Ordered linear factors (t - b_i) with ordered eigenvalue labels."""

    factors: tuple
    spectra: tuple

    @property
    def m(self) -> int:
        return self.factors[0].shape[0]

    @classmethod
    def from_matrices(cls, mats, tol: float = GENERICITY_TOL) -> "FactorTuple":
        mats = tuple(as_square_matrix(b) for b in mats)
        spectra = []
        for b in mats:
            w, _ = eigen(b, ordered=True, tol=tol)
            spectra.append(tuple(w))
        allvals = np.concatenate([np.asarray(s) for s in spectra])
        scale = max(1.0, float(np.max(np.abs(allvals))))
        if min_pair_gap(allvals) < tol * scale:
            raise NonGeneric("factor spectra are not pairwise disjoint at tolerance")
        return cls(mats, tuple(spectra))

    def labels(self) -> list[complex]:
        out: list[complex] = []
        for s in self.spectra:
            out.extend(s)
        return out


def multiply(factors) -> MatrixPolynomial:
    """Expand the ordered product (t - b_1)...(t - b_N)."""
    mats = factors.factors if isinstance(factors, FactorTuple) else tuple(factors)
    mats = [as_square_matrix(b) for b in mats]
    if not mats:
        raise SizeMismatch("need at least one factor")
    m = mats[0].shape[0]
    if any(b.shape != (m, m) for b in mats):
        raise SizeMismatch("factors must share one square size")
    std = [np.eye(m, dtype=np.complex128)]
    for b in mats:
        nxt = [std[0]]
        for k in range(1, len(std) + 1):
            pk = std[k] if k < len(std) else np.zeros((m, m), dtype=np.complex128)
            nxt.append(pk - std[k - 1] @ b)
        std = nxt
    coeffs = tuple(((-1) ** k) * std[k] for k in range(1, len(std)))
    return MatrixPolynomial(m, coeffs)


def det_coeffs(poly: MatrixPolynomial) -> np.ndarray:
    """Coefficients of det p(t), leading first, by evaluation at scaled
    roots of unity followed by an inverse FFT."""
    md = poly.m * poly.degree
    nodes_n = md + 1
    r = 1.0 + 2.0 * max(
        float(np.linalg.norm(a, 2)) ** (1.0 / k) for k, a in enumerate(poly.coeffs, start=1)
    )
    nodes = r * np.exp(2j * np.pi * np.arange(nodes_n) / nodes_n)
    std = poly.standard_coeffs()
    vals = np.array([np.linalg.det(_value(std, z)) for z in nodes])
    # vals[k] = sum_j (q_j r^j) e^{+2 pi i jk/N}, so the forward FFT inverts it
    asc = np.fft.fft(vals) / nodes_n / r ** np.arange(nodes_n)
    if abs(asc[-1] - 1) > 1e-6:
        raise ResidualTooLarge("determinant interpolation lost the monic leading coefficient")
    asc[-1] = 1.0
    return asc[::-1]


def spectrum(poly: MatrixPolynomial, tol: float = GENERICITY_TOL) -> np.ndarray:
    """The md determinant roots in canonical order; rejects clustered roots.

    Companion roots of the interpolated determinant are polished by a
    few Newton steps on det p(t) itself, which is evaluable to machine
    precision; the interpolation radius would otherwise cap the root
    accuracy near 1e-8 for degree-9 determinants.
    """
    roots = poly_roots(det_coeffs(poly))
    std = poly.standard_coeffs()
    scale = max(1.0, float(np.max(np.abs(roots))))
    step = 1e-7 * scale
    polished = []
    for z in roots:
        for _ in range(4):
            g0 = np.linalg.det(_value(std, z))
            gp = np.linalg.det(_value(std, z + step))
            gm = np.linalg.det(_value(std, z - step))
            deriv = (gp - gm) / (2 * step)
            if deriv == 0:
                break
            dz = g0 / deriv
            if abs(dz) > 0.1 * scale:
                break
            z = z - dz
            if abs(dz) < 1e-14 * scale:
                break
        polished.append(z)
    roots = np.asarray(polished)[canonical_order(polished)]
    if min_pair_gap(roots) < tol * scale:
        raise NonGeneric(f"determinant roots cluster below {tol:.0e} * scale")
    return roots


def transpose_pair(a1, a2, tol: float = 1e-8):
    """Exchange transposition (a_1, a_2) -> (b_1, b_2) with swapped
    spectra and the same sum and product.

    Solves a_2 L - L a_1 = 1 and returns (a_1 + L^{-1}, a_2 - L^{-1});
    the contract identities are asserted before returning.
    """
    a1 = as_square_matrix(a1)
    a2 = as_square_matrix(a2)
    if a1.shape != a2.shape:
        raise SizeMismatch("pair must share one size")
    lam = solve_sylvester(a2, a1, np.eye(a1.shape[0]))
    s = np.linalg.svd(lam, compute_uv=False)
    if s[-1] <= 1e-10 * s[0]:
        raise SingularLambda("Sylvester solution is numerically singular")
    lam_inv = np.linalg.inv(lam)
    b1 = a1 + lam_inv
    b2 = a2 - lam_inv
    scale = max(1.0, np.linalg.norm(a1), np.linalg.norm(a2), np.linalg.norm(lam_inv))
    if np.linalg.norm((b1 + b2) - (a1 + a2)) > tol * scale:
        raise ResidualTooLarge("sum not preserved by the pair exchange")
    if np.linalg.norm(b1 @ b2 - a1 @ a2) > tol * scale * scale:
        raise ResidualTooLarge("product not preserved by the pair exchange")
    w1 = np.sort_complex(np.linalg.eigvals(a1))
    w2 = np.sort_complex(np.linalg.eigvals(a2))
    v1 = np.sort_complex(np.linalg.eigvals(b1))
    v2 = np.sort_complex(np.linalg.eigvals(b2))
    if np.max(np.abs(v1 - w2)) > tol * scale or np.max(np.abs(v2 - w1)) > tol * scale:
        raise ResidualTooLarge("spectra were not exchanged by the pair transposition")
    return b1, b2


def pair_map(m: int = 2) -> TwistedMap:
    """The pair exchange as a twisted transposition on m x m matrices."""
    dom = MatrixDomain(m)

    def gen(u, v):
        wu = np.linalg.eigvals(u)
        wv = np.linalg.eigvals(v)
        scale = max(1.0, float(np.max(np.abs(wu))), float(np.max(np.abs(wv))))
        return min_cross_gap(wu, wv) > 1e-4 * scale

    def ap(u, v):
        return transpose_pair(u, v)

    return TwistedMap("matpoly_pair", dom, ap, gen)


def _match_labels(labels, roots, tol: float) -> list[complex]:
    """Nearest-neighbor match of prescribed labels onto computed roots."""
    roots = list(roots)
    used = [False] * len(roots)
    matched: list[complex] = []
    scale = max(1.0, max(abs(x) for x in labels))
    for lab in labels:
        best, best_d = -1, np.inf
        for i, r in enumerate(roots):
            if not used[i] and abs(r - lab) < best_d:
                best, best_d = i, abs(r - lab)
        if best < 0 or best_d > tol * scale:
            raise PartitionInvalid(f"label {lab} matches no determinant root within {tol:.0e} * scale")
        used[best] = True
        matched.append(roots[best])
    return matched


def _divide_right(std: list[np.ndarray], b: np.ndarray):
    """p(t) = q(t)(t - b) + R with right evaluation Horner."""
    qs = [std[0]]
    for k in range(1, len(std) - 1):
        qs.append(std[k] + qs[-1] @ b)
    rem = std[-1] + qs[-1] @ b
    return qs, rem


def factorize(poly: MatrixPolynomial, partition, tol: float = 1e-8) -> FactorTuple:
    """Unique factorization whose i-th factor carries the i-th block.

    Peels the rightmost factor repeatedly: kernel vectors of p at each
    block root give the eigenvectors of b_d, then a right Horner
    division with an explicit remainder bound reduces the degree.
    """
    m, d = poly.m, poly.degree
    blocks = [list(block) for block in partition]
    if len(blocks) != d or any(len(b) != m for b in blocks):
        raise PartitionInvalid(f"need {d} blocks of size {m}")
    flat = [x for b in blocks for x in b]
    scale_l = max(1.0, max(abs(x) for x in flat))
    if min_pair_gap(np.array(flat)) < GENERICITY_TOL * scale_l:
        raise PartitionInvalid("partition blocks are not disjoint at tolerance")
    roots = spectrum(poly)
    matched_blocks = [ _match_labels(b, roots, 1e-5) for b in blocks ]
    used = np.concatenate([np.asarray(b) for b in matched_blocks])
    if len(used) != len(roots):
        raise PartitionInvalid("partition does not cover the determinant roots")

    std = poly.standard_coeffs()
    pscale = poly.scale()
    out: list[tuple[np.ndarray, tuple]] = []
    for idx in range(d - 1, 0, -1):
        lam = matched_blocks[idx]
        cols = []
        for root in lam:
            val = _value(std, root)
            if m == 1:
                cols.append(np.ones(1, dtype=np.complex128))
            else:
                cols.append(nullspace_vector(val, tol=1e-6))
        vmat = np.column_stack(cols)
        sv = np.linalg.svd(vmat, compute_uv=False)
        # conditioning of the kernel basis bounds how many digits survive
        # the similarity; past 1e5 the 1e-7 accuracy contract is gone
        if sv[-1] < 1e-5 * sv[0]:
            raise NonGeneric("kernel vectors of one block are nearly dependent")
        b = vmat @ np.diag(lam) @ np.linalg.inv(vmat)
        std, rem = _divide_right(std, b)
        if np.linalg.norm(rem) > tol * pscale:
            raise ResidualTooLarge(f"division remainder {np.linalg.norm(rem):.2e} above tolerance")
        out.append((b, tuple(blocks[idx])))
    lam = matched_blocks[0]
    if d == 1:
        b1 = poly.coeffs[0]
    else:
        if len(std) != 2:
            raise ResidualTooLarge("peeling did not reduce to a linear factor")
        b1 = -std[1]
    out.append((b1, tuple(blocks[0])))
    out.reverse()
    return FactorTuple(tuple(b for b, _ in out), tuple(s for _, s in out))


def act_ordered(sigma, ft: FactorTuple, tol: float = 1e-8) -> FactorTuple:
    """Action of a permutation of the mN ordered eigenvalue slots.

    sigma is an image list over range(mN).  Interior adjacent swaps
    permute labels inside one factor; boundary swaps refactor the
    product of the adjacent pair with the exchanged eigenvalue sets.
    Labels move exactly, matrices move within tolerance.
    """
    m = ft.m
    n_fac = len(ft.factors)
    size = m * n_fac
    if len(sigma) != size:
        raise PartitionInvalid(f"permutation length {len(sigma)} does not match {size} slots")
    word = adjacent_word(sigma)
    mats = [b.copy() for b in ft.factors]
    labels = [list(s) for s in ft.spectra]
    for j in word:
        a, r = divmod(j, m)
        if r < m - 1:
            labels[a][r], labels[a][r + 1] = labels[a][r + 1], labels[a][r]
            continue
        la, lb = labels[a], labels[a + 1]
        new_la = la[: m - 1] + [lb[0]]
        new_lb = [la[m - 1]] + lb[1:]
        pairpoly = multiply([mats[a], mats[a + 1]])
        pair_ft = factorize(pairpoly, [new_la, new_lb], tol=tol)
        mats[a], mats[a + 1] = pair_ft.factors
        labels[a], labels[a + 1] = new_la, new_lb
    return FactorTuple(tuple(mats), tuple(tuple(s) for s in labels))
