"""Dense complex linear algebra primitives.

Small deterministic building blocks shared by every higher layer:
ordered eigendecompositions, nullity-one kernel vectors, Sylvester
solves by explicit vectorization, and companion-matrix polynomial
roots.  Matrices are plain complex128 numpy arrays; tolerances are read
relative to the scale of the input, with genericity gates defaulting to
GENERICITY_TOL.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegreeZero,
    NonGeneric,
    RankUnexpected,
    ResidualTooLarge,
    SpectraOverlap,
)

GENERICITY_TOL = 1e-7


def as_square_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def matrix_scale(a) -> float:
    return max(1.0, float(np.linalg.norm(a)))


def canonical_order(values, scale=None) -> np.ndarray:
    """Indices sorting complex values by (Re, Im), with a fuzz band.

    Values whose real parts agree to within 1e-10 * scale count as tied
    and are ordered by imaginary part, so conjugate pairs come out in a
    reproducible order even when rounding perturbs the real parts.
    """
    values = np.asarray(values, dtype=np.complex128)
    if values.size == 0:
        return np.array([], dtype=int)
    if scale is None:
        scale = max(1.0, float(np.max(np.abs(values))))
    fuzz = 1e-10 * scale
    order = np.lexsort((values.imag, values.real))
    sv = values[order]
    out: list[int] = []
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and sv[j + 1].real - sv[j].real < fuzz:
            j += 1
        group = sorted(order[i : j + 1], key=lambda k: (values[k].imag, values[k].real))
        out.extend(group)
        i = j + 1
    return np.array(out, dtype=int)


def sort_canonical(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128)
    return values[canonical_order(values)]


def min_pair_gap(values) -> float:
    values = np.asarray(values).ravel()
    if values.size < 2:
        return np.inf
    d = np.abs(values[:, None] - values[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def min_cross_gap(a_values, b_values) -> float:
    a = np.asarray(a_values).ravel()
    b = np.asarray(b_values).ravel()
    return float(np.abs(a[:, None] - b[None, :]).min())


def _fix_phase(v: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(v)))
    piv = v[j]
    if piv == 0:
        return v
    return v * (abs(piv) / piv)


def eigen(a, ordered: bool = True, tol: float = GENERICITY_TOL):
    """Eigenvalues in canonical order with matching unit right eigenvectors.

    With ordered=True the spectrum must be simple: a pair of eigenvalues
    closer than tol * scale raises NonGeneric, since a caller asking for
    an ordered spectrum is about to rely on the labels.
    """
    a = as_square_matrix(a)
    w, v = np.linalg.eig(a)
    idx = canonical_order(w)
    w = w[idx]
    v = v[:, idx]
    scale = matrix_scale(a)
    if ordered and min_pair_gap(w) < tol * scale:
        raise NonGeneric(
            f"eigenvalue gap {min_pair_gap(w):.2e} below {tol:.0e} * scale; ordered spectrum unusable"
        )
    for k in range(v.shape[1]):
        col = v[:, k]
        col = col / np.linalg.norm(col)
        v[:, k] = _fix_phase(col)
    resid = float(np.linalg.norm(a @ v - v * w[None, :])) / scale
    if resid > 1e-10:
        raise ResidualTooLarge(f"eigendecomposition residual {resid:.2e} exceeds 1e-10")
    return w, v


def nullspace_vector(a, tol: float = 1e-8, scale: float | None = None) -> np.ndarray:
    """Unit kernel vector of a matrix with numerical nullity one.

    The sign convention makes the largest-magnitude entry real positive.
    scale overrides the largest singular value as the rank reference,
    which matters when the whole matrix is small.
    """
    a = as_square_matrix(a)
    _, s, vh = np.linalg.svd(a)
    ref = s[0] if scale is None else max(s[0], float(scale))
    if ref == 0:
        raise RankUnexpected("zero matrix has full nullity")
    nullity = int(np.sum(s <= tol * ref))
    if nullity != 1:
        raise RankUnexpected(f"nullity {nullity} at tolerance {tol:.0e}, expected 1")
    return _fix_phase(vh[-1].conj())


def solve_sylvester(a, b, c, tol: float = GENERICITY_TOL) -> np.ndarray:
    """Solve a X - X b = c by vectorizing to an m^2 x m^2 linear system.

    Requires the spectra of a and b to be disjoint at tolerance, which
    is exactly the invertibility condition of the vectorized operator.
    """
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    c = as_square_matrix(c)
    m = a.shape[0]
    if b.shape[0] != m or c.shape[0] != m:
        raise ValueError("solve_sylvester needs three matrices of identical size")
    wa = np.linalg.eigvals(a)
    wb = np.linalg.eigvals(b)
    scale = max(1.0, float(np.max(np.abs(wa))), float(np.max(np.abs(wb))))
    if min_cross_gap(wa, wb) < tol * scale:
        raise SpectraOverlap(
            f"spectra of the coefficients come within {min_cross_gap(wa, wb):.2e}; system singular"
        )
    k = np.kron(a, np.eye(m)) - np.kron(np.eye(m), b.T)
    try:
        x = np.linalg.solve(k, c.reshape(-1)).reshape(m, m)
    except np.linalg.LinAlgError as exc:
        raise SpectraOverlap("vectorized Sylvester system is singular") from exc
    resid = float(np.linalg.norm(a @ x - x @ b - c))
    bound = 1e-10 * (np.linalg.norm(a) + np.linalg.norm(b)) * max(np.linalg.norm(x), 1e-30)
    if resid > max(bound, 1e-14 * np.linalg.norm(c)):
        raise ResidualTooLarge(f"Sylvester residual {resid:.2e} above its certificate")
    return x


def poly_roots(coeffs) -> np.ndarray:
    """Roots of a scalar polynomial given coefficients, leading first.

    Computed as companion-matrix eigenvalues, returned in canonical
    order.
    """
    c = np.asarray(coeffs, dtype=np.complex128).ravel()
    if c.size < 2:
        raise DegreeZero("polynomial is constant")
    if c[0] == 0:
        raise DegreeZero("leading coefficient is zero")
    monic = c / c[0]
    k = c.size - 1
    comp = np.zeros((k, k), dtype=np.complex128)
    comp[0, :] = -monic[1:]
    if k > 1:
        comp[1:, :-1] = np.eye(k - 1)
    w = np.linalg.eigvals(comp)
    return sort_canonical(w)
