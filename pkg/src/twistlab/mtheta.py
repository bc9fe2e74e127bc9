"""Matrix theta spaces and their refactorization transpositions.

A matrix theta space of order n collects the entire functions
f: C -> Mat_m satisfying, for the lattice generated by 1 and tau and
the Heisenberg pair (gamma_1, gamma_2),

    f(z + 1/m)   = gamma_1^{-1} f(z) gamma_1
    f(z + tau/m) = exp(-2 pi i (m n z - c)) gamma_2^{-1} f(z) gamma_2

The space has dimension m^2 n.  Composing the laws m times shows every
matrix entry lives in the scalar space of order L = m^2 n with shifted
parameter c_1 = m c - n m (m - 1) tau / 2, which is how the basis is
built: impose both laws at sample points on the span of the scalar
basis, and take the SVD nullspace.  det f has exactly m n simple zeros
per fundamental cell {s/m + t tau/m} for generic f, and the scaled sum
m * sum(zeros) is congruent to m c + m n / 2 modulo the (1, tau)
lattice; equivalently sum(zeros) = c + n/2 modulo the (1/m) lattice.

Degree-1 elements refactor like linear matrix polynomial factors: a
product f g determines, for each exchange of zero sets, a unique new
ordered factorization up to scalars.  That exchange is the theta
twisted transposition, and its local version gives the ordered
symmetric-group action on factor tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from ._kernels import theta_eval
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonGeneric,
    NullityMismatch,
    PartitionInvalid,
    RankUnexpected,
    ResidualTooLarge,
    SpectraOverlap,
    SumRuleViolated,
    ZeroCountMismatch,
)
from .linalg import nullspace_vector
from .transpositions import MAX_REDRAW, PointDomain, TwistedMap, adjacent_word

CELL_GATE = 1e-4
_TAIL_CUT = 40.0
_PROBE_FRACS = ((0.137, 0.211), (0.613, 0.377), (0.829, 0.641), (0.283, 0.907))


def clifford_pair(m: int):
    """Heisenberg pair: gamma_1 = diag(eps^a) with eps = exp(2 pi i / m)
    and gamma_2 the index-lowering cyclic shift, so that
    gamma_2 gamma_1 = eps gamma_1 gamma_2 and both have order m."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be positive")
    eps = np.exp(2j * np.pi / m)
    g1 = np.diag(eps ** np.arange(m)).astype(np.complex128)
    g2 = np.zeros((m, m), dtype=np.complex128)
    for a in range(m):
        g2[a, (a + 1) % m] = 1.0
    return g1, g2


@dataclass(frozen=True)
class LatticeParams:
    tau: complex
    m: int
    n: int
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        if self.tau.imag < 0.3:
            raise ValueError("Im tau must be at least 0.3 for the series to converge fast")
        if not 1 <= self.m <= 4:
            raise ValueError("m outside the supported desk scale 1..4")
        if not 1 <= self.n <= 3:
            raise ValueError("n outside the supported desk scale 1..3")
        if abs(self.c.imag) > 8.0:
            raise ValueError("Im c too large for the truncation window guard")

    @property
    def L(self) -> int:
        return self.m * self.m * self.n

    @property
    def c1(self) -> complex:
        return self.m * self.c - self.n * self.m * (self.m - 1) / 2.0 * self.tau

    @property
    def omega1(self) -> complex:
        return 1.0 / self.m

    @property
    def omega2(self) -> complex:
        return self.tau / self.m


class ScalarThetaBasis:
    """Evaluators for the L-dimensional space of entire functions with
    f(z + 1) = f(z) and f(z + tau) = exp(-2 pi i (L z - c1)) f(z).

    Basis member alpha is the Fourier series over wavenumbers congruent
    to alpha mod L whose coefficients obey the recursion
    a_{k+L} = a_k exp(2 pi i k tau) exp(-2 pi i c1), seeded by
    a_alpha = 1.  The quadratic decay of the exponents truncates the
    series to a window chosen so the dropped tail stays below 1e-15 of
    the dominant term at every height of the evaluation band.
    """

    def __init__(self, L: int, c1: complex, tau: complex, cap: int = 1024):
        self.L = int(L)
        self.c1 = complex(c1)
        self.tau = complex(tau)
        ti = self.tau.imag
        lo, hi = -0.25 * ti, 2.3 * ti + 0.2
        heights = np.linspace(lo, hi, 9)
        span = 16
        while True:
            js = np.arange(-span, span + 1)
            al = np.arange(self.L)[:, None]
            expo = js * al * self.tau + self.L * self.tau * js * (js - 1) / 2.0 - js * self.c1
            k = (al + js * self.L).astype(np.float64)
            loga = -2 * np.pi * expo.imag
            lm = loga[:, :, None] - 2 * np.pi * k[:, :, None] * heights[None, None, :]
            peak_per_h = lm.max(axis=(0, 1))
            if peak_per_h.max() > 600.0:
                raise ConvergenceFailure("series terms overflow double precision for these parameters")
            keep = (lm >= peak_per_h[None, None, :] - _TAIL_CUT).any(axis=(0, 2))
            idx = np.where(keep)[0]
            if idx.size and idx[0] > 0 and idx[-1] < len(js) - 1:
                break
            span *= 2
            if 2 * span + 1 > cap:
                raise ConvergenceFailure(f"truncation window exceeded the {cap}-term cap")
        window = slice(idx[0], idx[-1] + 1)
        if (window.stop - window.start) * self.L > cap * self.L:
            raise ConvergenceFailure("truncation window exceeded the term cap")
        self.ks = np.ascontiguousarray(k[:, window])
        self.coeffs = np.ascontiguousarray(np.exp(2j * np.pi * expo[:, window]))

    @property
    def terms(self) -> int:
        return self.coeffs.shape[1]

    def eval(self, zs) -> np.ndarray:
        zs = np.ascontiguousarray(np.atleast_1d(np.asarray(zs, dtype=np.complex128)))
        return theta_eval(self.coeffs, self.ks, zs)


def _cell_points(rng, count: int, tau: complex) -> np.ndarray:
    return rng.random(count) + rng.random(count) * tau


class MThetaBasis:
    """Orthonormal coefficient basis of one matrix theta space.

    Construction is deterministic per parameter set: the constraint
    sample points come from a fixed-seed generator, every m^2-row block
    is normalized by the magnitude of its own terms, and the nullspace
    is read off the SVD with an absolute anchor so identically satisfied
    constraints (the m = 1 case) are recognized.  A holdout check of
    both laws guards the result.
    """

    def __init__(self, params: LatticeParams):
        p = params
        m, n, L = p.m, p.n, p.L
        self.params = p
        self.scalar = ScalarThetaBasis(L, p.c1, p.tau)
        g1, g2 = clifford_pair(m)
        self._g = (g1, g2)
        rng = np.random.default_rng(180451)
        zs = _cell_points(rng, 2 * L, p.tau)
        t0 = self.scalar.eval(zs)
        t1 = self.scalar.eval(zs + 1.0 / m)
        t2 = self.scalar.eval(zs + p.tau / m)
        k1 = np.kron(np.linalg.inv(g1), g1.T)
        k2 = np.kron(np.linalg.inv(g2), g2.T)
        eye = np.eye(m * m)
        rows = []
        for s in range(len(zs)):
            e2 = np.exp(-2j * np.pi * (m * n * zs[s] - p.c))
            r1 = np.concatenate([t1[a, s] * eye - t0[a, s] * k1 for a in range(L)], axis=1)
            r2 = np.concatenate([t2[a, s] * eye - e2 * t0[a, s] * k2 for a in range(L)], axis=1)
            sc1 = max(np.abs(t1[:, s]).max(), np.abs(t0[:, s]).max(), 1e-300)
            sc2 = max(np.abs(t2[:, s]).max(), abs(e2) * np.abs(t0[:, s]).max(), 1e-300)
            rows.append(r1 / sc1)
            rows.append(r2 / sc2)
        mat = np.vstack(rows)
        _, sv, vh = np.linalg.svd(mat)
        anchor = max(float(sv[0]), 1.0)
        nullity = int(np.sum(sv <= 1e-8 * anchor))
        if nullity != L:
            raise DimensionMismatch(
                f"space dimension {nullity} but m^2 n = {L}; parameter derivation or tau is off"
            )
        self.dim = nullity
        self.phi = vh[len(vh) - nullity :].conj().reshape(nullity, L, m, m)
        hz = _cell_points(rng, 6, p.tau)
        worst = max(self.law_residual(self.phi[d], hz) for d in range(nullity))
        if worst > 1e-8:
            raise ConvergenceFailure(f"holdout law residual {worst:.2e} above 1e-8")
        self._probes = np.array([f1 + f2 * p.tau for f1, f2 in _PROBE_FRACS])
        self._probe_scale = float(
            max(np.linalg.norm(blk) for blk in self.eval_basis(self._probes).reshape(-1, m, m))
        )

    def eval_basis(self, zs) -> np.ndarray:
        th = self.scalar.eval(zs)
        return np.einsum("daij,ap->dpij", self.phi, th)

    def eval(self, x, zs) -> np.ndarray:
        th = self.scalar.eval(zs)
        comb = np.tensordot(np.asarray(x, dtype=np.complex128), self.phi, axes=1)
        return np.einsum("aij,ap->pij", comb, th)

    def law_residual(self, phi_comb, zs) -> float:
        """Worst relative residual of both transformation laws at zs."""
        p = self.params
        g1, g2 = self._g
        th0 = self.scalar.eval(zs)
        th1 = self.scalar.eval(zs + 1.0 / p.m)
        th2 = self.scalar.eval(zs + p.tau / p.m)
        f0 = np.einsum("aij,ap->pij", phi_comb, th0)
        f1 = np.einsum("aij,ap->pij", phi_comb, th1)
        f2 = np.einsum("aij,ap->pij", phi_comb, th2)
        worst = 0.0
        g1i = np.linalg.inv(g1)
        g2i = np.linalg.inv(g2)
        for s in range(len(zs)):
            e2 = np.exp(-2j * np.pi * (p.m * p.n * zs[s] - p.c))
            sc1 = max(np.linalg.norm(f0[s]), np.linalg.norm(f1[s]), 1e-300)
            sc2 = max(np.linalg.norm(f2[s]), abs(e2) * np.linalg.norm(f0[s]), 1e-300)
            worst = max(
                worst,
                np.linalg.norm(f1[s] - g1i @ f0[s] @ g1) / sc1,
                np.linalg.norm(f2[s] - e2 * g2i @ f0[s] @ g2) / sc2,
            )
        return float(worst)


@lru_cache(maxsize=512)
def _basis_cached(m: int, n: int, c: complex, tau: complex) -> MThetaBasis:
    return MThetaBasis(LatticeParams(tau=tau, m=m, n=n, c=c))


def mtheta_basis(params: LatticeParams) -> MThetaBasis:
    return _basis_cached(params.m, params.n, complex(params.c), complex(params.tau))


@dataclass(frozen=True, eq=False)
class ThetaElement:
    params: LatticeParams
    coeffs: np.ndarray
    zeros: tuple | None = None

    def basis(self) -> MThetaBasis:
        return mtheta_basis(self.params)

    def eval(self, zs) -> np.ndarray:
        return self.basis().eval(self.coeffs, zs)

    def det(self, zs) -> np.ndarray:
        return np.linalg.det(self.eval(zs))

    def normalized(self) -> "ThetaElement":
        j = int(np.argmax(np.abs(self.coeffs)))
        piv = self.coeffs[j]
        if piv == 0:
            raise ValueError("cannot normalize the zero element")
        return replace(self, coeffs=self.coeffs / piv)

    def with_zeros(self, zeros) -> "ThetaElement":
        return replace(self, zeros=None if zeros is None else tuple(zeros))


def random_element(params: LatticeParams, rng) -> ThetaElement:
    basis = mtheta_basis(params)
    x = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
    return ThetaElement(params, x).normalized()


# ---------------------------------------------------------------------------
# lattice bookkeeping


def _lattice_solve(w: complex, o1: complex, o2: complex) -> np.ndarray:
    mat = np.array([[o1.real, o2.real], [o1.imag, o2.imag]], dtype=float)
    return np.linalg.solve(mat, [w.real, w.imag])


def lattice_distance(w: complex, o1: complex, o2: complex) -> float:
    """Distance from w to the lattice generated by o1 and o2."""
    xy = _lattice_solve(complex(w), complex(o1), complex(o2))
    frac = xy - np.round(xy)
    best = np.inf
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            cand = (frac[0] + dx) * o1 + (frac[1] + dy) * o2
            best = min(best, abs(cand))
    return float(best)


def modular_distance(a: complex, b: complex, o1: complex, o2: complex) -> float:
    return lattice_distance(complex(a) - complex(b), o1, o2)


def reduce_to_cell(z: complex, o1: complex, o2: complex) -> complex:
    xy = _lattice_solve(complex(z), complex(o1), complex(o2))
    xy -= np.floor(xy)
    return xy[0] * o1 + xy[1] * o2


def zero_sum_residual(points, params: LatticeParams) -> float:
    """Distance of m * sum(points) from m c + m n / 2 modulo the (1, tau)
    lattice, which is the sum rule satisfied by determinant zeros."""
    w = params.m * complex(np.sum(np.asarray(points, dtype=np.complex128)))
    target = params.m * params.c + params.m * params.n / 2.0
    return lattice_distance(w - target, 1.0, params.tau)


# ---------------------------------------------------------------------------
# determinant zeros


@dataclass(frozen=True)
class ZeroSet:
    points: tuple
    sum_residual: float


def det_zeros(f: ThetaElement, grid: int = 48, tol: float = 1e-6) -> ZeroSet:
    """Locate the m n determinant zeros in the fundamental cell.

    Coarse scan of |det f| (normalized by the theta growth envelope so
    local minima are meaningful at every height), Newton refinement of
    det f with central-difference derivatives, then modular dedup.
    """
    p = f.params
    o1, o2 = p.omega1, p.omega2
    expected = p.m * p.n
    g = int(grid)
    cell_size = abs(o1) + abs(o2)
    for _ in range(3):
        xs = (np.arange(g) + 0.5) / g
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        zs = (gx * o1 + gy * o2).ravel()
        dets = f.det(zs)
        env = np.exp(np.pi * p.m * p.n * (np.imag(p.m * zs)) ** 2 / p.tau.imag)
        ng = (np.abs(dets) / env).reshape(g, g)
        scale0 = float(ng.max())
        seeds = []
        for i in range(g):
            for j in range(g):
                v = ng[i, j]
                neighbors = (
                    ng[(i + di) % g, (j + dj) % g]
                    for di in (-1, 0, 1)
                    for dj in (-1, 0, 1)
                    if (di, dj) != (0, 0)
                )
                if all(v <= nb for nb in neighbors):
                    seeds.append(xs[i] * o1 + xs[j] * o2)
        flat_order = np.argsort(ng.ravel())
        seeds.extend(zs[flat_order[: 2 * expected + 4]])
        roots: list[complex] = []
        step = 1e-6
        for z0 in seeds:
            z = complex(z0)
            converged = False
            for _ in range(60):
                g0, gp, gm = f.det(np.array([z, z + step, z - step]))
                deriv = (gp - gm) / (2 * step)
                if deriv == 0:
                    break
                dz = g0 / deriv
                z -= dz
                if abs(dz) < 1e-12:
                    converged = True
                    break
                if abs(dz) > 3 * cell_size:
                    break
            if not converged:
                continue
            zc = reduce_to_cell(z, o1, o2)
            local = abs(f.det(np.array([zc]))[0]) / np.exp(
                np.pi * p.m * p.n * (np.imag(p.m * zc)) ** 2 / p.tau.imag
            )
            if local > 1e-7 * scale0:
                continue
            if all(modular_distance(zc, r, o1, o2) > CELL_GATE for r in roots):
                roots.append(zc)
        if len(roots) == expected:
            break
        g *= 2
    else:
        raise ZeroCountMismatch(f"found {len(roots)} determinant zeros, expected {expected}")
    coords = [tuple(_lattice_solve(r, o1, o2)) for r in roots]
    roots = [r for _, r in sorted(zip(coords, roots), key=lambda t: t[0])]
    sr = zero_sum_residual(roots, p)
    if sr > tol:
        raise SumRuleViolated(f"zero sum misses the lattice congruence by {sr:.2e}")
    return ZeroSet(tuple(roots), sr)


# ---------------------------------------------------------------------------
# interpolation and fitting


def _kernel_vector(mat: np.ndarray, m: int, side: str = "right") -> np.ndarray:
    if m == 1:
        return np.ones(1, dtype=np.complex128)
    try:
        return nullspace_vector(mat if side == "right" else mat.T, tol=1e-5)
    except RankUnexpected as exc:
        raise NonGeneric("matrix value has no one-dimensional kernel") from exc


def interpolate(
    params: LatticeParams,
    points,
    vectors,
    sum_tol: float = 1e-6,
    rank_rtol: float = 1e-8,
    resid_tol: float = 1e-7,
    side: str = "right",
) -> ThetaElement:
    """The unique element, up to scale, with f(p_k) v_k = 0.

    Needs m n points whose scaled sum meets the lattice congruence; the
    homogeneous linear system over the basis coefficients must then have
    a one-dimensional nullspace.  side="left" prescribes left kernel
    vectors instead: v_k^T f(p_k) = 0.
    """
    p = params
    points = [complex(z) for z in points]
    vectors = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    if len(points) != p.m * p.n or len(vectors) != len(points):
        raise PartitionInvalid(f"need {p.m * p.n} points and as many vectors")
    if any(np.linalg.norm(v) == 0 for v in vectors):
        raise PartitionInvalid("kernel vectors must be nonzero")
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    sr = zero_sum_residual(points, p)
    if sr > sum_tol:
        raise SumRuleViolated(f"prescribed zeros miss the sum congruence by {sr:.2e}")
    basis = mtheta_basis(p)
    beval = basis.eval_basis(np.array(points))
    rows = []
    for beta in range(len(points)):
        v = vectors[beta] / np.linalg.norm(vectors[beta])
        if side == "right":
            block = np.einsum("dij,j->id", beval[:, beta], v)
        else:
            block = np.einsum("i,dij->jd", v, beval[:, beta])
        # scale by the size of the terms entering the cancellation so the
        # genuinely null direction stays null after row balancing; the
        # floor keeps rows that are tiny outright (the 1x1 scalar case)
        # well below the rank cut instead of amplifying their noise
        sc = max(float(np.abs(block).max()), 1e-6 * basis._probe_scale)
        rows.append(block / sc)
    mat = np.vstack(rows)
    _, sv, vh = np.linalg.svd(mat)
    anchor = max(float(sv[0]), 1.0)
    nullity = int(np.sum(sv <= rank_rtol * anchor))
    if nullity != 1:
        raise NullityMismatch(f"interpolation nullity {nullity}, expected 1")
    x = vh[-1].conj()
    elem = ThetaElement(p, x, zeros=tuple(points)).normalized()
    vals = elem.eval(np.array(points))
    scale = float(
        max(np.linalg.norm(b) for b in elem.eval(basis._probes))
    )
    def _resid(k):
        v = vectors[k] / np.linalg.norm(vectors[k])
        if side == "right":
            return float(np.linalg.norm(vals[k] @ v))
        return float(np.linalg.norm(v @ vals[k]))
    worst = max(_resid(k) for k in range(len(points))) / max(scale, 1e-300)
    if worst > resid_tol:
        raise ResidualTooLarge(f"interpolation residual {worst:.2e} above {resid_tol:.0e}")
    return elem


def fit_element(
    params: LatticeParams,
    fn,
    point_filter=None,
    oversample: float = 3.0,
    resid_tol: float = 1e-6,
) -> ThetaElement:
    """Least-squares projection of a pointwise matrix function onto the
    space; the relative residual certifies membership.  Sample points
    come from a fixed-seed generator so results are reproducible."""
    basis = mtheta_basis(params)
    count = int(np.ceil(oversample * basis.dim)) + 4
    rng = np.random.default_rng(913041)
    pts: list[complex] = []
    attempts = 0
    while len(pts) < count and attempts < 50 * count:
        attempts += 1
        z = complex(rng.random() + rng.random() * params.tau)
        if point_filter is not None and not point_filter(z):
            continue
        pts.append(z)
    if len(pts) < count:
        raise NonGeneric("could not sample enough admissible fitting points")
    zs = np.array(pts)
    beval = basis.eval_basis(zs)
    target = np.asarray(fn(zs), dtype=np.complex128)
    m = params.m
    mat_rows = []
    rhs_rows = []
    for k in range(len(zs)):
        block = beval[:, k].reshape(basis.dim, m * m).T
        tgt = target[k].reshape(m * m)
        sc = max(float(np.abs(block).max()), float(np.abs(tgt).max()), 1e-300)
        mat_rows.append(block / sc)
        rhs_rows.append(tgt / sc)
    mat = np.vstack(mat_rows)
    rhs = np.concatenate(rhs_rows)
    x, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    resid = float(np.linalg.norm(mat @ x - rhs) / max(np.linalg.norm(rhs), 1e-300))
    if resid > resid_tol:
        raise ResidualTooLarge(f"projection residual {resid:.2e} above {resid_tol:.0e}")
    return ThetaElement(params, x)


def multiply_elements(f: ThetaElement, g: ThetaElement, resid_tol: float = 1e-8) -> ThetaElement:
    """Pointwise product fitted into the degree-(n_f + n_g) space."""
    if f.params.m != g.params.m or f.params.tau != g.params.tau:
        raise PartitionInvalid("product factors must share m and tau")
    pr = LatticeParams(tau=f.params.tau, m=f.params.m, n=f.params.n + g.params.n, c=f.params.c + g.params.c)

    def fn(zs):
        return np.matmul(f.eval(zs), g.eval(zs))

    zeros = None
    if f.zeros is not None and g.zeros is not None:
        zeros = tuple(f.zeros) + tuple(g.zeros)
    return fit_element(pr, fn, resid_tol=resid_tol).with_zeros(zeros)


def _quotient_fit(h: ThetaElement, right: ThetaElement, out_params: LatticeParams, resid_tol: float = 1e-6) -> ThetaElement:
    """Fit h(z) right(z)^{-1}, sampling away from det(right) zeros."""

    def filt(z):
        val = right.eval(np.array([z]))[0]
        s = np.linalg.svd(val, compute_uv=False)
        return s[-1] > 1e-4 * max(1.0, s[0])

    def fn(zs):
        rv = right.eval(zs)
        hv = h.eval(zs)
        return np.matmul(hv, np.linalg.inv(rv))

    return fit_element(out_params, fn, point_filter=filt, resid_tol=resid_tol)


def _ensure_zeros(f: ThetaElement) -> ThetaElement:
    if f.zeros is not None:
        return f
    return f.with_zeros(det_zeros(f).points)


def _best_fit_scalar(a: np.ndarray, b: np.ndarray) -> complex:
    denom = np.vdot(b, b)
    if denom == 0:
        return 1.0 + 0j
    return np.vdot(b, a) / denom


def _product_residual(left, right, reference) -> float:
    """Relative residual of left*right against reference up to one scalar."""
    zs = np.array([f1 + f2 * reference.params.tau for f1, f2 in _PROBE_FRACS] * 5) + np.array(
        [0.013 * k for k in range(20)]
    )
    lr = np.matmul(left.eval(zs), right.eval(zs)).ravel()
    ref = reference.eval(zs).ravel()
    s = _best_fit_scalar(ref, lr)
    return float(np.linalg.norm(lr * s - ref) / max(np.linalg.norm(ref), 1e-300))


def theta_mu(f: ThetaElement, g: ThetaElement, tol: float = 1e-6):
    """Exchange transposition on degree-1 elements.

    Returns (f1, g1) with f g = f1 g1 pointwise up to normalization
    scalars, the zero sets exchanged, and the c parameters exchanged
    along with them.
    """
    if f.params.n != 1 or g.params.n != 1:
        raise PartitionInvalid("theta transposition acts on degree-1 elements")
    if f.params.m != g.params.m or f.params.tau != g.params.tau:
        raise PartitionInvalid("operands must share m and tau")
    f = _ensure_zeros(f)
    g = _ensure_zeros(g)
    p = f.params
    gap = min(
        modular_distance(zf, zg, p.omega1, p.omega2) for zf in f.zeros for zg in g.zeros
    )
    if gap < CELL_GATE:
        raise SpectraOverlap(f"zero sets collide modulo the cell (gap {gap:.2e})")
    h = multiply_elements(f, g)
    # h = f1 g1 with the zero sets exchanged: right kernels of h at S(f)
    # are right kernels of g1, left kernels of h at S(g) are left kernels
    # of f1, so both factors come from well-conditioned interpolations.
    vs = [_kernel_vector(h.eval(np.array([z]))[0], p.m) for z in f.zeros]
    g1 = interpolate(LatticeParams(tau=p.tau, m=p.m, n=1, c=f.params.c), f.zeros, vs)
    ws = [_kernel_vector(h.eval(np.array([z]))[0], p.m, side="left") for z in g.zeros]
    f1 = interpolate(
        LatticeParams(tau=p.tau, m=p.m, n=1, c=g.params.c), g.zeros, ws, side="left"
    )
    resid = _product_residual(f1, g1, h)
    if resid > tol:
        raise ResidualTooLarge(f"product not preserved, residual {resid:.2e}")
    return f1, g1


def factorize_theta(f: ThetaElement, partition, csplit, tol: float = 1e-6) -> list[ThetaElement]:
    """Ordered factorization into degree-1 elements with prescribed
    zero blocks and c split.

    Peels the rightmost factor repeatedly: kernel vectors of f at the
    block points interpolate the factor, and the quotient is projected
    onto the next lower-degree space with a residual certificate.
    """
    p = f.params
    n, m = p.n, p.m
    blocks = [[complex(z) for z in block] for block in partition]
    cs = [complex(c) for c in csplit]
    if len(blocks) != n or len(cs) != n:
        raise PartitionInvalid(f"need {n} blocks and {n} c values")
    if any(len(b) != m for b in blocks):
        raise PartitionInvalid(f"every block must have size {m}")
    flat = [z for b in blocks for z in b]
    for i in range(len(flat)):
        for j in range(i + 1, len(flat)):
            if modular_distance(flat[i], flat[j], p.omega1, p.omega2) < CELL_GATE:
                raise PartitionInvalid("partition blocks are not disjoint modulo the cell")
    if abs(sum(cs) - p.c) > 1e-8 * max(1.0, abs(p.c)):
        raise PartitionInvalid("c split does not sum to the c of the element")
    for b, c in zip(blocks, cs):
        sr = zero_sum_residual(b, LatticeParams(tau=p.tau, m=m, n=1, c=c))
        if sr > 1e-6:
            raise SumRuleViolated(f"block sum misses its c congruence by {sr:.2e}")
    if n == 1:
        return [f.normalized().with_zeros(tuple(blocks[0]))]
    cur = f
    cur_c = p.c
    peeled: list[ThetaElement] = []
    for k in range(n - 1, 0, -1):
        block, ck = blocks[k], cs[k]
        vs = [_kernel_vector(cur.eval(np.array([z]))[0], m) for z in block]
        fk = interpolate(LatticeParams(tau=p.tau, m=m, n=1, c=ck), block, vs)
        cur_c = cur_c - ck
        cur = _quotient_fit(cur, fk, LatticeParams(tau=p.tau, m=m, n=k, c=cur_c), resid_tol=tol)
        peeled.append(fk)
    factors = [cur.normalized().with_zeros(tuple(blocks[0]))] + list(reversed(peeled))
    zs = np.array([f1 + f2 * p.tau for f1, f2 in _PROBE_FRACS] * 5) + np.array([0.017 * k for k in range(20)])
    prod = factors[0].eval(zs)
    for fk in factors[1:]:
        prod = np.matmul(prod, fk.eval(zs))
    prod = prod.ravel()
    ref = f.eval(zs).ravel()
    s = _best_fit_scalar(ref, prod)
    rel = float(np.linalg.norm(prod * s - ref) / max(np.linalg.norm(ref), 1e-300))
    if rel > tol:
        raise ResidualTooLarge(f"factor product misses the element by {rel:.2e}")
    return factors


def act_ordered_theta(sigma, factors, tol: float = 1e-6) -> list[ThetaElement]:
    """Ordered symmetric-group action on tuples of degree-1 elements.

    Interior adjacent swaps relabel the ordered zero set of one factor;
    boundary swaps refactor the product of the adjacent pair with the
    exchanged zero blocks and matching exchanged c split.
    """
    factors = [_ensure_zeros(f) for f in factors]
    if any(f.params.n != 1 for f in factors):
        raise PartitionInvalid("ordered action runs on degree-1 factors")
    m = factors[0].params.m
    size = m * len(factors)
    if len(sigma) != size:
        raise PartitionInvalid(f"permutation length {len(sigma)} does not match {size} slots")
    word = adjacent_word(sigma)
    fs = list(factors)
    labels = [list(f.zeros) for f in factors]
    for j in word:
        a, r = divmod(j, m)
        if r < m - 1:
            labels[a][r], labels[a][r + 1] = labels[a][r + 1], labels[a][r]
            continue
        la, lb = labels[a], labels[a + 1]
        new_la = la[: m - 1] + [lb[0]]
        new_lb = [la[m - 1]] + lb[1:]
        h = multiply_elements(fs[a], fs[a + 1])
        cb = sum(new_lb) - 0.5
        ca = (fs[a].params.c + fs[a + 1].params.c) - cb
        fa2, fb2 = factorize_theta(h, [new_la, new_lb], [ca, cb], tol=tol)
        fs[a], fs[a + 1] = fa2, fb2
        labels[a], labels[a + 1] = new_la, new_lb
    return [f.with_zeros(tuple(z)) for f, z in zip(fs, labels)]


# ---------------------------------------------------------------------------
# the theta transposition as a TwistedMap


class ThetaDomain(PointDomain):
    """Degree-1 elements across all c, sampled by interpolation at
    random zero sets satisfying the sum congruence."""

    kind = "theta"

    def __init__(self, m: int, tau: complex):
        self.m = int(m)
        self.tau = complex(tau)

    def sample(self, rng) -> ThetaElement:
        m, tau = self.m, self.tau
        o1, o2 = 1.0 / m, tau / m
        for _ in range(MAX_REDRAW):
            zs = [complex(rng.random() / m + rng.random() * tau / m) for _ in range(m)]
            ok = all(
                modular_distance(zs[i], zs[j], o1, o2) > 50 * CELL_GATE
                for i in range(m)
                for j in range(i + 1, m)
            )
            if not ok:
                continue
            c = sum(zs) - 0.5
            try:
                params = LatticeParams(tau=tau, m=m, n=1, c=c)
            except ValueError:
                continue
            if m == 1:
                vs = [np.ones(1, dtype=np.complex128)]
            else:
                vs = [rng.standard_normal(m) + 1j * rng.standard_normal(m) for _ in range(m)]
            try:
                return interpolate(params, zs, vs)
            except (NullityMismatch, ResidualTooLarge):
                continue
        raise NonGeneric("could not sample a generic degree-1 theta element")

    def distance(self, a: ThetaElement, b: ThetaElement) -> float:
        if a.params == b.params:
            x, y = a.coeffs, b.coeffs
        else:
            zs = np.array([f1 + f2 * self.tau for f1, f2 in _PROBE_FRACS])
            x = a.eval(zs).ravel()
            y = b.eval(zs).ravel()
        nx = np.linalg.norm(x)
        ny = np.linalg.norm(y)
        if nx == 0 or ny == 0:
            return 1.0
        # projective distance as a direct residual; the 1 - cos^2 form
        # cannot resolve anything below sqrt(eps)
        s = np.vdot(y, x) / (ny * ny)
        return float(np.linalg.norm(x - s * y) / nx)


def theta_map(m: int = 1, tau: complex = 1j) -> TwistedMap:
    """The zero-set exchange on degree-1 matrix theta elements."""
    dom = ThetaDomain(m, tau)

    def gen(fa: ThetaElement, fb: ThetaElement):
        if fa.zeros is None or fb.zeros is None:
            return True
        o1, o2 = 1.0 / dom.m, dom.tau / dom.m
        gap = min(modular_distance(x, y, o1, o2) for x in fa.zeros for y in fb.zeros)
        return gap > 10 * CELL_GATE

    def ap(fa, fb):
        return theta_mu(fa, fb)

    return TwistedMap("theta_mu", dom, ap, gen)
