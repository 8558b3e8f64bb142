"""Differentials of commutator-type maps and evaluation-span rank tests.

Tangent vectors are left-trivialized: ``xi`` at ``g`` is the velocity of
``g exp(t xi)``, and the differential of a group-valued map ``F`` is read
off from ``F(x)^-1 F(x exp(t v))``.  All linear maps are real matrices in
the orthonormal algebra basis of the group.  Rank decisions use the SVD
with a cutoff relative to the largest singular value.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import lie

__all__ = [
    "LinearMapRep",
    "SpanReport",
    "RANK_RTOL",
    "COVER_ANGLE",
    "FD_STEP",
    "numerical_rank",
    "kernel_basis",
    "orth_basis",
    "dp_commutator",
    "g0_eval",
    "twisted_eval",
    "principal_angles",
    "span_covers_kernel",
    "classify_pair",
    "dpsi_m",
    "psi_m",
    "subspace_sum_dim",
    "dpsi_torus",
    "is_critical_torus",
    "torus_algebra_basis",
    "left_log_derivative",
    "vf_bracket_check",
    "flow_commutator_bracket",
    "algebra_bracket",
]

RANK_RTOL = 1e-8
COVER_ANGLE = 1e-6
FD_STEP = 1e-5


@dataclass(frozen=True)
class LinearMapRep:
    matrix: np.ndarray
    tol: float = RANK_RTOL
    domain_basis: np.ndarray | None = None

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", m)

    @property
    def domain_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def codomain_dim(self) -> int:
        return self.matrix.shape[0]

    def rank(self) -> int:
        return numerical_rank(self.matrix, self.tol)

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)


@dataclass
class SpanReport:
    """Result of comparing an evaluation span with ``ker dp``.

    ``max_angle`` is the largest principal angle between the kernel and the
    span (zero when covered); ``min_angle`` the smallest.
    """

    point: str
    kernel_dim: int
    span_dim: int
    covered: bool
    min_angle: float
    max_angle: float
    stratum: str = "generic"
    extra: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {
            "point": self.point,
            "kernel_dim": self.kernel_dim,
            "span_dim": self.span_dim,
            "covered": self.covered,
            "min_angle": self.min_angle,
            "max_angle": self.max_angle,
            "stratum": self.stratum,
        }


# ---------------------------------------------------------------------------
# linear algebra


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Singular values above ``rtol * max(s_max, 1)``.

    The maps here are built from orthogonal adjoint operators and have unit
    scale, so rounding noise of a vanishing map is not counted as rank.
    """
    a = np.atleast_2d(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rtol * max(s[0], 1.0)))


def kernel_basis(L: LinearMapRep | np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal kernel basis as rows.

    The cutoff is the same as in :func:`numerical_rank`; a zero map has
    the whole domain as kernel.
    """
    m = L.matrix if isinstance(L, LinearMapRep) else np.atleast_2d(L)
    tol = (L.tol if isinstance(L, LinearMapRep) else RANK_RTOL) if tol is None else tol
    n = m.shape[1]
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    if s.size == 0:
        return np.eye(n)
    r = int(np.sum(s > tol * max(s[0], 1.0)))
    return vt[r:]


def orth_basis(vectors, rtol: float = RANK_RTOL, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (rows) of the span of ``vectors``.

    Singular values below ``rtol * scale`` are dropped; ``scale`` defaults
    to the largest singular value.
    """
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    if v.size == 0:
        return np.zeros((0, v.shape[-1] if v.ndim == 2 else 0))
    _, s, vt = np.linalg.svd(v, full_matrices=False)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return np.zeros((0, v.shape[1]))
    return vt[s > rtol * ref]


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles of the row space of ``a`` against that of ``b``.

    Both arguments are orthonormal row bases.  One angle is returned per
    row of ``a``; rows of ``a`` outside the span of ``b`` give pi/2.
    """
    if a.shape[0] == 0:
        return np.zeros(0)
    if b.shape[0] == 0:
        return np.full(a.shape[0], np.pi / 2)
    s = np.linalg.svd(a @ b.T, compute_uv=False)
    s = np.concatenate([s, np.zeros(a.shape[0] - s.size)]) if s.size < a.shape[0] else s[: a.shape[0]]
    return np.sort(np.arccos(np.clip(s, -1.0, 1.0)))


def _ad(g: lie.GroupElement) -> np.ndarray:
    return lie.adjoint_matrix(g)


def _centralizer_rows(g: lie.GroupElement, tol: float = lie.REGULARITY_TOL) -> np.ndarray:
    basis = lie.centralizer_basis(g, tol)
    if not basis:
        return np.zeros((0, g.spec.dim))
    return np.stack([b.coords for b in basis])


def torus_algebra_basis(spec: lie.GroupSpec) -> np.ndarray:
    """Rows spanning the algebra of the diagonal maximal torus."""
    diag = []
    for i, b in enumerate(spec.algebra_basis):
        if np.allclose(b, np.diag(np.diag(b))):
            diag.append(i)
    out = np.zeros((len(diag), spec.dim))
    out[np.arange(len(diag)), diag] = 1.0
    return out


# ---------------------------------------------------------------------------
# commutator map


def dp_commutator(g: lie.GroupElement, h: lie.GroupElement) -> LinearMapRep:
    """``(xi, eta) -> Ad(hg)(Ad(h^-1) xi - xi + eta - Ad(g^-1) eta)``."""
    d = g.spec.dim
    ad_hg = _ad(lie.multiply(h, g))
    eye = np.eye(d)
    left = ad_hg @ (_ad(lie.inverse(h)) - eye)
    right = ad_hg @ (eye - _ad(lie.inverse(g)))
    return LinearMapRep(np.hstack([left, right]))


def _ad_power_sum(g: lie.GroupElement, lo: int, hi: int) -> np.ndarray:
    """``sum_{k=lo}^{hi} Ad(g^k)`` (zero when ``lo > hi``)."""
    d = g.spec.dim
    a = _ad(g)
    out = np.zeros((d, d))
    if lo > hi:
        return out
    cur = np.linalg.matrix_power(a, lo) if lo >= 0 else np.linalg.matrix_power(a.T, -lo)
    for _ in range(lo, hi + 1):
        out += cur
        cur = a @ cur
    return out


def g0_eval(g: lie.GroupElement, h: lie.GroupElement, tol: float = lie.REGULARITY_TOL) -> np.ndarray:
    """Rows ``(y, 0)`` for ``y`` in the centralizer of ``h`` and ``(0, x)``
    for ``x`` in the centralizer of ``g``."""
    d = g.spec.dim
    yh = _centralizer_rows(h, tol)
    xg = _centralizer_rows(g, tol)
    rows = [np.hstack([y, np.zeros(d)]) for y in yh] + [np.hstack([np.zeros(d), x]) for x in xg]
    return np.array(rows).reshape(-1, 2 * d)


def _power(x: lie.GroupElement, n: int) -> lie.GroupElement:
    base = x if n >= 0 else lie.inverse(x)
    out = lie.identity(x.spec)
    for _ in range(abs(n)):
        out = lie.multiply(out, base)
    return out


def twisted_eval(
    g: lie.GroupElement, h: lie.GroupElement, n: int, side: int, tol: float = lie.REGULARITY_TOL
) -> np.ndarray:
    """Fiber-tangent vectors transported by powers of a twist.

    Side 2 (powers of ``T2``): rows ``(y, -sum_{k=1}^{n} Ad(g^k) y)`` for
    ``y`` in the centralizer of ``h g^n`` when ``n > 0``, and
    ``(y, sum_{k=n+1}^{0} Ad(g^k) y)`` when ``n < 0``.
    Side 1 (powers of ``T1``): rows ``(-sum_{k=1}^{n} Ad(h^k) x, x)`` for
    ``x`` in the centralizer of ``g h^n`` (``n > 0``) and
    ``(sum_{k=n+1}^{0} Ad(h^k) x, x)`` for ``n < 0``.
    """
    if side == 2:
        base, other = g, h
    elif side == 1:
        base, other = h, g
    else:
        raise ValueError("side is 1 or 2")
    cent = _centralizer_rows(lie.multiply(other, _power(base, n)), tol)
    if n > 0:
        s = -_ad_power_sum(base, 1, n)
    else:
        s = _ad_power_sum(base, n + 1, 0)
    rows = []
    for y in cent:
        moved = s @ y
        rows.append(np.hstack([y, moved]) if side == 2 else np.hstack([moved, y]))
    return np.array(rows).reshape(-1, 2 * g.spec.dim)


def classify_pair(g: lie.GroupElement, h: lie.GroupElement, tol: float = 1e-6) -> str:
    """Stratum of a pair: 'identity', 'singular' (an element not regular),
    'commuting' (centralizers intersect) or 'generic'."""
    spec = g.spec
    eye = lie.identity(spec)
    if g.distance(eye) < tol and h.distance(eye) < tol:
        return "identity"
    if not (lie.is_regular(g, tol) and lie.is_regular(h, tol)):
        return "singular"
    cg, ch = _centralizer_rows(g, tol), _centralizer_rows(h, tol)
    both = np.vstack([cg, ch])
    if numerical_rank(both, tol) < cg.shape[0] + ch.shape[0]:
        return "commuting"
    return "generic"


def _point_hash(*elements: lie.GroupElement) -> str:
    h = hashlib.sha256()
    for e in elements:
        h.update(np.ascontiguousarray(e.matrix).tobytes())
    return h.hexdigest()[:16]


def span_covers_kernel(g: lie.GroupElement, h: lie.GroupElement, N: int) -> SpanReport:
    """Does the span of ``g0_eval`` and all ``twisted_eval(n)`` with
    ``1 <= |n| <= N`` on both sides contain ``ker dp(g, h)``?"""
    ker = kernel_basis(dp_commutator(g, h))
    vecs = [g0_eval(g, h)]
    for n in range(1, N + 1):
        for sgn in (1, -1):
            for side in (1, 2):
                vecs.append(twisted_eval(g, h, sgn * n, side))
    span = orth_basis(np.vstack(vecs))
    ang = principal_angles(ker, span)
    max_angle = float(ang.max()) if ang.size else 0.0
    min_angle = float(ang.min()) if ang.size else 0.0
    return SpanReport(
        _point_hash(g, h),
        int(ker.shape[0]),
        int(span.shape[0]),
        bool(max_angle <= COVER_ANGLE),
        min_angle,
        max_angle,
        classify_pair(g, h),
    )


# ---------------------------------------------------------------------------
# psi_m


def psi_m(g, h, k, l, m, kc) -> lie.GroupElement:
    """``g K m g^-1 K^-1`` with ``K = k kc^-1``."""
    K = lie.multiply(k, lie.inverse(kc))
    return lie.multiply(
        lie.multiply(lie.multiply(g, K), m), lie.multiply(lie.inverse(g), lie.inverse(K))
    )


def _check_constraints(g, h, k, l, m, kc, tol):
    if lie.commutator(g, h).distance(m) > tol:
        raise ValueError("constraint [g,h] = m is violated")
    if lie.commutator(k, l).distance(lie.multiply(lie.inverse(m), kc)) > tol:
        raise ValueError("constraint [k,l] = m^-1 kc is violated")


def dpsi_m(g, h, k, l, m, kc, tol: float = 1e-8) -> LinearMapRep:
    """Differential of ``psi_m`` on the tangent space of the constraint set.

    On ambient vectors ``(x, y; z, w)`` it is
    ``Ad(K g)(Ad((K m)^-1) x - x + Ad(m^-1 kc) z - Ad(g^-1 m) Ad(m^-1 kc) z)``
    with ``K = k kc^-1``; ``y`` and ``w`` do not enter.  The returned matrix
    acts on coordinates in ``domain_basis``, an orthonormal basis (rows, in
    ambient ``(x, y, z, w)`` coordinates) of ``ker dp(g,h) + ker dp(k,l)``.
    """
    _check_constraints(g, h, k, l, m, kc, tol)
    d = g.spec.dim
    K = lie.multiply(k, lie.inverse(kc))
    eye = np.eye(d)
    outer = _ad(lie.multiply(K, g))
    ax = outer @ (_ad(lie.inverse(lie.multiply(K, m))) - eye)
    a_mk = _ad(lie.multiply(lie.inverse(m), kc))
    az = outer @ (a_mk - _ad(lie.multiply(lie.inverse(g), m)) @ a_mk)
    ambient = np.hstack([ax, np.zeros((d, d)), az, np.zeros((d, d))])
    k1 = kernel_basis(dp_commutator(g, h))
    k2 = kernel_basis(dp_commutator(k, l))
    basis = np.vstack(
        [
            np.hstack([k1, np.zeros((k1.shape[0], 2 * d))]),
            np.hstack([np.zeros((k2.shape[0], 2 * d)), k2]),
        ]
    )
    return LinearMapRep(ambient @ basis.T, domain_basis=basis)


def _twisted_centralizer_perp(g, h) -> np.ndarray:
    """Orthonormal rows spanning ``((1 - Ad h) k^g)^perp``."""
    d = g.spec.dim
    cg = _centralizer_rows(g)
    if cg.shape[0] == 0:
        return np.eye(d)
    w = orth_basis(((np.eye(d) - _ad(h)) @ cg.T).T, RANK_RTOL, scale=1.0)
    if w.shape[0] == 0:
        return np.eye(d)
    return kernel_basis(w)


def subspace_sum_dim(g, h, k, l, m, kc, tol: float = 1e-8) -> int:
    """Dimension of
    ``(1 - Ad((K m)^-1)) ((1 - Ad h) k^g)^perp
    + (1 - Ad(g^-1 m)) Ad(m^-1 kc) ((1 - Ad l) k^k)^perp``."""
    _check_constraints(g, h, k, l, m, kc, tol)
    d = g.spec.dim
    K = lie.multiply(k, lie.inverse(kc))
    eye = np.eye(d)
    v1 = _twisted_centralizer_perp(g, h)
    v2 = _twisted_centralizer_perp(k, l)
    s1 = (eye - _ad(lie.inverse(lie.multiply(K, m)))) @ v1.T
    s2 = (eye - _ad(lie.multiply(lie.inverse(g), m))) @ _ad(lie.multiply(lie.inverse(m), kc)) @ v2.T
    return numerical_rank(np.hstack([s1, s2]).T, tol)


# ---------------------------------------------------------------------------
# torus commutator


def dpsi_torus(lam: lie.GroupElement, h: lie.GroupElement) -> LinearMapRep:
    """Differential of ``(lam, h) -> [lam, h]`` on ``t + k``.

    ``lam`` lies in the diagonal maximal torus; the domain coordinates are
    the torus-algebra coordinates followed by the full algebra coordinates.
    """
    full = dp_commutator(lam, h).matrix
    d = lam.spec.dim
    t = torus_algebra_basis(lam.spec)
    return LinearMapRep(np.hstack([full[:, :d] @ t.T, full[:, d:]]))


def is_critical_torus(lam: lie.GroupElement, h: lie.GroupElement, tol: float = 1e-7):
    """Rank test and the structural predicate for ``(lam, h) -> [lam, h]``.

    Returns ``(critical_by_rank, reason)`` where ``reason`` is ``'i'`` when
    ``lam`` is not regular, ``'ii'`` when the centralizer of ``h`` meets the
    torus algebra, and ``None`` otherwise.
    """
    d = lam.spec.dim
    critical = numerical_rank(dpsi_torus(lam, h).matrix, tol) < d
    if not lie.is_regular(lam, tol):
        return critical, "i"
    t = torus_algebra_basis(lam.spec)
    ch = _centralizer_rows(h, tol)
    if ch.size and numerical_rank(np.vstack([t, ch]), tol) < t.shape[0] + ch.shape[0]:
        return critical, "ii"
    return critical, None


# ---------------------------------------------------------------------------
# finite differences and vector fields


def left_log_derivative(f: Callable[[float], lie.GroupElement], step: float = FD_STEP) -> np.ndarray:
    """Central difference of ``log(f(0)^-1 f(t))`` at ``t = 0``."""
    base_inv = lie.inverse(f(0.0))
    plus = lie.log_group(lie.multiply(base_inv, f(step))).coords
    minus = lie.log_group(lie.multiply(base_inv, f(-step))).coords
    return (plus - minus) / (2 * step)


def algebra_bracket(spec: lie.GroupSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    X, Y = lie.algebra_matrix(spec, x), lie.algebra_matrix(spec, y)
    return lie.algebra_coords(spec, X @ Y - Y @ X)


def _exp_right(g: lie.GroupElement, v: np.ndarray) -> lie.GroupElement:
    return lie.multiply(g, lie.exp_alg(lie.AlgebraVector(g.spec, np.asarray(v, float))))


def _directional(field_: Callable, g: lie.GroupElement, v: np.ndarray, step: float) -> np.ndarray:
    return (field_(_exp_right(g, step * v)) - field_(_exp_right(g, -step * v))) / (2 * step)


def vf_bracket_check(
    x_field: Callable[[lie.GroupElement], np.ndarray],
    y_field: Callable[[lie.GroupElement], np.ndarray],
    g: lie.GroupElement,
    step: float = 1e-4,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Bracket of left-trivialized vector fields, two ways.

    The closed form is ``dy(x) - dx(y) + [x(g), y(g)]`` with directional
    derivatives by central differences.  The reference is the flow
    commutator estimate of :func:`flow_commutator_bracket`.  Returns
    ``(closed_form, reference, residual)``.
    """
    spec = g.spec
    xg, yg = x_field(g), y_field(g)
    closed = _directional(y_field, g, xg, step) - _directional(x_field, g, yg, step) + algebra_bracket(spec, xg, yg)
    ref = flow_commutator_bracket(x_field, y_field, g, step)
    return closed, ref, float(np.linalg.norm(closed - ref))


def _flow(field_: Callable, g: lie.GroupElement, t: float, substeps: int = 4) -> lie.GroupElement:
    """RK4-type integration of ``dg/dt = g field(g)`` in the exponential chart."""
    h = t / substeps
    for _ in range(substeps):
        k1 = field_(g)
        k2 = field_(_exp_right(g, 0.5 * h * k1))
        k3 = field_(_exp_right(g, 0.5 * h * k2))
        k4 = field_(_exp_right(g, h * k3))
        g = _exp_right(g, h * (k1 + 2 * k2 + 2 * k3 + k4) / 6)
    return g


def flow_commutator_bracket(x_field, y_field, g: lie.GroupElement, step: float = 1e-4) -> np.ndarray:
    """Estimate the bracket from the flows.

    For flows ``X_t``, ``Y_t`` the point ``Y_{-t} X_{-t} Y_t X_t (g)`` differs
    from ``g`` by ``t^2 [x, y] + O(t^3)``.  The symmetric combination of
    ``t`` and ``-t`` cancels the cubic term.
    """
    def loop(t):
        p = _flow(x_field, g, t)
        p = _flow(y_field, p, t)
        p = _flow(x_field, p, -t)
        p = _flow(y_field, p, -t)
        return lie.log_group(lie.multiply(lie.inverse(g), p)).coords

    def even(t):
        return (loop(t) + loop(-t)) / (2 * t * t)

    t = np.sqrt(step)
    return (4 * even(t / 2) - even(t)) / 3
