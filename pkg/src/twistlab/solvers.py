"""Solvers for commutator equations.

Fiber membership ``[g, h] = k`` is solved by conjugacy transport, small
perturbations are pulled back to a fiber by Newton iteration on the
commutator differential, and ``[lam, h] = n`` with ``lam`` in a maximal
torus is solved by damped Gauss-Newton from quasi-random starts.  The
SU(3) system for ``g lam ~ k^-1 lam`` reduces to finding unit complex
numbers ``lam_i`` with ``sum A_i lam_i = 0``, which is solvable exactly
when the moduli ``|A_i|`` satisfy the triangle inequality.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
from scipy.stats import qmc

from . import lie
from . import quaternion as qt
from .rng import make_rng
from .transversality import (
    FD_STEP,
    dp_commutator,
    dpsi_torus,
    numerical_rank,
    torus_algebra_basis,
)

__all__ = [
    "SolveResult",
    "NoSolutionForThisG",
    "NoConvergence",
    "SolverExhausted",
    "FiberSamplingStarvation",
    "solve_fiber_h",
    "project_to_fiber",
    "sample_fiber",
    "sample_fiber_su2",
    "torus_element",
    "solve_torus_commutator",
    "psi_g_characters_residual",
    "psi_g_su2_zero",
    "psi_g_grid_min",
    "psi_g_exact_min",
    "find_su3_no_zero_pair",
    "su3_system",
    "su3_solve_system",
    "unit_triangle",
    "DgModel",
    "quaternion_Dg",
    "psi_tilde",
    "critical_point",
    "critical_value",
    "parametrization_rank",
    "NEWTON_BASIN",
    "RESTARTS",
]

NEWTON_BASIN = 0.3
RESTARTS = 64


class NoSolutionForThisG(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


class SolverExhausted(RuntimeError):
    pass


class FiberSamplingStarvation(RuntimeError):
    pass


@dataclass
class SolveResult:
    solution: tuple | None
    residual: float
    iterations: int
    strategy: str
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.solution is not None

    def record(self) -> dict:
        return {
            "found": self.ok,
            "residual": self.residual,
            "iterations": self.iterations,
            "strategy": self.strategy,
        }


# ---------------------------------------------------------------------------
# fibers of the commutator map


def solve_fiber_h(g: lie.GroupElement, k: lie.GroupElement, tol: float = 1e-9, raise_on_failure: bool = True) -> SolveResult:
    """Find ``h`` with ``[g, h] = k``.

    Equivalent to ``h g^-1 h^-1 = g^-1 k``; solvable exactly when ``g^-1``
    and ``g^-1 k`` are conjugate.
    """
    a = lie.inverse(g)
    b = lie.multiply(a, k)
    try:
        h = lie.conjugacy_transport(a, b, tol=max(tol, lie.CLASS_TOL))
    except lie.NotConjugate:
        if raise_on_failure:
            raise NoSolutionForThisG("g^-1 and g^-1 k lie in different classes") from None
        return SolveResult(None, math.inf, 0, "direct-transport")
    res = lie.commutator(g, h).distance(k)
    return SolveResult((h,), res, 0, "direct-transport")


def _residual_coords(x: lie.GroupElement) -> np.ndarray:
    """Algebra coordinates of ``log(x)``, or of its skew part on the cut locus."""
    try:
        return lie.log_group(x).coords
    except lie.CutLocus:
        m = x.matrix
        s = (m - m.conj().T) / 2
        s = s - np.trace(s) / m.shape[0] * np.eye(m.shape[0])
        return lie.algebra_coords(x.spec, s)


def _exp_right(g: lie.GroupElement, v: np.ndarray) -> lie.GroupElement:
    return lie.multiply(g, lie.exp_alg(lie.AlgebraVector(g.spec, np.asarray(v, float))))


def project_to_fiber(
    g: lie.GroupElement,
    h: lie.GroupElement,
    k: lie.GroupElement,
    max_iter: int = 20,
    tol: float = 1e-10,
    raise_on_failure: bool = True,
) -> SolveResult:
    """Newton iteration moving ``(g, h)`` onto ``[g, h] = k``.

    Each step solves ``dp(xi, eta) = log([g,h]^-1 k)`` in the least-norm
    sense (so the step is orthogonal to ``ker dp``) and backtracks until the
    residual decreases.  Starts should be within ``NEWTON_BASIN`` of the
    fiber in the log metric.
    """
    d = g.spec.dim
    history = []

    def res_of(a, b):
        return lie.commutator(a, b).distance(k)

    r = res_of(g, h)
    history.append(r)
    it = 0
    while r > tol and it < max_iter:
        it += 1
        rhs = _residual_coords(lie.multiply(lie.inverse(lie.commutator(g, h)), k))
        J = dp_commutator(g, h).matrix
        step = np.linalg.lstsq(J, rhs, rcond=1e-10)[0]
        t = 1.0
        improved = False
        while t > 1e-4:
            g2 = _exp_right(g, t * step[:d])
            h2 = _exp_right(h, t * step[d:])
            r2 = res_of(g2, h2)
            if r2 < r:
                g, h, r = g2, h2, r2
                improved = True
                break
            t /= 2
        history.append(r)
        if not improved:
            break
    if r > tol:
        if raise_on_failure:
            raise NoConvergence(f"residual {r:.3e} after {it} iterations")
        return SolveResult(None, r, it, "newton", {"history": history})
    return SolveResult((g, h), r, it, "newton", {"history": history})


def sample_fiber_su2(k: lie.GroupElement, rng: np.random.Generator) -> tuple[lie.GroupElement, lie.GroupElement]:
    """Exact draw from the conditional Haar law of ``(g, h)`` given ``[g, h] = k``.

    For unit quaternions, ``[g, h] = k`` forces ``Re(conj(g) k) = Re(conj(g))``,
    i.e. ``g`` lies on the great 2-sphere orthogonal to ``k - 1``.  On that
    sphere the conditional law has density proportional to
    ``1 / sqrt(1 - Re(g)^2)``; ``Re(g) = sin(phi)`` with ``phi`` uniform
    samples it exactly.  Given ``g``, ``h`` is uniform on a coset of the
    centralizer circle of ``g``.
    """
    if k.spec != lie.su2():
        raise lie.SpecMismatch("exact fiber sampling is implemented for SU2")
    kq = qt.from_matrix(k.value)
    n = kq - np.array([1.0, 0, 0, 0])
    nn = np.linalg.norm(n)
    if nn < 1e-12:
        raise FiberSamplingStarvation("the identity fiber is singular; use a regular class")
    n = n / nn
    q, _ = np.linalg.qr(np.column_stack([n, np.eye(4)]))
    e = q[:, 1:4]
    w = e.T @ np.array([1.0, 0, 0, 0])
    c = float(np.linalg.norm(w))
    u = rng.standard_normal(3)
    if c < 1e-12:
        u = u / np.linalg.norm(u)
    else:
        wh = w / c
        x = math.sin(rng.uniform(-1.0, 1.0) * math.asin(min(c, 1.0))) / c
        v = u - (u @ wh) * wh
        v = v / np.linalg.norm(v)
        u = x * wh + math.sqrt(max(0.0, 1 - x * x)) * v
    gq = e @ u
    gq = gq / np.linalg.norm(gq)
    g = lie.element(lie.su2(), qt.to_matrix(gq))
    h0 = solve_fiber_h(g, k, tol=1e-8).solution[0]
    im = gq[1:]
    s = rng.uniform(0, 2 * np.pi)
    axis = im / np.linalg.norm(im)
    cq = np.concatenate([[math.cos(s)], math.sin(s) * axis])
    h = lie.multiply(h0, lie.element(lie.su2(), qt.to_matrix(cq)))
    return g, h


def sample_fiber(k: lie.GroupElement, rng: np.random.Generator, mixing: int = 8):
    """A point of ``[g, h] = k``.

    SU2 uses the exact conditional sampler.  For SU3 a Haar ``g`` is
    class-compatible with probability zero, so the point is built instead:
    ``[lam, h] = k`` is solved with ``lam`` in a Haar-random maximal torus,
    then ``mixing`` random fiber-preserving moves ``(g, h) -> (g, h g^{+-1})``
    or ``(g h^{+-1}, h)`` are applied.  That law is not the conditional Haar
    law.
    """
    if k.spec == lie.su2():
        return sample_fiber_su2(k, rng)
    if k.spec != lie.su3():
        raise lie.SpecMismatch("fiber sampling is implemented for SU2 and SU3")
    for _ in range(8):
        u = lie.haar_sample(k.spec, rng)
        res = solve_torus_commutator(k, rng, torus=u, restarts=16)
        if res.ok:
            break
    else:
        raise FiberSamplingStarvation("torus solve failed for every tried torus")
    g, h = res.solution
    for _ in range(mixing):
        sgn = rng.choice((-1, 1))
        if rng.random() < 0.5:
            h = lie.multiply(h, g if sgn > 0 else lie.inverse(g))
        else:
            g = lie.multiply(g, h if sgn > 0 else lie.inverse(h))
    return g, h


# ---------------------------------------------------------------------------
# torus commutator


def torus_element(spec: lie.GroupSpec, angles) -> lie.GroupElement:
    """Diagonal torus element; SU3 takes two angles, the third is fixed by det 1."""
    a = np.atleast_1d(np.asarray(angles, dtype=float))
    if spec.family is lie.Family.SU2:
        a = np.array([a[0], -a[0]])
    elif spec.family is lie.Family.SU3:
        a = np.array([a[0], a[1], -a[0] - a[1]])
    else:
        raise lie.SpecMismatch("diagonal torus elements are defined for SU2 and SU3")
    return lie.element(spec, np.diag(np.exp(1j * a)))


def _torus_angles(lam: lie.GroupElement) -> np.ndarray:
    ang = np.angle(np.diag(lam.value))
    return ang[: lam.spec.rank]


def unit_triangle(A: np.ndarray, tol: float = 1e-14):
    """Unit complex ``x`` with ``prod x = 1`` and ``sum A_i x_i = 0``, or None.

    ``A`` has three entries.  A solution exists iff the moduli satisfy the
    triangle inequality; the triangle with those side lengths fixes the
    ``A_i x_i`` up to a common rotation, and the rotation is chosen so that
    the product constraint holds.
    """
    A = np.asarray(A, dtype=complex)
    r = np.abs(A)
    if np.all(r < tol):
        return np.ones(3, dtype=complex)
    if 2 * r.max() - r.sum() > tol * max(1.0, r.sum()):
        return None
    order = np.argsort(-r)
    r1, r2, r3 = r[order]
    if r3 < tol:
        # degenerate: A_small free, the other two opposite
        v = np.array([r1, -r1, 0.0], dtype=complex)
    else:
        cb = np.clip((r3 * r3 - r1 * r1 - r2 * r2) / (2 * r1 * r2), -1.0, 1.0)
        beta = math.acos(cb)
        v1 = r1
        v2 = r2 * np.exp(1j * beta)
        v = np.array([v1, v2, -v1 - v2])
    u = np.empty(3, dtype=complex)
    u[order] = v
    x = np.empty(3, dtype=complex)
    free = []
    for i in range(3):
        if r[i] < tol:
            free.append(i)
            x[i] = 1.0
        else:
            x[i] = u[i] / A[i]
            x[i] /= abs(x[i])
    if free:
        x[free[0]] = 1.0 / np.prod(np.delete(x, free[0]))
        return x
    phi = -np.angle(np.prod(x)) / 3
    return x * np.exp(1j * phi)


def _direct_torus(n: lie.GroupElement):
    """Closed-form torus solution of ``[lam, h] = n`` in the diagonal torus.

    ``[lam, h] = n`` iff ``h lam^-1 h^-1 = lam^-1 n``, so ``lam^-1`` and
    ``lam^-1 n`` must share a class, i.e. have equal traces.  With
    ``mu = conj(lam)`` the trace condition is ``sum mu_i (n_ii - 1) = 0``.
    """
    spec = n.spec
    A = np.diag(n.value) - 1.0
    if spec.family is lie.Family.SU2:
        # Re(conj(lam_0) A_0) = 0 with A_1 = conj(A_0)
        t = float(np.angle(A[0]) + np.pi / 2)
        mu = np.array([np.exp(-1j * t), np.exp(1j * t)])
    else:
        mu = unit_triangle(A)
        if mu is None:
            return None
    lam = lie.element(spec, np.diag(np.conj(mu)))
    a = lie.inverse(lam)
    b = lie.multiply(a, n)
    try:
        h = lie.conjugacy_transport(a, b, tol=1e-8)
    except lie.NotConjugate:
        return None
    return lam, h


def _gauss_newton_torus(n, lam, h, max_iter=60, tol=1e-12):
    spec = n.spec
    t = torus_algebra_basis(spec)
    r = spec.rank
    res = lie.commutator(lam, h).distance(n)
    it = 0
    while res > tol and it < max_iter:
        it += 1
        rhs = _residual_coords(lie.multiply(lie.inverse(lie.commutator(lam, h)), n))
        J = dpsi_torus(lam, h).matrix
        step = np.linalg.lstsq(J, rhs, rcond=1e-10)[0]
        nrm = np.linalg.norm(step)
        if nrm > 1.0:
            step = step / nrm
        s = 1.0
        improved = False
        while s > 1e-6:
            lam2 = _exp_right(lam, s * (t.T @ step[:r]))
            h2 = _exp_right(h, s * step[r:])
            res2 = lie.commutator(lam2, h2).distance(n)
            if res2 < res:
                lam, h, res = lam2, h2, res2
                improved = True
                break
            s /= 2
        if not improved:
            break
    return lam, h, res, it


def solve_torus_commutator(
    n: lie.GroupElement,
    rng: np.random.Generator,
    torus: lie.GroupElement | None = None,
    restarts: int = RESTARTS,
    tol: float = 1e-8,
    strategy: str = "multistart",
) -> SolveResult:
    """Find ``lam`` in the maximal torus ``u T u^-1`` and ``h`` with ``[lam, h] = n``.

    ``torus`` is the conjugating element ``u`` (identity: the diagonal
    torus).  ``strategy='multistart'`` runs damped Gauss-Newton on the
    torus angles and an exponential chart of ``h`` from ``restarts``
    scrambled-Sobol torus starts with Haar ``h``; ``'direct'`` uses the
    closed-form trace condition and conjugacy transport.
    """
    spec = n.spec
    u = lie.identity(spec) if torus is None else torus
    n0 = lie.multiply(lie.multiply(lie.inverse(u), n), u)

    def back(lam, h):
        return (
            lie.multiply(lie.multiply(u, lam), lie.inverse(u)),
            lie.multiply(lie.multiply(u, h), lie.inverse(u)),
        )

    if n0.distance(lie.identity(spec)) <= 1e-14:
        e = lie.identity(spec)
        return SolveResult((e, e), 0.0, 0, "direct-transport", {"restarts": 0})

    if strategy == "direct":
        sol = _direct_torus(n0)
        if sol is None:
            return SolveResult(None, math.inf, 0, "direct-transport")
        lam, h = back(*sol)
        return SolveResult((lam, h), lie.commutator(lam, h).distance(n), 0, "direct-transport")
    if strategy != "multistart":
        raise ValueError(f"unknown strategy {strategy!r}")

    sob = qmc.Sobol(spec.rank, scramble=True, seed=rng)
    starts = sob.random(max(1, restarts)) * 2 * np.pi - np.pi
    best = None
    total = 0
    for i, ang in enumerate(starts):
        lam0 = torus_element(spec, ang)
        h0 = lie.haar_sample(spec, rng)
        lam, h, res, it = _gauss_newton_torus(n0, lam0, h0)
        total += it
        if best is None or res < best[2]:
            best = (lam, h, res)
        if res <= tol:
            lam, h = back(lam, h)
            return SolveResult(
                (lam, h), lie.commutator(lam, h).distance(n), total, "multistart", {"restarts": i}
            )
    return SolveResult(None, best[2], total, "multistart", {"restarts": len(starts)})


# ---------------------------------------------------------------------------
# psi_g


def _diag_torus(spec: lie.GroupSpec, lam) -> np.ndarray:
    """Diagonal entries of a torus element given as an element, angles or entries."""
    if isinstance(lam, lie.GroupElement):
        return np.diag(lam.value)
    lam = np.asarray(lam)
    if np.iscomplexobj(lam):
        return lam
    return np.diag(torus_element(spec, lam).value)


def psi_g_characters_residual(g: lie.GroupElement, k: lie.GroupElement, lam) -> np.ndarray:
    """``|chi_i(g lam) - chi_i(k^-1 lam)|`` over the fundamental characters."""
    spec = g.spec
    d = _diag_torus(spec, lam)
    kinv = lie.inverse(k).value
    t1 = np.sum(np.diag(g.value) * d)
    t2 = np.sum(np.diag(kinv) * d)
    if spec.family is lie.Family.SU2:
        return np.array([abs(t1 - t2)])
    if spec.family is lie.Family.SU3:
        # second fundamental character is the conjugate of the trace on SU3
        return np.array([abs(t1 - t2), abs(np.conj(t1) - np.conj(t2))])
    raise lie.SpecMismatch("psi_g residuals are defined for SU2 and SU3")


def psi_g_su2_zero(g: lie.GroupElement, k: lie.GroupElement, samples: int = 64) -> SolveResult:
    """Zero in ``t`` of ``tr(g lam) - tr(k^-1 lam)``, ``lam = diag(e^{it}, e^{-it})``.

    The difference is ``2 Re((a - a') e^{it})`` with ``a = g_00``,
    ``a' = (k^-1)_00``; it has zero mean over the circle, so a sign change
    is bracketed on a coarse grid and refined by Brent's method.
    """
    a = g.value[0, 0] - lie.inverse(k).value[0, 0]

    def f(t):
        return 2 * (a * np.exp(1j * t)).real

    if abs(a) < 1e-15:
        return SolveResult((0.0,), 0.0, 0, "grid")
    ts = np.linspace(0, 2 * np.pi, samples + 1)
    vals = f(ts)
    for i in range(samples):
        if vals[i] == 0:
            t = ts[i]
            break
        if vals[i] * vals[i + 1] < 0:
            t, rr = scipy.optimize.brentq(f, ts[i], ts[i + 1], xtol=1e-15, full_output=True)
            break
    else:
        return SolveResult(None, float(np.min(np.abs(vals))), samples, "grid")
    res = float(psi_g_characters_residual(g, k, [t])[0])
    return SolveResult((float(t),), res, samples, "bisection")


def _su3_A(g: lie.GroupElement, k: lie.GroupElement) -> np.ndarray:
    return np.diag(g.value) - np.diag(lie.inverse(k).value)


def psi_g_grid_min(g: lie.GroupElement, k: lie.GroupElement, resolution: int = 400) -> float:
    """Minimum over a ``resolution^2`` angle grid of the largest SU3 residual."""
    A = _su3_A(g, k)
    t = np.arange(resolution) * (2 * np.pi / resolution)
    z = np.exp(1j * t)
    # lam = (z1, z2, conj(z1 z2))
    s = A[0] * z[:, None] + A[1] * z[None, :] + A[2] * np.conj(z[:, None] * z[None, :])
    return float(np.min(np.abs(s)))


def psi_g_exact_min(g: lie.GroupElement, k: lie.GroupElement) -> float:
    """Exact minimum of ``|sum A_i lam_i|`` over the torus.

    Equal to ``max(0, 2 max|A_i| - sum |A_i|)``: the longest side minus the
    other two, whenever the triangle inequality fails.
    """
    r = np.abs(_su3_A(g, k))
    return float(max(0.0, 2 * r.max() - r.sum()))


def find_su3_no_zero_pair(rng: np.random.Generator, candidates: int = 2000, resolution: int = 400, delta: float = 1e-3):
    """Search Haar pairs for one whose ``psi_g`` system has no torus zero.

    Candidates are ranked by the exact triangle violation; the best one is
    certified by the grid minimum.  Returns ``(g, k, grid_min, exact_min)``.
    """
    spec = lie.su3()
    best = None
    for _ in range(candidates):
        g, k = lie.haar_sample(spec, rng), lie.haar_sample(spec, rng)
        v = psi_g_exact_min(g, k)
        if best is None or v > best[2]:
            best = (g, k, v)
    g, k, v = best
    gm = psi_g_grid_min(g, k, resolution)
    return g, k, gm, v


def su3_system(g: lie.GroupElement, k: lie.GroupElement, l1, l2, l3, tol: float = 1e-9):
    """``(sum A_i l_i, conj(A_1) l2 l3 + conj(A_2) l1 l3 + conj(A_3) l1 l2)``."""
    lam = np.array([l1, l2, l3], dtype=complex)
    if np.any(np.abs(np.abs(lam) - 1) > tol) or abs(np.prod(lam) - 1) > tol:
        raise ValueError("need unit l_i with product 1")
    A = _su3_A(g, k)
    e1 = np.sum(A * lam)
    e2 = np.conj(A[0]) * l2 * l3 + np.conj(A[1]) * l1 * l3 + np.conj(A[2]) * l1 * l2
    return complex(e1), complex(e2)


def su3_solve_system(g, k, rng: np.random.Generator, starts: int = 16, tol: float = 1e-9) -> SolveResult:
    """Two-angle Newton (MINPACK hybrid) on ``sum A_i lam_i = 0`` from random starts."""
    A = _su3_A(g, k)

    def F(t):
        lam = np.exp(1j * np.array([t[0], t[1], -t[0] - t[1]]))
        s = np.sum(A * lam)
        return [s.real, s.imag]

    best = (None, math.inf, 0)
    total = 0
    for _ in range(starts):
        t0 = rng.uniform(-np.pi, np.pi, 2)
        sol = scipy.optimize.root(F, t0, method="hybr", options={"xtol": 1e-14})
        total += int(sol.nfev)
        lam = np.exp(1j * np.array([sol.x[0], sol.x[1], -sol.x[0] - sol.x[1]]))
        r = max(abs(v) for v in su3_system(g, k, *lam))
        if r < best[1]:
            best = (lam, r, total)
        if r <= tol:
            return SolveResult(tuple(lam), r, total, "newton")
    return SolveResult(None, best[1], total, "newton")


# ---------------------------------------------------------------------------
# quaternion model of psi_g for SU2


def _cq(c: complex) -> np.ndarray:
    return np.array([c.real, c.imag, 0.0, 0.0])


def psi_tilde(lam: complex, q) -> qt.Quaternion:
    """``lam conj(q)``."""
    q = q.array() if isinstance(q, qt.Quaternion) else np.asarray(q, float)
    return qt.Quaternion.from_array(qt.qmul(_cq(complex(lam)), qt.qconj(q)))


def critical_point(a: complex, lam: complex, z: complex) -> tuple[complex, qt.Quaternion]:
    """``(lam, a lam + sqrt(1 - |a|^2) z j)``."""
    c = math.sqrt(max(0.0, 1 - abs(a) ** 2))
    q = _cq(a * lam) + c * qt.qmul(_cq(z), qt.J.array())
    return lam, qt.Quaternion.from_array(q)


def critical_value(a: complex, lam: complex, z: complex) -> qt.Quaternion:
    """``conj(a) - sqrt(1 - |a|^2) lam z j``."""
    c = math.sqrt(max(0.0, 1 - abs(a) ** 2))
    q = _cq(np.conj(a)) - c * qt.qmul(_cq(lam * z), qt.J.array())
    return qt.Quaternion.from_array(q)


@dataclass(frozen=True)
class DgModel:
    """``D_g = {(lam, q) : Re(q) = Re(a lam)}`` inside ``U(1) x H_1``.

    Tangent vectors at ``(lam, q)`` are ``(s, v)`` with ``lam -> lam e^{is}``
    and ``q -> q exp(v)``, ``v`` pure imaginary; ``D_g`` is cut out by one
    linear condition on ``(s, v)``.
    """

    a: complex

    def contains(self, lam: complex, q: qt.Quaternion, tol: float = 1e-12) -> bool:
        return abs(q.real - (self.a * lam).real) <= tol and abs(q.norm() - 1) <= tol

    def random_point(self, rng: np.random.Generator) -> tuple[complex, qt.Quaternion]:
        lam = np.exp(1j * rng.uniform(-np.pi, np.pi))
        re = (self.a * lam).real
        v = rng.standard_normal(3)
        v = v / np.linalg.norm(v) * math.sqrt(max(0.0, 1 - re * re))
        return complex(lam), qt.Quaternion(re, *v)

    @staticmethod
    def _move(lam: complex, q: np.ndarray, s: float, v: np.ndarray):
        lam2 = lam * np.exp(1j * s)
        nv = np.linalg.norm(v)
        ev = np.array([math.cos(nv)] + list((math.sin(nv) / nv if nv > 0 else 1.0) * v))
        return lam2, qt.qmul(q, ev)

    def tangent_basis(self, lam: complex, q: qt.Quaternion, step: float = FD_STEP) -> np.ndarray:
        """Rows spanning the kernel of the defining condition, by differences."""
        qa = q.array()

        def F(x):
            l2, q2 = self._move(lam, qa, x[0], x[1:])
            return q2[0] - (self.a * l2).real

        grad = np.array(
            [(F(step * e) - F(-step * e)) / (2 * step) for e in np.eye(4)]
        )
        _, _, vt = np.linalg.svd(grad[None, :])
        return vt[1:]

    def jacobian(self, lam: complex, q: qt.Quaternion, step: float = FD_STEP) -> np.ndarray:
        """Differences of ``psi_tilde`` on ``D_g`` in the tangent basis.

        Output is in left-trivialized imaginary coordinates
        ``Im(psi(p)^-1 psi(p'))``; a ``3 x 3`` matrix.
        """
        qa = q.array()
        base = psi_tilde(lam, qa).array()
        basis = self.tangent_basis(lam, q, step)
        cols = []
        for b in basis:
            vals = []
            for sgn in (1, -1):
                l2, q2 = self._move(lam, qa, sgn * step * b[0], sgn * step * b[1:])
                p2 = psi_tilde(l2, q2).array()
                vals.append(qt.qmul(qt.qconj(base), p2)[1:])
            cols.append((vals[0] - vals[1]) / (2 * step))
        return np.array(cols).T

    def jacobian_rank(self, lam: complex, q: qt.Quaternion, rtol: float = 1e-7) -> int:
        return numerical_rank(self.jacobian(lam, q), rtol)


def quaternion_Dg(a: complex) -> DgModel:
    if abs(a) > 1 + 1e-12:
        raise ValueError("|a| must not exceed 1")
    return DgModel(complex(a))


def parametrization_rank(a: complex, which: str, lam: complex, z: complex, step: float = FD_STEP, rtol: float = 1e-7) -> int:
    """Rank of the ``(angle(lam), angle(z))`` Jacobian of the critical
    point (``which='point'``) or critical value (``'value'``) map."""
    def f(x):
        l2, z2 = lam * np.exp(1j * x[0]), z * np.exp(1j * x[1])
        if which == "point":
            l3, q3 = critical_point(a, l2, z2)
            return np.concatenate([[l3.real, l3.imag], q3.array()])
        return critical_value(a, l2, z2).array()

    J = np.array([(f(step * e) - f(-step * e)) / (2 * step) for e in np.eye(2)]).T
    if np.max(np.abs(J)) < 1e-10:
        return 0
    return numerical_rank(J, rtol)


# ---------------------------------------------------------------------------
# batch helpers


def batch_torus_commutator(spec: lie.GroupSpec, count: int, seed: int, workers: int = 1, **kw) -> list[SolveResult]:
    """Solve for ``count`` Haar targets; target ``i`` uses stream ``i``."""
    def one(i):
        rng = make_rng(seed, i)
        n = lie.haar_sample(spec, rng)
        return solve_torus_commutator(n, rng, **kw)

    if workers <= 1:
        return [one(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(one, range(count)))
