"""Characters, irreducible representations and the commutator density.

The law of ``[g, h]`` for independent Haar ``g, h`` has density
``sum_mu chi_mu(k) / d_mu`` with respect to Haar measure.  This module
evaluates that series (optionally smoothed), the SU(2) closed form
``(pi - theta) / (2 sin theta)``, Monte Carlo histograms of the law, and the
finite checks on the integration identity and the twist action on matrix
coefficients.

Class coordinates and Weyl weights
----------------------------------
SU(2): ``theta in [0, pi]`` with weight ``(2/pi) sin(theta)^2 dtheta``.
SU(3): eigen-angles ``(t1, t2, -t1-t2)`` on ``[-pi, pi)^2`` with weight
``|Delta|^2 / (6 (2 pi)^2) dt1 dt2``, where ``Delta`` is the Vandermonde of
the eigenvalues.  Both weights have total mass one.
"""

from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from . import lie
from .rng import make_rng

__all__ = [
    "IrrepLabel",
    "DensityProfile",
    "dim_irrep",
    "character",
    "irrep_labels",
    "irrep_matrix",
    "su2_character_theta",
    "su3_character_from_trace",
    "integration_identity_check",
    "density_series",
    "density_su2_closed",
    "su2_exact_cdf",
    "su2_exact_bin_masses",
    "su2_weyl_weight",
    "su3_weyl_weight",
    "su3_density_tail_bound",
    "mc_class_histogram",
    "closed_form_profile",
    "series_profile",
    "total_variation",
    "inverse_dim_sum",
    "su3_inverse_dim_tail",
    "peter_weyl_t2_check",
    "PETER_WEYL_EXPONENT",
    "MC_BLOCK",
]

#: Power of ``pi_mu(g)`` by which the twist ``T2`` multiplies matrix
#: coefficients: ``F_L(T2(g, h)) = F_{L pi(g)^e}(g, h)`` with
#: ``F_L(g, h) = tr(L pi(h^-1))``.
PETER_WEYL_EXPONENT = 1

#: Samples per independent random stream in Monte Carlo estimators.
MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class IrrepLabel:
    """Irreducible representation label.

    SU2: ``(d,)`` with ``d >= 1`` the dimension.  SU3: ``(n1, n2)`` in
    fundamental-weight coordinates.  Torus: the integer weight tuple.
    """

    spec: lie.GroupSpec
    label: tuple[int, ...]

    def __post_init__(self):
        fam = self.spec.family
        lab = tuple(int(x) for x in self.label)
        object.__setattr__(self, "label", lab)
        if fam is lie.Family.SU2:
            if len(lab) != 1 or lab[0] < 1:
                raise ValueError("SU2 labels are a single dimension d >= 1")
        elif fam is lie.Family.SU3:
            if len(lab) != 2 or min(lab) < 0:
                raise ValueError("SU3 labels are pairs of non-negative integers")
        elif fam is lie.Family.TORUS:
            if len(lab) != self.spec.rank:
                raise ValueError("torus labels need one weight per factor")
        else:
            raise lie.SpecMismatch("irreps are labelled per simple factor")

    @classmethod
    def su2(cls, d: int) -> "IrrepLabel":
        return cls(lie.su2(), (d,))

    @classmethod
    def su3(cls, n1: int, n2: int) -> "IrrepLabel":
        return cls(lie.su3(), (n1, n2))

    @property
    def is_trivial(self) -> bool:
        if self.spec.family is lie.Family.SU2:
            return self.label == (1,)
        return all(x == 0 for x in self.label)


def dim_irrep(mu: IrrepLabel) -> int:
    fam = mu.spec.family
    if fam is lie.Family.SU2:
        return mu.label[0]
    if fam is lie.Family.SU3:
        n1, n2 = mu.label
        return (n1 + 1) * (n2 + 1) * (n1 + n2 + 2) // 2
    return 1


def irrep_labels(spec: lie.GroupSpec, cutoff: int) -> list[IrrepLabel]:
    """Labels with dimension at most ``cutoff``, ordered by (dimension, label)."""
    fam = spec.family
    if fam is lie.Family.SU2:
        return [IrrepLabel(spec, (d,)) for d in range(1, cutoff + 1)]
    if fam is not lie.Family.SU3:
        raise lie.SpecMismatch("label enumeration is implemented for SU2 and SU3")
    out = []
    n1 = 0
    while (n1 + 1) * (n1 + 2) // 2 <= cutoff:
        n2 = 0
        while (n1 + 1) * (n2 + 1) * (n1 + n2 + 2) // 2 <= cutoff:
            out.append(IrrepLabel(spec, (n1, n2)))
            n2 += 1
        n1 += 1
    out.sort(key=lambda m: (dim_irrep(m), m.label))
    return out


# ---------------------------------------------------------------------------
# characters


def su2_character_theta(d, theta) -> np.ndarray:
    """``sin(d theta) / sin(theta)`` with the limits at ``0`` and ``pi``."""
    d = np.asarray(d, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    small = np.abs(s) < 1e-8
    safe = np.where(small, 1.0, s)
    direct = np.sin(d * theta) / safe
    limit = d * np.cos(d * theta) / np.cos(theta)
    return np.where(small, limit, direct)


def _su2_chebyshev(d: int, t):
    """Character of dimension ``d`` from the trace ``t`` by recursion."""
    t = np.asarray(t)
    prev, cur = np.zeros_like(t, dtype=complex), np.ones_like(t, dtype=complex)
    for _ in range(d - 1):
        prev, cur = cur, t * cur - prev
    return cur


def _complete_homogeneous(tr, kmax: int) -> list:
    """``h_0..h_kmax`` of the eigenvalues of SU3 elements with trace ``tr``."""
    e1 = np.asarray(tr, dtype=complex)
    e2 = np.conj(e1)
    h = [np.ones_like(e1), e1]
    for k in range(2, kmax + 1):
        nxt = e1 * h[k - 1] - e2 * h[k - 2]
        if k >= 3:
            nxt = nxt + h[k - 3]
        h.append(nxt)
    return h[: kmax + 1]


def su3_character_from_trace(n1: int, n2: int, tr, h=None):
    """SU3 character via the two-row Jacobi-Trudi determinant.

    For an element of SU3 the eigenvalue elementary symmetric functions are
    ``(tr, conj(tr), 1)``, so every character is a polynomial in the trace.
    """
    a, b = n1 + n2, n2
    if h is None:
        h = _complete_homogeneous(tr, a + 1)
    val = h[a] * h[b]
    if b >= 1:
        val = val - h[a + 1] * h[b - 1]
    return val


def character(mu: IrrepLabel, g: lie.GroupElement) -> complex:
    if g.spec != mu.spec:
        raise lie.SpecMismatch(f"{g.spec} vs {mu.spec}")
    fam = mu.spec.family
    if fam is lie.Family.SU2:
        return complex(_su2_chebyshev(mu.label[0], np.trace(g.value)))
    if fam is lie.Family.SU3:
        return complex(su3_character_from_trace(*mu.label, np.trace(g.value)))
    return complex(np.exp(1j * np.dot(mu.label, g.value)))


# ---------------------------------------------------------------------------
# representation matrices


@functools.lru_cache(maxsize=None)
def _sym_basis(n: int, power: int) -> np.ndarray:
    """Orthonormal basis of symmetric tensors in ``(C^n)^{tensor power}``."""
    cols = []
    for combo in itertools.combinations_with_replacement(range(n), power):
        v = np.zeros((n,) * power)
        perms = set(itertools.permutations(combo))
        for p in perms:
            v[p] = 1.0
        v = v.reshape(-1)
        cols.append(v / np.linalg.norm(v))
    return np.stack(cols, axis=1) if cols else np.ones((1, 1))


def _sym_power(m: np.ndarray, power: int) -> np.ndarray:
    if power == 0:
        return np.ones((1, 1), dtype=complex)
    s = _sym_basis(m.shape[0], power)
    big = m
    for _ in range(power - 1):
        big = np.kron(big, m)
    return s.T @ big @ s


def irrep_matrix(mu: IrrepLabel, g: lie.GroupElement) -> np.ndarray:
    """Unitary matrix of ``g`` in the representation ``mu`` (dimension <= 10)."""
    fam = mu.spec.family
    if dim_irrep(mu) > 10:
        raise ValueError("representation matrices are built for dimension <= 10")
    if fam is lie.Family.SU2:
        return _sym_power(g.value, mu.label[0] - 1)
    if fam is lie.Family.SU3:
        n1, n2 = mu.label
        if n2 == 0:
            return _sym_power(g.value, n1)
        if n1 == 0:
            return np.conj(_sym_power(g.value, n2))
        return lie.adjoint_matrix(g).astype(complex)
    return np.array([[character(mu, g)]])


# ---------------------------------------------------------------------------
# Monte Carlo plumbing


def _blocks(n: int, block: int = MC_BLOCK) -> list[tuple[int, int]]:
    return [(i, min(block, n - i * block)) for i in range((n + block - 1) // block)]


def _map_blocks(fn, n: int, workers: int = 1):
    """Evaluate ``fn(index, size)`` on fixed-size blocks, in block order."""
    blocks = _blocks(n)
    if workers <= 1:
        return [fn(i, s) for i, s in blocks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda b: fn(*b), blocks))


def _commutator_batch(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    gh = g @ h
    hg = h @ g
    return gh @ np.conj(np.swapaxes(hg, -1, -2))


def _class_character_batch(mu: IrrepLabel, c: np.ndarray) -> np.ndarray:
    if mu.spec.family is lie.Family.SU2:
        return su2_character_theta(mu.label[0], lie.su2_class_angle_batch(c)).astype(complex)
    tr = np.trace(c, axis1=-2, axis2=-1)
    return su3_character_from_trace(*mu.label, tr)


def integration_identity_check(
    g: lie.GroupElement,
    mu: IrrepLabel,
    n: int,
    seed: int,
    stream: int = 0,
    workers: int = 1,
) -> tuple[complex, float, float]:
    """Monte Carlo check of ``E_h chi(g h g^-1 h^-1) = |chi(g)|^2 / d``.

    Returns ``(mc_mean, exact, z_score)``.  Samples are drawn in blocks of
    ``MC_BLOCK`` from streams ``stream * 2**20 + block``, so the estimate does
    not depend on ``workers``.
    """
    if n < 1000:
        raise ValueError("use at least 1000 samples")
    if g.spec != mu.spec:
        raise lie.SpecMismatch(f"{g.spec} vs {mu.spec}")
    exact = abs(character(mu, g)) ** 2 / dim_irrep(mu)
    if mu.is_trivial:
        return 1.0 + 0j, 1.0, 0.0

    gm = g.value

    def block(i, size):
        rng = make_rng(seed, (stream << 20) + i)
        h = lie.haar_batch(g.spec, size, rng)
        vals = _class_character_batch(mu, _commutator_batch(gm[None], h))
        return vals.sum(), np.sum(np.abs(vals) ** 2)

    parts = _map_blocks(block, n, workers)
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / n
    var = max(s2 / n - abs(mean) ** 2, 0.0)
    se = math.sqrt(var / n)
    z = abs(mean - exact) / se if se > 0 else (0.0 if abs(mean - exact) < 1e-12 else math.inf)
    return complex(mean), float(exact), float(z)


# ---------------------------------------------------------------------------
# density


def _smoothing_weights(dims: np.ndarray, cutoff: int, smoothing: str, q: float | None):
    if smoothing == "none":
        return np.ones_like(dims, dtype=float)
    if smoothing == "abel":
        q = 1.0 - 1.0 / cutoff if q is None else q
        return q ** dims.astype(float)
    if smoothing == "cesaro":
        return (cutoff - dims + 1.0) / cutoff
    raise ValueError(f"unknown smoothing {smoothing!r}")


def density_su2_closed(theta) -> np.ndarray:
    """``(pi - theta) / (2 sin theta)`` on ``(0, pi)``.

    The value at ``pi`` is not defined by the formula; its limit is ``1/2``.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any((theta <= 0) | (theta >= np.pi)):
        raise ValueError("theta must lie strictly inside (0, pi)")
    return (np.pi - theta) / (2 * np.sin(theta))


def su2_weyl_weight(theta) -> np.ndarray:
    return (2 / np.pi) * np.sin(np.asarray(theta, dtype=float)) ** 2


def su2_exact_cdf(theta) -> np.ndarray:
    """CDF of the class angle of a Haar commutator in SU2."""
    t = np.asarray(theta, dtype=float)
    return (np.pi - (np.pi - t) * np.cos(t) - np.sin(t)) / np.pi


def su2_exact_bin_masses(edges) -> np.ndarray:
    return np.diff(su2_exact_cdf(edges))


def _vandermonde_sq(angles: np.ndarray) -> np.ndarray:
    z = np.exp(1j * angles)
    out = np.ones(angles.shape[:-1])
    for i, j in itertools.combinations(range(angles.shape[-1]), 2):
        out = out * np.abs(z[..., i] - z[..., j]) ** 2
    return out


def _su3_angles(t1, t2) -> np.ndarray:
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    return np.stack([t1, t2, -t1 - t2], axis=-1)


def su3_weyl_weight(t1, t2) -> np.ndarray:
    return _vandermonde_sq(_su3_angles(t1, t2)) / (6 * (2 * np.pi) ** 2)


def _class_trace(spec: lie.GroupSpec, point) -> complex:
    if isinstance(point, lie.GroupElement):
        return complex(np.trace(point.matrix))
    if isinstance(point, lie.ClassCoordinate):
        point = point.angles
    ang = np.atleast_1d(np.asarray(point, dtype=float))
    if spec.family is lie.Family.SU3:
        if ang.size == 2:
            ang = _su3_angles(ang[0], ang[1])
        return complex(np.exp(1j * ang).sum())
    raise TypeError("unsupported class point")


def _su2_theta(point) -> float:
    if isinstance(point, lie.GroupElement):
        return lie.class_coordinate(point).theta
    if isinstance(point, lie.ClassCoordinate):
        return point.theta
    return float(point)


def density_series(
    spec: lie.GroupSpec,
    point,
    cutoff: int,
    smoothing: str = "none",
    q: float | None = None,
    margin: float = 1e-6,
) -> float:
    """Partial sum of ``sum_{d_mu <= cutoff} w_mu chi_mu(k) / d_mu``.

    ``point`` is a class angle (SU2), an eigen-angle pair or triple (SU3), a
    ClassCoordinate or a GroupElement.  ``w_mu`` is 1 for ``smoothing='none'``,
    ``q**d_mu`` for ``'abel'`` (default ``q = 1 - 1/cutoff``) and
    ``(cutoff - d_mu + 1)/cutoff`` for ``'cesaro'``.
    """
    fam = spec.family
    if fam is lie.Family.SU2:
        theta = _su2_theta(point)
        if smoothing == "none" and (theta < margin or theta > np.pi - margin):
            raise ValueError("unsmoothed series needs theta away from 0 and pi")
        d = np.arange(1, cutoff + 1)
        w = _smoothing_weights(d, cutoff, smoothing, q)
        return float(np.sum(w * su2_character_theta(d, theta) / d))
    if fam is not lie.Family.SU3:
        raise lie.SpecMismatch("density series is implemented for SU2 and SU3")
    tr = _class_trace(spec, point)
    labels = irrep_labels(spec, cutoff)
    dims = np.array([dim_irrep(m) for m in labels])
    w = _smoothing_weights(dims, cutoff, smoothing, q)
    kmax = max(sum(m.label) for m in labels) + 1
    h = _complete_homogeneous(tr, kmax)
    total = 0.0 + 0.0j
    for m, dm, wm in zip(labels, dims, w):
        total += wm * su3_character_from_trace(*m.label, tr, h) / dm
    if abs(total.imag) > 1e-9 * max(1.0, abs(total.real)):
        raise FloatingPointError("density series has a non-negligible imaginary part")
    return float(total.real)


def su3_density_tail_bound(point, cutoff: int) -> float:
    """Bound on ``|sum_{d_mu > cutoff} chi_mu(k) / d_mu|`` at a regular class.

    Uses ``|chi_mu(k)| <= 6 / |Delta(k)|`` from the Weyl character formula.
    """
    ang = np.asarray(point.angles if isinstance(point, lie.ClassCoordinate) else point, float)
    if ang.size == 2:
        ang = _su3_angles(ang[0], ang[1])
    delta = math.sqrt(_vandermonde_sq(ang))
    return 6.0 / delta * su3_inverse_dim_tail(cutoff)


@dataclass
class DensityProfile:
    """Density over class coordinates, per unit Haar measure.

    ``weights`` are quadrature weights that already include the Weyl radial
    weight, so ``sum(density * weights)`` approximates the total mass.
    """

    coordinates: np.ndarray
    density: np.ndarray
    provenance: str
    weights: np.ndarray
    stderr: np.ndarray | None = None
    declared_error: float = 0.0
    extra: dict = field(default_factory=dict)

    def normalization(self) -> float:
        return float(np.sum(self.density * self.weights))

    def records(self) -> list[dict]:
        coords = np.asarray(self.coordinates)
        se = self.stderr if self.stderr is not None else np.full(len(self.density), np.nan)
        rows = []
        for i in range(len(self.density)):
            c = coords[i]
            c = float(c) if np.ndim(c) == 0 else ";".join(repr(float(x)) for x in c)
            rows.append(
                {
                    "coordinate": c,
                    "density": float(self.density[i]),
                    "stderr": float(se[i]),
                    "provenance": self.provenance,
                }
            )
        return rows


def closed_form_profile(edges) -> DensityProfile:
    """SU2 closed-form density at bin midpoints, with exact bin weights."""
    edges = np.asarray(edges, dtype=float)
    mid = (edges[1:] + edges[:-1]) / 2
    # weight of a bin is its exact Weyl mass; density times it is the bin's
    # law mass up to the density's variation within the bin
    weyl_mass = np.diff((edges - np.sin(edges) * np.cos(edges)) / np.pi)
    dens = density_su2_closed(mid)
    err = float(np.sum(np.abs(dens * weyl_mass - su2_exact_bin_masses(edges))))
    return DensityProfile(mid, dens, "closed-form", weyl_mass, declared_error=err)


def series_profile(edges, cutoff: int, smoothing: str = "none") -> DensityProfile:
    """SU2 density series at bin midpoints."""
    edges = np.asarray(edges, dtype=float)
    mid = (edges[1:] + edges[:-1]) / 2
    weyl_mass = np.diff((edges - np.sin(edges) * np.cos(edges)) / np.pi)
    dens = np.array([density_series(lie.su2(), t, cutoff, smoothing) for t in mid])
    tail = 1.0 / ((cutoff + 1) * np.sin(mid / 2) * np.sin(mid))
    exact = su2_exact_bin_masses(edges)
    err = float(np.sum(np.abs(density_su2_closed(mid) * weyl_mass - exact)) + np.sum(tail * weyl_mass))
    return DensityProfile(
        mid, dens, f"series:N={cutoff}:{smoothing}", weyl_mass, tail, declared_error=err
    )


def mc_class_histogram(
    spec: lie.GroupSpec,
    n: int,
    bins: int,
    seed: int,
    workers: int = 1,
    stream: int = 0,
) -> DensityProfile:
    """Histogram of the class of ``[g, h]`` over independent Haar pairs.

    SU2 bins ``theta`` on ``[0, pi]``.  SU3 bins the eigen-angle pair
    ``(t1, t2)`` on ``[-pi, pi)^2`` symmetrized over eigenvalue orderings.
    Tori give a point mass at the identity class.  ``extra`` carries the bin
    edges and bin probabilities.
    """
    if n < 10_000:
        raise ValueError("use at least 10^4 samples")
    fam = spec.family
    if fam is lie.Family.TORUS:
        return DensityProfile(
            np.zeros((1, spec.rank)),
            np.array([1.0]),
            f"monte-carlo:n={n}:point-mass",
            np.array([1.0]),
            np.array([0.0]),
            extra={"point_mass": True, "probabilities": np.array([1.0])},
        )

    def draw(i, size):
        rng = make_rng(seed, (stream << 20) + i)
        g = lie.haar_batch(spec, size, rng)
        h = lie.haar_batch(spec, size, rng)
        return _commutator_batch(g, h)

    if fam is lie.Family.SU2:
        edges = np.linspace(0, np.pi, bins + 1)

        def block(i, size):
            theta = lie.su2_class_angle_batch(draw(i, size))
            return np.histogram(theta, bins=edges)[0]

        counts = np.sum(_map_blocks(block, n, workers), axis=0)
        p = counts / n
        weyl_mass = np.diff((edges - np.sin(edges) * np.cos(edges)) / np.pi)
        dens = p / weyl_mass
        se = np.sqrt(p * (1 - p) / n) / weyl_mass
        return DensityProfile(
            (edges[1:] + edges[:-1]) / 2,
            dens,
            f"monte-carlo:n={n}",
            weyl_mass,
            se,
            extra={"edges": edges, "probabilities": p, "counts": counts},
        )
    if fam is lie.Family.SU3:
        edges = np.linspace(-np.pi, np.pi, bins + 1)

        def block(i, size):
            ang = np.angle(np.linalg.eigvals(draw(i, size)))
            h = np.zeros((bins, bins))
            for a, b in itertools.permutations(range(3), 2):
                h += np.histogram2d(ang[:, a], ang[:, b], bins=[edges, edges])[0]
            return h / 6

        counts = np.sum(_map_blocks(block, n, workers), axis=0)
        p = counts / n
        mid = (edges[1:] + edges[:-1]) / 2
        t1, t2 = np.meshgrid(mid, mid, indexing="ij")
        cell = (edges[1] - edges[0]) ** 2
        wmass = su3_weyl_weight(t1, t2) * cell
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.where(wmass > 0, p / wmass, 0.0)
        coords = np.stack([t1.ravel(), t2.ravel()], axis=1)
        # midpoint Weyl weights miss the exact cell masses by the quadrature
        # error, which is declared on the profile
        return DensityProfile(
            coords,
            dens.ravel(),
            f"monte-carlo:n={n}",
            wmass.ravel(),
            np.sqrt(p * (1 - p) / n).ravel() / np.where(wmass > 0, wmass, 1).ravel(),
            declared_error=float(abs(wmass.sum() - 1)),
            extra={"edges": edges, "probabilities": p},
        )
    raise lie.SpecMismatch("histograms are implemented for SU2, SU3 and tori")


def total_variation(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


# ---------------------------------------------------------------------------
# inverse-dimension sums


def inverse_dim_sum(spec: lie.GroupSpec, cutoff: int) -> float:
    """``sum 1/d_mu`` over irreps of dimension at most ``cutoff``."""
    if spec.family is lie.Family.SU2:
        return float(np.sum(1.0 / np.arange(1, cutoff + 1)))
    if spec.family is lie.Family.SU3:
        labels = irrep_labels(spec, cutoff)
        return float(math.fsum(1.0 / dim_irrep(m) for m in labels))
    raise lie.SpecMismatch("inverse-dimension sums are defined for SU2 and SU3")


def su3_inverse_dim_tail(cutoff: int) -> float:
    """Integral-test estimate of ``sum_{d_mu > cutoff} 1/d_mu`` for SU3.

    With ``x = n1 + 1``, ``y = n2 + 1`` the terms are ``2 / (x y (x + y))``.
    The lattice sum over ``x y (x + y) > 2 cutoff`` is replaced by the
    integral over cells centred at the lattice points, i.e. over
    ``x, y >= 1/2``; the inner integral in ``y`` is done in closed form.
    """
    c = 2.0 * cutoff

    def y0(x):
        # positive root of x y^2 + x^2 y - c = 0, floored at the cell edge
        r = (-x * x + math.sqrt(x**4 + 4 * x * c)) / (2 * x)
        return max(0.5, r)

    def inner(x):
        y = y0(x)
        return 2.0 / (x * x) * math.log((x + y) / y)

    val, _ = scipy.integrate.quad(inner, 0.5, np.inf, limit=400)
    return float(val)


# ---------------------------------------------------------------------------
# twist action on matrix coefficients


def peter_weyl_t2_check(
    mu: IrrepLabel, L: np.ndarray, g: lie.GroupElement, h: lie.GroupElement
) -> tuple[complex, complex, float]:
    """Compare ``F(T2(g, h))`` with the multiplication-operator prediction.

    ``F(g, h) = tr(L pi(h^-1))``; the prediction is the coefficient function
    of ``L pi(g)^e`` evaluated at ``h``, with ``e = PETER_WEYL_EXPONENT``.
    """
    pg = irrep_matrix(mu, g)
    hinv = irrep_matrix(mu, lie.inverse(h))
    t2h = lie.multiply(h, lie.inverse(g))
    lhs = np.trace(L @ irrep_matrix(mu, lie.inverse(t2h)))
    mult = np.linalg.matrix_power(pg, PETER_WEYL_EXPONENT)
    rhs = np.trace(L @ mult @ hinv)
    return complex(lhs), complex(rhs), float(abs(lhs - rhs))
