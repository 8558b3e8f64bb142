"""Numerics for the supported compact groups.

Supported families are SU(2), SU(3), the torus U(1)^r and finite products of
these.  SU elements are unitary matrices of the defining representation,
torus elements are angle tuples, product elements are tuples of component
elements.  Every element also has a ``matrix`` view (block diagonal for
products, ``diag(e^{i angle})`` for tori), which is what the generic linear
algebra (adjoint action, centralizers) runs on.

The inner product on the Lie algebra is ``<X, Y> = -tr(XY)`` in the defining
representation; algebra bases are orthonormal for it.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "Family",
    "GroupSpec",
    "GroupElement",
    "AlgebraVector",
    "ClassCoordinate",
    "SpecMismatch",
    "CutLocus",
    "NotConjugate",
    "su2",
    "su3",
    "torus",
    "product",
    "parse_spec",
    "identity",
    "element",
    "multiply",
    "inverse",
    "haar_sample",
    "haar_batch",
    "exp_alg",
    "log_group",
    "adjoint",
    "adjoint_matrix",
    "centralizer_basis",
    "is_regular",
    "commutator",
    "class_coordinate",
    "conjugacy_transport",
    "reproject",
    "algebra_coords",
    "algebra_matrix",
    "su2_class_angle_batch",
    "REGULARITY_TOL",
]

REGULARITY_TOL = 1e-8
DRIFT_TOL = 1e-12
CLASS_TOL = 1e-9


class SpecMismatch(ValueError):
    pass


class CutLocus(ValueError):
    """The logarithm is not uniquely defined on the principal branch."""


class NotConjugate(ValueError):
    pass


class Family(enum.Enum):
    SU2 = "SU2"
    SU3 = "SU3"
    TORUS = "U1"
    PRODUCT = "PRODUCT"


def _pauli_basis() -> np.ndarray:
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return np.stack([1j * s / np.sqrt(2) for s in (sx, sy, sz)])


def _gell_mann_basis() -> np.ndarray:
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    return 1j * lam / np.sqrt(2)


@dataclass(frozen=True, eq=False, repr=False)
class GroupSpec:
    """A supported compact group.

    ``n`` is the size of the defining representation; ``algebra_basis`` has
    shape ``(dim, n, n)`` and is orthonormal for ``-tr(XY)``.
    """

    family: Family
    rank: int
    dim: int
    n: int
    algebra_basis: np.ndarray
    factors: tuple["GroupSpec", ...] = ()
    name: str = ""

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"GroupSpec({self.name})"

    @property
    def is_abelian(self) -> bool:
        return self.rank == self.dim

    @property
    def is_su(self) -> bool:
        return self.family in (Family.SU2, Family.SU3)

    def blocks(self) -> list[tuple[int, int]]:
        """Row offsets and sizes of the factor blocks in ``matrix``."""
        if self.family is not Family.PRODUCT:
            return [(0, self.n)]
        out, off = [], 0
        for f in self.factors:
            out.append((off, f.n))
            off += f.n
        return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@functools.lru_cache(maxsize=None)
def su2() -> GroupSpec:
    return GroupSpec(Family.SU2, 1, 3, 2, _frozen(_pauli_basis()), name="SU2")


@functools.lru_cache(maxsize=None)
def su3() -> GroupSpec:
    return GroupSpec(Family.SU3, 2, 8, 3, _frozen(_gell_mann_basis()), name="SU3")


@functools.lru_cache(maxsize=None)
def torus(r: int = 1) -> GroupSpec:
    if r < 1:
        raise ValueError("torus rank must be positive")
    basis = np.zeros((r, r, r), dtype=complex)
    for j in range(r):
        basis[j, j, j] = 1j
    return GroupSpec(Family.TORUS, r, r, r, _frozen(basis), name=f"U1^{r}")


@functools.lru_cache(maxsize=None)
def product(*specs: GroupSpec) -> GroupSpec:
    if len(specs) < 2:
        raise ValueError("a product needs at least two factors")
    n = sum(s.n for s in specs)
    dim = sum(s.dim for s in specs)
    basis = np.zeros((dim, n, n), dtype=complex)
    i = off = 0
    for s in specs:
        basis[i : i + s.dim, off : off + s.n, off : off + s.n] = s.algebra_basis
        i += s.dim
        off += s.n
    return GroupSpec(
        Family.PRODUCT,
        sum(s.rank for s in specs),
        dim,
        n,
        _frozen(basis),
        tuple(specs),
        name="x".join(s.name for s in specs),
    )


def parse_spec(text: str) -> GroupSpec:
    """Parse descriptors such as ``SU2``, ``SU3``, ``U1^3`` or ``SU2xU1^1``."""
    parts = [p.strip() for p in text.strip().split("x")]
    specs = []
    for p in parts:
        key = p.upper()
        if key == "SU2":
            specs.append(su2())
        elif key == "SU3":
            specs.append(su3())
        elif key.startswith("U1"):
            r = int(key[3:]) if key.startswith("U1^") else 1
            specs.append(torus(r))
        else:
            raise ValueError(f"unknown group descriptor {p!r}")
    return specs[0] if len(specs) == 1 else product(*specs)


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True, eq=False)
class GroupElement:
    spec: GroupSpec
    value: object

    @property
    def matrix(self) -> np.ndarray:
        fam = self.spec.family
        if fam is Family.TORUS:
            return np.diag(np.exp(1j * np.asarray(self.value)))
        if fam is Family.PRODUCT:
            return scipy.linalg.block_diag(*(c.matrix for c in self.value))
        return self.value

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def distance(self, other: "GroupElement") -> float:
        """Frobenius distance of the matrix views."""
        _check(self, other)
        return float(np.linalg.norm(self.matrix - other.matrix))


@dataclass(frozen=True, eq=False)
class AlgebraVector:
    spec: GroupSpec
    coords: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return algebra_matrix(self.spec, self.coords)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True, eq=False)
class ClassCoordinate:
    """Conjugacy-class coordinate.

    SU2: ``(theta,)`` with eigenvalues ``e^{+-i theta}``, theta in [0, pi].
    SU3: the eigen-angle multiset, sorted, as a length-3 tuple.
    Torus: the angle tuple.  Product: concatenation of the factors'.
    """

    spec: GroupSpec
    angles: tuple[float, ...]
    parts: tuple["ClassCoordinate", ...] = field(default=())

    @property
    def theta(self) -> float:
        if self.spec.family is not Family.SU2:
            raise AttributeError("theta is only defined for SU2 classes")
        return self.angles[0]

    def distance(self, other: "ClassCoordinate") -> float:
        if self.spec != other.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")
        fam = self.spec.family
        if fam is Family.PRODUCT:
            return max(a.distance(b) for a, b in zip(self.parts, other.parts))
        if fam is Family.SU2:
            return abs(self.angles[0] - other.angles[0])
        a = np.asarray(self.angles)
        b = np.asarray(other.angles)
        if fam is Family.TORUS:
            return float(np.max(np.abs(_wrap(a - b))))
        return min(
            float(np.max(np.abs(_wrap(a - b[list(p)]))))
            for p in itertools.permutations(range(len(b)))
        )


def _wrap(x):
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x), 2 * np.pi)


def _check(a: GroupElement, b: GroupElement) -> None:
    if a.spec != b.spec:
        raise SpecMismatch(f"{a.spec} vs {b.spec}")


def _unitary_drift(m: np.ndarray) -> float:
    """Frobenius norm of ``m m^* - 1``."""
    p = m @ m.conj().T
    p.flat[:: m.shape[0] + 1] -= 1
    return float(np.sqrt(np.vdot(p, p).real))


def reproject(m: np.ndarray, special: bool = True) -> np.ndarray:
    """Polar projection onto U(n) (onto SU(n) when ``special``)."""
    w, _, vh = np.linalg.svd(m)
    u = w @ vh
    if special:
        u = u / np.linalg.det(u) ** (1.0 / u.shape[0])
    return u


def _maybe_reproject(m: np.ndarray) -> np.ndarray:
    if _unitary_drift(m) > DRIFT_TOL:
        return reproject(m)
    return m


def element(spec: GroupSpec, value) -> GroupElement:
    """Wrap raw data as an element, checking the group constraints."""
    fam = spec.family
    if fam is Family.TORUS:
        ang = _wrap(np.asarray(value, dtype=float).reshape(spec.rank))
        return GroupElement(spec, _frozen(ang))
    if fam is Family.PRODUCT:
        comps = tuple(value)
        if len(comps) != len(spec.factors):
            raise SpecMismatch("wrong number of product components")
        for c, f in zip(comps, spec.factors):
            if c.spec != f:
                raise SpecMismatch(f"{c.spec} vs {f}")
        return GroupElement(spec, comps)
    m = np.asarray(value, dtype=complex)
    if m.shape != (spec.n, spec.n):
        raise ValueError(f"expected a {spec.n}x{spec.n} matrix")
    if _unitary_drift(m) > 1e-10 or abs(np.linalg.det(m) - 1) > 1e-10:
        raise ValueError("matrix is not special unitary")
    return GroupElement(spec, _frozen(_maybe_reproject(m)))


def identity(spec: GroupSpec) -> GroupElement:
    fam = spec.family
    if fam is Family.TORUS:
        return GroupElement(spec, _frozen(np.zeros(spec.rank)))
    if fam is Family.PRODUCT:
        return GroupElement(spec, tuple(identity(f) for f in spec.factors))
    return GroupElement(spec, _frozen(np.eye(spec.n, dtype=complex)))


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    _check(a, b)
    fam = a.spec.family
    if fam is Family.TORUS:
        return GroupElement(a.spec, _frozen(_wrap(a.value + b.value)))
    if fam is Family.PRODUCT:
        return GroupElement(a.spec, tuple(multiply(x, y) for x, y in zip(a.value, b.value)))
    return GroupElement(a.spec, _frozen(_maybe_reproject(a.value @ b.value)))


def inverse(a: GroupElement) -> GroupElement:
    fam = a.spec.family
    if fam is Family.TORUS:
        return GroupElement(a.spec, _frozen(_wrap(-a.value)))
    if fam is Family.PRODUCT:
        return GroupElement(a.spec, tuple(inverse(x) for x in a.value))
    return GroupElement(a.spec, _frozen(a.value.conj().T))


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """``g h g^-1 h^-1``."""
    _check(g, h)
    if g.spec.family is Family.TORUS:
        return identity(g.spec)
    return multiply(multiply(g, h), multiply(inverse(g), inverse(h)))


# ---------------------------------------------------------------------------
# Haar measure


def haar_batch(spec: GroupSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar samples as a raw array.

    SU specs give an ``(size, n, n)`` complex array (QR of a complex Gaussian
    matrix with the diagonal phase correction, then the determinant divided
    out); tori give ``(size, r)`` angles.  Products are not supported here.
    """
    fam = spec.family
    if fam is Family.TORUS:
        return rng.uniform(-np.pi, np.pi, size=(size, spec.rank))
    if fam is Family.PRODUCT:
        raise SpecMismatch("haar_batch works on a single factor")
    n = spec.n
    z = rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    q = q * (d / np.abs(d))[:, None, :]
    det = np.linalg.det(q)
    return q / (det ** (1.0 / n))[:, None, None]


def haar_sample(spec: GroupSpec, rng: np.random.Generator) -> GroupElement:
    if spec.family is Family.PRODUCT:
        return GroupElement(spec, tuple(haar_sample(f, rng) for f in spec.factors))
    raw = haar_batch(spec, 1, rng)[0]
    if spec.family is Family.TORUS:
        return GroupElement(spec, _frozen(raw))
    return GroupElement(spec, _frozen(raw))


# ---------------------------------------------------------------------------
# Lie algebra


def algebra_matrix(spec: GroupSpec, coords) -> np.ndarray:
    return np.tensordot(np.asarray(coords, dtype=float), spec.algebra_basis, axes=1)


def algebra_coords(spec: GroupSpec, x: np.ndarray) -> np.ndarray:
    """Coordinates of an anti-Hermitian matrix (stacks allowed) in the basis."""
    # <B_i, X> = -tr(B_i X)
    return -np.einsum("ijk,...kj->...i", spec.algebra_basis, x).real


def _vector(spec: GroupSpec, coords) -> AlgebraVector:
    return AlgebraVector(spec, _frozen(np.asarray(coords, dtype=float)))


def exp_alg(x: AlgebraVector) -> GroupElement:
    spec = x.spec
    fam = spec.family
    if fam is Family.TORUS:
        return GroupElement(spec, _frozen(_wrap(x.coords)))
    if fam is Family.PRODUCT:
        out, i = [], 0
        for f in spec.factors:
            out.append(exp_alg(_vector(f, x.coords[i : i + f.dim])))
            i += f.dim
        return GroupElement(spec, tuple(out))
    h = -1j * x.matrix
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    m = (v * np.exp(1j * w)) @ v.conj().T
    return GroupElement(spec, _frozen(_maybe_reproject(m)))


def log_group(g: GroupElement, tol: float = 1e-10) -> AlgebraVector:
    """Principal logarithm.

    Raises CutLocus when an eigenvalue is within ``tol`` of -1, or when the
    principal eigen-angles do not sum to zero (the principal log then leaves
    the special unitary algebra).
    """
    spec = g.spec
    fam = spec.family
    if fam is Family.TORUS:
        if np.any(np.abs(np.abs(g.value) - np.pi) < tol):
            raise CutLocus("torus angle at pi")
        return _vector(spec, g.value)
    if fam is Family.PRODUCT:
        return _vector(spec, np.concatenate([log_group(c, tol).coords for c in g.value]))
    t, z = scipy.linalg.schur(g.value, output="complex")
    ev = np.diag(t)
    if np.any(np.abs(ev + 1) < tol):
        raise CutLocus("eigenvalue -1 on the principal branch")
    phi = np.angle(ev)
    if abs(phi.sum()) > 1e-6:
        raise CutLocus("principal eigen-angles do not sum to zero")
    x = (z * (1j * phi)) @ z.conj().T
    return _vector(spec, algebra_coords(spec, x))


def adjoint_matrix(g: GroupElement) -> np.ndarray:
    """Real ``dim x dim`` matrix of ``Ad(g)`` in the algebra basis."""
    spec = g.spec
    if spec.is_abelian:
        return np.eye(spec.dim)
    m = g.matrix
    conj = m @ spec.algebra_basis @ m.conj().T  # (dim, n, n)
    return algebra_coords(spec, conj).T


def adjoint(g: GroupElement, x: AlgebraVector) -> AlgebraVector:
    if g.spec != x.spec:
        raise SpecMismatch(f"{g.spec} vs {x.spec}")
    return _vector(g.spec, adjoint_matrix(g) @ x.coords)


def centralizer_basis(g: GroupElement, tol: float = REGULARITY_TOL) -> list[AlgebraVector]:
    """Orthonormal basis of the Ad(g)-fixed subalgebra."""
    spec = g.spec
    a = adjoint_matrix(g) - np.eye(spec.dim)
    _, s, vt = np.linalg.svd(a)
    return [_vector(spec, vt[i]) for i in range(spec.dim) if s[i] < tol]


def is_regular(g: GroupElement, tol: float = REGULARITY_TOL) -> bool:
    return len(centralizer_basis(g, tol)) == g.spec.rank


# ---------------------------------------------------------------------------
# conjugacy classes


def _su2_parts(m: np.ndarray):
    """Quaternion components ``(q0, |v|)`` of an SU2 matrix (stacks allowed)."""
    a = (m[..., 0, 0] + np.conj(m[..., 1, 1])) / 2
    b = (m[..., 0, 1] - np.conj(m[..., 1, 0])) / 2
    return a.real, np.sqrt(a.imag**2 + np.abs(b) ** 2)


def su2_class_angle_batch(m: np.ndarray) -> np.ndarray:
    """Class angle in [0, pi] of a stack of SU2 matrices."""
    q0, v = _su2_parts(m)
    return np.arctan2(v, q0)


def class_coordinate(g: GroupElement) -> ClassCoordinate:
    spec = g.spec
    fam = spec.family
    if fam is Family.SU2:
        return ClassCoordinate(spec, (float(su2_class_angle_batch(g.value)),))
    if fam is Family.SU3:
        ang = np.sort(np.angle(np.linalg.eigvals(g.value)))
        return ClassCoordinate(spec, tuple(float(a) for a in ang))
    if fam is Family.TORUS:
        return ClassCoordinate(spec, tuple(float(a) for a in g.value))
    parts = tuple(class_coordinate(c) for c in g.value)
    return ClassCoordinate(spec, tuple(a for p in parts for a in p.angles), parts)


def _eig_unitary(m: np.ndarray):
    t, z = scipy.linalg.schur(m, output="complex")
    return np.diag(t), z


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column real positive."""
    idx = np.argmax(np.abs(v), axis=0)
    ph = v[idx, np.arange(v.shape[1])]
    return v * (np.abs(ph) / ph)[None, :]


def conjugacy_transport(a: GroupElement, b: GroupElement, tol: float = CLASS_TOL) -> GroupElement:
    """An element ``h`` with ``h a h^-1 = b``."""
    _check(a, b)
    spec = a.spec
    if class_coordinate(a).distance(class_coordinate(b)) > tol:
        raise NotConjugate("class coordinates differ")
    if a.distance(b) <= 1e-12:
        return identity(spec)
    fam = spec.family
    if fam is Family.TORUS:
        return identity(spec)
    if fam is Family.PRODUCT:
        return GroupElement(
            spec, tuple(conjugacy_transport(x, y, tol) for x, y in zip(a.value, b.value))
        )
    ea, va = _eig_unitary(a.value)
    eb, vb = _eig_unitary(b.value)
    best = min(
        itertools.permutations(range(spec.n)),
        key=lambda p: np.sum(np.abs(ea - eb[list(p)])),
    )
    vb = vb[:, list(best)]
    h = _phase_fix(vb) @ _phase_fix(va).conj().T
    h = h / np.linalg.det(h) ** (1.0 / spec.n)
    return GroupElement(spec, _frozen(_maybe_reproject(h)))
