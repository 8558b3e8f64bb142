"""Quaternions and their identification with SU(2).

A matrix ``[[a, b], [-conj(b), conj(a)]]`` corresponds to ``q = a - b j``,
where complex numbers sit inside the quaternions as ``x + y i``.  With
``a = a0 + a1 i`` and ``b = b0 + b1 i`` this gives components
``(a0, a1, -b0, -b1)`` in the basis ``(1, i, j, k)``.  The map is a group
isomorphism from the unit quaternions onto SU(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lie

__all__ = ["Quaternion", "qmul", "qconj", "to_matrix", "from_matrix", "ONE", "I", "J", "K"]


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product on arrays of shape ``(..., 4)``."""
    p0, p1, p2, p3 = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    q0, q1, q2, q3 = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        ],
        axis=-1,
    )


def qconj(q: np.ndarray) -> np.ndarray:
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1
    return q


def to_matrix(q: np.ndarray) -> np.ndarray:
    """SU(2) matrix (stack) of quaternion components ``(..., 4)``."""
    q = np.asarray(q, dtype=float)
    a = q[..., 0] + 1j * q[..., 1]
    b = -(q[..., 2] + 1j * q[..., 3])
    m = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = a
    m[..., 0, 1] = b
    m[..., 1, 0] = -np.conj(b)
    m[..., 1, 1] = np.conj(a)
    return m


def from_matrix(m: np.ndarray) -> np.ndarray:
    """Quaternion components of an SU(2) matrix (stack).

    The entries are symmetrized over the two redundant copies, which also
    projects slightly non-unitary input onto the quaternion form.
    """
    m = np.asarray(m)
    a = (m[..., 0, 0] + np.conj(m[..., 1, 1])) / 2
    b = (m[..., 0, 1] - np.conj(m[..., 1, 0])) / 2
    return np.stack([a.real, a.imag, -b.real, -b.imag], axis=-1)


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, q) -> "Quaternion":
        q = np.asarray(q, dtype=float)
        return cls(float(q[0]), float(q[1]), float(q[2]), float(q[3]))

    @classmethod
    def from_complex(cls, c: complex) -> "Quaternion":
        return cls(float(np.real(c)), float(np.imag(c)))

    @classmethod
    def from_element(cls, g: lie.GroupElement) -> "Quaternion":
        if g.spec != lie.su2():
            raise lie.SpecMismatch("quaternions model SU2 only")
        return cls.from_array(from_matrix(g.matrix))

    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.array(), other.array()))
        if np.iscomplexobj(other):
            return self * Quaternion.from_complex(other)
        return Quaternion.from_array(self.array() * float(other))

    def __rmul__(self, other):
        if np.iscomplexobj(other):
            return Quaternion.from_complex(other) * self
        return Quaternion.from_array(self.array() * float(other))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.array() + other.array())

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.array() - other.array())

    def __neg__(self) -> "Quaternion":
        return Quaternion.from_array(-self.array())

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return float(np.linalg.norm(self.array()))

    @property
    def real(self) -> float:
        return self.w

    @property
    def complex_part(self) -> complex:
        """The ``a`` in ``q = a - b j``."""
        return complex(self.w, self.x)

    def to_element(self) -> lie.GroupElement:
        if abs(self.norm() - 1) > 1e-12:
            raise ValueError("only unit quaternions are group elements")
        return lie.element(lie.su2(), to_matrix(self.array()))

    def distance(self, other: "Quaternion") -> float:
        return float(np.linalg.norm(self.array() - other.array()))


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
