"""Surface-group representations and twist dynamics.

A surface of genus ``p`` with boundary components ``c_1..c_n`` has
generators ``a1, b1, ..., ap, bp`` and the single relation

    [a1, b1] [a2, b2] ... [ap, bp] = k_1^{e_1} ... k_n^{e_n}

with ``[x, y] = x y x^-1 y^-1``, products read left to right and ``e_j`` the
sign of boundary ``j``.  A representation assigns a group element to every
``a``/``b`` generator; boundary labels are part of the surface description.
A closed surface is the case of one boundary labelled by the identity.

Handles may be numbered from an offset, so the pieces produced by cutting
keep the generator names of the original surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import lie
from .io import element_from_json, element_to_json

__all__ = [
    "FreeWord",
    "SurfaceSpec",
    "SurfaceRep",
    "Move",
    "TwistWord",
    "HolonomyMismatch",
    "UnknownGenerator",
    "WrongSurface",
    "one_holed_torus",
    "closed_genus2",
    "eval_word",
    "boundary_defect",
    "twist_T1",
    "twist_T2",
    "twist_A",
    "apply_move",
    "apply_word",
    "cut",
    "sew",
    "two_holed_model",
    "two_holed_inverse",
    "genus2_alpha_bar",
    "genus2_alpha_under",
    "genus2_sigma",
    "genus2_sigma_inverse",
    "sigma_substitution",
    "sigma_s_conjugated",
    "sigma_s_expanded",
    "phi_map",
    "random_twist_orbit",
    "random_rep",
    "DEFAULT_MOVES",
]


class HolonomyMismatch(ValueError):
    pass


class UnknownGenerator(KeyError):
    pass


class WrongSurface(ValueError):
    pass


# ---------------------------------------------------------------------------
# free words


@dataclass(frozen=True)
class FreeWord:
    """Reduced word in named generators, as ``(name, exponent)`` letters."""

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce(self.letters))

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "FreeWord":
        return cls(((name, exp),))

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        """Parse ``'a1 b1 a1^-1 b1^-1'``; an empty string is the identity."""
        letters = []
        for tok in text.split():
            name, _, e = tok.partition("^")
            letters.append((name, int(e) if e else 1))
        return cls(tuple(letters))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((n, -e) for n, e in reversed(self.letters)))

    def __pow__(self, n: int) -> "FreeWord":
        base = self if n >= 0 else self.inverse()
        out = FreeWord()
        for _ in range(abs(n)):
            out = out * base
        return out

    def substitute(self, images: Mapping[str, "FreeWord"]) -> "FreeWord":
        out = FreeWord()
        for name, e in self.letters:
            out = out * (images.get(name, FreeWord.gen(name)) ** e)
        return out

    def generators(self) -> set[str]:
        return {n for n, _ in self.letters}

    def __str__(self):
        return " ".join(n if e == 1 else f"{n}^{e}" for n, e in self.letters)

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)


def _reduce(letters) -> tuple[tuple[str, int], ...]:
    out: list[tuple[str, int]] = []
    for name, e in letters:
        e = int(e)
        if e == 0:
            continue
        if out and out[-1][0] == name:
            e += out[-1][1]
            out.pop()
            if e != 0:
                out.append((name, e))
        else:
            out.append((name, e))
    return tuple(out)


def comm(x: FreeWord, y: FreeWord) -> FreeWord:
    return x * y * x.inverse() * y.inverse()


def _g(name: str) -> FreeWord:
    return FreeWord.gen(name)


# ---------------------------------------------------------------------------
# surfaces


@dataclass(frozen=True, eq=False)
class SurfaceSpec:
    """Genus, signed boundary labels and the group.

    ``first_handle`` is the index of the first handle (generator names run
    ``a{first_handle}..``).  ``separating`` optionally marks the curve
    ``prod_{j <= q} [a_j, b_j]`` by the number ``q`` of handles it encloses.
    """

    group: lie.GroupSpec
    genus: int
    boundary: tuple[tuple[int, lie.GroupElement], ...]
    first_handle: int = 1
    separating: int | None = None

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be at least 1")
        for sign, label in self.boundary:
            if sign not in (1, -1):
                raise ValueError("boundary signs are +1 or -1")
            if label.spec != self.group:
                raise lie.SpecMismatch("boundary label in the wrong group")
        if self.separating is not None and not (1 <= self.separating < self.genus):
            raise ValueError("separating curve must enclose 1..genus-1 handles")

    @property
    def handles(self) -> range:
        return range(self.first_handle, self.first_handle + self.genus)

    @property
    def generator_names(self) -> list[str]:
        return [x for j in self.handles for x in (f"a{j}", f"b{j}")]

    @property
    def boundary_names(self) -> list[str]:
        return [f"c{j + 1}" for j in range(len(self.boundary))]

    def relation_word(self) -> FreeWord:
        w = FreeWord()
        for j in self.handles:
            w = w * comm(_g(f"a{j}"), _g(f"b{j}"))
        return w

    def boundary_product(self) -> lie.GroupElement:
        out = lie.identity(self.group)
        for sign, label in self.boundary:
            out = lie.multiply(out, label if sign > 0 else lie.inverse(label))
        return out

    def separating_word(self) -> FreeWord:
        if self.separating is None:
            raise WrongSurface("no separating curve is marked")
        w = FreeWord()
        for j in range(self.first_handle, self.first_handle + self.separating):
            w = w * comm(_g(f"a{j}"), _g(f"b{j}"))
        return w

    def with_boundary(self, boundary) -> "SurfaceSpec":
        return replace(self, boundary=tuple(boundary))


def one_holed_torus(k: lie.GroupElement) -> SurfaceSpec:
    return SurfaceSpec(k.spec, 1, ((1, k),))


def closed_genus2(group: lie.GroupSpec, kc: lie.GroupElement | None = None) -> SurfaceSpec:
    """Genus 2 with one boundary label (identity models the closed surface)."""
    kc = lie.identity(group) if kc is None else kc
    return SurfaceSpec(group, 2, ((1, kc),), separating=1)


@dataclass(frozen=True, eq=False)
class SurfaceRep:
    spec: SurfaceSpec
    images: Mapping[str, lie.GroupElement] = field(default_factory=dict)

    def __post_init__(self):
        names = set(self.spec.generator_names)
        if set(self.images) != names:
            raise UnknownGenerator(f"images must be given for exactly {sorted(names)}")
        object.__setattr__(self, "images", dict(self.images))

    def __getitem__(self, name: str) -> lie.GroupElement:
        return self.images[name]

    def handle(self, j: int) -> tuple[lie.GroupElement, lie.GroupElement]:
        return self.images[f"a{j}"], self.images[f"b{j}"]

    def updated(self, **images) -> "SurfaceRep":
        new = dict(self.images)
        new.update(images)
        return SurfaceRep(self.spec, new)

    def to_json(self) -> dict:
        return {
            "group": self.spec.group.name,
            "genus": self.spec.genus,
            "first_handle": self.spec.first_handle,
            "separating": self.spec.separating,
            "boundary": [[s, element_to_json(k)] for s, k in self.spec.boundary],
            "images": {n: element_to_json(self.images[n]) for n in self.spec.generator_names},
        }

    @classmethod
    def from_json(cls, data: dict) -> "SurfaceRep":
        group = lie.parse_spec(data["group"])
        spec = SurfaceSpec(
            group,
            int(data["genus"]),
            tuple((int(s), element_from_json(k)) for s, k in data["boundary"]),
            int(data.get("first_handle", 1)),
            data.get("separating"),
        )
        return cls(spec, {n: element_from_json(v) for n, v in data["images"].items()})


def eval_word(rep: SurfaceRep, w: FreeWord) -> lie.GroupElement:
    """Evaluate a word on the representation.

    Boundary generators ``c_j`` evaluate to their labels.
    """
    boundary = dict(zip(rep.spec.boundary_names, (k for _, k in rep.spec.boundary)))
    out = lie.identity(rep.spec.group)
    for name, e in w.letters:
        if name in rep.images:
            x = rep.images[name]
        elif name in boundary:
            x = boundary[name]
        else:
            raise UnknownGenerator(name)
        if e < 0:
            x = lie.inverse(x)
        for _ in range(abs(e)):
            out = lie.multiply(out, x)
    return out


def boundary_defect(rep: SurfaceRep) -> float:
    return eval_word(rep, rep.spec.relation_word()).distance(rep.spec.boundary_product())


def random_rep(spec: SurfaceSpec, rng: np.random.Generator) -> SurfaceRep:
    """Haar-random images for all handles but the last, then the last handle
    drawn from the fiber of the commutator map over the remaining target.

    Only used for tests and experiments; relies on the commutator solvers.
    """
    from .solvers import sample_fiber

    images = {}
    prefix = lie.identity(spec.group)
    handles = list(spec.handles)
    for j in handles[:-1]:
        g, h = lie.haar_sample(spec.group, rng), lie.haar_sample(spec.group, rng)
        images[f"a{j}"], images[f"b{j}"] = g, h
        prefix = lie.multiply(prefix, lie.commutator(g, h))
    target = lie.multiply(lie.inverse(prefix), spec.boundary_product())
    j = handles[-1]
    if target.distance(lie.identity(spec.group)) < 1e-12:
        g = lie.haar_sample(spec.group, rng)
        images[f"a{j}"], images[f"b{j}"] = g, _commuting_partner(g, rng)
    else:
        images[f"a{j}"], images[f"b{j}"] = sample_fiber(target, rng)
    return SurfaceRep(spec, images)


def _commuting_partner(g: lie.GroupElement, rng: np.random.Generator) -> lie.GroupElement:
    """A random element of a maximal torus through ``g``."""
    if g.spec.is_abelian:
        return lie.haar_sample(g.spec, rng)
    m = g.matrix
    _, u = np.linalg.eig(m)
    u, _ = np.linalg.qr(u)
    ang = rng.uniform(-np.pi, np.pi, m.shape[0])
    ang -= ang.mean()
    return lie.element(g.spec, u @ np.diag(np.exp(1j * ang)) @ u.conj().T)


# ---------------------------------------------------------------------------
# twists


def _handle_check(rep: SurfaceRep, handle: int) -> None:
    if handle not in rep.spec.handles:
        raise WrongSurface(f"surface has no handle {handle}")


def _power(x: lie.GroupElement, n: int) -> lie.GroupElement:
    base = x if n >= 0 else lie.inverse(x)
    out = lie.identity(x.spec)
    for _ in range(abs(n)):
        out = lie.multiply(out, base)
    return out


def twist_A(rep: SurfaceRep, side: int, n: int, handle: int | None = None) -> SurfaceRep:
    """``(g, h) -> (g h^-n, h)`` for side 1, ``(g, h g^-n)`` for side 2."""
    handle = rep.spec.first_handle if handle is None else handle
    _handle_check(rep, handle)
    g, h = rep.handle(handle)
    if side == 1:
        return rep.updated(**{f"a{handle}": lie.multiply(g, _power(h, -n))})
    if side == 2:
        return rep.updated(**{f"b{handle}": lie.multiply(h, _power(g, -n))})
    raise ValueError("side is 1 or 2")


def twist_T1(rep: SurfaceRep, handle: int | None = None, power: int = 1) -> SurfaceRep:
    """``(g, h) -> (g h^-1, h)``."""
    return twist_A(rep, 1, power, handle)


def twist_T2(rep: SurfaceRep, handle: int | None = None, power: int = 1) -> SurfaceRep:
    """``(g, h) -> (g, h g^-1)``."""
    return twist_A(rep, 2, power, handle)


# ---------------------------------------------------------------------------
# genus two


def _alpha_bar_word(p: int = 2) -> FreeWord:
    a, b = _g(f"a{p}"), _g(f"b{p}")
    a_, b_ = _g(f"a{p - 1}"), _g(f"b{p - 1}")
    return a * comm(a, b).inverse() * b_ * a_ * b_.inverse()


def _alpha_under_word(p: int = 2) -> FreeWord:
    a, b = _g(f"a{p}"), _g(f"b{p}")
    a_, b_ = _g(f"a{p - 1}"), _g(f"b{p - 1}")
    s = comm(a_, b_)
    return s * b_ * a_ * b_.inverse() * a * comm(a, b).inverse() * s.inverse()


def sigma_substitution() -> dict[str, FreeWord]:
    """Images of the generators under the genus-two twist, as words."""
    ab = _alpha_bar_word()
    a2 = _g("a2")
    return {
        "a1": _g("a1"),
        "b1": ab * _g("b1"),
        "a2": a2,
        "b2": a2.inverse() * ab * a2 * _g("b2"),
    }


def sigma_s_conjugated() -> FreeWord:
    """Image of ``s = [a1, b1]`` written as ``alpha_under s alpha_bar^-1``."""
    s = comm(_g("a1"), _g("b1"))
    return _alpha_under_word() * s * _alpha_bar_word().inverse()


def sigma_s_expanded() -> FreeWord:
    """Image of ``s`` as ``a1 a2 [a2,b2]^-1 a1^-1 s [a2,b2] a2^-1``."""
    a1, a2 = _g("a1"), _g("a2")
    s = comm(a1, _g("b1"))
    x = comm(a2, _g("b2"))
    return a1 * a2 * x.inverse() * a1.inverse() * s * x * a2.inverse()


def _require_genus2(rep: SurfaceRep) -> None:
    sp = rep.spec
    if sp.genus != 2 or sp.first_handle != 1 or len(sp.boundary) != 1:
        raise WrongSurface("the genus-two twist needs genus 2 with one boundary component")


def genus2_alpha_bar(rep: SurfaceRep) -> lie.GroupElement:
    _require_genus2(rep)
    return eval_word(rep, _alpha_bar_word())


def genus2_alpha_under(rep: SurfaceRep) -> lie.GroupElement:
    _require_genus2(rep)
    return eval_word(rep, _alpha_under_word())


def genus2_sigma(rep: SurfaceRep) -> SurfaceRep:
    _require_genus2(rep)
    sub = sigma_substitution()
    return rep.updated(**{n: eval_word(rep, w) for n, w in sub.items()})


def genus2_sigma_inverse(rep: SurfaceRep) -> SurfaceRep:
    """Inverse twist.

    The twist fixes ``alpha_bar`` and the ``a`` generators, so the
    pre-images are ``b1 = ab^-1 b1'`` and ``b2 = a2^-1 ab^-1 a2 b2'`` with
    ``ab`` evaluated on the given representation.
    """
    _require_genus2(rep)
    ab_inv = lie.inverse(genus2_alpha_bar(rep))
    a2 = rep["a2"]
    b1 = lie.multiply(ab_inv, rep["b1"])
    b2 = lie.multiply(lie.multiply(lie.multiply(lie.inverse(a2), ab_inv), a2), rep["b2"])
    return rep.updated(b1=b1, b2=b2)


def phi_map(g1, g, h, k, l, kc, tol: float = 1e-9) -> tuple[lie.GroupElement, lie.GroupElement]:
    """``(g1 [g,h], (g1 g)(k kc^-1) g1 [g,h] (g1 g)^-1 (k kc^-1)^-1)``.

    Requires ``g1 [g,h] [k,l] = kc``.
    """
    m1 = lie.multiply(g1, lie.commutator(g, h))
    if lie.multiply(m1, lie.commutator(k, l)).distance(kc) > tol:
        raise ValueError("constraint g1 [g,h] [k,l] = kc is violated")
    u = lie.multiply(g1, g)
    v = lie.multiply(k, lie.inverse(kc))
    m2 = lie.multiply(
        lie.multiply(lie.multiply(u, v), m1),
        lie.multiply(lie.inverse(u), lie.inverse(v)),
    )
    return m1, m2


# ---------------------------------------------------------------------------
# cut and sew


def cut(rep: SurfaceRep) -> tuple[SurfaceRep, SurfaceRep, lie.GroupElement]:
    """Split along the marked separating curve ``s``.

    The inner piece carries the first ``q`` handles and boundary ``(+, k)``;
    the outer piece carries the remaining handles with boundaries
    ``(-, k)`` followed by the original ones, where ``k`` is the holonomy
    of ``s``.
    """
    sp = rep.spec
    k = eval_word(rep, sp.separating_word())
    q = sp.separating
    inner = SurfaceSpec(sp.group, q, ((1, k),), sp.first_handle)
    outer = SurfaceSpec(sp.group, sp.genus - q, ((-1, k),) + sp.boundary, sp.first_handle + q)
    minus = SurfaceRep(inner, {n: rep.images[n] for n in inner.generator_names})
    plus = SurfaceRep(outer, {n: rep.images[n] for n in outer.generator_names})
    return minus, plus, k


def sew(minus: SurfaceRep, plus: SurfaceRep, tol: float = 1e-9) -> SurfaceRep:
    ms, ps = minus.spec, plus.spec
    if len(ms.boundary) != 1 or ms.boundary[0][0] != 1 or not ps.boundary or ps.boundary[0][0] != -1:
        raise WrongSurface("pieces do not have matching boundaries at the curve")
    if ps.first_handle != ms.first_handle + ms.genus:
        raise WrongSurface("handle numbering of the pieces is not contiguous")
    k_minus, k_plus = ms.boundary[0][1], ps.boundary[0][1]
    if k_minus.distance(k_plus) > tol:
        raise HolonomyMismatch("holonomies at the separating curve differ")
    spec = SurfaceSpec(ms.group, ms.genus + ps.genus, ps.boundary[1:], ms.first_handle, ms.genus)
    images = dict(minus.images)
    images.update(plus.images)
    return SurfaceRep(spec, images)


def two_holed_model(k_vec: Sequence[lie.GroupElement], rep: SurfaceRep) -> SurfaceRep:
    """Torus with boundaries ``k_1..k_{n-1}`` and a free last boundary.

    The free boundary carries ``k_n = (k_1 ... k_{n-1})^-1 [g, h]`` so the
    relation ``[g, h] = k_1 ... k_n`` holds.  With no prescribed labels this
    is the one-holed torus itself.
    """
    sp = rep.spec
    if sp.genus != 1 or len(sp.boundary) != 1:
        raise WrongSurface("expected a one-holed torus")
    g, h = rep.handle(sp.first_handle)
    prod = lie.identity(sp.group)
    for k in k_vec:
        prod = lie.multiply(prod, k)
    kn = lie.multiply(lie.inverse(prod), lie.commutator(g, h))
    boundary = tuple((1, k) for k in k_vec) + ((1, kn),)
    new = SurfaceSpec(sp.group, 1, boundary, sp.first_handle)
    return SurfaceRep(new, rep.images)


def two_holed_inverse(rep: SurfaceRep) -> tuple[list[lie.GroupElement], SurfaceRep]:
    sp = rep.spec
    if sp.genus != 1 or any(s != 1 for s, _ in sp.boundary):
        raise WrongSurface("expected a torus with positively oriented boundaries")
    g, h = rep.handle(sp.first_handle)
    k_vec = [k for _, k in sp.boundary[:-1]]
    spec1 = SurfaceSpec(sp.group, 1, ((1, lie.commutator(g, h)),), sp.first_handle)
    return k_vec, SurfaceRep(spec1, rep.images)


# ---------------------------------------------------------------------------
# moves and orbits


@dataclass(frozen=True)
class Move:
    """A twist move.

    ``kind`` is ``'T1'``, ``'T2'`` (power ``+-1``), ``'A1'``, ``'A2'`` (any
    integer power), ``'sigma'`` (power ``+-1``) or ``'id'``.
    """

    kind: str
    power: int = 1
    handle: int | None = None

    def __post_init__(self):
        if self.kind not in ("T1", "T2", "A1", "A2", "sigma", "id"):
            raise ValueError(f"unknown move {self.kind!r}")
        if self.kind in ("T1", "T2", "sigma") and self.power not in (1, -1):
            raise ValueError(f"{self.kind} takes power +1 or -1")

    def inverse(self) -> "Move":
        return Move(self.kind, -self.power, self.handle)

    def valid_for(self, spec: SurfaceSpec) -> bool:
        if self.kind == "sigma":
            return spec.genus == 2 and spec.first_handle == 1 and len(spec.boundary) == 1
        if self.kind == "id":
            return True
        return self.handle is None or self.handle in spec.handles

    def __str__(self):
        if self.kind == "id":
            return "id"
        h = "" if self.handle is None else f"@{self.handle}"
        return f"{self.kind}^{self.power}{h}"


@dataclass(frozen=True)
class TwistWord:
    moves: tuple[Move, ...] = ()

    def validate(self, spec: SurfaceSpec) -> None:
        for m in self.moves:
            if not m.valid_for(spec):
                raise WrongSurface(f"move {m} is not valid on this surface")

    def inverse(self) -> "TwistWord":
        return TwistWord(tuple(m.inverse() for m in reversed(self.moves)))


DEFAULT_MOVES = (Move("T1", 1), Move("T1", -1), Move("T2", 1), Move("T2", -1))


def apply_move(rep: SurfaceRep, move: Move) -> SurfaceRep:
    if move.kind == "id":
        return rep
    if move.kind == "sigma":
        return genus2_sigma(rep) if move.power == 1 else genus2_sigma_inverse(rep)
    side = 1 if move.kind in ("T1", "A1") else 2
    return twist_A(rep, side, move.power, move.handle)


def apply_word(rep: SurfaceRep, word: TwistWord) -> SurfaceRep:
    word.validate(rep.spec)
    for m in word.moves:
        rep = apply_move(rep, m)
    return rep


def random_twist_orbit(
    rep: SurfaceRep,
    length: int,
    rng: np.random.Generator,
    move_set: Sequence[Move] = DEFAULT_MOVES,
) -> Iterator[SurfaceRep]:
    """Yield the start and ``length`` successive uniformly random moves."""
    TwistWord(tuple(move_set)).validate(rep.spec)
    yield rep
    if length <= 0:
        return
    picks = rng.integers(0, len(move_set), size=length)
    for i in picks:
        rep = apply_move(rep, move_set[i])
        yield rep
