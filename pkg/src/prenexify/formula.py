"""First-order formula ASTs and the positional machinery built on them.

Formulas are immutable and hash-consed: structurally equal formulas are
always the *same* object, so ``==`` and ``hash`` are identity-based and
cheap.  Negation is not a primitive; ``~p`` is represented as
``Imp(p, Falsum)``.  Quantifiers bind exactly one variable per node and
terms are restricted to variables.
"""

from __future__ import annotations

from typing import Iterator

__all__ = [
    "Formula",
    "Prime",
    "Falsum",
    "And",
    "Or",
    "Imp",
    "Exists",
    "Forall",
    "FALSUM",
    "Position",
    "PositionError",
    "LEFT",
    "RIGHT",
    "BODY",
    "free_vars",
    "all_vars",
    "is_quantifier_free",
    "size",
    "positions",
    "subformula_at",
    "replace_at",
    "subformulas",
    "proper_subformulas",
    "alpha_canonical",
    "alpha_equivalent",
    "fresh_variable",
    "rename_bound",
]

# Child selectors for positions.  A position is a tuple of selectors; the
# empty tuple is the root.
LEFT = "l"
RIGHT = "r"
BODY = "b"

Position = tuple[str, ...]

_interned: dict[tuple, "Formula"] = {}


class PositionError(Exception):
    """Raised when a position does not denote a node of the formula."""


class Formula:
    """Base class for all formula nodes.

    Never instantiate node classes you have not imported from this module;
    construction goes through the subclass constructors, which intern.
    """

    __slots__ = ("size", "free", "vars", "is_qf", "_canon", "_shape")

    size: int
    free: tuple[str, ...]  # free variables, sorted
    vars: tuple[str, ...]  # every variable occurring (free or bound), sorted
    is_qf: bool
    # _canon caches alpha_canonical, _shape caches hierarchy.classify_prenex

    def __str__(self) -> str:
        from .parser import render

        return render(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self}>"


def _intern(key: tuple, node: Formula) -> Formula:
    # setdefault is atomic under the GIL, so concurrent construction of the
    # same formula still yields a single shared object.
    return _interned.setdefault(key, node)


class Prime(Formula):
    """Atomic formula ``P(x, ...)``; arguments are variable names."""

    __slots__ = ("name", "args")

    def __new__(cls, name: str, args: tuple[str, ...] = ()):
        args = tuple(args)
        key = ("P", name, args)
        cached = _interned.get(key)
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.name = name
        self.args = args
        self.size = 1
        self.free = tuple(sorted(set(args)))
        self.vars = self.free
        self.is_qf = True
        self._canon = self
        self._shape = None
        return _intern(key, self)


class Falsum(Formula):
    """The absurdity constant; quantifier-free like any prime formula."""

    __slots__ = ()

    def __new__(cls):
        key = ("F",)
        cached = _interned.get(key)
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.size = 1
        self.free = ()
        self.vars = ()
        self.is_qf = True
        self._canon = self
        self._shape = None
        return _intern(key, self)


FALSUM = Falsum()


class _Binary(Formula):
    __slots__ = ("left", "right")

    _tag = "?"

    def __new__(cls, left: Formula, right: Formula):
        key = (cls._tag, left, right)
        cached = _interned.get(key)
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.left = left
        self.right = right
        self.size = 1 + left.size + right.size
        self.free = _merge(left.free, right.free)
        self.vars = _merge(left.vars, right.vars)
        self.is_qf = left.is_qf and right.is_qf
        self._canon = None
        self._shape = None
        return _intern(key, self)


class And(_Binary):
    __slots__ = ()
    _tag = "&"


class Or(_Binary):
    __slots__ = ()
    _tag = "|"


class Imp(_Binary):
    __slots__ = ()
    _tag = ">"


class _Quant(Formula):
    __slots__ = ("var", "body")

    _tag = "?"

    def __new__(cls, var: str, body: Formula):
        key = (cls._tag, var, body)
        cached = _interned.get(key)
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.var = var
        self.body = body
        self.size = 1 + body.size
        self.free = tuple(v for v in body.free if v != var)
        self.vars = _merge((var,), body.vars)
        self.is_qf = False
        self._canon = None
        self._shape = None
        return _intern(key, self)


class Exists(_Quant):
    __slots__ = ()
    _tag = "E"


class Forall(_Quant):
    __slots__ = ()
    _tag = "A"


def _merge(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(set(a) | set(b)))


def free_vars(phi: Formula) -> tuple[str, ...]:
    """Free variables of ``phi``, as a sorted tuple."""
    return phi.free


def all_vars(phi: Formula) -> tuple[str, ...]:
    """Every variable name occurring in ``phi``, free or bound, sorted."""
    return phi.vars


def is_quantifier_free(phi: Formula) -> bool:
    return phi.is_qf


def size(phi: Formula) -> int:
    """Number of AST nodes."""
    return phi.size


def _children(phi: Formula) -> tuple[tuple[str, Formula], ...]:
    if isinstance(phi, _Binary):
        return ((LEFT, phi.left), (RIGHT, phi.right))
    if isinstance(phi, _Quant):
        return ((BODY, phi.body),)
    return ()


def positions(phi: Formula) -> Iterator[Position]:
    """All valid positions of ``phi`` in preorder (root first, left before
    right before body)."""

    def walk(psi: Formula, prefix: Position) -> Iterator[Position]:
        yield prefix
        for sel, child in _children(psi):
            yield from walk(child, prefix + (sel,))

    return walk(phi, ())


def subformula_at(phi: Formula, pos: Position) -> Formula:
    """The node of ``phi`` reached by following ``pos``."""
    node = phi
    for sel in pos:
        if sel == LEFT and isinstance(node, _Binary):
            node = node.left
        elif sel == RIGHT and isinstance(node, _Binary):
            node = node.right
        elif sel == BODY and isinstance(node, _Quant):
            node = node.body
        else:
            raise PositionError(f"position {'/'.join(pos) or '/'} invalid for {phi}")
    return node


def replace_at(phi: Formula, pos: Position, psi: Formula) -> Formula:
    """``phi`` with the node at ``pos`` swapped for ``psi``.

    Replacement is literal (occurrence replacement): no capture avoidance
    is performed, so a free variable of ``psi`` may become bound by a
    quantifier above ``pos``.
    """
    if not pos:
        return psi
    sel, rest = pos[0], pos[1:]
    if sel == LEFT and isinstance(phi, _Binary):
        return type(phi)(replace_at(phi.left, rest, psi), phi.right)
    if sel == RIGHT and isinstance(phi, _Binary):
        return type(phi)(phi.left, replace_at(phi.right, rest, psi))
    if sel == BODY and isinstance(phi, _Quant):
        return type(phi)(phi.var, replace_at(phi.body, rest, psi))
    raise PositionError(f"position {'/'.join(pos) or '/'} invalid for {phi}")


def subformulas(phi: Formula) -> Iterator[Formula]:
    """All subformula occurrences of ``phi`` in preorder (with repeats)."""
    yield phi
    for _, child in _children(phi):
        yield from subformulas(child)


def proper_subformulas(phi: Formula) -> Iterator[Formula]:
    for _, child in _children(phi):
        yield from subformulas(child)


def _substitute_var(phi: Formula, old: str, new: str) -> Formula:
    """Replace free occurrences of variable ``old`` by ``new``."""
    if old not in phi.free:
        return phi
    if isinstance(phi, Prime):
        return Prime(phi.name, tuple(new if a == old else a for a in phi.args))
    if isinstance(phi, _Binary):
        return type(phi)(
            _substitute_var(phi.left, old, new), _substitute_var(phi.right, old, new)
        )
    if isinstance(phi, _Quant):
        # old is free in phi, hence phi.var != old
        return type(phi)(phi.var, _substitute_var(phi.body, old, new))
    return phi


def rename_bound(phi: Formula, fresh: str) -> Formula:
    """Rename the top quantifier of ``phi`` to ``fresh``.

    Precondition (the renaming rules' side condition): ``fresh`` does not
    appear in the body at all.
    """
    if not isinstance(phi, _Quant):
        raise ValueError("rename_bound expects a quantified formula")
    if fresh in phi.body.vars:
        raise ValueError(f"variable {fresh} already appears in the body")
    return type(phi)(fresh, _substitute_var(phi.body, phi.var, fresh))


def fresh_variable(avoid) -> str:
    """Smallest ``v0, v1, ...`` not contained in ``avoid``."""
    avoid = set(avoid)
    i = 0
    while f"v{i}" in avoid:
        i += 1
    return f"v{i}"


def alpha_canonical(phi: Formula) -> Formula:
    """Canonical representative of the alpha-equivalence class of ``phi``.

    Bound variables are renamed to ``v0, v1, ...`` in the order their
    binders appear in a preorder walk (outermost first, left before right),
    skipping names that occur free anywhere in ``phi``.  Free variables are
    untouched, shapes are preserved, and the map is idempotent.
    """
    cached = phi._canon
    if cached is not None:
        return cached

    reserved = set(phi.free)
    counter = [0]

    def next_name() -> str:
        while True:
            name = f"v{counter[0]}"
            counter[0] += 1
            if name not in reserved:
                return name

    def walk(psi: Formula, env: dict[str, str]) -> Formula:
        if isinstance(psi, Prime):
            return Prime(psi.name, tuple(env.get(a, a) for a in psi.args))
        if isinstance(psi, Falsum):
            return psi
        if isinstance(psi, _Binary):
            return type(psi)(walk(psi.left, env), walk(psi.right, env))
        assert isinstance(psi, _Quant)
        name = next_name()
        inner = dict(env)
        inner[psi.var] = name
        return type(psi)(name, walk(psi.body, inner))

    canon = walk(phi, {})
    canon._canon = canon
    phi._canon = canon
    return canon


def alpha_equivalent(phi: Formula, psi: Formula) -> bool:
    return alpha_canonical(phi) is alpha_canonical(psi)
