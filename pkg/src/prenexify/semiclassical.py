"""Decision procedure for the semi-classical hierarchy classes J_k^n,
R_k^n and D_k^n = J_k^n u R_k^n.

Level 0 of every class is the set of quantifier-free formulas.  At level
k+1 a formula enters J/R either by already lying in D_k^n or through one
generation clause determined by its top connective; which clauses exist
depends on how n compares to k:

    n > k:   J: E&E', E|E', U->E, exists x E      R: U&U', U|U', E->U, forall x U
    n = k:   J: E&E', E|E', D->E, exists x E      R: U&U', U|D, D|U, E->U, forall x U
    n < k:   J: E&E', E|E1, E1|E, D0->E, ex x E   R: U&U', U|D0, D0|U, E1->U, fa x U

with E, E' ranging over J_{k+1}^n, U, U' over R_{k+1}^n, D over D_k^n,
D0 over D_n^n and E1 over J_{n+1}^n.  Because the classes are inductively
generated, checking the D alternative plus the structural clause for the
top connective is a complete decision procedure; no search is involved.

The checker memoizes (alpha-canonical formula, k, n) triples; membership
depends only on the connective/quantifier skeleton, so alpha-variants
share one entry.  Queries are safe from multiple threads: results are
pure functions of the key, so racing writers can only duplicate work,
never disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formula import And, Exists, Forall, Formula, Imp, Or, alpha_canonical, size

__all__ = [
    "Witness",
    "ClassVerdict",
    "Classifier",
    "in_J",
    "in_R",
    "in_D",
    "min_levels",
    "in_E_plus",
    "in_U_plus",
    "verdict",
    "validate_witness",
]

J = "J"
R = "R"


@dataclass(frozen=True)
class Witness:
    """One node of a derivation tree for a positive membership verdict.

    ``clause`` names the generation clause applied for ``phi`` at level
    ``k`` (degree ``n``) on side ``side``:

    - ``qf``: level-0 base case;
    - ``lift``: member of D_{k-1}^n, child is the lower-level witness;
    - ``and`` / ``imp`` / ``exists`` / ``forall``: structural clause with
      child witnesses in operand order;
    - ``or``: the symmetric disjunction clause (both children on the same
      side at level k);
    - ``or-left`` / ``or-right``: the asymmetric disjunction clauses; the
      named operand carries the level-k class and the other child the low
      side class required by the case.
    """

    side: str
    k: int
    n: int
    clause: str
    children: tuple["Witness", ...] = ()


@dataclass(frozen=True)
class ClassVerdict:
    """Joint answer for both polarities at one (k, n)."""

    formula: Formula
    k: int
    n: int
    in_J: bool
    in_R: bool
    witness_J: Optional[Witness]
    witness_R: Optional[Witness]

    @property
    def in_D(self) -> bool:
        return self.in_J or self.in_R


class Classifier:
    """Memoizing membership checker for J_k^n and R_k^n."""

    def __init__(self):
        # (formula, k, n) -> 2-bit mask: bit 0 = in_J, bit 1 = in_R
        self._memo: dict[tuple[Formula, int, int], int] = {}

    def clear(self) -> None:
        self._memo.clear()

    def decide(self, phi: Formula, k: int, n: int) -> tuple[bool, bool]:
        """(in_J, in_R) for ``phi`` at level ``k``, degree ``n``."""
        if k < 0:
            raise ValueError("level k must be a natural number")
        if n < 0:
            raise ValueError("degree n must be a natural number")
        mask = self._mask(phi, k, n)
        return bool(mask & 1), bool(mask & 2)

    def in_J(self, phi: Formula, k: int, n: int) -> bool:
        return self.decide(phi, k, n)[0]

    def in_R(self, phi: Formula, k: int, n: int) -> bool:
        return self.decide(phi, k, n)[1]

    def in_D(self, phi: Formula, k: int, n: int) -> bool:
        j, r = self.decide(phi, k, n)
        return j or r

    def _mask(self, phi: Formula, k: int, n: int) -> int:
        if k == 0:
            return 3 if phi.is_qf else 0
        # Membership depends only on the connective/quantifier skeleton, so
        # alpha-variants share one memo entry.
        key = (alpha_canonical(phi), k, n)
        mask = self._memo.get(key)
        if mask is None:
            mask = self._compute(phi, k, n)
            self._memo[key] = mask
        return mask

    def _compute(self, phi: Formula, k: int, n: int) -> int:
        kk = k - 1  # the generation step defines J_{kk+1} from level kk
        if self._mask(phi, kk, n) != 0:
            return 3  # D clause feeds both polarities
        mask = 0
        if self._generate(phi, k, n, J):
            mask |= 1
        if self._generate(phi, k, n, R):
            mask |= 2
        return mask

    def _generate(self, phi: Formula, k: int, n: int, side: str) -> bool:
        """Structural generation clause for phi in J/R at level k (k >= 1)."""
        kk = k - 1
        if isinstance(phi, And):
            want = 1 if side == J else 2
            return bool(self._mask(phi.left, k, n) & want) and bool(
                self._mask(phi.right, k, n) & want
            )
        if isinstance(phi, Or):
            if side == J:
                if kk <= n:
                    return bool(self._mask(phi.left, k, n) & 1) and bool(
                        self._mask(phi.right, k, n) & 1
                    )
                low = n + 1
                return (
                    bool(self._mask(phi.left, k, n) & 1)
                    and bool(self._mask(phi.right, low, n) & 1)
                ) or (
                    bool(self._mask(phi.left, low, n) & 1)
                    and bool(self._mask(phi.right, k, n) & 1)
                )
            if kk < n:
                return bool(self._mask(phi.left, k, n) & 2) and bool(
                    self._mask(phi.right, k, n) & 2
                )
            # kk == n uses D_kk^n = D_n^n, kk > n uses D_n^n directly
            return (
                bool(self._mask(phi.left, k, n) & 2)
                and self._mask(phi.right, n, n) != 0
            ) or (
                self._mask(phi.left, n, n) != 0
                and bool(self._mask(phi.right, k, n) & 2)
            )
        if isinstance(phi, Imp):
            if side == J:
                if kk < n:
                    ante = bool(self._mask(phi.left, k, n) & 2)
                elif kk == n:
                    ante = self._mask(phi.left, kk, n) != 0
                else:
                    ante = self._mask(phi.left, n, n) != 0
                return ante and bool(self._mask(phi.right, k, n) & 1)
            if kk <= n:
                ante = bool(self._mask(phi.left, k, n) & 1)
            else:
                ante = bool(self._mask(phi.left, n + 1, n) & 1)
            return ante and bool(self._mask(phi.right, k, n) & 2)
        if isinstance(phi, Exists):
            return side == J and bool(self._mask(phi.body, k, n) & 1)
        if isinstance(phi, Forall):
            return side == R and bool(self._mask(phi.body, k, n) & 2)
        return False  # prime or falsum above level 0 only enter via D

    # -- witnesses ---------------------------------------------------------

    def witness(self, phi: Formula, k: int, n: int, side: str) -> Optional[Witness]:
        """Derivation tree for a positive verdict, or ``None``.

        Witnesses are rebuilt on demand from the memoized boolean answers,
        so building one is linear in the derivation size.
        """
        want = 1 if side == J else 2
        if k == 0:
            return Witness(side, 0, n, "qf") if phi.is_qf else None
        if not self._mask(phi, k, n) & want:
            return None
        kk = k - 1
        dmask = self._mask(phi, kk, n)
        if dmask != 0:
            sub_side = J if dmask & 1 else R
            child = self.witness(phi, kk, n, sub_side)
            assert child is not None
            return Witness(side, k, n, "lift", (child,))
        return self._generate_witness(phi, k, n, side)

    def _generate_witness(self, phi: Formula, k: int, n: int, side: str) -> Witness:
        kk = k - 1
        if isinstance(phi, And):
            return Witness(
                side,
                k,
                n,
                "and",
                (
                    self.witness(phi.left, k, n, side),
                    self.witness(phi.right, k, n, side),
                ),
            )
        if isinstance(phi, Or):
            if side == J:
                if kk <= n:
                    return Witness(
                        side,
                        k,
                        n,
                        "or",
                        (
                            self.witness(phi.left, k, n, J),
                            self.witness(phi.right, k, n, J),
                        ),
                    )
                low = n + 1
                if self._mask(phi.left, k, n) & 1 and self._mask(phi.right, low, n) & 1:
                    return Witness(
                        side,
                        k,
                        n,
                        "or-left",
                        (
                            self.witness(phi.left, k, n, J),
                            self.witness(phi.right, low, n, J),
                        ),
                    )
                return Witness(
                    side,
                    k,
                    n,
                    "or-right",
                    (
                        self.witness(phi.left, low, n, J),
                        self.witness(phi.right, k, n, J),
                    ),
                )
            if kk < n:
                return Witness(
                    side,
                    k,
                    n,
                    "or",
                    (
                        self.witness(phi.left, k, n, R),
                        self.witness(phi.right, k, n, R),
                    ),
                )
            dmask_r = self._mask(phi.right, n, n)
            if self._mask(phi.left, k, n) & 2 and dmask_r != 0:
                low_side = J if dmask_r & 1 else R
                return Witness(
                    side,
                    k,
                    n,
                    "or-left",
                    (
                        self.witness(phi.left, k, n, R),
                        self.witness(phi.right, n, n, low_side),
                    ),
                )
            dmask_l = self._mask(phi.left, n, n)
            low_side = J if dmask_l & 1 else R
            return Witness(
                side,
                k,
                n,
                "or-right",
                (
                    self.witness(phi.left, n, n, low_side),
                    self.witness(phi.right, k, n, R),
                ),
            )
        if isinstance(phi, Imp):
            if side == J:
                if kk < n:
                    ante = self.witness(phi.left, k, n, R)
                elif kk == n:
                    dmask = self._mask(phi.left, kk, n)
                    ante = self.witness(phi.left, kk, n, J if dmask & 1 else R)
                else:
                    dmask = self._mask(phi.left, n, n)
                    ante = self.witness(phi.left, n, n, J if dmask & 1 else R)
                return Witness(
                    side, k, n, "imp", (ante, self.witness(phi.right, k, n, J))
                )
            if kk <= n:
                ante = self.witness(phi.left, k, n, J)
            else:
                ante = self.witness(phi.left, n + 1, n, J)
            return Witness(side, k, n, "imp", (ante, self.witness(phi.right, k, n, R)))
        if isinstance(phi, Exists):
            return Witness(side, k, n, "exists", (self.witness(phi.body, k, n, J),))
        assert isinstance(phi, Forall)
        return Witness(side, k, n, "forall", (self.witness(phi.body, k, n, R),))

    def verdict(self, phi: Formula, k: int, n: int) -> ClassVerdict:
        j, r = self.decide(phi, k, n)
        return ClassVerdict(
            formula=phi,
            k=k,
            n=n,
            in_J=j,
            in_R=r,
            witness_J=self.witness(phi, k, n, J) if j else None,
            witness_R=self.witness(phi, k, n, R) if r else None,
        )

    def min_levels(
        self, phi: Formula, n: int, k_max: Optional[int] = None
    ) -> tuple[Optional[int], Optional[int]]:
        """Least levels k <= k_max admitting phi into J (resp. R).

        The default cutoff n + size(phi) + 1 is an empirically validated
        bound, not a proven one, so ``None`` means "absent up to k_max".
        """
        if k_max is None:
            k_max = n + size(phi) + 1
        k_j: Optional[int] = None
        k_r: Optional[int] = None
        for k in range(k_max + 1):
            j, r = self.decide(phi, k, n)
            if k_j is None and j:
                k_j = k
            if k_r is None and r:
                k_r = k
            if k_j is not None and k_r is not None:
                break
        return k_j, k_r


_default = Classifier()


def in_J(phi: Formula, k: int, n: int) -> bool:
    return _default.in_J(phi, k, n)


def in_R(phi: Formula, k: int, n: int) -> bool:
    return _default.in_R(phi, k, n)


def in_D(phi: Formula, k: int, n: int) -> bool:
    return _default.in_D(phi, k, n)


def in_E_plus(phi: Formula, k: int) -> bool:
    """Cumulative class E_k+, computed as J_k^k (stabilization)."""
    return _default.in_J(phi, k, k)


def in_U_plus(phi: Formula, k: int) -> bool:
    """Cumulative class U_k+, computed as R_k^k (stabilization)."""
    return _default.in_R(phi, k, k)


def min_levels(phi: Formula, n: int, k_max: Optional[int] = None):
    return _default.min_levels(phi, n, k_max)


def verdict(phi: Formula, k: int, n: int) -> ClassVerdict:
    return _default.verdict(phi, k, n)


def validate_witness(phi: Formula, w: Witness, checker: Optional[Classifier] = None) -> bool:
    """Replay a witness clause-by-clause against the generating rules.

    Returns True when every node of the derivation is a legitimate
    application of a clause for the formula it certifies.
    """
    c = checker or _default

    def check(psi: Formula, node: Witness) -> bool:
        k, n, side = node.k, node.n, node.side
        if node.clause == "qf":
            return k == 0 and psi.is_qf
        if k == 0:
            return False
        kk = k - 1
        if node.clause == "lift":
            (child,) = node.children
            return child.k == kk and child.n == n and check(psi, child)
        if node.clause == "and":
            if not isinstance(psi, And):
                return False
            lw, rw = node.children
            return (
                lw.side == side
                and rw.side == side
                and lw.k == k
                and rw.k == k
                and check(psi.left, lw)
                and check(psi.right, rw)
            )
        if node.clause in ("or", "or-left", "or-right"):
            if not isinstance(psi, Or):
                return False
            lw, rw = node.children
            if not (check(psi.left, lw) and check(psi.right, rw)):
                return False
            if side == J:
                if kk <= n:
                    return (
                        node.clause == "or"
                        and (lw.side, lw.k) == (J, k)
                        and (rw.side, rw.k) == (J, k)
                    )
                if node.clause == "or-left":
                    return (lw.side, lw.k) == (J, k) and (rw.side, rw.k) == (J, n + 1)
                if node.clause == "or-right":
                    return (lw.side, lw.k) == (J, n + 1) and (rw.side, rw.k) == (J, k)
                return False
            if kk < n:
                return (
                    node.clause == "or"
                    and (lw.side, lw.k) == (R, k)
                    and (rw.side, rw.k) == (R, k)
                )
            if node.clause == "or-left":
                return (lw.side, lw.k) == (R, k) and rw.k == n
            if node.clause == "or-right":
                return lw.k == n and (rw.side, rw.k) == (R, k)
            return False
        if node.clause == "imp":
            if not isinstance(psi, Imp):
                return False
            lw, rw = node.children
            if not (check(psi.left, lw) and check(psi.right, rw)):
                return False
            if side == J:
                if rw.side != J or rw.k != k:
                    return False
                if kk < n:
                    return (lw.side, lw.k) == (R, k)
                return lw.k == (kk if kk == n else n)
            if rw.side != R or rw.k != k:
                return False
            if kk <= n:
                return (lw.side, lw.k) == (J, k)
            return (lw.side, lw.k) == (J, n + 1)
        if node.clause == "exists":
            if not (isinstance(psi, Exists) and side == J):
                return False
            (child,) = node.children
            return (child.side, child.k) == (J, k) and check(psi.body, child)
        if node.clause == "forall":
            if not (isinstance(psi, Forall) and side == R):
                return False
            (child,) = node.children
            return (child.side, child.k) == (R, k) and check(psi.body, child)
        return False

    return check(phi, w)
