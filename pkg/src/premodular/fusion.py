"""Fusion rings: finite label sets with duals and non-negative structure constants.

A fusion ring is stored as a dense integer tensor ``N[a, b, c]`` giving the
multiplicity of label ``c`` in the product ``a ⊗ b``, together with the unit
label and the dual involution.  Everything downstream (twists, S matrices,
condensation, surgery invariants) is built on this data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "FusionError",
    "ClosureError",
    "ConvergenceError",
    "InconsistentDataError",
    "Label",
    "CheckResult",
    "ValidationReport",
    "FusionData",
    "SubcategorySelection",
    "validate_fusion",
    "perron_frobenius_dims",
    "global_dim",
    "deligne_product",
    "full_subcategory",
]

DEFAULT_TOL = 1e-9


class FusionError(ValueError):
    """Structurally malformed fusion data (bad labels, bad indices, bad N)."""


class ClosureError(FusionError):
    """A label subset is not closed under fusion; carries the offending triple."""

    def __init__(self, message: str, triple: tuple):
        super().__init__(message)
        self.triple = triple


class ConvergenceError(RuntimeError):
    """An iterative computation exceeded its iteration cap."""


class InconsistentDataError(ValueError):
    """Numerical data violates an identity it is required to satisfy."""


@dataclass(frozen=True)
class Label:
    """A simple object: position in the category's label list plus display name."""

    index: int
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check: pass/fail, witness of failure, residual size."""

    name: str
    passed: bool
    witness: object = None
    residual: float = 0.0

    def __str__(self) -> str:
        status = "ok" if self.passed else "FAIL"
        extra = ""
        if not self.passed and self.witness is not None:
            extra = f" witness={self.witness}"
        if self.residual:
            extra += f" residual={self.residual:.3g}"
        return f"{self.name}: {status}{extra}"


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self):
        return iter(self.checks)

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.checks)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FusionData:
    """A fusion ring on an ordered label set.

    ``tensor[a, b, c]`` is the multiplicity of ``c`` in ``a ⊗ b``.  ``unit``
    and ``dual`` are given by index.  Instances are immutable; all operations
    on them are pure functions.
    """

    names: tuple[str, ...]
    unit: int
    dual: tuple[int, ...]
    tensor: np.ndarray

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise FusionError("label set is empty")
        if len(set(self.names)) != n:
            raise FusionError("duplicate label names")
        if not (0 <= self.unit < n):
            raise FusionError(f"unit index {self.unit} out of range")
        if len(self.dual) != n or any(not (0 <= d < n) for d in self.dual):
            raise FusionError("dual map is not an index map on the label set")
        t = np.asarray(self.tensor)
        if t.shape != (n, n, n):
            raise FusionError(f"multiplicity tensor has shape {t.shape}, expected {(n, n, n)}")
        if not np.issubdtype(t.dtype, np.integer):
            if not np.all(t == np.round(t)):
                raise FusionError("multiplicities must be integers")
            t = np.round(t).astype(int)
        object.__setattr__(self, "tensor", _readonly(t.astype(int)))

    @classmethod
    def from_entries(
        cls,
        names: Sequence[str],
        unit: int | str,
        dual: Mapping | Sequence,
        entries: Mapping[tuple, int] | Iterable[tuple],
    ) -> "FusionData":
        """Build from a sparse list of ``(a, b, c, m)`` entries (labels by name or index)."""
        names = tuple(str(x) for x in names)
        index = {nm: i for i, nm in enumerate(names)}

        def resolve(x) -> int:
            if isinstance(x, str):
                if x not in index:
                    raise FusionError(f"unknown label {x!r}")
                return index[x]
            i = int(x)
            if not (0 <= i < len(names)):
                raise FusionError(f"label index {i} out of range")
            return i

        if isinstance(dual, Mapping):
            dual_idx = list(range(len(names)))
            for k, v in dual.items():
                dual_idx[resolve(k)] = resolve(v)
        else:
            dual_idx = [resolve(x) for x in dual]
        if isinstance(entries, Mapping):
            entries = [(a, b, c, m) for (a, b, c), m in entries.items()]
        tensor = np.zeros((len(names),) * 3, dtype=int)
        for a, b, c, m in entries:
            m = int(m)
            if m < 0:
                raise FusionError(f"negative multiplicity at ({a}, {b}, {c})")
            tensor[resolve(a), resolve(b), resolve(c)] = m
        return cls(names=names, unit=resolve(unit), dual=tuple(dual_idx), tensor=tensor)

    # -- basic queries ------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(Label(i, nm) for i, nm in enumerate(self.names))

    def label(self, i: int) -> Label:
        return Label(i, self.names[i])

    def index(self, x) -> int:
        """Resolve a label given as index, name, or Label."""
        if isinstance(x, Label):
            return x.index
        if isinstance(x, str):
            try:
                return self.names.index(x)
            except ValueError:
                raise FusionError(f"unknown label {x!r}") from None
        i = int(x)
        if not (0 <= i < self.rank):
            raise FusionError(f"label index {i} out of range")
        return i

    def multiplicity(self, a, b, c) -> int:
        return int(self.tensor[self.index(a), self.index(b), self.index(c)])

    def nonzero(self) -> Iterable[tuple[tuple[int, int, int], int]]:
        """Sparse view of the multiplicity tensor."""
        for a, b, c in zip(*np.nonzero(self.tensor)):
            yield (int(a), int(b), int(c)), int(self.tensor[a, b, c])

    def fusion_matrix(self, a) -> np.ndarray:
        """The matrix ``(N_a)[b, c] = N[a, b, c]``."""
        return self.tensor[self.index(a)].copy()

    def product_labels(self, a, b) -> tuple[int, ...]:
        """Indices appearing in ``a ⊗ b`` with nonzero multiplicity."""
        return tuple(int(c) for c in np.nonzero(self.tensor[self.index(a), self.index(b)])[0])

    def same_ring(self, other: "FusionData") -> bool:
        """Equality of the underlying data, ignoring display names."""
        return (
            self.rank == other.rank
            and self.unit == other.unit
            and self.dual == other.dual
            and np.array_equal(self.tensor, other.tensor)
        )


# -- validation --------------------------------------------------------------


def validate_fusion(f: FusionData) -> ValidationReport:
    """Check the fusion-ring axioms, one report entry per invariant.

    Structural problems (negative or non-integer multiplicities, a dual map
    that is not a bijection) are reported under ``structure:*`` names,
    distinct from the axiom checks.
    """
    checks: list[CheckResult] = []
    n, u, t = f.rank, f.unit, f.tensor

    checks.append(
        CheckResult("structure:labels", len(set(f.names)) == n and n > 0)
    )
    neg = np.argwhere(t < 0)
    checks.append(
        CheckResult(
            "structure:multiplicities",
            neg.size == 0,
            witness=tuple(f.names[i] for i in neg[0]) if neg.size else None,
        )
    )
    checks.append(
        CheckResult("structure:dual_bijective", sorted(f.dual) == list(range(n)))
    )

    eye = np.eye(n, dtype=int)
    unit_ok = np.array_equal(t[u], eye) and np.array_equal(t[:, u, :], eye)
    unit_wit = None
    if not unit_ok:
        bad = np.argwhere(t[u] != eye)
        if bad.size:
            unit_wit = ("unit", f.names[bad[0][0]], f.names[bad[0][1]])
        else:
            bad = np.argwhere(t[:, u, :] != eye)
            unit_wit = (f.names[bad[0][0]], "unit", f.names[bad[0][1]])
    checks.append(CheckResult("axiom:unit", unit_ok, witness=unit_wit))

    dual = np.asarray(f.dual)
    invol_ok = bool(np.all(dual[dual] == np.arange(n)) and dual[u] == u)
    checks.append(CheckResult("axiom:dual_involution", invol_ok))

    # Frobenius reciprocity: N[a,b,c] = N[dual b, dual a, dual c] = N[dual a, c, b]
    frob1 = t[np.ix_(dual, dual, dual)].transpose(1, 0, 2)
    frob2 = t[dual][:, :, :].transpose(0, 2, 1)
    frob_dev = np.abs(t - frob1) + np.abs(t - frob2)
    frob_ok = not frob_dev.any()
    frob_wit = None
    if not frob_ok:
        a, b, c = np.unravel_index(int(frob_dev.argmax()), frob_dev.shape)
        frob_wit = (f.names[a], f.names[b], f.names[c])
    checks.append(CheckResult("axiom:frobenius_reciprocity", frob_ok, witness=frob_wit))

    # associativity: sum_e N[a,b,e] N[e,c,d] = sum_f N[b,c,f] N[a,f,d]
    lhs = np.einsum("abe,ecd->abcd", t, t)
    rhs = np.einsum("bcf,afd->abcd", t, t)
    dev = np.abs(lhs - rhs)
    assoc_ok = not dev.any()
    assoc_wit = None
    if not assoc_ok:
        a, b, c, d = np.unravel_index(int(dev.argmax()), dev.shape)
        assoc_wit = (f.names[a], f.names[b], f.names[c], f.names[d])
    checks.append(
        CheckResult("axiom:associativity", assoc_ok, witness=assoc_wit, residual=float(dev.max()))
    )

    return ValidationReport(tuple(checks))


# -- quantum dimensions ------------------------------------------------------


def perron_frobenius_dims(
    f: FusionData, *, tol: float = 1e-12, max_iterations: int = 10**5
) -> np.ndarray:
    """Quantum dimensions as the common Perron-Frobenius eigenvector.

    The dimension vector is the unique positive common eigenvector of all
    fusion matrices, normalised so that ``d[unit] = 1``; then ``d[a]`` equals
    the largest eigenvalue of ``N_a``.  Computed by power iteration with
    Rayleigh-quotient convergence control on ``M = sum_a N_a`` (irreducible
    and aperiodic, since ``M[u, u] >= 1`` and the unit row is all ones).
    """
    m = f.tensor.sum(axis=0).astype(float)
    v = np.ones(f.rank) / np.sqrt(f.rank)
    lam = 0.0
    for _ in range(max_iterations):
        w = m @ v
        lam = float(v @ w)
        if np.abs(w - lam * v).max() < tol * max(1.0, lam):
            v = w / np.linalg.norm(w)
            break
        v = w / np.linalg.norm(w)
    else:
        raise ConvergenceError(
            f"power iteration did not converge within {max_iterations} iterations"
        )
    d = v / v[f.unit]
    resid = np.abs(np.outer(d, d) - np.einsum("abc,c->ab", f.tensor, d)).max()
    if resid > 1e-8 * max(1.0, float(d.max()) ** 2):
        raise InconsistentDataError(
            f"dimension vector violates multiplicativity (residual {resid:.3g})"
        )
    return d


def global_dim(f: FusionData, dims: np.ndarray) -> float:
    """Global dimension (global index): the sum of squared quantum dimensions."""
    dims = np.asarray(dims, dtype=float)
    if dims.shape != (f.rank,):
        raise FusionError("dimension vector does not match the label set")
    return float(np.sum(dims**2))


# -- constructions -----------------------------------------------------------


def deligne_product(a: FusionData, b: FusionData) -> FusionData:
    """Product ring on label pairs, with componentwise unit, dual, and N."""
    names = tuple(f"({x},{y})" for x in a.names for y in b.names)
    nb = b.rank
    tensor = np.einsum("abc,uvw->aubvcw", a.tensor, b.tensor).reshape(
        a.rank * nb, a.rank * nb, a.rank * nb
    )
    dual = tuple(a.dual[i] * nb + b.dual[j] for i in range(a.rank) for j in range(b.rank))
    return FusionData(names=names, unit=a.unit * nb + b.unit, dual=dual, tensor=tensor)


@dataclass(frozen=True, eq=False)
class SubcategorySelection:
    """A fusion-closed label subset of a parent ring."""

    parent: FusionData
    members: tuple[int, ...]

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    def restricted(self) -> FusionData:
        """The induced fusion ring on the selected labels, re-indexed."""
        idx = list(self.members)
        pos = {x: i for i, x in enumerate(idx)}
        return FusionData(
            names=tuple(self.parent.names[i] for i in idx),
            unit=pos[self.parent.unit],
            dual=tuple(pos[self.parent.dual[i]] for i in idx),
            tensor=self.parent.tensor[np.ix_(idx, idx, idx)],
        )


def full_subcategory(f: FusionData, members: Iterable) -> SubcategorySelection:
    """Select a label subset after verifying it is a full fusion subcategory.

    The subset must contain the unit, be closed under duals, and be closed
    under fusion; a closure violation raises :class:`ClosureError` carrying
    the offending triple ``(a, b, c)``.
    """
    idx = sorted({f.index(x) for x in members})
    mset = set(idx)
    if f.unit not in mset:
        raise ClosureError("subset does not contain the unit", (f.names[f.unit],))
    for a in idx:
        if f.dual[a] not in mset:
            raise ClosureError(
                f"subset not closed under duals at {f.names[a]}",
                (f.names[a], f.names[f.dual[a]]),
            )
    for a in idx:
        for b in idx:
            for c in np.nonzero(f.tensor[a, b])[0]:
                if int(c) not in mset:
                    raise ClosureError(
                        "subset not closed under fusion at "
                        f"({f.names[a]}, {f.names[b]}, {f.names[c]})",
                        (f.names[a], f.names[b], f.names[int(c)]),
                    )
    return SubcategorySelection(parent=f, members=tuple(idx))
