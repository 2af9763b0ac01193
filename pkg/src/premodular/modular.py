"""Premodular and modular data: twists, the unnormalised S matrix, and their checks.

The S matrix is produced from ``(N, d, theta)`` by the balancing identity

    S'(a, b) = sum_c N[dual a, b, c] * theta_c / (theta_a * theta_b) * d_c,

whose unit row is the dimension vector.  Data is *modular* when S' is
invertible; the normalised ``S = S'/sqrt(dim)`` and ``T = zeta * Diag(theta)``
then satisfy ``S^2 = (S T)^3 = C`` and ``T C = C T`` with ``C`` the charge
conjugation permutation, where ``zeta`` is a cube root of the normalised
Gauss sum phase.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .fusion import (
    DEFAULT_TOL,
    CheckResult,
    FusionData,
    InconsistentDataError,
    SubcategorySelection,
    ValidationReport,
    full_subcategory,
    global_dim,
    perron_frobenius_dims,
)

__all__ = [
    "PremodularityError",
    "Twist",
    "PremodularData",
    "GaussSums",
    "CenterReport",
    "ModularityReport",
    "MinimalityReport",
    "sprime_from_balancing",
    "premodular_from_twists",
    "verify_premodular",
    "is_modular",
    "verlinde_multiplicities",
    "muger_center",
    "centralizer",
    "check_minimal_extension",
]


class PremodularityError(ValueError):
    """Twist/S data does not define premodular data."""


@dataclass(frozen=True)
class Twist:
    """A unit-modulus twist, kept exact as a fraction of a full turn when possible.

    ``turns = p/q`` denotes ``exp(2*pi*i*p/q)``; ``approx`` always holds the
    complex value.  Products and integer powers stay exact on the rational
    representation, which keeps framing weights ``theta**m`` free of phase
    drift.
    """

    turns: Fraction | None
    approx: complex

    @classmethod
    def from_turns(cls, p, q=None) -> "Twist":
        t = Fraction(p, q) if q is not None else Fraction(p)
        t %= 1
        return cls(turns=t, approx=cmath.exp(2j * cmath.pi * t))

    @classmethod
    def from_complex(cls, z, *, tol: float = DEFAULT_TOL) -> "Twist":
        z = complex(z)
        if abs(abs(z) - 1.0) > tol:
            raise PremodularityError(f"twist {z} is not unit modulus")
        return cls(turns=None, approx=z / abs(z))

    @classmethod
    def one(cls) -> "Twist":
        return cls.from_turns(0)

    @property
    def value(self) -> complex:
        return self.approx

    def conjugate(self) -> "Twist":
        if self.turns is not None:
            return Twist.from_turns(-self.turns)
        return Twist(turns=None, approx=self.approx.conjugate())

    def power(self, m: int) -> complex:
        if self.turns is not None:
            return cmath.exp(2j * cmath.pi * ((self.turns * m) % 1))
        return self.approx**m

    def __mul__(self, other: "Twist") -> "Twist":
        if self.turns is not None and other.turns is not None:
            return Twist.from_turns(self.turns + other.turns)
        return Twist(turns=None, approx=self.approx * other.approx)

    def __complex__(self) -> complex:
        return self.approx

    def isclose(self, other, *, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.approx - complex(other)) <= tol

    def __str__(self) -> str:
        if self.turns is not None:
            return f"e^(2πi·{self.turns})"
        return f"{self.approx:.6g}"


def _as_twists(theta, fusion: FusionData) -> tuple[Twist, ...]:
    out = []
    for i in range(fusion.rank):
        t = theta[fusion.names[i]] if isinstance(theta, dict) else theta[i]
        if not isinstance(t, Twist):
            t = Twist.from_complex(complex(t))
        out.append(t)
    return tuple(out)


@dataclass(frozen=True)
class GaussSums:
    """The two Gauss sums and the positive square root of the global dimension."""

    delta_plus: complex  # sum d^2 / theta
    delta_minus: complex  # sum d^2 * theta
    total: float  # D = sqrt(dim)
    dim: float


@dataclass(frozen=True, eq=False)
class PremodularData:
    """Fusion data together with dimensions, twists, and the S' matrix."""

    fusion: FusionData
    dims: np.ndarray
    theta: tuple[Twist, ...]
    sprime: np.ndarray

    def __post_init__(self):
        n = self.fusion.rank
        dims = np.ascontiguousarray(np.asarray(self.dims, dtype=float))
        sp = np.ascontiguousarray(np.asarray(self.sprime, dtype=complex))
        if dims.shape != (n,) or sp.shape != (n, n) or len(self.theta) != n:
            raise PremodularityError("field shapes do not match the label set")
        dims.setflags(write=False)
        sp.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "sprime", sp)
        object.__setattr__(self, "theta", tuple(self.theta))

    # -- shorthands ----------------------------------------------------------

    @property
    def rank(self) -> int:
        return self.fusion.rank

    @property
    def names(self) -> tuple[str, ...]:
        return self.fusion.names

    @property
    def unit(self) -> int:
        return self.fusion.unit

    @cached_property
    def theta_values(self) -> np.ndarray:
        v = np.array([t.value for t in self.theta], dtype=complex)
        v.setflags(write=False)
        return v

    @cached_property
    def total_dim(self) -> float:
        return global_dim(self.fusion, self.dims)

    def gauss_sums(self) -> GaussSums:
        d2 = self.dims**2
        th = self.theta_values
        dim = self.total_dim
        return GaussSums(
            delta_plus=complex(np.sum(d2 / th)),
            delta_minus=complex(np.sum(d2 * th)),
            total=float(np.sqrt(dim)),
            dim=dim,
        )

    @cached_property
    def _min_singular_ratio(self) -> float:
        sv = np.linalg.svd(self.sprime, compute_uv=False)
        return float(sv[-1] / sv[0])

    def sprime_invertible(self, *, tol: float = DEFAULT_TOL) -> bool:
        return self._min_singular_ratio > tol

    # -- derived data ---------------------------------------------------------

    def conjugate(self) -> "PremodularData":
        """Complex-conjugate data: inverted twists, conjugated S'."""
        return PremodularData(
            fusion=self.fusion,
            dims=self.dims,
            theta=tuple(t.conjugate() for t in self.theta),
            sprime=self.sprime.conj(),
        )

    def restrict(self, members: Iterable | SubcategorySelection) -> "PremodularData":
        """Restriction to a full fusion subcategory (validates closure)."""
        if not isinstance(members, SubcategorySelection):
            members = full_subcategory(self.fusion, members)
        idx = list(members.members)
        return PremodularData(
            fusion=members.restricted(),
            dims=self.dims[idx],
            theta=tuple(self.theta[i] for i in idx),
            sprime=self.sprime[np.ix_(idx, idx)],
        )

    def relabelled(self, perm: Sequence[int]) -> "PremodularData":
        """Apply a label permutation: new label ``i`` is old label ``perm[i]``."""
        perm = list(perm)
        pos = {p: i for i, p in enumerate(perm)}
        fus = FusionData(
            names=tuple(self.fusion.names[p] for p in perm),
            unit=pos[self.fusion.unit],
            dual=tuple(pos[self.fusion.dual[p]] for p in perm),
            tensor=self.fusion.tensor[np.ix_(perm, perm, perm)],
        )
        return PremodularData(
            fusion=fus,
            dims=self.dims[perm],
            theta=tuple(self.theta[p] for p in perm),
            sprime=self.sprime[np.ix_(perm, perm)],
        )


# -- S' construction ----------------------------------------------------------


def sprime_from_balancing(
    f: FusionData,
    dims: np.ndarray,
    theta,
    *,
    tol: float = DEFAULT_TOL,
    validate: bool = True,
) -> np.ndarray:
    """S' matrix from ribbon data via the balancing identity.

    When ``validate`` is set, row multiplicativity is checked and a violation
    beyond tolerance rejects the twists as not realisable premodular data.
    """
    theta = _as_twists(theta, f)
    if abs(theta[f.unit].value - 1.0) > tol:
        raise PremodularityError("unit twist must be 1")
    th = np.array([t.value for t in theta])
    d = np.asarray(dims, dtype=float)
    dual = list(f.dual)
    sp = np.einsum("abc,c->ab", f.tensor[dual].astype(float), th * d) / np.outer(th, th)
    if validate:
        lhs = sp[:, :, None] * sp[:, None, :] / d[:, None, None]
        rhs = np.einsum("bce,ae->abc", f.tensor.astype(float), sp)
        resid = float(np.abs(lhs - rhs).max())
        if resid > tol * max(1.0, float(np.abs(sp).max()) ** 2):
            raise PremodularityError(
                f"row multiplicativity fails (residual {resid:.3g}): "
                "twists are not realisable on this fusion ring"
            )
    return sp


def premodular_from_twists(
    f: FusionData,
    theta,
    *,
    dims: np.ndarray | None = None,
    sprime: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
) -> PremodularData:
    """Assemble premodular data, computing what was omitted.

    Omitted dimensions come from the Perron-Frobenius eigenvector; an omitted
    S' is computed by balancing.  An explicitly supplied S' is cross-validated
    against the balancing identity.
    """
    theta = _as_twists(theta, f)
    d = perron_frobenius_dims(f) if dims is None else np.asarray(dims, dtype=float)
    sp = sprime_from_balancing(f, d, theta, tol=tol)
    if sprime is not None:
        given = np.asarray(sprime, dtype=complex)
        dev = float(np.abs(given - sp).max())
        if dev > tol * max(1.0, float(np.abs(sp).max())):
            raise PremodularityError(
                f"supplied S' deviates from the balancing identity by {dev:.3g}"
            )
        sp = given
    return PremodularData(fusion=f, dims=d, theta=theta, sprime=sp)


# -- verification --------------------------------------------------------------


def verify_premodular(p: PremodularData, *, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check every premodular-data invariant; all-pass accepts the data.

    Residuals are absolute, measured entrywise; witnesses point at the worst
    entry.  The Gauss-sum identities apply only to modular data and are
    reported as skipped when S' is singular.
    """
    n = p.rank
    d, th, sp = p.dims, p.theta_values, p.sprime
    nm = p.names
    dual = list(p.fusion.dual)
    t = p.fusion.tensor.astype(float)
    scale = max(1.0, float(np.abs(sp).max()))
    checks: list[CheckResult] = []

    def entry(name: str, dev: np.ndarray, witness_axes: int):
        resid = float(np.abs(dev).max()) if dev.size else 0.0
        wit = None
        if resid > tol * scale:
            ix = np.unravel_index(int(np.abs(dev).argmax()), dev.shape)
            wit = tuple(nm[i] for i in ix[:witness_axes])
        checks.append(CheckResult(name, resid <= tol * scale, witness=wit, residual=resid))

    entry("dims:unit", np.array([d[p.unit] - 1.0]), 0)
    entry("dims:dual", d[dual] - d, 1)
    entry("dims:positive", np.minimum(d - 1.0, 0.0), 1)
    entry("dims:multiplicative", np.outer(d, d) - np.einsum("abc,c->ab", t, d), 2)

    entry("twist:unit_modulus", np.abs(th) - 1.0, 1)
    entry("twist:unit", np.array([th[p.unit] - 1.0]), 0)
    entry("twist:dual", th[dual] - th, 1)

    entry("sprime:symmetric", sp - sp.T, 2)
    entry("sprime:unit_row", sp[p.unit] - d, 1)
    entry("sprime:conjugate_row", sp[dual, :] - sp.conj(), 2)

    lhs = sp[:, :, None] * sp[:, None, :] / d[:, None, None]
    rhs = np.einsum("bce,ae->abc", t, sp)
    entry("sprime:row_multiplicative", lhs - rhs, 3)

    balanced = np.einsum("abc,c->ab", t[dual], th * d) / np.outer(th, th)
    entry("sprime:balancing", sp - balanced, 2)

    g = p.gauss_sums()
    if p.sprime_invertible(tol=tol):
        entry("gauss:product", np.array([g.delta_plus * g.delta_minus - g.dim]), 0)
        entry("gauss:modulus", np.array([abs(g.delta_plus) - g.total]), 0)
    else:
        checks.append(CheckResult("gauss:product", True, witness="skipped: S' singular"))
        checks.append(CheckResult("gauss:modulus", True, witness="skipped: S' singular"))

    return ValidationReport(tuple(checks))


@dataclass(frozen=True, eq=False)
class ModularityReport:
    """Invertibility decision for S' plus the normalised S, T relations."""

    modular: bool
    s: np.ndarray | None
    t: np.ndarray | None
    c: np.ndarray
    residual: float
    root_index: int
    singular_ratio: float
    kernel: np.ndarray | None = None


def is_modular(p: PremodularData, *, tol: float = DEFAULT_TOL) -> ModularityReport:
    """Decide modularity and verify the S, T matrix relations.

    Non-modular input is a valid outcome: the report then carries a kernel
    witness (a null vector of S').  The cube root in T's normalisation is
    taken as the principal root; all three roots are tried and the one with
    the smallest relation residual is reported.
    """
    n = p.rank
    c = np.zeros((n, n))
    for a in range(n):
        c[a, p.fusion.dual[a]] = 1.0

    u_, sv, vh = np.linalg.svd(p.sprime)
    ratio = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    if ratio <= tol:
        kernel = vh[-1].conj()
        return ModularityReport(
            modular=False, s=None, t=None, c=c, residual=float("inf"),
            root_index=-1, singular_ratio=ratio, kernel=kernel,
        )

    g = p.gauss_sums()
    s = p.sprime / g.total
    phase = g.delta_plus / abs(g.delta_plus)
    eye = np.eye(n)
    best = None
    for j in range(3):
        zeta = phase ** (1.0 / 3.0) * cmath.exp(2j * cmath.pi * j / 3)
        t = zeta * np.diag(p.theta_values)
        st = s @ t
        resid = max(
            float(np.abs(s @ s - c).max()),
            float(np.abs(st @ st @ st - c).max()),
            float(np.abs(t @ c - c @ t).max()),
            float(np.abs(s @ s.conj().T - eye).max()),
            float(np.abs(t @ t.conj().T - eye).max()),
        )
        if best is None or resid < best[0]:
            best = (resid, j, t)
    resid, j, t = best
    return ModularityReport(
        modular=resid <= tol * max(1.0, g.total),
        s=s, t=t, c=c, residual=resid, root_index=j, singular_ratio=ratio,
    )


def verlinde_multiplicities(s: np.ndarray, unit: int) -> np.ndarray:
    """Fusion multiplicities reconstructed from a unitary S matrix."""
    return np.einsum("ax,bx,cx,x->abc", s, s, s.conj(), 1.0 / s[unit])


# -- Muger center, centralizers, minimality -----------------------------------


@dataclass(frozen=True, eq=False)
class CenterReport:
    """Degenerate (transparent) labels together with evenness and pointedness."""

    degenerate: tuple[int, ...]
    is_even: bool
    is_pointed: bool
    group_table: np.ndarray | None  # indices into `degenerate`, when pointed

    @property
    def trivial(self) -> bool:
        return len(self.degenerate) == 1


def _degenerate_labels(p: PremodularData, tol: float) -> tuple[int, ...]:
    dev = np.abs(p.sprime - np.outer(p.dims, p.dims)).max(axis=1)
    cut = tol * max(1.0, p.total_dim)
    return tuple(int(a) for a in np.nonzero(dev <= cut)[0])


def muger_center(p: PremodularData, *, tol: float = DEFAULT_TOL) -> CenterReport:
    """Labels transparent against the whole category, via ``S'(a, b) = d_a d_b``."""
    deg = _degenerate_labels(p, tol)
    th = p.theta_values
    is_even = all(abs(th[a] - 1.0) <= tol for a in deg)
    is_pointed = all(abs(p.dims[a] - 1.0) <= tol for a in deg)
    table = None
    if is_pointed:
        pos = {a: i for i, a in enumerate(deg)}
        table = np.zeros((len(deg), len(deg)), dtype=int)
        for a in deg:
            for b in deg:
                prods = p.fusion.product_labels(a, b)
                if (
                    len(prods) != 1
                    or prods[0] not in pos
                    or p.fusion.multiplicity(a, b, prods[0]) != 1
                ):
                    raise InconsistentDataError(
                        "pointed degenerate labels do not fuse like a group at "
                        f"({p.names[a]}, {p.names[b]})"
                    )
                table[pos[a], pos[b]] = pos[prods[0]]
    return CenterReport(
        degenerate=deg, is_even=is_even, is_pointed=is_pointed, group_table=table
    )


def centralizer(
    p: PremodularData,
    sub: SubcategorySelection | Iterable,
    *,
    tol: float = DEFAULT_TOL,
) -> tuple[int, ...]:
    """Labels transparent against every member of a subcategory.

    On modular input the dimension law ``dim(centralizer) = dim/dim(sub)`` is
    asserted; failure means the numerical data is inconsistent.
    """
    if not isinstance(sub, SubcategorySelection):
        sub = full_subcategory(p.fusion, sub)
    cols = list(sub.members)
    dev = np.abs(
        p.sprime[:, cols] - np.outer(p.dims, p.dims[cols])
    ).max(axis=1)
    cut = tol * max(1.0, p.total_dim)
    result = tuple(int(a) for a in np.nonzero(dev <= cut)[0])
    if p.sprime_invertible(tol=tol):
        dim_res = float(np.sum(p.dims[list(result)] ** 2))
        dim_sub = float(np.sum(p.dims[cols] ** 2))
        expected = p.total_dim / dim_sub
        if abs(dim_res - expected) > 1e3 * tol * max(1.0, p.total_dim):
            raise InconsistentDataError(
                f"centralizer dimension {dim_res:.12g} deviates from "
                f"dim/dim(sub) = {expected:.12g}"
            )
    return result


@dataclass(frozen=True, eq=False)
class MinimalityReport:
    """Comparison of a subcategory's transparent part with its centralizer."""

    centralizer_labels: tuple[int, ...]
    degenerate_labels: tuple[int, ...]  # parent indices of the sub's transparent part
    minimal: bool
    dim_identity_ok: bool
    dim_total: float
    dim_sub: float
    dim_center: float
    center_even: bool
    center_pointed: bool

    @property
    def passed(self) -> bool:
        return self.minimal and self.dim_identity_ok


def check_minimal_extension(
    hat: PremodularData,
    delta: SubcategorySelection | Iterable,
    *,
    tol: float = DEFAULT_TOL,
) -> MinimalityReport:
    """Check minimality of a non-degenerate extension.

    The extension is minimal when the centralizer of the subcategory equals
    its own transparent part; minimality forces the dimension identity
    ``dim(hat) = dim(sub) * dim(transparent part)``.  Evenness and
    pointedness of the transparent part are reported alongside since the
    condensation pipeline requires them.
    """
    if not isinstance(delta, SubcategorySelection):
        delta = full_subcategory(hat.fusion, delta)
    members = list(delta.members)
    restricted = hat.restrict(delta)
    sub_center = muger_center(restricted, tol=tol)
    deg_parent = tuple(members[i] for i in sub_center.degenerate)
    cent = centralizer(hat, delta, tol=tol)
    dim_total = hat.total_dim
    dim_sub = float(np.sum(hat.dims[members] ** 2))
    dim_center = float(np.sum(hat.dims[list(deg_parent)] ** 2))
    minimal = set(cent) == set(deg_parent)
    dim_ok = abs(dim_total - dim_sub * dim_center) <= 1e3 * tol * max(1.0, dim_total)
    return MinimalityReport(
        centralizer_labels=cent,
        degenerate_labels=deg_parent,
        minimal=minimal,
        dim_identity_ok=dim_ok,
        dim_total=dim_total,
        dim_sub=dim_sub,
        dim_center=dim_center,
        center_even=sub_center.is_even,
        center_pointed=sub_center.is_pointed,
    )
