"""The character group mod q: construction, evaluation, and batch sums.

A character is indexed by one exponent per cyclic component of the unit
group.  With residues permuted into discrete-log coordinates, evaluating
every character sum at once is a mixed-radix DFT along the components;
below group size 64 a naive double loop is used instead.

Component layout: for q = 2^e * prod p_i^{e_i} the components are the
2-part first (split as {+-1} x <5> when 8 | q), then odd prime powers in
ascending order.  The all-zeros index is always the principal character.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .arith import Modulus, primitive_root
from .errors import DomainError


@dataclass(frozen=True, eq=False)
class CyclicComponent:
    """One cyclic factor of the unit group, with its discrete-log table."""

    modulus: int
    generator: int
    order: int
    dlog: np.ndarray
    roots: np.ndarray


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    modulus: Modulus
    components: tuple
    char_count: int
    units: np.ndarray
    unit_positions: np.ndarray
    unit_dlogs: tuple

    @property
    def q(self) -> int:
        return self.modulus.q

    @property
    def shape(self) -> tuple:
        return tuple(c.order for c in self.components)

    def character(self, index):
        return DirichletCharacter(group=self, index=tuple(int(i) for i in index))

    def character_from_flat(self, flat):
        return self.character(np.unravel_index(int(flat), self.shape))

    def flat_index(self, index):
        return int(np.ravel_multi_index(tuple(index), self.shape))

    def principal(self):
        return self.character((0,) * len(self.components))


@dataclass(frozen=True)
class DirichletCharacter:
    group: CharacterGroup = field(repr=False, compare=False)
    index: tuple

    def __post_init__(self):
        for j, comp in zip(self.index, self.group.components, strict=True):
            if not 0 <= j < comp.order:
                raise DomainError(f"index {self.index} outside component orders")

    @property
    def is_principal(self) -> bool:
        return all(j == 0 for j in self.index)

    def conjugate(self):
        return self.group.character(
            tuple((-j) % c.order for j, c in zip(self.index, self.group.components))
        )

    def order(self) -> int:
        out = 1
        for j, c in zip(self.index, self.group.components):
            out = math.lcm(out, c.order // math.gcd(j, c.order))
        return out


def _two_part_components(e):
    """Components of the unit group mod 2^e (possibly none)."""
    if e <= 1:
        return []
    mod = 1 << e
    if e == 2:
        return [
            CyclicComponent(
                modulus=4,
                generator=3,
                order=2,
                dlog=_kernels.dlog_table(4, 3, 2),
                roots=_roots(2),
            )
        ]
    # 8 | q: {+-1} x <5>, so two tables over the odd residues.
    half_order = mod >> 2
    dlog5 = _kernels.dlog_table(mod, 5, half_order)
    sign = np.full(mod, -1, dtype=np.int64)
    five = np.full(mod, -1, dtype=np.int64)
    odd = np.arange(1, mod, 2)
    plus = odd[odd % 4 == 1]
    minus = odd[odd % 4 == 3]
    sign[plus] = 0
    five[plus] = dlog5[plus]
    sign[minus] = 1
    five[minus] = dlog5[(mod - minus) % mod]
    return [
        CyclicComponent(modulus=mod, generator=mod - 1, order=2, dlog=sign, roots=_roots(2)),
        CyclicComponent(modulus=mod, generator=5, order=half_order, dlog=five, roots=_roots(half_order)),
    ]


def _roots(order):
    return np.exp(2j * np.pi * np.arange(order) / order)


def build_group(q, table=None):
    """Construct the character group mod q with discrete-log tables."""
    if q < 3:
        raise DomainError(f"character group needs q >= 3, got {q}")
    modulus = Modulus.from_int(q, table=table)

    components = []
    for p, e in modulus.factorization.pairs:
        if p == 2:
            components.extend(_two_part_components(e))
        else:
            pk = p**e
            order = pk // p * (p - 1)
            g = primitive_root(pk)
            components.append(
                CyclicComponent(
                    modulus=pk,
                    generator=g,
                    order=order,
                    dlog=_kernels.dlog_table(pk, g, order),
                    roots=_roots(order),
                )
            )
    components = tuple(components)

    char_count = 1
    for c in components:
        char_count *= c.order
    assert char_count == modulus.phi, "component orders do not multiply to phi(q)"

    residues = np.arange(q, dtype=np.int64)
    units = residues[np.gcd(residues, q) == 1]

    unit_dlogs = tuple(c.dlog[units % c.modulus] for c in components)
    assert all(int(d.min()) >= 0 for d in unit_dlogs), "unit missing from a dlog table"

    strides = np.ones(len(components), dtype=np.int64)
    for i in range(len(components) - 2, -1, -1):
        strides[i] = strides[i + 1] * components[i + 1].order
    positions = np.zeros(len(units), dtype=np.int64)
    for d, s in zip(unit_dlogs, strides):
        positions += d * s

    return CharacterGroup(
        modulus=modulus,
        components=components,
        char_count=char_count,
        units=units,
        unit_positions=positions,
        unit_dlogs=unit_dlogs,
    )


def evaluate(chi, n):
    """Value chi(n): zero off the units, a root of unity on them."""
    if n < 0:
        raise DomainError(f"need n >= 0, got {n}")
    group = chi.group
    if math.gcd(n, group.q) != 1:
        return 0j
    value = 1 + 0j
    for j, comp in zip(chi.index, group.components):
        k = int(comp.dlog[n % comp.modulus])
        value *= comp.roots[(j * k) % comp.order]
    return value


def _values_on_units(chi):
    """chi evaluated on the sorted unit residues, vectorized."""
    group = chi.group
    vals = np.ones(len(group.units), dtype=np.complex128)
    for j, comp, dlogs in zip(chi.index, group.components, group.unit_dlogs):
        if j:
            vals *= comp.roots[(j * dlogs) % comp.order]
    return vals


def char_values_per_character(group, n):
    """chi(n) for every chi, indexed flat; zeros if gcd(n, q) > 1."""
    if math.gcd(n, group.q) != 1:
        return np.zeros(group.char_count, dtype=np.complex128)
    value = np.ones(1, dtype=np.complex128)
    for comp in group.components:
        k = int(comp.dlog[n % comp.modulus])
        axis = comp.roots[(np.arange(comp.order) * k) % comp.order]
        value = np.multiply.outer(value, axis)
    return value.reshape(-1)


def unit_count_below(group, x):
    """#{1 <= n <= x : gcd(n, q) = 1} for x of any size."""
    if x < 1:
        return 0
    full, rest = divmod(int(x), group.q)
    return full * group.modulus.phi + int(
        np.searchsorted(group.units, rest, side="right")
    )


def char_sum(chi, x):
    """Exact partial sum of chi over 1..x by direct summation.

    For non-principal chi and x >= q the sum over each full period
    vanishes, so only x mod q terms are added.
    """
    if x < 0:
        raise DomainError(f"need x >= 0, got {x}")
    group = chi.group
    x = int(x)
    if chi.is_principal:
        return complex(unit_count_below(group, x))
    rest = x % group.q if x >= group.q else x
    if rest == 0:
        return 0j
    vals = _values_on_units(chi)
    upto = int(np.searchsorted(group.units, rest, side="right"))
    return complex(vals[:upto].sum())


def sums_from_unit_weights(group, weights):
    """sum_a w_a chi(a) over the units, for every chi at once.

    The weights are scattered into discrete-log coordinates and transformed
    with a mixed-radix DFT along each component; groups smaller than 64
    characters take the naive double loop.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != group.units.shape:
        raise DomainError("one weight per unit residue required")
    if group.char_count < 64:
        sums = np.empty(group.char_count, dtype=np.complex128)
        for flat in range(group.char_count):
            chi = group.character_from_flat(flat)
            sums[flat] = (weights * _values_on_units(chi)).sum()
        return sums
    tensor = np.zeros(group.char_count, dtype=np.complex128)
    tensor[group.unit_positions] = weights
    sums = np.fft.ifftn(tensor.reshape(group.shape)) * group.char_count
    return sums.reshape(-1)


@dataclass(frozen=True, eq=False)
class CharacterSumProfile:
    """All character sums S_chi(x) mod q, indexed by flat character index."""

    q: int
    x: int
    sums: np.ndarray
    argmax_nonprincipal: int
    group: CharacterGroup = field(repr=False)

    def witness(self):
        return self.group.character_from_flat(self.argmax_nonprincipal)

    def rows(self):
        for flat, s in enumerate(self.sums):
            yield {
                "char_index": flat,
                "re": float(s.real),
                "im": float(s.imag),
                "abs": float(abs(s)),
            }

    def to_csv(self, stream):
        writer = csv.DictWriter(stream, fieldnames=["char_index", "re", "im", "abs"])
        writer.writeheader()
        for row in self.rows():
            writer.writerow(row)

    def to_json(self, stream=None):
        obj = {
            "q": self.q,
            "x": self.x,
            "argmax_nonprincipal": self.argmax_nonprincipal,
            "sums": list(self.rows()),
        }
        if stream is None:
            return json.dumps(obj, sort_keys=True)
        json.dump(obj, stream, sort_keys=True)
        return None


def all_char_sums(q, x, table=None, group=None):
    """Batch evaluation of S_chi(x) for every character mod q."""
    if x < 1:
        raise DomainError(f"need x >= 1, got {x}")
    if group is None:
        group = build_group(q, table=table)
    x = int(x)
    full, rest = divmod(x, group.q)
    weights = np.full(len(group.units), float(full))
    weights[group.units <= rest] += 1.0
    sums = sums_from_unit_weights(group, weights)

    magnitudes = np.abs(sums)
    if len(magnitudes) > 1:
        magnitudes[0] = -1.0
        argmax = int(np.argmax(magnitudes))
    else:
        argmax = 0
    return CharacterSumProfile(q=group.q, x=x, sums=sums, argmax_nonprincipal=argmax, group=group)


def delta_max(x, q, table=None, group=None, profile=None):
    """Max of |S_chi(x)| over non-principal chi, with a witness character.

    Ties resolve to the smallest character index in lexicographic order,
    which is the smallest flat index.
    """
    if q < 3:
        raise DomainError(f"no non-principal character mod {q}")
    if profile is None:
        profile = all_char_sums(q, x, table=table, group=group)
    witness = profile.witness()
    return float(abs(profile.sums[profile.argmax_nonprincipal])), witness


def cancellation_envelope(q):
    """sqrt(q) log q, the classical cancellation envelope (constant 1)."""
    return math.sqrt(q) * math.log(q)
