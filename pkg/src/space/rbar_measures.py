# --------------------------------------------------
# src/space/rbar_measures.py
# --------------------------------------------------
# A reta compactificada R̄^h e medidas atômicas (aleatórias) sobre ela
#
# - Eta: η_r (s ↦ |s−r| − |r|), η_{+∞} (s ↦ −s) ou η_{−∞} (s ↦ s)
# - AtomicMeasure: combinação finita de Diracs com pesos >= 0
# - RandomMeasureField: ω ↦ ξ_ω constante por célula de [0,1]
#
# Só medidas atômicas finitas são representáveis; medidas com sinal não existem aqui
# --------------------------------------------------

import logging
import math
from dataclasses import dataclass
from enum import Enum
from itertools import pairwise
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.config import settings
from src.errors import ContractError, EvaluationError, NotOnRError, StepFunctionError
from src.space.interval_space import (
    Partition,
    StepFunction,
    cell_index,
    check_exponent,
    union_breakpoints,
)

log = logging.getLogger("horolab.rbar_measures")


class EtaKind(str, Enum):
    FINITE = "finite"
    PLUS_INFINITY = "+inf"
    MINUS_INFINITY = "-inf"


@dataclass(frozen=True)
class Eta:
    """Ponto de R̄^h."""

    kind: EtaKind
    r: Optional[float] = None

    def __post_init__(self):
        if self.kind is EtaKind.FINITE:
            if self.r is None or not math.isfinite(self.r):
                raise StepFunctionError(f"finite eta needs a finite r, got {self.r!r}")
            object.__setattr__(self, "r", float(self.r))
        elif self.r is not None:
            raise StepFunctionError("points at infinity carry no r")

    @classmethod
    def finite(cls, r: float) -> "Eta":
        return cls(EtaKind.FINITE, float(r))

    @property
    def is_finite(self) -> bool:
        return self.kind is EtaKind.FINITE

    def __call__(self, s):
        return eta_eval(self, s)

    def to_dict(self) -> dict:
        if self.is_finite:
            return {"tag": "finite", "r": self.r}
        return {"tag": self.kind.value}

    @classmethod
    def from_dict(cls, data: dict) -> "Eta":
        tag = EtaKind(data["tag"])
        return cls.finite(data["r"]) if tag is EtaKind.FINITE else cls(tag)

    def __repr__(self) -> str:
        return f"η_{self.r:g}" if self.is_finite else f"η_{self.kind.value}"


PLUS_INFINITY = Eta(EtaKind.PLUS_INFINITY)
MINUS_INFINITY = Eta(EtaKind.MINUS_INFINITY)


def eta_eval(e: Eta, s):
    """η(s): |s−r| − |r| para η_r, −s para η_{+∞}, s para η_{−∞}. Aceita arrays."""
    if e.kind is EtaKind.FINITE:
        return np.abs(s - e.r) - abs(e.r)
    if e.kind is EtaKind.PLUS_INFINITY:
        return -s
    return s * 1.0


# --------------------------------------------------
# Medidas atômicas
# --------------------------------------------------
class AtomicMeasure:
    """
    Medida atômica finita Σ w_k δ_{η_k}, w_k >= 0
    Átomos repetidos são fundidos (η_r, η_r' com |r − r'| <= ATOM_MERGE_TOL)
    A ordem dos átomos é a da primeira aparição
    """

    __slots__ = ("_atoms", "_weights")

    def __init__(self, atoms: Sequence[Tuple[Eta, float]]):
        order: List[Eta] = []
        weight: Dict[Eta, float] = {}
        for eta, w in atoms:
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise ContractError(f"atom weights must be finite and >= 0, got {w!r}", invariant="weights >= 0")
            if w == 0.0:
                continue
            if eta in weight:
                weight[eta] += w
            else:
                order.append(eta)
                weight[eta] = w
        alias: Dict[Eta, Eta] = {}
        finite = sorted((e for e in order if e.is_finite), key=lambda e: e.r)
        for prev, cur in pairwise(finite):
            if cur.r - prev.r <= settings.ATOM_MERGE_TOL:
                alias[cur] = alias.get(prev, prev)
        merged: Dict[Eta, float] = {}
        for e in order:
            root = alias.get(e, e)
            merged[root] = merged.get(root, 0.0) + weight[e]
        self._atoms: Tuple[Eta, ...] = tuple(merged)
        self._weights: Tuple[float, ...] = tuple(merged.values())

    @classmethod
    def dirac(cls, eta: Eta) -> "AtomicMeasure":
        return cls([(eta, 1.0)])

    @classmethod
    def mixture(cls, *pairs: Tuple[float, Eta]) -> "AtomicMeasure":
        """mixture((½, η_0), (½, η_2)) → ½δ_{η_0} + ½δ_{η_2}."""
        return cls([(eta, w) for w, eta in pairs])

    @property
    def atoms(self) -> Tuple[Eta, ...]:
        return self._atoms

    @property
    def weights(self) -> Tuple[float, ...]:
        return self._weights

    def items(self) -> Iterator[Tuple[Eta, float]]:
        return zip(self._atoms, self._weights)

    @property
    def total_mass(self) -> float:
        return math.fsum(self._weights)

    @property
    def is_probability(self) -> bool:
        return abs(self.total_mass - 1.0) <= settings.PROBABILITY_TOL

    @property
    def mass_at_infinity(self) -> float:
        return math.fsum(w for e, w in self.items() if not e.is_finite)

    def moment(self, p: float, scale: float = 1.0) -> float:
        """∫ |r/scale|^p dμ(r); exige μ concentrada em R. Estouro vira inf."""
        p = check_exponent(p)
        if self.mass_at_infinity > 0:
            raise NotOnRError("moment undefined: measure charges a point at infinity")
        terms = []
        for e, w in self.items():
            try:
                terms.append(w * abs(e.r / scale) ** p)
            except OverflowError:
                return math.inf
        return _sum_or_inf(terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return dict(self.items()) == dict(other.items())

    __hash__ = None

    def to_dict(self) -> dict:
        return {"atoms": [e.to_dict() for e in self._atoms], "weights": list(self._weights)}

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicMeasure":
        return cls([(Eta.from_dict(a), w) for a, w in zip(data["atoms"], data["weights"])])

    def __repr__(self) -> str:
        return " + ".join(f"{w:g}·δ[{e!r}]" for e, w in self.items()) or "0"


def average(measures: Sequence[AtomicMeasure], weights: Sequence[float]) -> AtomicMeasure:
    """Σ_i weights_i · measures_i."""
    return AtomicMeasure([(e, wi * w) for m, wi in zip(measures, weights) for e, w in m.items()])


def integrate(mu: AtomicMeasure, phi: Callable[[Eta], float]) -> float:
    """∫ φ dμ = Σ w·φ(η)."""
    total = []
    for eta, w in mu.items():
        value = float(phi(eta))
        if not math.isfinite(value):
            raise EvaluationError(f"integrand is not finite at {eta!r}: {value!r}")
        total.append(w * value)
    return math.fsum(total)



def _sum_or_inf(terms: Sequence[float]) -> float:
    if not all(map(math.isfinite, terms)):
        return math.inf
    try:
        return math.fsum(terms)
    except OverflowError:
        return math.inf


# --------------------------------------------------
# Campos de medidas aleatórias
# --------------------------------------------------
class RandomMeasureField:
    """
    ω ↦ ξ_ω, constante em cada célula [b_i, b_{i+1}]
    Contrato de medida aleatória: cada ξ_ω é de probabilidade
    """

    __slots__ = ("_breakpoints", "_measures")

    def __init__(self, breakpoints: Sequence[float], measures: Sequence[AtomicMeasure]):
        grid = Partition(breakpoints)
        measures = tuple(measures)
        if len(measures) != grid.size:
            raise StepFunctionError(f"{grid.size} cells but {len(measures)} measures")
        for i, mu in enumerate(measures):
            if not mu.is_probability:
                raise ContractError(
                    f"cell {i} measure has total mass {mu.total_mass!r}",
                    invariant="random measure is probability on every cell",
                )
        self._breakpoints = grid.breakpoints
        self._measures = measures

    @property
    def breakpoints(self) -> np.ndarray:
        return self._breakpoints

    @property
    def measures(self) -> Tuple[AtomicMeasure, ...]:
        return self._measures

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self._breakpoints)

    def cells(self) -> Iterator[Tuple[float, float, AtomicMeasure]]:
        for a, b, mu in zip(self._breakpoints[:-1], self._breakpoints[1:], self._measures):
            yield float(a), float(b), mu

    @property
    def is_on_R(self) -> bool:
        return all(mu.mass_at_infinity == 0.0 for mu in self._measures)

    def moment(self, p: float, scale: float = 1.0) -> float:
        """E[∫ |r/scale|^p dξ]."""
        terms = [l * mu.moment(p, scale) for l, mu in zip(self.lengths, self._measures)]
        return _sum_or_inf(terms)

    def measure_at(self, omega: float) -> AtomicMeasure:
        idx = int(np.searchsorted(self._breakpoints, omega, side="right")) - 1
        return self._measures[min(max(idx, 0), len(self._measures) - 1)]

    def to_dict(self) -> dict:
        return {"breakpoints": self._breakpoints.tolist(), "cell_measures": [m.to_dict() for m in self._measures]}

    @classmethod
    def from_dict(cls, data: dict) -> "RandomMeasureField":
        return cls(data["breakpoints"], [AtomicMeasure.from_dict(m) for m in data["cell_measures"]])

    def __repr__(self) -> str:
        return f"RandomMeasureField(<{len(self._measures)} cells>)"


def mass_at_infinity(xi: RandomMeasureField) -> float:
    """E_ω[ξ_ω({η_{+∞}, η_{−∞}})]; zero sse o campo está em R."""
    return math.fsum(l * mu.mass_at_infinity for l, mu in zip(xi.lengths, xi.measures))


def constant_field(mu: AtomicMeasure) -> RandomMeasureField:
    return RandomMeasureField([0.0, 1.0], [mu])


def dirac_field(g: StepFunction) -> RandomMeasureField:
    """ω ↦ δ_{η_{g(ω)}}."""
    return RandomMeasureField(g.breakpoints, [AtomicMeasure.dirac(Eta.finite(v)) for v in g.values])


def splice(mask: StepFunction, inside: RandomMeasureField, outside: RandomMeasureField) -> RandomMeasureField:
    """Campo igual a `inside` onde mask != 0 e a `outside` no resto."""
    grid = union_breakpoints(np.concatenate((mask.breakpoints, inside.breakpoints, outside.breakpoints)))
    flags = cell_index(mask.breakpoints, grid)
    in_idx = cell_index(inside.breakpoints, grid)
    out_idx = cell_index(outside.breakpoints, grid)
    measures = [
        inside.measures[i] if mask.values[k] != 0.0 else outside.measures[o]
        for k, i, o in zip(flags, in_idx, out_idx)
    ]
    return RandomMeasureField(grid, measures)


def coarsen(xi: RandomMeasureField, gamma: Partition) -> RandomMeasureField:
    """ξ^(γ): em cada célula S de γ, a média de ξ sobre S ponderada por comprimento."""
    grid = union_breakpoints(np.concatenate((xi.breakpoints, gamma.breakpoints)))
    lengths = np.diff(grid)
    xi_idx = cell_index(xi.breakpoints, grid)
    gamma_idx = cell_index(gamma.breakpoints, grid)
    buckets: List[List[Tuple[AtomicMeasure, float]]] = [[] for _ in range(gamma.size)]
    for l, i, j in zip(lengths, xi_idx, gamma_idx):
        buckets[j].append((xi.measures[i], float(l)))
    out = []
    for cell_len, bucket in zip(gamma.lengths, buckets):
        out.append(average([m for m, _ in bucket], [l / cell_len for _, l in bucket]))
    return RandomMeasureField(gamma.breakpoints, out)


@dataclass(frozen=True)
class CellContext:
    """Contexto de uma célula ω: extremos e valores das funções acopladas nela."""

    left: float
    right: float
    values: Tuple[float, ...]

    @property
    def length(self) -> float:
        return self.right - self.left


def pairing(
    xi: RandomMeasureField,
    psi: Callable[[CellContext, Eta], float],
    coupled: Sequence[StepFunction] = (),
) -> float:
    """
    E[∫ ψ(ω, η) dξ_ω(η)] somado exatamente célula a célula

    psi recebe o contexto da célula (com os valores de `coupled` ali) e o átomo
    """
    grid = union_breakpoints(np.concatenate([xi.breakpoints, *(f.breakpoints for f in coupled)]))
    xi_idx = cell_index(xi.breakpoints, grid)
    coupled_vals = [f.values[cell_index(f.breakpoints, grid)] for f in coupled]
    terms = []
    for k, (a, b) in enumerate(zip(grid[:-1], grid[1:])):
        ctx = CellContext(float(a), float(b), tuple(float(v[k]) for v in coupled_vals))
        terms.append(ctx.length * integrate(xi.measures[xi_idx[k]], lambda e: psi(ctx, e)))
    return math.fsum(terms)
