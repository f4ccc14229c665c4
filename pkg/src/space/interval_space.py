# --------------------------------------------------
# src/space/interval_space.py
# --------------------------------------------------
# Aritmética exata sobre ([0,1], Lebesgue) com funções constantes por partes
#
# - StepFunction: f constante em cada célula [b_i, b_{i+1}]
# - Toda integral vira uma soma finita Σ v_i · len_i (sem quadratura)
# - Pontos isolados têm medida nula: fechado/aberto nos extremos é irrelevante
# --------------------------------------------------

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np

from src.config import settings
from src.errors import InvalidExponentError, ResolutionError, StepFunctionError

log = logging.getLogger("horolab.interval_space")

Number = float | int


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def check_exponent(p: Number, *, strict: bool = False) -> float:
    """Valida o expoente p (p >= 1, ou p > 1 quando strict)."""
    p = float(p)
    if not math.isfinite(p) or p < 1.0 or (strict and p == 1.0):
        bound = "p > 1" if strict else "p >= 1"
        raise InvalidExponentError(f"invalid exponent p={p!r}, expected {bound}")
    return p


def conjugate_exponent(p: Number) -> float:
    """q = p/(p-1), para p > 1."""
    p = check_exponent(p, strict=True)
    return p / (p - 1.0)


class StepFunction:
    """
    Função real constante por partes em [0,1]

    breakpoints: 0 = b_0 < b_1 < ... < b_k = 1
    values: um valor finito por célula (k valores)

    Valores são imutáveis (arrays numpy somente leitura)
    """

    __slots__ = ("_breakpoints", "_values")

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float]):
        bps = np.array(breakpoints, dtype=float)
        vals = np.array(values, dtype=float)
        if bps.ndim != 1 or vals.ndim != 1 or vals.size == 0 or bps.size != vals.size + 1:
            raise StepFunctionError(
                f"expected k+1 breakpoints for k>=1 values, got {bps.size} and {vals.size}"
            )
        if bps.size > settings.MAX_BREAKPOINTS:
            raise ResolutionError(
                f"{bps.size} breakpoints exceed MAX_BREAKPOINTS={settings.MAX_BREAKPOINTS}"
            )
        if bps[0] != 0.0 or bps[-1] != 1.0:
            raise StepFunctionError("breakpoints must start at 0 and end at 1")
        if not np.all(np.diff(bps) > 0):
            raise StepFunctionError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise StepFunctionError("values must be finite")
        self._breakpoints = _readonly(bps)
        self._values = _readonly(vals)

    # --------------------------------------------------
    # Construtores
    # --------------------------------------------------
    @classmethod
    def canonical(cls, breakpoints: Sequence[float], values: Sequence[float]) -> "StepFunction":
        """Constrói já na forma canônica (ver normalize)."""
        bps, vals = _canonical_arrays(np.asarray(breakpoints, dtype=float), np.asarray(values, dtype=float))
        return cls(bps, vals)

    @classmethod
    def constant(cls, c: Number) -> "StepFunction":
        return cls([0.0, 1.0], [float(c)])

    @classmethod
    def from_dict(cls, data: dict) -> "StepFunction":
        return cls(data["breakpoints"], data["values"])

    def to_dict(self) -> dict:
        # tolist() devolve floats Python: ida e volta por JSON é exata em binary64
        return {"breakpoints": self._breakpoints.tolist(), "values": self._values.tolist()}

    # --------------------------------------------------
    # Acesso
    # --------------------------------------------------
    @property
    def breakpoints(self) -> np.ndarray:
        return self._breakpoints

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self._breakpoints)

    @property
    def cell_count(self) -> int:
        return int(self._values.size)

    def cells(self) -> Iterator[Tuple[float, float, float]]:
        for a, b, v in zip(self._breakpoints[:-1], self._breakpoints[1:], self._values):
            yield float(a), float(b), float(v)

    def __call__(self, x):
        """Avalia em pontos de [0,1] (vetorizado); no breakpoint vale a célula da direita."""
        xs = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._breakpoints, xs, side="right") - 1
        idx = np.clip(idx, 0, self._values.size - 1)
        out = self._values[idx]
        return float(out) if out.ndim == 0 else out

    # --------------------------------------------------
    # Aritmética (fechada por merge_refine)
    # --------------------------------------------------
    def map(self, func: Callable[[np.ndarray], np.ndarray]) -> "StepFunction":
        return StepFunction.canonical(self._breakpoints, func(self._values))

    def combine(self, other: "StepFunction", op: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "StepFunction":
        f, g = merge_refine(self, other)
        return StepFunction.canonical(f.breakpoints, op(f.values, g.values))

    def _binary(self, other, op) -> "StepFunction":
        if isinstance(other, StepFunction):
            return self.combine(other, op)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self.map(lambda v: op(v, float(other)))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self.map(lambda v: v / float(other))
        return NotImplemented

    def __neg__(self) -> "StepFunction":
        return StepFunction(self._breakpoints, -self._values)

    def __abs__(self) -> "StepFunction":
        return self.map(np.abs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            self._breakpoints.size == other._breakpoints.size
            and bool(np.array_equal(self._breakpoints, other._breakpoints))
            and bool(np.array_equal(self._values, other._values))
        )

    __hash__ = None

    def allclose(self, other: "StepFunction", tol: float = 1e-12) -> bool:
        """Igualdade q.t.p. a menos de tol nos valores."""
        f, g = merge_refine(self, other)
        return bool(np.max(np.abs(f.values - g.values)) <= tol)

    def __repr__(self) -> str:
        if self.cell_count <= 8:
            return f"StepFunction(breakpoints={self._breakpoints.tolist()}, values={self._values.tolist()})"
        return f"StepFunction(<{self.cell_count} cells>)"


# --------------------------------------------------
# Forma canônica e refinamento comum
# --------------------------------------------------
def union_breakpoints(points: np.ndarray) -> np.ndarray:
    u = np.unique(points)
    keep = np.concatenate(([True], np.diff(u) > settings.BREAKPOINT_TOL))
    u = u[keep]
    u[0] = 0.0
    u[-1] = 1.0
    return u


def _values_on(f: StepFunction, bps: np.ndarray) -> np.ndarray:
    """Valores de f nas células de uma grade bps que refina (ou cruza) a de f."""
    mids = 0.5 * (bps[:-1] + bps[1:])
    idx = np.searchsorted(f.breakpoints, mids, side="right") - 1
    return f.values[np.clip(idx, 0, f.cell_count - 1)]


def _canonical_arrays(bps: np.ndarray, vals: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if bps.size != vals.size + 1 or vals.size == 0:
        raise StepFunctionError("expected k+1 breakpoints for k>=1 values")
    keep = np.concatenate(([True], np.diff(bps) > settings.BREAKPOINT_TOL))
    if not keep.all():
        # células de comprimento ~0 somem; o valor vem do ponto médio da nova célula
        tmp = StepFunction.__new__(StepFunction)
        tmp._breakpoints, tmp._values = bps, vals
        new_bps = bps[keep]
        new_bps[-1] = 1.0
        vals = _values_on(tmp, new_bps)
        bps = new_bps
    change = vals[1:] != vals[:-1]
    bps = np.concatenate(([0.0], bps[1:-1][change], [1.0]))
    vals = np.concatenate((vals[:1], vals[1:][change]))
    return bps, vals


def normalize(f: StepFunction) -> StepFunction:
    """Forma canônica: sem células nulas e sem vizinhos de mesmo valor. Idempotente."""
    return StepFunction.canonical(f.breakpoints, f.values)


def merge_refine(f: StepFunction, g: StepFunction) -> Tuple[StepFunction, StepFunction]:
    """Reescreve f e g sobre a união dos breakpoints (valores inalterados q.t.p.)."""
    if f.breakpoints.size == g.breakpoints.size and np.array_equal(f.breakpoints, g.breakpoints):
        return f, g
    bps = union_breakpoints(np.concatenate((f.breakpoints, g.breakpoints)))
    return StepFunction(bps, _values_on(f, bps)), StepFunction(bps, _values_on(g, bps))


def refine_to(f: StepFunction, breakpoints: np.ndarray) -> np.ndarray:
    """Valores de f sobre uma grade arbitrária (que deve conter os breakpoints de f)."""
    return _values_on(f, np.asarray(breakpoints, dtype=float))


def minimum(f: StepFunction, g: StepFunction) -> StepFunction:
    return f.combine(g, np.minimum)


def maximum(f: StepFunction, g: StepFunction) -> StepFunction:
    return f.combine(g, np.maximum)


# --------------------------------------------------
# Normas e integrais
# --------------------------------------------------
def lp_norm(f: StepFunction, p: Number = 1.0) -> float:
    """(Σ |v_i|^p len_i)^(1/p); para p > 1 escala pelo máximo para evitar overflow."""
    p = check_exponent(p)
    a = np.abs(f.values)
    if p == 1.0:
        return float(np.sum(a * f.lengths))
    m = float(a.max())
    if m == 0.0:
        return 0.0
    s = float(np.sum((a / m) ** p * f.lengths))
    return m * s ** (1.0 / p)


def expectation(f: StepFunction) -> float:
    return float(np.sum(f.values * f.lengths))


def sup_norm(f: StepFunction) -> float:
    return float(np.max(np.abs(f.values)))


# --------------------------------------------------
# Conjuntos e partições
# --------------------------------------------------
@dataclass(frozen=True)
class IntervalSet:
    """
    União finita de intervalos de [0,1] (o σ-álgebra é representado só por estes)
    Intervalos sobrepostos ou encostados são fundidos
    """

    intervals: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        cleaned = []
        for a, b in sorted((float(a), float(b)) for a, b in self.intervals):
            if not (0.0 <= a < b <= 1.0):
                raise StepFunctionError(f"invalid interval [{a}, {b}] in [0,1]")
            if cleaned and a <= cleaned[-1][1]:
                cleaned[-1] = (cleaned[-1][0], max(cleaned[-1][1], b))
            else:
                cleaned.append((a, b))
        object.__setattr__(self, "intervals", tuple(cleaned))

    @classmethod
    def of(cls, *intervals: Tuple[float, float]) -> "IntervalSet":
        return cls(tuple(intervals))

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    def indicator(self, value: Number = 1.0) -> StepFunction:
        if not self.intervals:
            return StepFunction.constant(0.0)
        pts = [0.0, 1.0] + [x for ab in self.intervals for x in ab]
        bps = union_breakpoints(np.asarray(pts, dtype=float))
        mids = 0.5 * (bps[:-1] + bps[1:])
        inside = np.zeros(mids.size, dtype=bool)
        for a, b in self.intervals:
            inside |= (mids > a) & (mids < b)
        return StepFunction.canonical(bps, np.where(inside, float(value), 0.0))

    def complement(self) -> "IntervalSet":
        out, cursor = [], 0.0
        for a, b in self.intervals:
            if a > cursor:
                out.append((cursor, a))
            cursor = b
        if cursor < 1.0:
            out.append((cursor, 1.0))
        return IntervalSet(tuple(out))


class Partition:
    """Partição finita de [0,1] em células de comprimento positivo."""

    __slots__ = ("_breakpoints",)

    def __init__(self, breakpoints: Sequence[float]):
        bps = np.array(breakpoints, dtype=float)
        if bps.ndim != 1 or bps.size < 2 or bps[0] != 0.0 or bps[-1] != 1.0:
            raise StepFunctionError("partition must span [0,1]")
        if not np.all(np.diff(bps) > 0):
            raise StepFunctionError("partition cells must have positive length")
        self._breakpoints = _readonly(bps)

    @classmethod
    def trivial(cls) -> "Partition":
        return cls([0.0, 1.0])

    @classmethod
    def uniform(cls, cells: int) -> "Partition":
        """n células de mesmo comprimento (exatas quando n é potência de 2)."""
        if cells < 1:
            raise StepFunctionError(f"partition needs at least one cell, got {cells}")
        if cells + 1 > settings.MAX_BREAKPOINTS:
            raise ResolutionError(f"{cells} cells exceed MAX_BREAKPOINTS={settings.MAX_BREAKPOINTS}")
        return cls(np.arange(cells + 1, dtype=float) / cells)

    @classmethod
    def dyadic(cls, level: int) -> "Partition":
        if level < 0 or level > settings.MAX_DYADIC_DEPTH:
            raise ResolutionError(f"dyadic level {level} outside [0, {settings.MAX_DYADIC_DEPTH}]")
        n = 2**level
        return cls(np.arange(n + 1, dtype=float) / n)

    @property
    def breakpoints(self) -> np.ndarray:
        return self._breakpoints

    @property
    def size(self) -> int:
        """|γ|: número de células."""
        return int(self._breakpoints.size - 1)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self._breakpoints)

    def cells(self) -> Iterator[Tuple[float, float]]:
        for a, b in zip(self._breakpoints[:-1], self._breakpoints[1:]):
            yield float(a), float(b)

    def refines(self, other: "Partition") -> bool:
        """True se cada célula de self está contida numa célula de other."""
        idx = np.searchsorted(self._breakpoints, other.breakpoints)
        hi = np.clip(idx, 0, self._breakpoints.size - 1)
        lo = np.clip(idx - 1, 0, self._breakpoints.size - 1)
        gap = np.minimum(
            np.abs(self._breakpoints[hi] - other.breakpoints),
            np.abs(self._breakpoints[lo] - other.breakpoints),
        )
        return bool((gap <= settings.BREAKPOINT_TOL).all())

    def __repr__(self) -> str:
        return f"Partition(size={self.size})"


# --------------------------------------------------
# Composição com mapas afins por partes
# --------------------------------------------------
@dataclass(frozen=True)
class Branch:
    """
    Ramo x ↦ slope·x + offset em [left, right] (slope > 0)
    transform opcional age nos valores puxados de volta
    """

    left: float
    right: float
    slope: float
    offset: float
    transform: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def image(self) -> Tuple[float, float]:
        return self.slope * self.left + self.offset, self.slope * self.right + self.offset


def pullback(f: StepFunction, branches: Sequence[Branch]) -> StepFunction:
    """
    (f ∘ φ)(x), com φ dado por ramos que cobrem [0,1] em ordem
    A quantidade de breakpoints cresce (ex.: dobra no mapa de duplicação)
    """
    if not branches or branches[0].left != 0.0 or branches[-1].right != 1.0:
        raise StepFunctionError("branches must cover [0,1]")
    all_bps = [np.array([0.0])]
    all_vals = []
    for prev, br in zip((None, *branches[:-1]), branches):
        if prev is not None and prev.right != br.left:
            raise StepFunctionError("branches must be contiguous")
        if br.slope <= 0 or br.right <= br.left:
            raise StepFunctionError("branches must be increasing with positive length")
        lo, hi = br.image()
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        inner = f.breakpoints[(f.breakpoints > lo) & (f.breakpoints < hi)]
        ys = np.concatenate(([lo], inner, [hi]))
        xs = (ys - br.offset) / br.slope
        xs[0], xs[-1] = br.left, br.right
        vals = _values_on(f, ys)
        if br.transform is not None:
            vals = np.asarray(br.transform(vals), dtype=float)
        all_bps.append(xs[1:])
        all_vals.append(vals)
    bps = np.concatenate(all_bps)
    total = bps.size
    if total > settings.MAX_BREAKPOINTS:
        raise ResolutionError(f"pullback needs {total} breakpoints > MAX_BREAKPOINTS={settings.MAX_BREAKPOINTS}")
    return StepFunction.canonical(bps, np.concatenate(all_vals))


# --------------------------------------------------
# Funções de teste
# --------------------------------------------------
def rademacher(n: int) -> StepFunction:
    """r_n(ω) = sgn(sin(2^n π ω)): ±1 alternando nas 2^n células diádicas, começando com +1."""
    if n < 1:
        raise StepFunctionError(f"rademacher index must be >= 1, got {n}")
    if n > settings.MAX_DYADIC_DEPTH:
        raise ResolutionError(f"rademacher depth {n} > MAX_DYADIC_DEPTH={settings.MAX_DYADIC_DEPTH}")
    cells = 2**n
    bps = np.arange(cells + 1, dtype=float) / cells
    vals = np.where(np.arange(cells) % 2 == 0, 1.0, -1.0)
    return StepFunction(bps, vals)


def dyadic_step(values: Sequence[float]) -> StepFunction:
    """Função escada com um valor por célula diádica (len(values) deve ser potência de 2)."""
    vals = np.asarray(values, dtype=float)
    cells = vals.size
    if cells == 0 or cells & (cells - 1):
        raise StepFunctionError(f"dyadic_step needs 2^m values, got {cells}")
    return StepFunction.canonical(np.arange(cells + 1, dtype=float) / cells, vals)


def cell_index(breakpoints: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Para cada célula de `grid`, o índice da célula de `breakpoints` que a contém."""
    mids = 0.5 * (grid[:-1] + grid[1:])
    idx = np.searchsorted(breakpoints, mids, side="right") - 1
    return np.clip(idx, 0, breakpoints.size - 2)
