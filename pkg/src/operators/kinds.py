# --------------------------------------------------
# src/operators/kinds.py
# --------------------------------------------------
# Operadores concretos
# - ScaleOperator(λ):        f ↦ λf, |λ| <= 1
# - KoopmanOperator(φ):      f ↦ f∘φ, φ afim por partes e que preserva a medida
# - ConditionalExpectation:  média de f em cada célula de uma partição
# - ConvexCombination:       Σ w_i T_i, w_i >= 0, Σ w_i <= 1
# --------------------------------------------------

import math
from typing import List, Sequence, Tuple

import numpy as np

from src.config import settings
from src.errors import ContractError
from src.operators.base import NonexpansiveOperator
from src.space.interval_space import (
    Branch,
    Partition,
    StepFunction,
    cell_index,
    pullback,
    refine_to,
    union_breakpoints,
)


class ScaleOperator(NonexpansiveOperator):
    def __init__(self, factor: float):
        factor = float(factor)
        if not abs(factor) <= 1.0:
            raise ContractError(f"scale factor {factor!r} outside [-1, 1]", invariant="|lambda| <= 1")
        self.factor = factor

    def apply(self, f: StepFunction) -> StepFunction:
        return f * self.factor

    def describe(self) -> str:
        return f"scale:{self.factor!r}"


class KoopmanOperator(NonexpansiveOperator):
    """Composição f ↦ f∘φ; isometria de L_p porque φ preserva a medida de Lebesgue."""

    def __init__(self, branches: Sequence[Branch], name: str):
        self.branches: Tuple[Branch, ...] = tuple(branches)
        self.name = name
        _check_measure_preserving(self.branches)

    @classmethod
    def doubling(cls) -> "KoopmanOperator":
        """φ(ω) = 2ω mod 1."""
        return cls((Branch(0.0, 0.5, 2.0, 0.0), Branch(0.5, 1.0, 2.0, -1.0)), "doubling")

    @classmethod
    def interval_exchange(cls, level: int, permutation: Sequence[int]) -> "KoopmanOperator":
        """Célula diádica i de nível `level` é levada por translação na célula permutation[i]."""
        cells = 2**level
        perm = [int(k) for k in permutation]
        if sorted(perm) != list(range(cells)):
            raise ContractError(f"{perm} is not a permutation of {cells} cells", invariant="permutation")
        branches = [Branch(i / cells, (i + 1) / cells, 1.0, (perm[i] - i) / cells) for i in range(cells)]
        return cls(branches, f"exchange:{level}:{','.join(map(str, perm))}")

    def apply(self, f: StepFunction) -> StepFunction:
        return pullback(f, self.branches)

    def describe(self) -> str:
        return self.name


def _check_measure_preserving(branches: Sequence[Branch]) -> None:
    """Para cada y, Σ 1/slope sobre os ramos cuja imagem cobre y deve ser 1."""
    images = [br.image() for br in branches]
    cuts = union_breakpoints(np.clip(np.array([0.0, 1.0] + [x for im in images for x in im]), 0.0, 1.0))
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    density = np.zeros(mids.size)
    for br, (lo, hi) in zip(branches, images):
        density += np.where((mids > lo) & (mids < hi), 1.0 / br.slope, 0.0)
    if np.max(np.abs(density - 1.0)) > settings.CONTRACT_TOL:
        raise ContractError("piecewise-affine map does not preserve Lebesgue measure", invariant="measure preserving")


class ConditionalExpectation(NonexpansiveOperator):
    def __init__(self, partition: Partition, label: str | None = None):
        self.partition = partition
        self.label = label or f"condexp:<{partition.size} cells>"

    @classmethod
    def dyadic(cls, depth: int) -> "ConditionalExpectation":
        return cls(Partition.dyadic(depth), f"condexp:{depth}")

    def apply(self, f: StepFunction) -> StepFunction:
        grid = union_breakpoints(np.concatenate((f.breakpoints, self.partition.breakpoints)))
        mass = refine_to(f, grid) * np.diff(grid)
        sums = np.bincount(cell_index(self.partition.breakpoints, grid), weights=mass, minlength=self.partition.size)
        return StepFunction.canonical(self.partition.breakpoints, sums / self.partition.lengths)

    def describe(self) -> str:
        return self.label


class ConvexCombination(NonexpansiveOperator):
    def __init__(self, terms: Sequence[Tuple[float, NonexpansiveOperator]]):
        terms = tuple((float(w), op) for w, op in terms)
        if not terms:
            raise ContractError("empty combination", invariant="nonempty combination")
        if any(not math.isfinite(w) or w < 0 for w, _ in terms):
            raise ContractError("combination weights must be >= 0", invariant="weights >= 0")
        total = math.fsum(w for w, _ in terms)
        if total > 1.0 + settings.CONTRACT_TOL:
            raise ContractError(f"combination weights sum to {total!r} > 1", invariant="sum of weights <= 1")
        self.terms = terms

    def apply(self, f: StepFunction) -> StepFunction:
        out = StepFunction.constant(0.0)
        for w, op in self.terms:
            out = out + w * op(f)
        return out

    def describe(self) -> str:
        return "mix:" + "+".join(f"{w!r}@{_wrap(op)}" for w, op in self.terms)


def _wrap(op: NonexpansiveOperator) -> str:
    # mix dentro de mix vai entre parênteses
    return f"({op.describe()})" if isinstance(op, ConvexCombination) else op.describe()


def _split_terms(rest: str) -> List[str]:
    """Divide nos "+" fora de parênteses."""
    chunks, depth, start = [], 0, 0
    for i, ch in enumerate(rest):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced ')'")
        elif ch == "+" and depth == 0:
            chunks.append(rest[start:i])
            start = i + 1
    if depth:
        raise ValueError("unbalanced '('")
    chunks.append(rest[start:])
    return chunks


def parse_operator(text: str) -> NonexpansiveOperator:
    """
    scale:λ | identity | doubling | exchange:m:π0,π1,... | condexp:depth | mix:w1@op1+w2@op2
    Termos de mix que também são mix vão entre parênteses: mix:0.5@(mix:0.5@identity+0.5@doubling)+0.5@condexp:1
    """
    text = text.strip()
    kind, _, rest = text.partition(":")
    try:
        if kind == "scale":
            return ScaleOperator(float(rest))
        if kind == "identity" and not rest:
            return ScaleOperator(1.0)
        if kind == "doubling" and not rest:
            return KoopmanOperator.doubling()
        if kind == "exchange":
            level, _, perm = rest.partition(":")
            return KoopmanOperator.interval_exchange(int(level), [int(k) for k in perm.split(",")])
        if kind == "condexp":
            return ConditionalExpectation.dyadic(int(rest))
        if kind == "mix":
            terms = []
            for chunk in _split_terms(rest):
                weight, _, inner = chunk.partition("@")
                inner = inner.strip()
                if inner.startswith("(") and inner.endswith(")"):
                    inner = inner[1:-1]
                terms.append((float(weight), parse_operator(inner)))
            return ConvexCombination(terms)
    except ValueError as exc:
        raise ContractError(f"malformed operator {text!r}: {exc}", invariant="operator syntax") from exc
    raise ContractError(f"unknown operator {text!r}", invariant="operator syntax")
