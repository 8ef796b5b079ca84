import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from mvnets.errors import ShapeError, WeightDisciplineError
from mvnets.mvlogic.terms import ONE, ZERO, DmvTerm, Delta, Not, Odot, Oplus, Var, oplus_chain

logger = logging.getLogger(__name__)

# 疎な係数表現: ((変数番号, 係数), ...)
Coeffs = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class NeuronForm:
    """σ(m·x + b) with integer m."""
    weights: Tuple[int, ...]
    bias: Fraction

    def __post_init__(self):
        for j, w in enumerate(self.weights):
            if Fraction(w).denominator != 1:
                raise WeightDisciplineError(f"weight {w} is not an integer", layer=0, row=0, col=j)

    def check_bias(self, k: int) -> None:
        if (k - 1) % Fraction(self.bias).denominator != 0:
            raise WeightDisciplineError(f"bias {self.bias} is not in Q_{k}", layer=0, row=0)

    def value(self, x: Sequence[Fraction]) -> Fraction:
        f = sum((int(m) * Fraction(v) for m, v in zip(self.weights, x)), Fraction(0)) + Fraction(self.bias)
        return min(Fraction(1), max(Fraction(0), f))


def constant_term(b: Fraction) -> DmvTerm:
    """p/q in lowest terms as δ_q(1) ⊕ ... ⊕ δ_q(1), p copies, for 0 < b < 1."""
    b = Fraction(b)
    unit = Delta(b.denominator, ONE)
    return oplus_chain([unit] * b.numerator)


class NeuronExtractor:
    """
    DMV terms for σ-neurons over fixed input terms.

    One unit of the coefficient of largest magnitude (lowest index on ties) is
    removed per step with σ(f) = (σ(f - x) ⊕ x) ⊙ σ(f - x + 1); a negative
    coefficient is first flipped with σ(f) = ¬σ(-f + 1). Every (m, b) state
    is extracted once and shared.
    """

    def __init__(self, inputs: Sequence[DmvTerm], k: Optional[int] = None):
        self.inputs = list(inputs)
        self.k = k
        self.memo: Dict[Tuple[Coeffs, Fraction], DmvTerm] = {}

    def extract(self, form: NeuronForm) -> DmvTerm:
        if len(form.weights) != len(self.inputs):
            raise ShapeError(f"neuron has {len(form.weights)} weights for {len(self.inputs)} inputs")
        if self.k is not None:
            form.check_bias(self.k)
        coeffs = tuple((j, int(m)) for j, m in enumerate(form.weights) if m != 0)
        return self.sigma_term(coeffs, Fraction(form.bias))

    def extract_row(self, row: Sequence[Tuple[int, Fraction]], bias: Fraction) -> DmvTerm:
        """Same as extract for a sparse row of (input index, weight) pairs."""
        form = NeuronForm(tuple(w for _, w in row), bias)
        if self.k is not None:
            form.check_bias(self.k)
        for j, _ in row:
            if not 0 <= j < len(self.inputs):
                raise ShapeError(f"weight for input {j}, only {len(self.inputs)} inputs")
        coeffs = tuple((j, int(m)) for j, m in row if m != 0)
        return self.sigma_term(coeffs, Fraction(bias))

    def shortcut(self, coeffs: Coeffs, b: Fraction) -> Optional[DmvTerm]:
        lo = b + sum(m for _, m in coeffs if m < 0)
        hi = b + sum(m for _, m in coeffs if m > 0)
        if hi <= 0:
            return ZERO
        if lo >= 1:
            return ONE
        if not coeffs:
            return constant_term(b)
        if len(coeffs) == 1 and coeffs[0][1] == 1 and b == 0:
            return self.inputs[coeffs[0][0]]
        return None

    def sigma_term(self, coeffs: Coeffs, b: Fraction) -> DmvTerm:
        # 明示的なスタックで再帰を避ける
        stack: List[Tuple[Coeffs, Fraction]] = [(coeffs, b)]
        while stack:
            key = stack[-1]
            if key in self.memo:
                stack.pop()
                continue
            cs, bias = key
            quick = self.shortcut(cs, bias)
            if quick is not None:
                self.memo[key] = quick
                stack.pop()
                continue
            pos = max(range(len(cs)), key=lambda p: (abs(cs[p][1]), -cs[p][0]))
            j, m = cs[pos]
            if m < 0:
                flipped = (tuple((i, -c) for i, c in cs), 1 - bias)
                if flipped not in self.memo:
                    stack.append(flipped)
                    continue
                self.memo[key] = Not(self.memo[flipped])
                stack.pop()
                continue
            rest = tuple((i, c - 1 if i == j else c) for i, c in cs if not (i == j and c == 1))
            low, high = (rest, bias), (rest, bias + 1)
            pending = [s for s in (low, high) if s not in self.memo]
            if pending:
                stack.extend(pending)
                continue
            self.memo[key] = Odot(Oplus(self.memo[low], self.inputs[j]), self.memo[high])
            stack.pop()
        return self.memo[(coeffs, b)]


def extract_neuron(form: NeuronForm, k: Optional[int] = None, inputs: Optional[Sequence[DmvTerm]] = None) -> DmvTerm:
    """Term equal to σ(m·x + b) on [0,1]^n; variables default to x[0], x[1], ..."""
    if inputs is None:
        inputs = [Var(j) for j in range(len(form.weights))]
    return NeuronExtractor(inputs, k).extract(form)


if __name__ == "__main__":
    from mvnets.mvlogic.printer import print_term

    # 動作確認: σ(x - 2y + 1/2), k = 3
    print(print_term(extract_neuron(NeuronForm((1, -2), Fraction(1, 2)), k=3), shared=True))
