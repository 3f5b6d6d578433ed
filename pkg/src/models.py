from fractions import Fraction
from math import factorial
from typing import Annotated, Any, Dict, Literal, Optional, Tuple

import mpmath
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    PlainSerializer,
    field_serializer,
    field_validator,
    model_validator,
)


def parse_rational(value: Any) -> Fraction:
    """
    Coerces ints, Fractions and "p/q" strings into an exact Fraction.

    :param value: Raw value from Python code or a JSON payload
    :return: Fraction in lowest terms
    :raises ValueError: If the value is not an exact rational
    """
    if isinstance(value, bool):
        raise ValueError(f"Expected an exact rational, got {value!r}.")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"Expected an exact rational, got {value!r}.")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_real(value: Any) -> mpmath.mpf:
    if isinstance(value, mpmath.mpf):
        return value
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    if isinstance(value, (int, float, str)) and not isinstance(value, bool):
        return mpmath.mpf(value)
    raise ValueError(f"Expected a real number, got {value!r}.")


def format_real(value: mpmath.mpf) -> str:
    return mpmath.nstr(value, 20)


# Exact rationals travel as "p/q" strings; high-precision reals as decimal strings.
Rational = Annotated[Fraction, BeforeValidator(parse_rational), PlainSerializer(format_rational, return_type=str)]
HighPrecision = Annotated[mpmath.mpf, BeforeValidator(parse_real), PlainSerializer(format_real, return_type=str)]

WeightMode = Literal['exact', 'analytic']

ColumnProfile = Tuple[int, ...]
FoldedProfile = Tuple[int, ...]


class Simplex01(BaseModel):
    """
    An ordered list of n+1 cube vertices, each a string of '0'/'1' in coordinate order.

    Vertices are stored ascending by their binary code, so every vertex set has exactly
    one representative. Degenerate vertex sets are representable; repeated vertices are not.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    vertices: Tuple[str, ...]

    @field_validator('n')
    def validate_dimension(cls, v):
        if v < 1:
            raise ValueError('Dimension must be at least 1.')
        return v

    @field_validator('vertices')
    def validate_vertex_format(cls, v):
        for vertex in v:
            if not vertex or set(vertex) - {'0', '1'}:
                raise ValueError(f"Invalid vertex '{vertex}'. Expected a string of 0s and 1s like '0110'.")
        return tuple(sorted(v, key=lambda bits: int(bits, 2)))

    @model_validator(mode='after')
    def validate_shape(self):
        if len(self.vertices) != self.n + 1:
            raise ValueError(f'A {self.n}-simplex needs {self.n + 1} vertices, got {len(self.vertices)}.')
        for vertex in self.vertices:
            if len(vertex) != self.n:
                raise ValueError(f"Vertex '{vertex}' has length {len(vertex)}, expected {self.n}.")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError('Simplex vertices must be pairwise distinct.')
        return self

    @classmethod
    def from_codes(cls, n: int, codes) -> 'Simplex01':
        return cls(n=n, vertices=tuple(format(code, f'0{n}b') for code in codes))

    @property
    def codes(self) -> Tuple[int, ...]:
        return tuple(int(vertex, 2) for vertex in self.vertices)

    def coordinates(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(int(bit) for bit in vertex) for vertex in self.vertices)


class ConstraintClass(BaseModel):
    """
    Simplices sharing exact volume and folded profile; one LP constraint per class.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    volume: Rational
    folded: FoldedProfile
    count: int
    witness: Simplex01

    @field_validator('volume')
    def validate_volume(cls, v):
        if v <= 0:
            raise ValueError('Constraint classes only hold simplices of positive volume.')
        return v

    @field_validator('count')
    def validate_count(cls, v):
        if v < 1:
            raise ValueError('A constraint class holds at least one simplex.')
        return v

    @property
    def key(self) -> Tuple[Fraction, FoldedProfile]:
        return self.volume, self.folded

    def describe(self) -> str:
        return f"V={self.volume} folded={list(self.folded)} count={self.count}"


class EnumerationSummary(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    subsets_scanned: int
    degenerate: int
    non_degenerate: int
    classes: Tuple[ConstraintClass, ...]
    rho: int
    max_volume: Rational
    lemma5_violations: int = 0

    @model_validator(mode='after')
    def validate_totals(self):
        if self.max_volume != Fraction(self.rho, factorial(self.n)):
            raise ValueError('max_volume must equal rho / n!.')
        if sum(c.count for c in self.classes) != self.non_degenerate:
            raise ValueError('Class counts must add up to the non-degenerate count.')
        if self.degenerate + self.non_degenerate != self.subsets_scanned:
            raise ValueError('Every scanned subset is either degenerate or not.')
        return self


class WeightVector(BaseModel):
    """
    Symmetric weights alpha_1..alpha_n summing to one.

    Exact mode holds Fractions (the LP path); analytic mode holds mpmath reals.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    mode: WeightMode = 'exact'
    alpha: Tuple[Any, ...]

    @model_validator(mode='before')
    @classmethod
    def coerce_alpha(cls, data):
        if isinstance(data, dict) and 'alpha' in data:
            parse = parse_real if data.get('mode', 'exact') == 'analytic' else parse_rational
            data = {**data, 'alpha': tuple(parse(a) for a in data['alpha'])}
        return data

    @model_validator(mode='after')
    def validate_weights(self):
        if len(self.alpha) != self.n:
            raise ValueError(f'Expected {self.n} weights, got {len(self.alpha)}.')
        for m in range(self.n):
            if self.alpha[m] != self.alpha[self.n - 1 - m]:
                raise ValueError(f'Weights must satisfy alpha_m = alpha_(n+1-m); m={m + 1} breaks it.')
        total = sum(self.alpha)
        if self.mode == 'exact':
            if total != 1:
                raise ValueError(f'Exact weights must sum to 1, got {total}.')
        elif abs(total - 1) > 1e-12:
            raise ValueError(f'Analytic weights must sum to 1 within 1e-12, got {total}.')
        return self

    @field_serializer('alpha')
    def serialize_alpha(self, alpha):
        if self.mode == 'exact':
            return [format_rational(a) for a in alpha]
        return [format_real(a) for a in alpha]

    def weight(self, m: int):
        """
        :param m: 1-based column count
        :return: alpha_m
        """
        return self.alpha[m - 1]


class LPProblem(BaseModel):
    """
    min g subject to a_ub . x <= b_ub and a_eq . x = b_eq, all variables free.

    The last variable is g; alpha_index maps each alpha_m (m = 1..n) onto its variable.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    symmetric: bool
    labels: Tuple[str, ...]
    objective: Tuple[Rational, ...]
    a_ub: Tuple[Tuple[Rational, ...], ...]
    b_ub: Tuple[Rational, ...]
    a_eq: Tuple[Tuple[Rational, ...], ...]
    b_eq: Tuple[Rational, ...]
    alpha_index: Tuple[int, ...]
    classes: Tuple[ConstraintClass, ...]

    @model_validator(mode='after')
    def validate_shape(self):
        width = len(self.labels)
        if len(self.objective) != width:
            raise ValueError('Objective length must match the variable count.')
        if len(self.a_ub) != len(self.classes) or len(self.b_ub) != len(self.classes):
            raise ValueError('There must be exactly one inequality per constraint class.')
        if any(len(row) != width for row in self.a_ub + self.a_eq):
            raise ValueError('Every constraint row must cover all variables.')
        if len(self.a_eq) != len(self.b_eq):
            raise ValueError('Equality rows and right-hand sides differ in count.')
        if len(self.alpha_index) != self.n:
            raise ValueError('alpha_index must map every alpha_m onto a variable.')
        return self


class LPSolution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    g_star: Rational
    alpha_star: WeightVector
    tight_classes: Tuple[ConstraintClass, ...]
    bound: Rational
    pivots: int = 0

    @model_validator(mode='after')
    def validate_solution(self):
        if self.g_star <= 0:
            raise ValueError('g* must be positive.')
        if self.bound != 1 / self.g_star:
            raise ValueError('bound must equal 1/g*.')
        if not self.tight_classes:
            raise ValueError('At least one constraint is tight at the optimum.')
        return self


class Lemma5Report(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    holds: bool
    det_squared: Rational
    right_side: Rational
    slack: Rational


class BoundsRow(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    e_n: HighPrecision
    f_n: HighPrecision
    h_n_lower: HighPrecision
    lemma1_rho_bound: HighPrecision
    known_dis_reference: Optional[int] = None
    known_triang_reference: Optional[int] = None

    @model_validator(mode='after')
    def validate_positive(self):
        if min(self.e_n, self.f_n, self.h_n_lower, self.lemma1_rho_bound) <= 0:
            raise ValueError(f'All bounds must be positive (n={self.n}).')
        return self


class AnalyticReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    weights: WeightVector
    threshold: float
    tolerance: float
    max_weighted_volume: float
    classes_checked: int
    violations: Tuple[ConstraintClass, ...] = ()
    implied_bound: HighPrecision

    @property
    def holds(self) -> bool:
        return not self.violations


class HFunctionReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    t_max: HighPrecision
    h_max: HighPrecision
    factorial: int
    sampled_ok: bool


class DissectionFile(BaseModel):
    """
    On-disk dissection: {"n": 3, "polytope": "cube", "axis": 1, "simplices": [["000", ...], ...]}.
    """
    n: int
    polytope: Literal['cube'] = 'cube'
    axis: int = 1
    simplices: Tuple[Tuple[str, ...], ...]

    @field_validator('n')
    def validate_dimension(cls, v):
        if v < 1:
            raise ValueError('Dimension must be at least 1.')
        return v

    class Config:
        str_strip_whitespace = True


class Dissection(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    polytope: Literal['cube'] = 'cube'
    axis: int = 1
    simplices: Tuple[Simplex01, ...]

    @model_validator(mode='after')
    def validate_members(self):
        # geometry imports this module
        from geometry import volume

        if not 1 <= self.axis <= self.n:
            raise ValueError(f'Axis {self.axis} is outside 1..{self.n}.')
        for index, simplex in enumerate(self.simplices):
            if simplex.n != self.n:
                raise ValueError(f'Simplex #{index} has dimension {simplex.n}, expected {self.n}.')
            if volume(simplex) == 0:
                raise ValueError(f'Simplex #{index} has zero volume.')
        return self


class ClassVolumeVector(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: int
    volumes: Tuple[Rational, ...]

    @field_validator('volumes')
    def validate_nonnegative(cls, v):
        if any(volume < 0 for volume in v):
            raise ValueError('Class volumes cannot be negative.')
        return v


class BernsteinCoefficients(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: int
    coefficients: Tuple[Rational, ...]


class OverlapWitness(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    first: int
    second: int
    point: Tuple[Rational, ...]
    margin: Rational


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    simplex_count: int
    partition_ok: bool
    volume_sum: Rational
    expected_volume: Rational
    overlap_witness: Optional[OverlapWitness] = None
    class_volumes: Tuple[ClassVolumeVector, ...] = ()
    bernstein: Tuple[BernsteinCoefficients, ...] = ()
    corollary_ok: Optional[bool] = None
    section_ok: Optional[bool] = None
    proposition_table: Optional[Tuple[Tuple[Rational, ...], ...]] = None
    proposition_ok: Optional[bool] = None

    @model_validator(mode='after')
    def validate_partition_flag(self):
        expected = self.volume_sum == self.expected_volume and self.overlap_witness is None
        if self.partition_ok != expected:
            raise ValueError('partition_ok must reflect the volume sum and the overlap witness.')
        return self

    def all_passed(self) -> bool:
        checks = [self.corollary_ok, self.section_ok, self.proposition_ok]
        return self.partition_ok and all(check is not False for check in checks)

    def checks(self) -> Dict[str, Optional[bool]]:
        return {
            'partition': self.partition_ok,
            'corollary': self.corollary_ok,
            'section_polynomial': self.section_ok,
            'proposition': self.proposition_ok,
        }
