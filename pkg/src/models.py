"""
Data models for the extended Lorentz cone toolkit
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from .config import config
from .errors import ConeSpecError, DimensionError, MapSpecError
from .numeric import Scalar, as_array, to_float

Vector = Tuple[Scalar, ...]
Matrix = Tuple[Vector, ...]


def _vector(values) -> Vector:
    """Freeze a sequence of numbers, keeping Fractions as they are"""
    return tuple(v if isinstance(v, Fraction) else float(v) for v in values)


def _matrix(rows) -> Matrix:
    return tuple(_vector(row) for row in rows)


# ---------------------------------------------------------------- tolerances

@dataclass(frozen=True)
class Tolerance:
    """Absolute slack applied to every defining inequality"""
    eps: float = 1e-9

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"tolerance must be nonnegative, got {self.eps}")


TolLike = Union[Tolerance, float, None]


def resolve_eps(tol: TolLike) -> float:
    """Accept a Tolerance, a bare float, or None for the configured default"""
    if tol is None:
        return config.tolerance.EPS
    if isinstance(tol, Tolerance):
        return tol.eps
    return Tolerance(float(tol)).eps


# -------------------------------------------------------------------- points

@dataclass(frozen=True, eq=False)
class Point:
    """A vector of R^p x R^q with its split made explicit"""
    x: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        if self.x.ndim != 1 or self.u.ndim != 1:
            raise DimensionError("x and u must be one-dimensional")
        if self.x.size < 1 or self.u.size < 1:
            raise DimensionError(f"p and q must be positive, got p={self.x.size}, q={self.u.size}")

    @property
    def p(self) -> int:
        return self.x.size

    @property
    def q(self) -> int:
        return self.u.size

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, self.u])

    @classmethod
    def from_vector(cls, z, p: int, q: int) -> "Point":
        if p < 1 or q < 1:
            raise DimensionError(f"p and q must be positive, got p={p}, q={q}")
        z = z if isinstance(z, np.ndarray) else as_array(z)
        if z.ndim != 1 or z.size != p + q:
            raise DimensionError(f"vector of length {z.size} does not split as p={p}, q={q}")
        return cls(z[:p], z[p:])

    @classmethod
    def of(cls, x, u) -> "Point":
        return cls(np.atleast_1d(as_array(x)), np.atleast_1d(as_array(u)))

    def __sub__(self, other: "Point") -> "Point":
        self.check_same_split(other)
        return Point(self.x - other.x, self.u - other.u)

    def check_same_split(self, other: "Point") -> None:
        if (self.p, self.q) != (other.p, other.q):
            raise DimensionError(f"split mismatch: (p={self.p}, q={self.q}) vs (p={other.p}, q={other.q})")

    def __repr__(self) -> str:
        return f"Point(x={to_float(self.x).tolist()}, u={to_float(self.u).tolist()})"


# --------------------------------------------------------------------- cones

@dataclass(frozen=True)
class ConeSpec:
    """Closed convex cone description; see the concrete variants"""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def kind(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class OrthantCone(ConeSpec):
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ConeSpecError(f"orthant dimension must be positive, got {self.m}")

    @property
    def dim(self) -> int:
        return self.m

    @property
    def kind(self) -> str:
        return "orthant"


@dataclass(frozen=True)
class SecondOrderCone(ConeSpec):
    """{(w, t) : ||w|| <= t}, stored with the scalar t as the last component"""
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ConeSpecError(f"second-order cone dimension must be positive, got {self.m}")

    @property
    def dim(self) -> int:
        return self.m

    @property
    def kind(self) -> str:
        return "second_order"


@dataclass(frozen=True)
class HyperplaneCone(ConeSpec):
    """{v : <a, v> = 0} for a unit normal a"""
    normal: Vector

    def __post_init__(self):
        object.__setattr__(self, 'normal', _vector(self.normal))
        if len(self.normal) < 1:
            raise ConeSpecError("hyperplane normal must be nonempty")
        length = float(np.linalg.norm(to_float(self.normal)))
        if abs(length - 1.0) > config.tolerance.EPS:
            raise ConeSpecError(f"hyperplane normal must have unit norm, got norm {length!r}")

    @property
    def dim(self) -> int:
        return len(self.normal)

    @property
    def kind(self) -> str:
        return "hyperplane"

    def normal_array(self, exact: bool = False) -> np.ndarray:
        return as_array(self.normal, exact=exact)


@dataclass(frozen=True)
class PolyhedralCone(ConeSpec):
    """
    Polyhedral cone given either by halfspace normals, {v : <n_j, v> <= 0 for all j},
    or by generators, cone{g_1, ..., g_k}. Exactly one of the two is set.
    """
    m: int
    normals: Optional[Matrix] = None
    generators: Optional[Matrix] = None

    def __post_init__(self):
        if (self.normals is None) == (self.generators is None):
            raise ConeSpecError("polyhedral cone needs exactly one of normals or generators")
        rows = self.normals if self.normals is not None else self.generators
        rows = _matrix(rows)
        label = "halfspace" if self.normals is not None else "generator"
        if not rows:
            raise ConeSpecError(f"polyhedral {label} list is empty")
        for index, row in enumerate(rows):
            if len(row) != self.m:
                raise DimensionError(f"{label} {index} has length {len(row)}, expected m={self.m}")
            if not np.any(to_float(row)):
                raise ConeSpecError(f"{label} {index} is the zero vector")
        object.__setattr__(self, 'normals' if self.normals is not None else 'generators', rows)

    @property
    def dim(self) -> int:
        return self.m

    @property
    def kind(self) -> str:
        return "polyhedral"

    @property
    def by_halfspaces(self) -> bool:
        return self.normals is not None

    def normal_matrix(self, exact: bool = False) -> np.ndarray:
        return as_array(self.normals, exact=exact)

    def generator_matrix(self) -> np.ndarray:
        """Generators as columns"""
        return to_float(self.generators).T


@dataclass(frozen=True)
class ProductCone(ConeSpec):
    """K = R^p x C"""
    p: int
    inner: ConeSpec

    def __post_init__(self):
        if self.p < 1:
            raise ConeSpecError(f"product block p must be positive, got {self.p}")
        if isinstance(self.inner, ProductCone):
            raise ConeSpecError("nested product cones are not supported")

    @property
    def q(self) -> int:
        return self.inner.dim

    @property
    def dim(self) -> int:
        return self.p + self.inner.dim

    @property
    def kind(self) -> str:
        return "product"


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Metric projection of a vector onto a cone"""
    point: np.ndarray
    distance: float
    active_set: Tuple[int, ...] = ()


# ---------------------------------------------------------- scalar functions

@dataclass(frozen=True)
class ScalarDescriptor:
    """Nondecreasing function R -> R from a closed grammar"""


@dataclass(frozen=True)
class AffineDescriptor(ScalarDescriptor):
    slope: Scalar
    intercept: Scalar = 0.0

    def __post_init__(self):
        if self.slope < 0:
            raise MapSpecError(f"affine slope must be nonnegative, got {self.slope}")


@dataclass(frozen=True)
class ExpDescriptor(ScalarDescriptor):
    """t -> scale * exp(rate * t)"""
    scale: Scalar = 1.0
    rate: Scalar = 1.0

    def __post_init__(self):
        if self.scale < 0 or self.rate < 0:
            raise MapSpecError(f"exp needs scale >= 0 and rate >= 0, got {self.scale}, {self.rate}")


@dataclass(frozen=True)
class ArctanDescriptor(ScalarDescriptor):
    """t -> scale * arctan(rate * t)"""
    scale: Scalar = 1.0
    rate: Scalar = 1.0

    def __post_init__(self):
        if self.scale < 0 or self.rate < 0:
            raise MapSpecError(f"arctan needs scale >= 0 and rate >= 0, got {self.scale}, {self.rate}")


@dataclass(frozen=True)
class PiecewiseLinearDescriptor(ScalarDescriptor):
    """Linear interpolation through (breakpoints, values), constant outside"""
    breakpoints: Vector
    values: Vector

    def __post_init__(self):
        object.__setattr__(self, 'breakpoints', _vector(self.breakpoints))
        object.__setattr__(self, 'values', _vector(self.values))
        if len(self.breakpoints) < 2 or len(self.breakpoints) != len(self.values):
            raise MapSpecError("piecewise-linear needs at least two matching breakpoints and values")
        if np.any(np.diff(to_float(self.breakpoints)) <= 0):
            raise MapSpecError("piecewise-linear breakpoints must be strictly increasing")
        if np.any(np.diff(to_float(self.values)) < 0):
            raise MapSpecError("piecewise-linear slopes must be nonnegative")


@dataclass(frozen=True)
class ComposedDescriptor(ScalarDescriptor):
    """t -> outer(inner(t))"""
    outer: ScalarDescriptor
    inner: ScalarDescriptor


@dataclass(frozen=True)
class MonotoneScalarFn:
    """Scalar function on R^p x R^q that is monotone for a cone order"""


@dataclass(frozen=True)
class LorentzAffine(MonotoneScalarFn):
    """(x, u) -> <d, x> + beta * ||u|| + gamma"""
    d: Vector
    beta: Scalar = 0.0
    gamma: Scalar = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'd', _vector(self.d))
        if not self.d:
            raise MapSpecError("LorentzAffine needs a nonempty d")


@dataclass(frozen=True)
class SeparableSimplicial(MonotoneScalarFn):
    """U lambda -> g_1(lambda_1) + ... + g_m(lambda_m) for the simplicial cone cone{U columns}"""
    U: Matrix
    g: Tuple[ScalarDescriptor, ...]

    def __post_init__(self):
        object.__setattr__(self, 'U', _matrix(self.U))
        object.__setattr__(self, 'g', tuple(self.g))
        m = len(self.U)
        if m == 0 or any(len(row) != m for row in self.U):
            raise MapSpecError("simplicial generator matrix must be square and nonempty")
        if len(self.g) != m:
            raise MapSpecError(f"need one descriptor per generator: {len(self.g)} given for m={m}")


@dataclass(frozen=True)
class Composed(MonotoneScalarFn):
    """psi(inner(z))"""
    inner: MonotoneScalarFn
    psi: ScalarDescriptor


# ---------------------------------------------------------------------- maps

@dataclass(frozen=True)
class CombinationTerm:
    fn: MonotoneScalarFn
    weight: Vector

    def __post_init__(self):
        object.__setattr__(self, 'weight', _vector(self.weight))


@dataclass(frozen=True)
class IsotoneCombination:
    """
    F(z) = f_1(z) w^1 + ... + f_l(z) w^l on R^p x R^q.

    The order cone is the extended Lorentz cone L(p, q) unless order_cone is set.
    """
    p: int
    q: int
    terms: Tuple[CombinationTerm, ...]
    order_cone: Optional[ConeSpec] = None

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(self.terms))
        if self.p < 1 or self.q < 1:
            raise DimensionError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if not self.terms:
            raise MapSpecError("combination needs at least one term")
        if self.order_cone is not None and self.order_cone.dim != self.p + self.q:
            raise DimensionError(f"order cone dimension {self.order_cone.dim} != p+q={self.p + self.q}")

    @property
    def dim(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class MapSpec:
    """Description of the mapping F = (G, H) of a complementarity problem"""


@dataclass(frozen=True)
class AffineMap(MapSpec):
    """F(z) = M z + b"""
    matrix: Matrix
    offset: Vector

    def __post_init__(self):
        object.__setattr__(self, 'matrix', _matrix(self.matrix))
        object.__setattr__(self, 'offset', _vector(self.offset))
        n = len(self.offset)
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise DimensionError(f"affine map needs an {n}x{n} matrix for an offset of length {n}")


@dataclass(frozen=True)
class CombinationMap(MapSpec):
    """F(z) = z - T(z), where T = I - F is the isotone combination"""
    combination: IsotoneCombination


@dataclass(frozen=True)
class BuiltinMap(MapSpec):
    builtin_id: str


# ------------------------------------------------------------------ problems

@dataclass(frozen=True)
class SolveOptions:
    """Stopping rules and diagnostics for the Picard iteration"""
    max_iter: int = field(default_factory=lambda: config.solver.MAX_ITER)
    tol_step: float = field(default_factory=lambda: config.solver.TOL_STEP)
    tol_residual: float = field(default_factory=lambda: config.solver.TOL_RESIDUAL)
    monotone_check: bool = field(default_factory=lambda: config.solver.MONOTONE_CHECK)
    trace: bool = False
    # None runs in float64; otherwise Decimal with this many significant digits
    exact_digits: Optional[int] = None
    order_eps: float = field(default_factory=lambda: config.tolerance.EPS)

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if not (self.tol_step > 0 and self.tol_residual > 0):
            raise ValueError("tolerances must be positive")
        if self.exact_digits is not None and self.exact_digits < 17:
            raise ValueError(f"exact_digits below double precision makes no sense: {self.exact_digits}")


@dataclass(frozen=True)
class Problem:
    """MiCP(G, H, C, p, q), equivalently NCP(F, R^p x C)"""
    name: str
    p: int
    q: int
    cone: ConeSpec
    map_spec: MapSpec
    options: Optional[SolveOptions] = None

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise DimensionError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if self.cone.dim != self.q:
            raise DimensionError(f"cone C has dimension {self.cone.dim} but q={self.q}")

    @property
    def K(self) -> ProductCone:
        return ProductCone(self.p, self.cone)

    @property
    def dim(self) -> int:
        return self.p + self.q


# ------------------------------------------------------------------- reports

@dataclass
class TraceRow:
    n: int
    z: np.ndarray
    residual: float
    step_norm: float


@dataclass
class SolveReport:
    """Outcome of a Picard run"""
    problem_name: str
    p: int
    q: int
    solution: np.ndarray
    residual: float
    iterations: int
    termination: str
    monotone_certificate: bool
    direction: str
    gamma_member: bool
    trace: List[TraceRow] = field(default_factory=list)
    exact_digits: Optional[int] = None

    RESIDUAL_TOL = "residual-tol"
    STEP_TOL = "step-tol"
    MAX_ITER = "max-iter"
    MONOTONICITY_VIOLATION = "monotonicity-violation"

    @property
    def converged(self) -> bool:
        return self.termination == self.RESIDUAL_TOL

    @property
    def x(self) -> np.ndarray:
        return self.solution[:self.p]

    @property
    def u(self) -> np.ndarray:
        return self.solution[self.p:]


@dataclass
class Witness:
    """A sampled ordered pair z1 <=_L z2 whose images are not ordered"""
    z1: np.ndarray
    z2: np.ndarray
    slack: float


@dataclass
class IsotonicityReport:
    samples: int
    seed: int
    violations: int = 0
    witnesses: List[Witness] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass
class StartCheck:
    """Whether z0 <=_L z1, plus the sufficient conditions z0 in K and -F(z0) in L"""
    ordered: bool
    z0_in_K: bool
    minus_F_in_L: bool
    slack: float
    z1: np.ndarray

    @property
    def sufficient(self) -> bool:
        return self.z0_in_K and self.minus_F_in_L


@dataclass
class SolutionCertificate:
    """Complementarity conditions at a candidate point"""
    G_inf_norm: float
    u_in_C: bool
    H_in_C_dual: bool
    complementarity_gap: float

    def holds(self, tol: float) -> bool:
        return (self.G_inf_norm <= tol and self.u_in_C and self.H_in_C_dual
                and self.complementarity_gap <= tol)


@dataclass
class PropertyResult:
    """One line of a verification suite"""
    name: str
    passed: bool
    detail: str = ""
    witnesses: List[str] = field(default_factory=list)
