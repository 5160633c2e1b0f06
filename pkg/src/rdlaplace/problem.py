"""Problem data for u_t - a^2 u_xx + b u = f with Robin ends.

A boundary condition reads ``alpha * u + beta * u_x = g(t)`` at its end.
Unbounded ends are encoded as ``l1 = -inf`` / ``l2 = inf`` with the matching
boundary condition set to ``None``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SpecError
from .functions import SourceFunction, SpaceFunction, TimeFunction

BETA_ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class BoundaryCondition:
    """``alpha * u + beta * u_x = g(t)``."""

    alpha: float
    beta: float
    g: TimeFunction = field(default_factory=TimeFunction.zero)

    @classmethod
    def dirichlet(cls, g: TimeFunction | float = 0.0, alpha: float = 1.0):
        return cls(alpha, 0.0, _as_time_function(g))

    @classmethod
    def neumann(cls, g: TimeFunction | float = 0.0, beta: float = 1.0):
        return cls(0.0, beta, _as_time_function(g))

    @classmethod
    def robin(cls, alpha: float, beta: float, g: TimeFunction | float = 0.0):
        return cls(alpha, beta, _as_time_function(g))

    @property
    def degenerate(self) -> bool:
        return not (self.alpha * self.alpha + self.beta * self.beta > 1e-300)

    @property
    def beta_is_zero(self) -> bool:
        return beta_is_zero(self.alpha, self.beta)

    def scaled(self, c: float) -> BoundaryCondition:
        g = self.g
        return BoundaryCondition(
            c * self.alpha, c * self.beta,
            TimeFunction(lambda t: c * g.value(t), lambda t: c * g.derivative(t),
                         None if g.laplace is None else (lambda p: c * g.laplace(p)),
                         g.is_zero),
        )


def _as_time_function(g) -> TimeFunction:
    if isinstance(g, TimeFunction):
        return g
    return TimeFunction.constant(float(g))


def beta_is_zero(alpha: float, beta: float, rtol: float = BETA_ZERO_RTOL) -> bool:
    """Relative zero test used to pick a Dirichlet or Robin expansion."""
    return abs(beta) <= rtol * max(abs(alpha), abs(beta))


class CaseKind(enum.Enum):
    ROBIN_ROBIN = "RobinRobin"
    ROBIN_DIRICHLET = "RobinDirichlet"
    DIRICHLET_ROBIN = "DirichletRobin"
    DIRICHLET_DIRICHLET = "DirichletDirichlet"


@dataclass(frozen=True)
class ProblemSpec:
    """Full initial-boundary-value problem on [l1, l2] x [0, T]."""

    a: float
    b: float
    l1: float
    l2: float
    T: float
    phi: SpaceFunction = field(default_factory=SpaceFunction.zero)
    f: SourceFunction = field(default_factory=SourceFunction.zero)
    bc1: BoundaryCondition | None = None
    bc2: BoundaryCondition | None = None
    name: str = "custom"

    @property
    def length(self) -> float:
        return self.l2 - self.l1

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.l1) and math.isfinite(self.l2)

    def end_position(self, end) -> float:
        return self.l1 if _end_index(end) == 1 else self.l2

    def bc(self, end) -> BoundaryCondition:
        bc = self.bc1 if _end_index(end) == 1 else self.bc2
        if bc is None:
            raise SpecError(f"no boundary condition at {end}")
        return bc

    def end_frame(self, end) -> tuple[float, int]:
        """(origin, direction) mapping the distance d from ``end`` into the domain."""
        return (self.l1, 1) if _end_index(end) == 1 else (self.l2, -1)


def _end_index(end) -> int:
    if end in (1, "l1", "left"):
        return 1
    if end in (2, "l2", "right"):
        return 2
    raise ValueError(f"end must be 'l1' or 'l2', got {end!r}")


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(spec: ProblemSpec) -> ValidationReport:
    """Collect invariant violations; never raises."""
    rep = ValidationReport()
    if not (spec.a > 0 and math.isfinite(spec.a)):
        rep.violations.append("diffusion coefficient a must be positive")
    if not (spec.b >= 0 and math.isfinite(spec.b)):
        rep.violations.append("reaction rate b must be nonnegative")
    if not spec.l1 < spec.l2:
        rep.violations.append("empty interval")
    if not spec.T > 0:
        rep.violations.append("horizon T must be positive")
    for idx, pos, bc in ((1, spec.l1, spec.bc1), (2, spec.l2, spec.bc2)):
        if math.isfinite(pos):
            if bc is None:
                rep.violations.append(f"bc{idx} missing at finite end")
            elif bc.degenerate:
                rep.violations.append(f"bc{idx} degenerate")
        elif bc is not None:
            rep.violations.append(f"bc{idx} given at an infinite end")
    for b in spec.phi.breakpoints:
        if not spec.l1 <= b <= spec.l2:
            rep.warnings.append(f"phi breakpoint {b} outside [l1, l2]")
    # with alpha >= 0, outward flux requires beta1 <= 0 and beta2 >= 0
    if spec.bc1 is not None and not spec.bc1.degenerate and spec.bc1.alpha * spec.bc1.beta > 0:
        rep.warnings.append("bc1 is anti-dissipative (alpha1*beta1 > 0); det(S) may vanish")
    if spec.bc2 is not None and not spec.bc2.degenerate and spec.bc2.alpha * spec.bc2.beta < 0:
        rep.warnings.append("bc2 is anti-dissipative (alpha2*beta2 < 0); det(S) may vanish")
    return rep


def require_valid(spec: ProblemSpec) -> None:
    rep = validate(spec)
    if not rep.ok:
        raise SpecError("; ".join(rep.violations))


def classify_case(spec: ProblemSpec) -> CaseKind:
    d1 = spec.bc(1).beta_is_zero
    d2 = spec.bc(2).beta_is_zero
    if d1 and d2:
        return CaseKind.DIRICHLET_DIRICHLET
    if d1:
        return CaseKind.DIRICHLET_ROBIN
    if d2:
        return CaseKind.ROBIN_DIRICHLET
    return CaseKind.ROBIN_ROBIN


# ---------------------------------------------------------------- JSON loading

SCHEMA_VERSION = 1


def _num(v) -> float:
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s in ("-inf", "-infinity"):
            return -math.inf
    return float(v)


def space_function_from_json(obj) -> SpaceFunction:
    if obj is None:
        return SpaceFunction.zero()
    if isinstance(obj, (int, float)):
        return SpaceFunction.constant(float(obj))
    kind = obj.get("type")
    if kind == "constant":
        return SpaceFunction.constant(float(obj["value"]))
    if kind == "polynomial":
        return SpaceFunction.polynomial(obj["coeffs"])
    if kind == "piecewise_linear":
        return SpaceFunction.piecewise_linear(obj["points"])
    if kind == "piecewise_polynomial":
        return SpaceFunction.piecewise_polynomial(obj["breaks"], obj["coeffs"], obj.get("origins"))
    raise SpecError(f"unknown space function type {kind!r}")


def time_function_from_json(obj) -> TimeFunction:
    if obj is None:
        return TimeFunction.zero()
    if isinstance(obj, (int, float)):
        return TimeFunction.constant(float(obj))
    kind = obj.get("type")
    if kind == "constant":
        return TimeFunction.constant(float(obj["value"]))
    if kind == "polynomial":
        return TimeFunction.polynomial(obj["coeffs"])
    raise SpecError(f"unknown time function type {kind!r}")


def source_function_from_json(obj) -> SourceFunction:
    if obj is None:
        return SourceFunction.zero()
    if isinstance(obj, (int, float)):
        return SourceFunction.constant(float(obj))
    kind = obj.get("type")
    if kind == "constant":
        return SourceFunction.constant(float(obj["value"]))
    if kind == "polynomial":
        return SourceFunction.polynomial(obj["coeffs"])
    raise SpecError(f"unknown source function type {kind!r}")


def _bc_from_json(obj) -> BoundaryCondition | None:
    if obj is None:
        return None
    return BoundaryCondition(float(obj["alpha"]), float(obj["beta"]),
                             time_function_from_json(obj.get("g")))


def spec_from_dict(doc: dict) -> ProblemSpec:
    """Build a spec from a ``schema: 1`` document.

    >>> spec_from_dict({"schema": 1, "a": 1, "b": 0, "l1": 0, "l2": 1, "T": 1,
    ...                 "bc1": {"alpha": 1, "beta": 0}, "bc2": {"alpha": 1, "beta": 0}}).l2
    1.0
    """
    if doc.get("schema") != SCHEMA_VERSION:
        raise SpecError(f"unsupported schema {doc.get('schema')!r}; expected {SCHEMA_VERSION}")
    try:
        spec = ProblemSpec(
            a=_num(doc["a"]), b=_num(doc.get("b", 0.0)),
            l1=_num(doc["l1"]), l2=_num(doc["l2"]), T=_num(doc.get("T", 1.0)),
            phi=space_function_from_json(doc.get("phi")),
            f=source_function_from_json(doc.get("f")),
            bc1=_bc_from_json(doc.get("bc1")), bc2=_bc_from_json(doc.get("bc2")),
            name=str(doc.get("name", "custom")),
        )
    except KeyError as exc:
        raise SpecError(f"missing field {exc.args[0]!r}") from None
    return spec


def load_spec(path: str | Path) -> ProblemSpec:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))
