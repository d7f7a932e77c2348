"""
Closed-form geometry used as oracles and as analytic initial data.

Every formula is written once as a sympy expression and lambdified to
numpy. The profiles double as analytic parametrizations for
compute_geometry and as far-field data for the graphical flow.
"""

import numpy as np
import sympy as sp
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

from geometry.representation import AnalyticParametrization

R = sp.Symbol('r', nonnegative=True)
U = sp.Symbol('u', positive=True)


def _vectorize(fn: Callable, variable: np.ndarray) -> np.ndarray:
    """Evaluate a lambdified expression and broadcast constants to the grid."""
    variable = np.asarray(variable, dtype=float)
    with np.errstate(all='ignore'):
        value = fn(variable)
    return np.asarray(value, dtype=float) + np.zeros_like(variable)


@dataclass(frozen=True)
class ProfileFunction:
    """A radial profile z = f(r) with its first two derivatives."""
    name: str
    expression: sp.Expr
    _value: Callable
    _first: Callable
    _second: Callable

    @classmethod
    def from_expression(cls, name: str, expression: sp.Expr) -> 'ProfileFunction':
        first = sp.diff(expression, R)
        second = sp.diff(first, R)
        return cls(
            name=name,
            expression=expression,
            _value=sp.lambdify(R, expression, modules='numpy'),
            _first=sp.lambdify(R, first, modules='numpy'),
            _second=sp.lambdify(R, second, modules='numpy'),
        )

    def value(self, r: np.ndarray) -> np.ndarray:
        return _vectorize(self._value, r)

    def first(self, r: np.ndarray) -> np.ndarray:
        return _vectorize(self._first, r)

    def second(self, r: np.ndarray) -> np.ndarray:
        return _vectorize(self._second, r)

    def nodes(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.column_stack([r, self.value(r)])

    def parametrization(self, r: np.ndarray) -> AnalyticParametrization:
        """Exact derivatives of sigma -> (sigma, f(sigma))."""
        r = np.asarray(r, dtype=float)
        return AnalyticParametrization(
            sigma=r,
            first=lambda s: np.column_stack([np.ones_like(s), self.first(s)]),
            second=lambda s: np.column_stack([np.zeros_like(s), self.second(s)]),
            label=self.name,
        )


def even_quartic_cap(expression: sp.Expr, join: float = 1.0) -> sp.Expr:
    """
    Smooth cap on [0, join] for a profile defined beyond `join`.

    The cap is the quintic Hermite interpolant matching value, first and
    second derivative at r = join whose odd coefficients vanish, which
    leaves the even quartic c0 + c2 r^2 + c4 r^4; its even extension
    through the axis is smooth.
    """
    c0, c2, c4 = sp.symbols('c0 c2 c4')
    cap = c0 + c2 * R ** 2 + c4 * R ** 4
    join = sp.nsimplify(join)
    equations = [
        sp.Eq(sp.diff(cap, R, k).subs(R, join), sp.diff(expression, R, k).subs(R, join))
        for k in range(3)
    ]
    solution = sp.solve(equations, [c0, c2, c4], dict=True)[0]
    return sp.simplify(cap.subs(solution))


def capped_profile(name: str, outer: sp.Expr, join: float = 1.0) -> Tuple[ProfileFunction, sp.Expr]:
    """Piecewise profile: even quartic cap inside `join`, `outer` beyond."""
    cap = even_quartic_cap(outer, join)
    expression = sp.Piecewise((cap, R <= join), (outer, True))
    return ProfileFunction.from_expression(name, expression), cap


def sinlog_outer(slope: float = 0.0) -> sp.Expr:
    """r sin(log r) + slope * r."""
    return R * sp.sin(sp.log(R)) + sp.nsimplify(slope) * R


def hyperboloid_profile(a: float, c: float) -> ProfileFunction:
    """Upper sheet of the two-sheeted hyperboloid as a graph z = c sqrt(1 + r^2/a^2)."""
    a, c = sp.nsimplify(a), sp.nsimplify(c)
    return ProfileFunction.from_expression(f"hyperboloid(a={a},c={c})", c * sp.sqrt(1 + R ** 2 / a ** 2))


def revolution_forms(profile: ProfileFunction, dimension: int = 2) -> Dict[str, Callable[[np.ndarray], np.ndarray]]:
    """
    Fundamental forms, mean curvature and <x0, nu> of the hypersurface of
    revolution generated by z = f(r), with the downward normal
    nu = (f' e_r, -1) / sqrt(1 + f'^2).

    For dimension 2: g = (1+f'^2) dr^2 + r^2 dtheta^2,
    h = f''/W dr^2 + r f'/W dtheta^2, H = [f'(1+f'^2) + r f''] / (r W^3),
    <x0, nu> = (r f' - f) / W.
    """
    f = profile.expression
    fp = sp.diff(f, R)
    fpp = sp.diff(fp, R)
    w = sp.sqrt(1 + fp ** 2)
    forms = {
        'g_rr': 1 + fp ** 2,
        'g_thth': R ** 2,
        'h_rr': fpp / w,
        'h_thth': R * fp / w,
        'mean_curvature': fpp / w ** 3 + (dimension - 1) * fp / (R * w),
        'normal_part': (R * fp - f) / w,
    }
    return {key: (lambda values, fn=sp.lambdify(R, expr, modules='numpy'): _vectorize(fn, values))
            for key, expr in forms.items()}


@dataclass(frozen=True)
class HyperboloidSheet:
    """x0(u, v) = (a sqrt(u^2-1) cos v, a sqrt(u^2-1) sin v, c u), u > 1."""
    a: float
    c: float

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0:
            raise ValueError(f"Hyperboloid needs a, c > 0, got a={self.a}, c={self.c}")

    def _expressions(self) -> Dict[str, sp.Expr]:
        a, c = sp.nsimplify(self.a), sp.nsimplify(self.c)
        d = (a ** 2 + c ** 2) * U ** 2 - c ** 2
        return {
            'r': a * sp.sqrt(U ** 2 - 1),
            'z': c * U,
            'normal_r': c * sp.sqrt(U ** 2 - 1) / sp.sqrt(d),
            'normal_z': -a * U / sp.sqrt(d),
            'mean_curvature': c * (c ** 2 * (U ** 2 - 1) + a ** 2 * (U ** 2 + 1)) / (a * d ** sp.Rational(3, 2)),
            'normal_part': -a * c / sp.sqrt(d),
        }

    def evaluate(self, u: np.ndarray) -> Dict[str, np.ndarray]:
        """Closed forms at parameter values u."""
        return {key: _vectorize(sp.lambdify(U, expr, modules='numpy'), u)
                for key, expr in self._expressions().items()}

    def nodes(self, u: np.ndarray) -> np.ndarray:
        values = self.evaluate(u)
        return np.column_stack([values['r'], values['z']])

    def parametrization(self, u: np.ndarray) -> AnalyticParametrization:
        expr = self._expressions()
        first = [sp.lambdify(U, sp.diff(expr[k], U), modules='numpy') for k in ('r', 'z')]
        second = [sp.lambdify(U, sp.diff(expr[k], U, 2), modules='numpy') for k in ('r', 'z')]
        return AnalyticParametrization(
            sigma=np.asarray(u, dtype=float),
            first=lambda s: np.column_stack([_vectorize(fn, s) for fn in first]),
            second=lambda s: np.column_stack([_vectorize(fn, s) for fn in second]),
            label=f"hyperboloid_sheet(a={self.a},c={self.c})",
        )


def shrinking_sphere_radius(t: np.ndarray, r0: float = 1.0, dimension: int = 1) -> np.ndarray:
    """R(t) = sqrt(R0^2 - 2 n t) under MCF."""
    return np.sqrt(r0 ** 2 - 2.0 * dimension * np.asarray(t, dtype=float))


def rescaled_circle_radius(s: np.ndarray, r0: float = 1.0) -> np.ndarray:
    """Circle radius under the normalized drifting flow: R^2 = (R0^2 + 1) e^{-2s} - 1."""
    return np.sqrt((r0 ** 2 + 1.0) * np.exp(-2.0 * np.asarray(s, dtype=float)) - 1.0)


def circle_density_log_rate(t: np.ndarray, r0: float = 1.0) -> np.ndarray:
    """
    d/dt log(rho R) on the centered shrinking circle, n = 1.

    Equals -(1/R + R/(2t+1))^2 = -2/(2t+1) - R^2/(2t+1)^2 - 1/R^2.
    """
    t = np.asarray(t, dtype=float)
    radius_sq = r0 ** 2 - 2.0 * t
    stretch = 2.0 * t + 1.0
    return -2.0 / stretch - radius_sq / stretch ** 2 - 1.0 / radius_sq


def rescaled_circle_log_rate(s: np.ndarray, r0: float = 1.0) -> np.ndarray:
    """d/ds log(rho~ R~) on the rescaled circle: -(1/R~ + R~)^2."""
    radius = rescaled_circle_radius(s, r0)
    return -(1.0 / radius + radius) ** 2
