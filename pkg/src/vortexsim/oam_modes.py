"""Laguerre-Gaussian mode evaluation at the beam waist.

Complex LG amplitudes carry the full orbital-angular-momentum structure of
the beam: a Gaussian envelope, a rho^|ell| core dark spot, an associated
Laguerre polynomial in the radial direction, and the helical phase factor
exp(i*ell*phi) whose winding number ell sets the angular momentum per
photon. Everything here is evaluated in the waist plane z = 0.

Grid sampling and plain-text/CSV export live here as well so mode fields
can be rendered and inspected without any plotting backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Cap on p + |ell| so every factorial prefactor is built from exact integers
# small enough to convert to float without surprises.
MAX_TOTAL_ORDER = 20


def assoc_laguerre(p: int, ell_abs: int, x):
    """Associated Laguerre polynomial L_p^{ell_abs} evaluated at x.

    The finite series is summed with coefficients formed in exact integer
    arithmetic (one float division per term), so results are exact up to
    final floating rounding. Accepts a scalar or an ndarray for x.
    """
    if p < 0 or ell_abs < 0:
        raise ValueError("indices p and ell_abs must be non-negative")
    # Horner evaluation from the highest-order coefficient down.
    coeffs = []
    for m in range(p + 1):
        num = math.factorial(ell_abs + p)
        den = math.factorial(p - m) * math.factorial(ell_abs + m) * math.factorial(m)
        coeffs.append((-1) ** m * (num / den))
    xs = np.asarray(x, dtype=float)
    val = np.full_like(xs, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        val = val * xs + c
    return float(val) if np.ndim(x) == 0 else val


@dataclass(frozen=True)
class LgModeSpec:
    """Radial index p, winding number ell (sign = handedness), waist w0 in m."""

    p: int
    ell: int
    w0: float

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("radial index p must be >= 0")
        if self.w0 <= 0:
            raise ValueError("beam waist w0 must be positive")
        if self.p + abs(self.ell) > MAX_TOTAL_ORDER:
            raise ValueError(f"p + |ell| must not exceed {MAX_TOTAL_ORDER}")


@dataclass(frozen=True)
class CylindricalPoint:
    """Waist-plane point; phi is wrapped into [0, 2pi) on construction."""

    rho: float
    phi: float
    z: float = 0.0

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("radial coordinate rho must be >= 0")
        wrapped = self.phi % TWO_PI
        if wrapped >= TWO_PI:  # guard the x % 2pi == 2pi rounding corner
            wrapped = 0.0
        object.__setattr__(self, "phi", wrapped)


def cylindrical_from_xy(x: float, y: float) -> CylindricalPoint:
    """Map Cartesian (x, y) in the waist plane to (rho, phi), atan2 branch."""
    return CylindricalPoint(rho=math.hypot(x, y), phi=math.atan2(y, x))


def lg_amplitude(spec: LgModeSpec, point: CylindricalPoint) -> complex:
    """Complex LG mode value at a waist-plane point.

    Includes the normalization prefactor sqrt(2 p!/(pi (|ell|+p)!))/w0, the
    (sqrt(2) rho/w0)^|ell| factor, the Laguerre polynomial in 2 rho^2/w0^2,
    the Gaussian envelope, and the phase exp(i ell phi). The mode is unit
    normalized under the transverse measure rho drho dphi.
    """
    a = abs(spec.ell)
    prefactor = (
        math.sqrt(2 * math.factorial(spec.p) / (math.pi * math.factorial(a + spec.p)))
        / spec.w0
    )
    u = math.sqrt(2.0) * point.rho / spec.w0
    radial = (
        u**a
        * assoc_laguerre(spec.p, a, 2.0 * point.rho**2 / spec.w0**2)
        * math.exp(-(point.rho**2) / spec.w0**2)
    )
    return prefactor * radial * complex(math.cos(spec.ell * point.phi),
                                        math.sin(spec.ell * point.phi))


def _lg_field_xy(spec: LgModeSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized waist-plane LG field on Cartesian coordinate arrays."""
    a = abs(spec.ell)
    rho2 = x * x + y * y
    phi = np.arctan2(y, x)
    prefactor = (
        math.sqrt(2 * math.factorial(spec.p) / (math.pi * math.factorial(a + spec.p)))
        / spec.w0
    )
    radial = (
        (np.sqrt(2.0 * rho2) / spec.w0) ** a
        * assoc_laguerre(spec.p, a, 2.0 * rho2 / spec.w0**2)
        * np.exp(-rho2 / spec.w0**2)
    )
    return prefactor * radial * np.exp(1j * spec.ell * phi)


@dataclass(frozen=True)
class FieldGrid:
    """Complex field sampled on a Cartesian grid.

    values[i, j] is the field at (x[j], y[i]): the first axis runs over y,
    the second over x, both ascending (row-major image convention). meta
    holds the parameter strings written as header lines on export.
    """

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)


def sample_mode_grid(spec: LgModeSpec, half_width: float, n: int) -> FieldGrid:
    """Sample an LG mode on an n x n grid over [-half_width, half_width]^2."""
    if n < 2:
        raise ValueError("grid size n must be >= 2")
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    axis = np.linspace(-half_width, half_width, n)
    xs, ys = np.meshgrid(axis, axis)  # row index -> y, column index -> x
    values = _lg_field_xy(spec, xs, ys)
    meta = {
        "mode": "laguerre_gaussian",
        "p": str(spec.p),
        "ell": str(spec.ell),
        "w0_m": format(spec.w0, ".16e"),
        "half_width_m": format(half_width, ".16e"),
        "n": str(n),
    }
    return FieldGrid(x=axis, y=axis, values=values, meta=meta)


def loop_phase_winding(values) -> float:
    """Total phase accumulated around a closed loop of complex samples.

    Successive phase differences are wrapped into (-pi, pi] and summed,
    including the closing step back to the first sample; the result is
    2*pi times the enclosed winding number when sampling is fine enough
    that no single step exceeds pi.
    """
    ph = np.angle(np.asarray(values))
    d = np.diff(np.concatenate([ph, ph[:1]]))
    d = d - TWO_PI * np.round(d / TWO_PI)
    return float(np.sum(d))


def _e17(v: float) -> str:
    return format(v, ".16e")


def _header_lines(grid: FieldGrid) -> list[str]:
    return [f"# {key} = {val}" for key, val in grid.meta.items()]


def write_grid_csv(grid: FieldGrid, path) -> None:
    """Write (x, y, Re, Im, |.|^2, arg) rows; header lines carry the meta."""
    lines = _header_lines(grid)
    lines.append("x,y,re,im,abs2,arg")
    for i in range(len(grid.y)):
        for j in range(len(grid.x)):
            v = grid.values[i, j]
            lines.append(
                ",".join(
                    (
                        _e17(grid.x[j]),
                        _e17(grid.y[i]),
                        _e17(v.real),
                        _e17(v.imag),
                        _e17(abs(v) ** 2),
                        _e17(float(np.angle(v))),
                    )
                )
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_grid_matrix(grid: FieldGrid, path, part: str = "abs2") -> None:
    """Write one component of the grid as a plain-text matrix.

    part selects re, im, abs2 or arg; rows follow ascending y, columns
    ascending x, matching FieldGrid's layout.
    """
    extract = {
        "re": lambda v: v.real,
        "im": lambda v: v.imag,
        "abs2": lambda v: np.abs(v) ** 2,
        "arg": lambda v: np.angle(v),
    }
    if part not in extract:
        raise ValueError(f"unknown grid component {part!r}")
    data = extract[part](grid.values)
    lines = _header_lines(grid)
    lines.append(f"# component = {part}")
    for i in range(data.shape[0]):
        lines.append(" ".join(_e17(float(v)) for v in data[i]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
