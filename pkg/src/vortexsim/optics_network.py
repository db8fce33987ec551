"""Two-path interferometer algebra over winding-number amplitude maps.

States are maps from the integer winding number ell to a complex amplitude,
carried on two spatial ports. Network elements (beam splitters, dove
prisms, arm phases, mirrors) act as unitaries on this space, and the
composed Mach-Zehnder-type network turns a single input charge |ell> into
the two-port output whose retained, renormalized port is the superposition
t|ell> + r|-ell>.

Sign conventions: a splitter with amplitudes (r, t) applies the 2x2 matrix
with r on the diagonal and i*t off-diagonal. The dove prism sits in the
reflected arm (port 1) and the adjustable phase in the transmitted arm
(port 2); mirrors are identities on ell, their bookkeeping being absorbed
into the arm phases. These choices are fixed by requiring the phi = pi
output stated above, not by any particular hardware layout.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Dict

UNITARITY_TOL = 1e-9
ZERO_NORM_TOL = 1e-30


@dataclass(frozen=True)
class OamSuperposition:
    """Finite map winding number -> complex amplitude; treat as immutable."""

    amplitudes: Dict[int, complex]

    @classmethod
    def single(cls, ell: int, amp: complex = 1.0 + 0j) -> "OamSuperposition":
        return cls({ell: complex(amp)})

    @classmethod
    def empty(cls) -> "OamSuperposition":
        return cls({})

    def amplitude(self, ell: int) -> complex:
        return self.amplitudes.get(ell, 0j)

    def norm_sq(self) -> float:
        return sum(abs(c) ** 2 for c in self.amplitudes.values())

    def scaled(self, factor: complex) -> "OamSuperposition":
        return OamSuperposition({l: factor * c for l, c in self.amplitudes.items()})


@dataclass(frozen=True)
class PathOamState:
    """One superposition per spatial port of the two-path network."""

    port1: OamSuperposition
    port2: OamSuperposition

    def total_norm_sq(self) -> float:
        return self.port1.norm_sq() + self.port2.norm_sq()

    def port(self, port: int) -> OamSuperposition:
        _check_port(port)
        return self.port1 if port == 1 else self.port2


@dataclass(frozen=True)
class SplitterSpec:
    """Reflection and transmission amplitudes of a lossless splitter.

    The induced matrix [[r, it], [it, r]] is unitary exactly when
    |r|^2 + |t|^2 = 1 and r and t share a common phase (Im(t conj(r)) = 0);
    both conditions are enforced here so every splitter conserves norm.
    """

    r: complex
    t: complex

    def __post_init__(self):
        dev = abs(abs(self.r) ** 2 + abs(self.t) ** 2 - 1.0)
        if dev > UNITARITY_TOL:
            raise ValueError(
                f"splitter is not unitary: |r|^2 + |t|^2 deviates from 1 by {dev:.3e}"
            )
        skew = abs((complex(self.t) * complex(self.r).conjugate()).imag)
        if skew > UNITARITY_TOL:
            raise ValueError(
                "splitter is not unitary: r and t must share a common phase "
                f"(Im(t conj(r)) = {skew:.3e})"
            )

    @classmethod
    def fifty_fifty(cls) -> "SplitterSpec":
        s = 1.0 / math.sqrt(2.0)
        return cls(r=s, t=s)

    @classmethod
    def from_transmittance(cls, t_sq: float) -> "SplitterSpec":
        """Real-amplitude splitter with |t|^2 = t_sq."""
        if not 0.0 <= t_sq <= 1.0:
            raise ValueError("transmittance must lie in [0, 1]")
        return cls(r=math.sqrt(1.0 - t_sq), t=math.sqrt(t_sq))


def _check_port(port: int) -> None:
    if port not in (1, 2):
        raise ValueError("port must be 1 or 2")


def apply_beam_splitter(state: PathOamState, spec: SplitterSpec) -> PathOamState:
    """Mix the two ports with r on the diagonal and i*t off-diagonal.

    The same unitary acts on every winding-number component, so the total
    two-port norm is conserved.
    """
    it = 1j * spec.t
    keys = set(state.port1.amplitudes) | set(state.port2.amplitudes)
    new1 = {}
    new2 = {}
    for l in keys:
        a1 = state.port1.amplitude(l)
        a2 = state.port2.amplitude(l)
        new1[l] = spec.r * a1 + it * a2
        new2[l] = it * a1 + spec.r * a2
    return PathOamState(OamSuperposition(new1), OamSuperposition(new2))


def apply_dove_prism(state: PathOamState, port: int) -> PathOamState:
    """Flip the winding-number sign (ell -> -ell) in the chosen port."""
    _check_port(port)
    flipped = OamSuperposition(
        {-l: c for l, c in state.port(port).amplitudes.items()}
    )
    if port == 1:
        return PathOamState(flipped, state.port2)
    return PathOamState(state.port1, flipped)


def apply_phase(state: PathOamState, port: int, phi: float) -> PathOamState:
    """Multiply every amplitude in the chosen port by exp(i*phi)."""
    _check_port(port)
    shifted = state.port(port).scaled(cmath.exp(1j * phi))
    if port == 1:
        return PathOamState(shifted, state.port2)
    return PathOamState(state.port1, shifted)


def apply_mirror(state: PathOamState, port: int) -> PathOamState:
    """Perfect mirror, modeled as the identity on the winding space.

    Any handedness or sign bookkeeping a physical mirror would add is
    absorbed into the arm-phase convention of the composed network.
    """
    _check_port(port)
    return state


def mach_zehnder(ell: int, spec: SplitterSpec, phi: float = math.pi) -> PathOamState:
    """Run |ell> through the two-path network: splitter (r, t), dove prism
    in the reflected arm, phase phi in the transmitted arm, mirrors, and a
    final 50:50 splitter.

    With phi = pi the result is (1/sqrt2)(t|ell> + r|-ell>) on port 1 and
    (i/sqrt2)(r|-ell> - t|ell>) on port 2.
    """
    if ell == 0:
        raise ValueError("ell must be nonzero to form a counter-rotating pair")
    state = PathOamState(OamSuperposition.single(ell), OamSuperposition.empty())
    state = apply_beam_splitter(state, spec)
    state = apply_dove_prism(state, port=1)
    state = apply_phase(state, port=2, phi=phi)
    state = apply_mirror(state, port=1)
    state = apply_mirror(state, port=2)
    state = apply_beam_splitter(state, SplitterSpec.fifty_fifty())
    return state


def post_selection_probability(state: PathOamState, port: int) -> float:
    """Squared norm of the chosen port before renormalization."""
    return state.port(port).norm_sq()


def renormalize_port(state: PathOamState, port: int) -> OamSuperposition:
    """Project onto one port and rescale its superposition to unit norm."""
    sup = state.port(port)
    n2 = sup.norm_sq()
    if n2 <= ZERO_NORM_TOL:
        raise ValueError(
            f"port {port} has vanishing post-selection probability ({n2:.3e})"
        )
    return sup.scaled(1.0 / math.sqrt(n2))


# --- structured network description -------------------------------------

def apply_element(state: PathOamState, element: dict) -> PathOamState:
    """Apply one element described as {"element": name, ...parameters}."""
    kind = element.get("element")
    if kind == "splitter":
        return apply_beam_splitter(
            state, SplitterSpec(r=_as_complex(element["r"]), t=_as_complex(element["t"]))
        )
    if kind == "dove":
        return apply_dove_prism(state, port=int(element["port"]))
    if kind == "phase":
        return apply_phase(state, port=int(element["port"]), phi=float(element["phi"]))
    if kind == "mirror":
        return apply_mirror(state, port=int(element["port"]))
    raise ValueError(f"unknown network element {kind!r}")


def run_network(state: PathOamState, elements: list) -> PathOamState:
    for element in elements:
        state = apply_element(state, element)
    return state


def load_network(path) -> list:
    """Read an element list from a JSON file (a list of element dicts)."""
    with open(path, "r", encoding="utf-8") as fh:
        elements = json.load(fh)
    if not isinstance(elements, list):
        raise ValueError("network description must be a JSON list of elements")
    return elements


def _as_complex(v) -> complex:
    """Accept a real number or an [re, im] pair from config files."""
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(float(re), float(im))
    return complex(float(v), 0.0)


def write_superposition_csv(sup: OamSuperposition, path) -> None:
    """Write (ell, Re, Im) rows sorted by winding number."""
    lines = ["ell,re,im"]
    for l in sorted(sup.amplitudes):
        c = sup.amplitudes[l]
        lines.append(f"{l},{format(c.real, '.16e')},{format(c.imag, '.16e')}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
