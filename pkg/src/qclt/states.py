"""Named-state registry used by the experiment drivers.

Recognised identifiers::

    vacuum, fock<k>            number states (fock1 = |1><1|)
    plus03                     (|0> + |3>)/sqrt(2)
    thermal:<N>                thermal state with mean photon number N
    squeezed:<eta>             centred Gaussian with gamma = diag(eta, 1/eta)
    superpos:n1=a1,n2=a2+i b2  normalized Fock superposition
    cauchy, heavy_tail         states without finite second moments
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .charfun import (
    CharFunction,
    cauchy_counterexample_charfun,
    charfun_gaussian,
    charfun_of_density,
    heavy_tail_charfun,
)
from .fock import (
    FockDensityMatrix,
    GaussianSpec,
    gaussification,
    mean_and_second_moments,
    number_state,
    superposition_state,
    thermal_state,
)

__all__ = ["NamedState", "resolve_state", "parse_amplitude"]


@dataclass
class NamedState:
    name: str
    chi: CharFunction
    rho: FockDensityMatrix | None = None
    gauss: GaussianSpec | None = None
    energy: float | None = None

    @property
    def finite_moments(self) -> bool:
        return self.gauss is not None


_AMP = re.compile(
    r"^(?P<re>[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?"
    r"(?:(?P<sign>[+-]?)i(?P<im>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?))?$"
)


def parse_amplitude(text: str) -> complex:
    """Parse ``a``, ``a+i b``, ``a-i b`` or ``i b`` into a complex number."""
    s = text.replace(" ", "")
    m = _AMP.match(s)
    if not s or m is None or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"cannot parse amplitude {text!r}")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im_part = 0.0
    if m.group("im") is not None:
        im_part = float(m.group("im")) * (-1.0 if m.group("sign") == "-" else 1.0)
    return complex(re_part, im_part)


def _from_density(name: str, rho: FockDensityMatrix) -> NamedState:
    rep = mean_and_second_moments(rho)
    gauss = gaussification(rho) if abs(rep.mean) <= 1e-9 else None
    return NamedState(name, charfun_of_density(rho), rho, gauss, rep.nbar + 0.5)


def resolve_state(state_id: str, dim: int = 64) -> NamedState:
    sid = state_id.strip()
    if sid == "vacuum":
        return _from_density(sid, number_state(0, dim))
    m = re.fullmatch(r"fock(\d+)", sid)
    if m:
        return _from_density(sid, number_state(int(m.group(1)), dim))
    if sid == "plus03":
        return _from_density(sid, superposition_state([(0, 1.0), (3, 1.0)], dim))
    if sid.startswith("thermal:"):
        N = float(sid.split(":", 1)[1])
        spec = GaussianSpec.thermal(N)
        return NamedState(sid, charfun_gaussian(spec), thermal_state(N, dim), spec, N + 0.5)
    if sid.startswith("squeezed:"):
        eta = float(sid.split(":", 1)[1])
        if eta <= 0:
            raise ValueError("squeezing parameter must be positive")
        spec = GaussianSpec(np.diag([eta, 1.0 / eta]))
        return NamedState(sid, charfun_gaussian(spec), None, spec, spec.energy)
    if sid.startswith("superpos:"):
        terms = []
        for part in sid.split(":", 1)[1].split(","):
            n, _, amp = part.partition("=")
            terms.append((int(n), parse_amplitude(amp) if amp else 1.0))
        return _from_density(sid, superposition_state(terms, dim))
    if sid == "cauchy":
        return NamedState(sid, cauchy_counterexample_charfun())
    if sid == "heavy_tail":
        return NamedState(sid, heavy_tail_charfun())
    raise ValueError(f"unknown state identifier {state_id!r}")
