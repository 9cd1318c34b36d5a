"""Reduced ionic cell models: reaction pair (I_ion, g).

Four two-variable models: FitzHugh-Nagumo (fhn), Roger-McCulloch (rm),
Aliev-Panfilov (ap) and Mitchell-Schaeffer (ms).  All evaluators work
elementwise on scalars or numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

MODEL_NAMES = ("fhn", "rm", "ap", "ms")


class SingularDenominator(ZeroDivisionError):
    """Aliev-Panfilov epsilon' blows up when v + mu2 ~ 0."""


@dataclass(frozen=True)
class ApParams:
    # Standard literature values; all overridable from the run config.
    k: float = 8.0
    a: float = 0.15
    eps0: float = 0.002
    mu1: float = 0.2
    mu2: float = 0.3


@dataclass(frozen=True)
class MsParams:
    tau_in: float = 0.3
    tau_out: float = 6.0
    tau_open: float = 120.0
    tau_close: float = 150.0
    u_gate: float = 0.13


def eval_fhn(v, w):
    """i_ion = v(v-0.1)(1-v) - w,  g = v - 2w."""
    return v * (v - 0.1) * (1 - v) - w, v - 2 * w


def eval_rm(v, w):
    """i_ion = v(v-0.1)(1-v) - v*w,  g = v - 2w."""
    return v * (v - 0.1) * (1 - v) - v * w, v - 2 * w


def eval_ap(v, w, p: ApParams = ApParams()):
    """i_ion = -k v(v-a)(v-1) - v*w,  g = eps'(v,w) * (-k v(v-1-a) - w).

    eps'(v, w) = eps0 + mu1 w / (v + mu2).

    Raises:
        SingularDenominator: if |v + mu2| < 1e-12 anywhere.
    """
    denom = v + p.mu2
    if np.any(np.abs(denom) < 1e-12):
        raise SingularDenominator(f"v + mu2 vanishes (mu2={p.mu2})")
    eps = p.eps0 + p.mu1 * w / denom
    i_ion = -p.k * v * (v - p.a) * (v - 1) - v * w
    g = eps * (-p.k * v * (v - 1 - p.a) - w)
    return i_ion, g


def eval_ms(v, w, p: MsParams = MsParams()):
    """i_ion = -(w/tau_in) v^2 (v-1) - v/tau_out.

    g switches at the gate: (1-w)/tau_open for v <= u_gate, else -w/tau_close.
    """
    i_ion = -(w / p.tau_in) * v * v * (v - 1) - v / p.tau_out
    g = np.where(v <= p.u_gate, (1 - w) / p.tau_open, -w / p.tau_close)
    if np.isscalar(v) or np.ndim(v) == 0:
        g = float(g)
    return i_ion, g


@dataclass(frozen=True)
class IonicModel:
    """Named reaction pair with its parameter record.

    Calling the model with nodal vectors (v, w) returns (i_ion, g).
    """

    kind: str
    params: ApParams | MsParams | None = None

    def __call__(self, v, w):
        if self.kind == "fhn":
            return eval_fhn(v, w)
        if self.kind == "rm":
            return eval_rm(v, w)
        if self.kind == "ap":
            return eval_ap(v, w, self.params)
        return eval_ms(v, w, self.params)


def make_model(name: str, **overrides) -> IonicModel:
    """Build an IonicModel by short name, with optional parameter overrides.

    fhn and rm have no parameters; ap takes ApParams fields, ms MsParams
    fields.  Unknown names or parameters raise ValueError.
    """
    name = name.lower()
    if name not in MODEL_NAMES:
        raise ValueError(f"unknown ionic model {name!r}; valid: {', '.join(MODEL_NAMES)}")
    if name in ("fhn", "rm"):
        if overrides:
            raise ValueError(f"model {name!r} has no tunable parameters")
        return IonicModel(name)
    params = ApParams() if name == "ap" else MsParams()
    valid = {f.name for f in fields(params)}
    unknown = set(overrides) - valid
    if unknown:
        raise ValueError(
            f"unknown parameter(s) {sorted(unknown)} for model {name!r}; valid: {sorted(valid)}"
        )
    return IonicModel(name, replace(params, **overrides))
