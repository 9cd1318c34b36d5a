"""Time integration of the monodomain system.

Linearized backward-Euler Galerkin scheme: diffusion is implicit, the
reaction pair is evaluated at the previous time level, so each step is one
SPD solve with the fixed operator S = M + k A.  The gating update reduces
to a nodal ODE because the consistent mass matrix appears on both sides
and cancels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .assembly import (
    IDENTITY_DIFFUSION,
    DiffusionTensor,
    assemble_mass,
    assemble_stiffness,
    interpolate_nodal,
)
from .mesh import TriMesh
from .sparse import DEFAULT_CG_TOL, CsrMatrix, add_scaled, cg_solve, spmv


class InvalidConfig(ValueError):
    pass


class NonFiniteState(RuntimeError):
    """A step produced non-finite nodal values."""


@dataclass(frozen=True)
class SolverState:
    v: np.ndarray  # nodal action potential
    w: np.ndarray  # nodal gating variable
    t: float
    n: int


@dataclass(frozen=True)
class SolverConfig:
    """Run configuration for a single monodomain solve.

    ``v0`` and ``w0`` are functions of (x, y) or scalar constants.
    ``i_app`` and ``w_source`` are space-time callables (x, y, t) -> value;
    w_source is only nonzero in manufactured-solution runs.
    """

    k: float
    t_final: float
    ionic: Callable  # (v, w) -> (i_ion, g)
    diffusion: DiffusionTensor = IDENTITY_DIFFUSION
    v0: object = 0.0
    w0: object = 0.0
    i_app: Callable | None = None
    w_source: Callable | None = None
    cg_rel_tol: float = DEFAULT_CG_TOL
    cg_max_iter: int | None = None

    def n_steps(self) -> int:
        if self.k <= 0 or self.t_final <= 0:
            raise InvalidConfig(f"need k > 0 and t_final > 0, got k={self.k}, T={self.t_final}")
        ratio = self.t_final / self.k
        if abs(ratio - round(ratio)) > 1e-9:
            raise InvalidConfig(f"t_final={self.t_final} is not an integer multiple of k={self.k}")
        return int(round(ratio))


class MonodomainSolver:
    """Holds the assembled system and the discrete trajectory for one run."""

    def __init__(self, mesh: TriMesh, cfg: SolverConfig):
        cfg.n_steps()  # validate k, T
        self.mesh = mesh
        self.cfg = cfg
        self.mass = assemble_mass(mesh)
        self.stiffness = assemble_stiffness(mesh, cfg.diffusion)
        self.system = add_scaled(self.mass, self.stiffness, cfg.k)  # M + k A
        v = interpolate_nodal(mesh, cfg.v0)
        w = interpolate_nodal(mesh, cfg.w0)
        self.state = SolverState(v=v, w=w, t=0.0, n=0)
        self._x = mesh.nodes[:, 0]
        self._y = mesh.nodes[:, 1]

    def step(self) -> SolverState:
        """Advance one time level; returns the new state."""
        cfg, s = self.cfg, self.state
        k = cfg.k
        i_ion, g = cfg.ionic(s.v, s.w)
        f = np.asarray(i_ion, dtype=float)
        g = np.broadcast_to(np.asarray(g, dtype=float), s.w.shape)
        if cfg.i_app is not None:
            f = f + cfg.i_app(self._x, self._y, s.t)
        if cfg.w_source is not None:
            g = g + cfg.w_source(self._x, self._y, s.t)
        rhs = spmv(self.mass, s.v + k * f)
        v_new, _ = cg_solve(
            self.system, rhs, x0=s.v, rel_tol=cfg.cg_rel_tol, max_iter=cfg.cg_max_iter
        )
        w_new = s.w + k * g
        if not (np.all(np.isfinite(v_new)) and np.all(np.isfinite(w_new))):
            raise NonFiniteState(f"non-finite nodal values after step {s.n + 1} (t={s.t + k})")
        self.state = SolverState(v=v_new, w=w_new, t=(s.n + 1) * k, n=s.n + 1)
        return self.state

    def run(self, dump: Callable[[SolverState], None] | None = None) -> SolverState:
        """Apply exactly t_final / k steps; optional per-step state callback."""
        for _ in range(self.cfg.n_steps()):
            state = self.step()
            if dump is not None:
                dump(state)
        return self.state


def init(mesh: TriMesh, cfg: SolverConfig) -> tuple[SolverState, tuple[CsrMatrix, CsrMatrix]]:
    """Initial state plus the assembled (M, M + kA) pair."""
    solver = MonodomainSolver(mesh, cfg)
    return solver.state, (solver.mass, solver.system)


def run(mesh: TriMesh, cfg: SolverConfig) -> SolverState:
    """Convenience wrapper: build a solver and integrate to t_final."""
    return MonodomainSolver(mesh, cfg).run()


def state_to_text(state: SolverState) -> str:
    """Debug dump: node-ordered v values then w values, one per line."""
    lines = [f"# t={state.t:.17g} n={state.n}"]
    lines += [f"v {val:.17g}" for val in state.v]
    lines += [f"w {val:.17g}" for val in state.w]
    return "\n".join(lines) + "\n"
