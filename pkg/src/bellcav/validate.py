"""Aggregated cross-checks between the independent construction routes.

Everything this package computes twice (or three times) is compared
here: bare-operator projection against direct basis-B coefficients,
LU against Schur-complement against closed-form inversion, numerically
derived against closed-form effective operators, plus the structural
facts the protocol relies on (selection-rule zeros, dark states,
integrator agreement, trace/positivity gates).

`bellcav validate` prints one line per check and exits nonzero when
any residual exceeds its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, effective, linalg, model, protocol
from .model import Modulation, SystemParameters

__all__ = ["CheckResult", "run_all", "random_parameters", "caption_parameters"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (f"{status}  {self.name:<34s} residual {self.residual:.3e} "
                f"(tol {self.tolerance:.1e})")
        return text + (f"  {self.detail}" if self.detail else "")


def caption_parameters(theta: float = math.pi,
                       modulation: Modulation | None = None) -> SystemParameters:
    """The default operating point: C = 200, weak driving, dd~ = 1."""
    return model.from_scaled(model.ScaledParameters(), theta,
                             modulation or Modulation.tan())


def random_parameters(rng: np.random.Generator,
                      modulation: Modulation | None = None) -> SystemParameters:
    """A well-conditioned random draw (propagators kept away from zero)."""
    while True:
        if modulation is None:
            mod = rng.choice(["tan", "negcot", "fixed"])
            m = (Modulation.fixed(rng.uniform(-1.5, 1.5)) if mod == "fixed"
                 else Modulation(str(mod)))
        else:
            m = modulation
        g = rng.uniform(0.5, 2.0)
        try:
            p = SystemParameters(
                g=g,
                delta=rng.uniform(-1.0, 1.0) * g,
                Delta=rng.uniform(0.5, 3.0) * g,
                kappa=rng.uniform(0.01, 0.5),
                gamma=rng.uniform(0.01, 0.5),
                Omega=rng.uniform(0.001, 0.05),
                theta=rng.uniform(0.0, 2.0 * math.pi),
                modulation=m,
            )
            p.f()
            scalars = effective.propagator_scalars(p)
        except Exception:
            continue
        if min(abs(scalars.d[n]) for n in (0, 1, 2)) > 1e-3 * g * g:
            return p


def _entrywise_rel(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.abs(a).max()), float(np.abs(b).max()), 1e-300)
    return float(np.abs(a - b).max()) / scale


def _generator_scale(H: np.ndarray, Ls: list[np.ndarray]) -> float:
    return linalg.frobenius(H) + sum(linalg.frobenius(L) ** 2 for L in Ls)


def check_scalar_identity(n_draws: int = 1000, seed: int = 11) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        p = random_parameters(rng)
        sc = effective.propagator_scalars(p)
        dg = p.Delta - 0.5j * p.gamma
        for n in (0, 1, 2):
            worst = max(worst, abs(-4 * sc.d[n] - sc.d_tilde[n]) / abs(sc.d_tilde[n]))
            worst = max(worst, abs(sc.R[n] - dg / sc.d[n]) / abs(sc.R[n]))
    return CheckResult("scalar-identity", worst <= 1e-12, worst, 1e-12,
                       f"{n_draws} draws")


def check_appendix_equivalence(n_draws: int = 50, seed: int = 13) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        p = random_parameters(rng)
        direct = model.appendix_operators(p)
        projected = model.project_operator_set(
            model.build_bare_operators(p), model.build_basis_B(p.theta))
        for name in ("H_e", "H_ac", "W_plus", "W_minus"):
            worst = max(worst, _entrywise_rel(getattr(direct, name),
                                              getattr(projected, name)))
        for a, b in zip(direct.L, projected.L):
            worst = max(worst, _entrywise_rel(a, b))
    return CheckResult("appendix-A-equivalence", worst <= 1e-12, worst, 1e-12,
                       f"{n_draws} draws")


def check_block_inversion(n_draws: int = 50, seed: int = 17) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_resid = worst_blocks = worst_sym = 0.0
    for _ in range(n_draws):
        p = random_parameters(rng)
        h = effective.build_H_NH(p)
        blocks = effective.banachiewicz_invert(h)
        closed = effective.closed_form_blocks(p)
        assembled = blocks.assembled()
        scale = 1.0 / abs(effective.propagator_scalars(p).d[1])
        worst_resid = max(worst_resid, linalg.frobenius(
            h @ assembled - np.eye(effective.EXCITED_DIM)))
        worst_blocks = max(worst_blocks, float(
            np.abs(assembled - closed.assembled()).max()) / scale)
        worst_sym = max(worst_sym, float(
            np.abs(blocks.C_hat - blocks.B_hat.T).max()) / scale)
    passed = worst_resid <= 1e-12 and worst_blocks <= 1e-10 and worst_sym <= 1e-12
    return CheckResult(
        "block-inversion-three-way", passed, max(worst_resid, worst_blocks),
        1e-10, f"residual {worst_resid:.1e}, C=B^T {worst_sym:.1e}")


def check_closed_lindblads(n_draws: int = 50, seed: int = 19) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        p = random_parameters(rng)
        derived = effective.derive_effective_model(p)
        closed = effective.closed_form_effective(p)
        for a, b in zip(closed, derived.L_eff):
            worst = max(worst, _entrywise_rel(a, b))
    return CheckResult("closed-form-Leff-vs-numeric", worst <= 1e-10, worst,
                       1e-10, f"{n_draws} draws")


def _theta_grid(modulation: Modulation, n: int = 201,
                window: float = 0.02) -> np.ndarray:
    grid = np.linspace(0.0, 2.0 * math.pi, n)
    if modulation.kind == "tan":
        poles = (math.pi / 2, 3 * math.pi / 2)
    elif modulation.kind == "negcot":
        poles = (0.0, math.pi, 2.0 * math.pi)
    else:
        poles = ()
    keep = np.ones(n, dtype=bool)
    for pole in poles:
        keep &= np.abs(grid - pole) > window
    return grid[keep]


def check_selection_rules(seed: int = 23) -> CheckResult:
    worst = 0.0
    worst_col = 0.0
    for mod, blocked in ((Modulation.tan(), model.GMINUS),
                         (Modulation.negcot(), model.GPLUS)):
        for theta in _theta_grid(mod):
            p = caption_parameters(theta, mod)
            Ls = effective.closed_form_effective(p)
            scale = max(float(np.abs(Ls[0]).max()), 1e-300)
            worst = max(worst, abs(Ls[0][blocked, model.G00]) / scale)
            m = effective.derive_effective_model(p)
            for L in list(Ls) + m.L_eff:
                worst_col = max(worst_col, float(np.abs(L[:, model.G11]).max()))
    passed = worst <= 1e-14 and worst_col == 0.0
    return CheckResult("selection-rule-zeros", passed, worst, 1e-14,
                       f"|11> column max {worst_col:.1e} (must be exactly 0)")


def check_dark_states() -> list[CheckResult]:
    results = []

    # full model: both atoms flipped, cavity empty, any parameters
    p = caption_parameters(theta=2.0, modulation=Modulation.tan())
    ops = model.build_bare_operators(p)
    rho = np.outer(model.computational_ket(1, 1, 0),
                   model.computational_ket(1, 1, 0).conj())
    resid = linalg.frobenius(dynamics.lindblad_rhs(ops.hamiltonian, ops.L, rho))
    scale = _generator_scale(ops.hamiltonian, ops.L)
    results.append(CheckResult("dark-state-full-11",
                               resid <= 1e-14 * scale, resid, 1e-14 * scale))

    # reduced model: |11><11| for any parameters
    m = effective.derive_effective_model(p)
    rho4 = np.zeros((4, 4), dtype=np.complex128)
    rho4[model.G11, model.G11] = 1.0
    resid = linalg.frobenius(dynamics.lindblad_rhs(m.H_eff, m.L_eff, rho4))
    scale = _generator_scale(m.H_eff, m.L_eff)
    results.append(CheckResult("dark-state-effective-11",
                               resid <= 1e-14 * scale, resid, 1e-14 * scale))

    # reduced model at the tan operating point: the target itself is dark
    p = caption_parameters(theta=math.pi, modulation=Modulation.tan())
    m = effective.derive_effective_model(p)
    rho4 = np.zeros((4, 4), dtype=np.complex128)
    rho4[model.GPLUS, model.GPLUS] = 1.0
    resid = linalg.frobenius(dynamics.lindblad_rhs(m.H_eff, m.L_eff, rho4))
    scale = _generator_scale(m.H_eff, m.L_eff)
    results.append(CheckResult("dark-state-target-at-optimum",
                               resid <= 1e-14 * scale, resid, 1e-14 * scale))
    return results


def check_integrator_agreement() -> CheckResult:
    p = caption_parameters()
    ops = model.build_bare_operators(p)
    rho0 = np.outer(model.computational_ket(0, 0, 0),
                    model.computational_ket(0, 0, 0).conj())
    H = ops.hamiltonian
    prop = dynamics.evolve(H, ops.L, rho0, dynamics.IntegratorConfig(
        method="prop", dt=1.0, t_final=100.0), theta=p.theta)
    rk4 = dynamics.evolve(H, ops.L, rho0, dynamics.IntegratorConfig(
        method="rk4", dt=0.005, t_final=100.0, output_stride=200), theta=p.theta)
    assert np.allclose(prop.times, rk4.times)
    worst = 0.0
    for name in ("p00", "p_plus", "p_minus", "p11"):
        worst = max(worst, float(np.abs(getattr(prop, name) - getattr(rk4, name)).max()))
    return CheckResult("rk4-vs-propagator-T100", worst <= 1e-8, worst, 1e-8)


def check_trace_positivity() -> CheckResult:
    p = caption_parameters()
    m = effective.derive_effective_model(p)
    rho0 = np.zeros((4, 4), dtype=np.complex128)
    rho0[model.G00, model.G00] = 1.0
    traj = dynamics.evolve(m.H_eff, m.L_eff, rho0, dynamics.IntegratorConfig(
        method="prop", dt=1.0, t_final=50000.0, output_stride=25), theta=p.theta)
    trace_worst = float(traj.trace_dev.max())
    eig_worst = float(traj.min_eig.min())
    passed = trace_worst <= 1e-9 and eig_worst >= -1e-8
    return CheckResult("trace-positivity-T50000", passed, trace_worst, 1e-9,
                       f"min eigenvalue {eig_worst:.2e} (gate -1e-8)")


def check_in_out_dominance() -> CheckResult:
    """At the optimum the in-amplitude beats every out-amplitude."""
    worst_margin = math.inf
    for mod, target in ((Modulation.tan(), model.GPLUS),
                        (Modulation.negcot(), model.GMINUS)):
        p = caption_parameters(mod.target_angle, mod)
        L1 = effective.closed_form_effective(p)[0]
        inflow = abs(L1[target, model.G00])
        outflow = float(np.abs(L1[:, target]).max())
        worst_margin = min(worst_margin, inflow - outflow)
    return CheckResult("in-vs-out-dominance", worst_margin > 0, -worst_margin,
                       0.0, "inflow must exceed outflow at the optimum")


def propagator_ratio() -> float:
    """|d~_2 / d~_1| at the default operating point."""
    sc = effective.propagator_scalars(caption_parameters())
    return abs(sc.d_tilde[2]) / abs(sc.d_tilde[1])


def run_all() -> list[CheckResult]:
    results = [
        check_scalar_identity(),
        check_appendix_equivalence(),
        check_block_inversion(),
        check_closed_lindblads(),
        check_selection_rules(),
        *check_dark_states(),
        check_integrator_agreement(),
        check_trace_positivity(),
        check_in_out_dominance(),
    ]
    return results
