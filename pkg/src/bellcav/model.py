"""Physical model: parameters, bare operators, and the theta-dependent basis.

Two lambda atoms (levels |0>, |1>, |e>) share one lossy cavity mode
(truncated at one photon), giving an 18-dimensional product space with
flat index (a1*3 + a2)*2 + c.  The first laser drives atom 1 at Rabi
frequency Omega, the second drives atom 2 at f(theta)*Omega with the
same detuning; the cavity couples |1> <-> |e> on both atoms with
strength g.  Decay channels: cavity loss at kappa and spontaneous
emission of each atom into |0> and |1> at gamma/2 each (an unequal
split gamma0 + gamma1 = gamma is supported).

`build_basis_B` assembles the 12 single-excitation states adapted to
the generalised Bell pair

    |psi+> = cos(theta)|10> + sin(theta)|01>
    |psi-> = cos(theta)|01> - sin(theta)|10>

and `appendix_operators` writes every operator directly in that basis
from its closed trigonometric coefficients.  The two constructions are
redundant on purpose: `project_to_B(build_bare_operators(p))` must
agree entrywise with `appendix_operators(p)`, which the test suite and
the `validate` subcommand enforce at 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .exceptions import DimensionMismatchError, PoleError

__all__ = [
    "Modulation",
    "SystemParameters",
    "ScaledParameters",
    "OperatorSet",
    "BasisB",
    "f_value",
    "from_scaled",
    "build_bare_operators",
    "build_basis_B",
    "project_to_B",
    "project_operator_set",
    "appendix_operators",
    "computational_ket",
    "FULL_DIM",
    "BASIS_DIM",
    "GROUND_DIM",
    "BASIS_LABELS",
    "GROUND_LABELS",
]

FULL_DIM = 18       # (3 atom levels)^2 x (2 cavity levels)
BASIS_DIM = 12      # single-excitation subspace
GROUND_DIM = 4

# atom level indices
_A0, _A1, _AE = 0, 1, 2
# cavity occupation indices
_VAC, _PHOT = 0, 1

BASIS_LABELS = (
    "00", "psi+", "psi-", "11",
    "psi0+", "psi0-", "psi1+", "psi1-",
    "00c", "psic+", "psic-", "11c",
)
GROUND_LABELS = BASIS_LABELS[:GROUND_DIM]

# indices into the basis-B ordering
G00, GPLUS, GMINUS, G11 = 0, 1, 2, 3
A0P, A0M, A1P, A1M = 4, 5, 6, 7
C00, CP, CM, C11 = 8, 9, 10, 11


def _flat(a1: int, a2: int, c: int) -> int:
    return (a1 * 3 + a2) * 2 + c


def computational_ket(a1: int, a2: int, c: int) -> np.ndarray:
    """Unit vector of the product state |a1, a2, c> in the 18-dim space."""
    v = np.zeros(FULL_DIM, dtype=np.complex128)
    v[_flat(a1, a2, c)] = 1.0
    return v


@dataclass(frozen=True)
class Modulation:
    """Driving modulation f(theta) of the second atom's Rabi frequency.

    kind is one of "tan" (targets |psi+>), "negcot" (targets |psi->),
    or "fixed" (constant value, mainly for cross-checks).
    """

    kind: str
    value: float | None = None

    _KINDS = ("tan", "negcot", "fixed")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown modulation kind {self.kind!r}")
        if self.kind == "fixed":
            if self.value is None or not math.isfinite(self.value):
                raise ValueError("fixed modulation requires a finite value")
        elif self.value is not None:
            raise ValueError(f"{self.kind} modulation takes no value")

    @classmethod
    def tan(cls) -> "Modulation":
        return cls("tan")

    @classmethod
    def negcot(cls) -> "Modulation":
        return cls("negcot")

    @classmethod
    def fixed(cls, value: float) -> "Modulation":
        return cls("fixed", float(value))

    @classmethod
    def parse(cls, spec: str) -> "Modulation":
        """Parse CLI syntax: 'tan', 'negcot' or 'fixed:VALUE'."""
        if spec == "tan":
            return cls.tan()
        if spec == "negcot":
            return cls.negcot()
        if spec.startswith("fixed:"):
            return cls.fixed(float(spec.split(":", 1)[1]))
        raise ValueError(f"cannot parse modulation {spec!r}")

    @property
    def target_angle(self) -> float | None:
        """Angle of maximal long-time target population, when defined."""
        if self.kind == "tan":
            return math.pi
        if self.kind == "negcot":
            return math.pi / 2
        return None

    def __str__(self) -> str:
        return f"fixed:{self.value:g}" if self.kind == "fixed" else self.kind


def f_value(modulation: Modulation, theta: float, pole_tol: float = 1e-6) -> float:
    """Evaluate f(theta); raises PoleError within pole_tol of a pole."""
    if modulation.kind == "fixed":
        return float(modulation.value)
    if modulation.kind == "tan":
        if abs(math.remainder(theta - math.pi / 2, math.pi)) < pole_tol:
            raise PoleError(f"tan modulation: theta={theta:.6f} within {pole_tol} of a pole")
        return math.tan(theta)
    if abs(math.remainder(theta, math.pi)) < pole_tol:
        raise PoleError(f"negcot modulation: theta={theta:.6f} within {pole_tol} of a pole")
    return -math.cos(theta) / math.sin(theta)


@dataclass(frozen=True)
class SystemParameters:
    """Physical rates and detunings, all in units where hbar = 1.

    g      atom-cavity coupling (sets the time unit 1/g used throughout)
    delta  cavity detuning
    Delta  atomic detuning of the |0> <-> |e> driving
    kappa  cavity loss rate
    gamma  total spontaneous-emission rate out of |e>
    Omega  Rabi frequency of the first atom's laser
    theta  target-state angle
    gamma0/gamma1: optional unequal split of gamma into the |0> / |1>
    channels; defaults to gamma/2 each and must sum to gamma.
    """

    g: float
    delta: float
    Delta: float
    kappa: float
    gamma: float
    Omega: float
    theta: float
    modulation: Modulation
    gamma0: float | None = None
    gamma1: float | None = None

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("g must be positive")
        if self.kappa < 0 or self.gamma < 0 or self.Omega < 0:
            raise ValueError("kappa, gamma, Omega must be non-negative")
        if (self.gamma0 is None) != (self.gamma1 is None):
            raise ValueError("gamma0 and gamma1 must be given together")
        if self.gamma0 is not None:
            if self.gamma0 < 0 or self.gamma1 < 0:
                raise ValueError("gamma0, gamma1 must be non-negative")
            if abs(self.gamma0 + self.gamma1 - self.gamma) > 1e-12 * max(self.gamma, 1.0):
                raise ValueError("gamma0 + gamma1 must equal gamma")

    @property
    def gamma_to_0(self) -> float:
        """Decay rate |e> -> |0> per atom."""
        return self.gamma / 2 if self.gamma0 is None else self.gamma0

    @property
    def gamma_to_1(self) -> float:
        """Decay rate |e> -> |1> per atom."""
        return self.gamma / 2 if self.gamma1 is None else self.gamma1

    def f(self) -> float:
        return f_value(self.modulation, self.theta)

    def weak_driving_ok(self, margin: float = 0.2) -> bool:
        """True when the drive is weak enough to trust the reduced model.

        Gate: Omega * max(1, |f|) <= margin * min of the nonzero rates
        among (g, kappa, gamma).
        """
        try:
            f = abs(self.f())
        except PoleError:
            return False
        rates = [r for r in (self.g, self.kappa, self.gamma) if r > 0]
        return self.Omega * max(1.0, f) <= margin * min(rates) + 1e-15

    def asdict(self) -> dict:
        return {
            "g": self.g, "delta": self.delta, "Delta": self.Delta,
            "kappa": self.kappa, "gamma": self.gamma, "Omega": self.Omega,
            "theta": self.theta, "modulation": str(self.modulation),
            "gamma0": self.gamma_to_0, "gamma1": self.gamma_to_1,
        }


@dataclass(frozen=True)
class ScaledParameters:
    """Two-scale parametrisation: g = alpha*x, detunings O(g), rates O(x).

    The dimensionless tilde multipliers are all O(1); alpha ~ 10
    separates the coherent scale from the dissipative one.
    """

    alpha: float = 10.0
    x: float = 0.1
    tilde_delta: float = 0.5
    tilde_Delta: float = 2.0
    tilde_kappa: float = 1.0
    tilde_gamma: float = 0.5
    tilde_Omega: float = 0.1

    def __post_init__(self):
        if self.alpha <= 0 or self.x <= 0:
            raise ValueError("alpha and x must be positive")
        for name in ("tilde_delta", "tilde_Delta", "tilde_kappa",
                     "tilde_gamma", "tilde_Omega"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def asdict(self) -> dict:
        return {
            "alpha": self.alpha, "x": self.x,
            "tilde_delta": self.tilde_delta, "tilde_Delta": self.tilde_Delta,
            "tilde_kappa": self.tilde_kappa, "tilde_gamma": self.tilde_gamma,
            "tilde_Omega": self.tilde_Omega,
        }


def from_scaled(scaled: ScaledParameters, theta: float,
                modulation: Modulation) -> SystemParameters:
    """Resolve scaled parameters to absolute rates."""
    y = scaled.alpha * scaled.x
    return SystemParameters(
        g=y,
        delta=scaled.tilde_delta * y,
        Delta=scaled.tilde_Delta * y,
        kappa=scaled.tilde_kappa * scaled.x,
        gamma=scaled.tilde_gamma * scaled.x,
        Omega=scaled.tilde_Omega * scaled.x,
        theta=theta,
        modulation=modulation,
    )


@dataclass(eq=False)
class OperatorSet:
    """Hamiltonian terms and the five jump operators on one space.

    dim is 18 for the computational product basis, 12 for basis B.
    L = [cavity loss, atom1 -> |0>, atom2 -> |0>, atom1 -> |1>, atom2 -> |1>].
    """

    H_e: np.ndarray
    H_ac: np.ndarray
    W_plus: np.ndarray
    W_minus: np.ndarray
    L: list[np.ndarray]
    dim: int

    @property
    def hamiltonian(self) -> np.ndarray:
        """Full Hamiltonian H_g + H_e + W+ + W- (H_g = 0)."""
        return self.H_e + self.W_plus + self.W_minus


def _single_atom_ops() -> dict[str, np.ndarray]:
    ops = {}
    for name, (row, col) in {
        "e_from_0": (_AE, _A0), "e_from_1": (_AE, _A1),
        "0_from_e": (_A0, _AE), "1_from_e": (_A1, _AE),
    }.items():
        m = np.zeros((3, 3), dtype=np.complex128)
        m[row, col] = 1.0
        ops[name] = m
    ops["proj_e"] = np.diag([0.0, 0.0, 1.0]).astype(np.complex128)
    return ops


def _cavity_annihilator() -> np.ndarray:
    a = np.zeros((2, 2), dtype=np.complex128)
    a[_VAC, _PHOT] = 1.0
    return a


def build_bare_operators(params: SystemParameters) -> OperatorSet:
    """Operators on the full 18-dim space in the computational basis.

    The full space is kept (rather than truncating to the 12
    single-excitation states) so the simulator can measure the
    double-excitation leakage instead of assuming it away.
    """
    f = params.f()
    atom = _single_atom_ops()
    a = _cavity_annihilator()
    I3 = np.eye(3, dtype=np.complex128)
    I2 = np.eye(2, dtype=np.complex128)

    def k3(x, y, z):
        return linalg.tensor_product(linalg.tensor_product(x, y), z)

    proj_e = atom["proj_e"]
    n_phot = a.conj().T @ a

    raise_with_photon = k3(atom["e_from_1"], I3, a) + k3(I3, atom["e_from_1"], a)
    H_ac = params.g * (raise_with_photon + raise_with_photon.conj().T)
    H_e = (
        params.Delta * (k3(proj_e, I3, I2) + k3(I3, proj_e, I2))
        + params.delta * k3(I3, I3, n_phot)
        + H_ac
    )
    W_plus = (params.Omega / 2) * (
        k3(atom["e_from_0"], I3, I2) + f * k3(I3, atom["e_from_0"], I2)
    )

    sqrt_g0 = math.sqrt(params.gamma_to_0)
    sqrt_g1 = math.sqrt(params.gamma_to_1)
    L = [
        math.sqrt(params.kappa) * k3(I3, I3, a),
        sqrt_g0 * k3(atom["0_from_e"], I3, I2),
        sqrt_g0 * k3(I3, atom["0_from_e"], I2),
        sqrt_g1 * k3(atom["1_from_e"], I3, I2),
        sqrt_g1 * k3(I3, atom["1_from_e"], I2),
    ]
    return OperatorSet(H_e=H_e, H_ac=H_ac, W_plus=W_plus,
                       W_minus=W_plus.conj().T, L=L, dim=FULL_DIM)


@dataclass(eq=False)
class BasisB:
    """Isometry from the 12 single-excitation states into the product space.

    Columns follow BASIS_LABELS: the four ground states (atoms ground,
    cavity vacuum), the four single-atomic-excitation states, the four
    single-photon states.
    """

    theta: float
    isometry: np.ndarray                       # 18 x 12, V^dag V = I
    labels: tuple[str, ...] = field(default=BASIS_LABELS)


def build_basis_B(theta: float) -> BasisB:
    c, s = math.cos(theta), math.sin(theta)
    ket = computational_ket

    def pair_plus(x1, x2, cav):
        # cos * (first slot excited-ish) + sin * (second slot)
        return c * ket(x1, x2, cav) + s * ket(x2, x1, cav)

    def pair_minus(x1, x2, cav):
        return c * ket(x2, x1, cav) - s * ket(x1, x2, cav)

    cols = [
        ket(_A0, _A0, _VAC),
        pair_plus(_A1, _A0, _VAC),      # |psi+> = c|10> + s|01>
        pair_minus(_A1, _A0, _VAC),     # |psi-> = c|01> - s|10>
        ket(_A1, _A1, _VAC),
        pair_plus(_AE, _A0, _VAC),      # |psi0+> = c|e0> + s|0e>
        pair_minus(_AE, _A0, _VAC),
        pair_plus(_AE, _A1, _VAC),      # |psi1+> = c|e1> + s|1e>
        pair_minus(_AE, _A1, _VAC),
        ket(_A0, _A0, _PHOT),
        pair_plus(_A1, _A0, _PHOT),
        pair_minus(_A1, _A0, _PHOT),
        ket(_A1, _A1, _PHOT),
    ]
    return BasisB(theta=theta, isometry=np.column_stack(cols))


def project_to_B(op: np.ndarray, basis: BasisB) -> np.ndarray:
    """Compress an 18-dim operator to the 12-dim basis B: V^dag op V."""
    op = linalg.as_square(op)
    if op.shape[0] != FULL_DIM:
        raise DimensionMismatchError(
            f"expected a {FULL_DIM}-dim operator, got {op.shape[0]}"
        )
    V = basis.isometry
    return V.conj().T @ op @ V


def project_operator_set(ops: OperatorSet, basis: BasisB) -> OperatorSet:
    """Project a full-space OperatorSet into basis B."""
    if ops.dim != FULL_DIM:
        raise DimensionMismatchError("operator set is not on the full space")
    proj = lambda m: project_to_B(m, basis)
    return OperatorSet(
        H_e=proj(ops.H_e), H_ac=proj(ops.H_ac),
        W_plus=proj(ops.W_plus), W_minus=proj(ops.W_minus),
        L=[proj(m) for m in ops.L], dim=BASIS_DIM,
    )


def appendix_operators(params: SystemParameters) -> OperatorSet:
    """Operators written directly in basis B from their closed coefficients.

    Must agree entrywise with project_to_B(build_bare_operators(params));
    that redundancy is the module's central cross-check.
    """
    f = params.f()
    c, s = math.cos(params.theta), math.sin(params.theta)
    g, delta, Delta, kappa = params.g, params.delta, params.Delta, params.kappa
    sq0, sq1 = math.sqrt(params.gamma_to_0), math.sqrt(params.gamma_to_1)

    def zeros():
        return np.zeros((BASIS_DIM, BASIS_DIM), dtype=np.complex128)

    H_ac = zeros()
    H_ac[CP, A0P] = g
    H_ac[CM, A0M] = g
    H_ac[C11, A1P] = g * (c + s)
    H_ac[C11, A1M] = g * (c - s)
    H_ac = H_ac + H_ac.conj().T

    H_e = zeros()
    for i in (A0P, A0M, A1P, A1M):
        H_e[i, i] = Delta
    for i in (C00, CP, CM, C11):
        H_e[i, i] = delta
    H_e = H_e + H_ac

    half = params.Omega / 2
    W_plus = zeros()
    W_plus[A0P, G00] = half * (c + f * s)
    W_plus[A0M, G00] = half * (f * c - s)
    W_plus[A1P, GMINUS] = half * (c * c - f * s * s)
    W_plus[A1P, GPLUS] = half * (1 + f) * c * s
    W_plus[A1M, GMINUS] = -half * (1 + f) * c * s
    W_plus[A1M, GPLUS] = half * (f * c * c - s * s)

    L1 = zeros()
    for ground, cav in ((G00, C00), (GPLUS, CP), (GMINUS, CM), (G11, C11)):
        L1[ground, cav] = math.sqrt(kappa)

    L2 = zeros()
    L2[G00, A0P] = sq0 * c
    L2[G00, A0M] = -sq0 * s
    L2[GMINUS, A1P] = sq0 * c * c
    L2[GPLUS, A1P] = sq0 * c * s
    L2[GMINUS, A1M] = -sq0 * c * s
    L2[GPLUS, A1M] = -sq0 * s * s

    L3 = zeros()
    L3[G00, A0P] = sq0 * s
    L3[G00, A0M] = sq0 * c
    L3[GMINUS, A1P] = -sq0 * s * s
    L3[GPLUS, A1P] = sq0 * c * s
    L3[GMINUS, A1M] = -sq0 * c * s
    L3[GPLUS, A1M] = sq0 * c * c

    L4 = zeros()
    L4[G11, A1P] = sq1 * c
    L4[G11, A1M] = -sq1 * s
    L4[GMINUS, A0P] = -sq1 * c * s
    L4[GPLUS, A0P] = sq1 * c * c
    L4[GMINUS, A0M] = sq1 * s * s
    L4[GPLUS, A0M] = -sq1 * c * s

    L5 = zeros()
    L5[G11, A1P] = sq1 * s
    L5[G11, A1M] = sq1 * c
    L5[GMINUS, A0P] = sq1 * c * s
    L5[GPLUS, A0P] = sq1 * s * s
    L5[GMINUS, A0M] = sq1 * c * c
    L5[GPLUS, A0M] = sq1 * c * s

    return OperatorSet(H_e=H_e, H_ac=H_ac, W_plus=W_plus,
                       W_minus=W_plus.conj().T, L=[L1, L2, L3, L4, L5],
                       dim=BASIS_DIM)


def scaled_replace(scaled: ScaledParameters, **kwargs) -> ScaledParameters:
    """dataclasses.replace that keeps the frozen invariants checked."""
    return replace(scaled, **kwargs)
