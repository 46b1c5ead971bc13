"""Analytic effective theory for the photon-mediated pair-excitation models.

Covers the dispersive detunings, the third-order pair-coupling strengths,
second-order frequency renormalizations, the generator of the decoupling
transformation, and its mechanical commutator expansion.  Each route is
cross-validated against the others in the test suite.

Supported families:
  "lambda"  three-level (g,e,i; couplings gi, ei) + two-level atom
  "vee"     three-level (ancilla i at zero; couplings ie, ig) + two-level atom
  "circuit" two identical-topology all-transition three-level atoms

Sign convention: the scalar coupling formulas below return the textbook
arrangement (positive at typical red-detuned operating points).  The
mechanical commutator expansion yields the pair-creation term with the
opposite overall sign; Hamiltonian builders therefore attach -chi to
a sigma1+ sigma2+, which is what fixes the phase of the entangled state
produced by the classical-pump protocol.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, SimError, SingularDetuningError
from .model import (
    TWO_PI,
    AtomSpec,
    SystemSpec,
    atom_dim,
    bare_index,
    build_static_hamiltonian,
    dim_signature,
    level_frequency,
)
from .operators import DimSignature, OperatorMatrix, destroy, embed, transition

# g/|Delta| at or above this is reported as outside the dispersive regime
DISPERSIVE_WARN_RATIO = 0.3


@dataclass(frozen=True)
class Detunings:
    """Dispersive detunings (GHz) with the coupling ratios that go with them."""

    values: dict = field(default_factory=dict)   # name -> GHz
    ratios: dict = field(default_factory=dict)   # name -> g/|Delta|

    @property
    def dispersive(self) -> bool:
        return all(r < 1.0 for r in self.ratios.values())

    def warn_if_nondispersive(self):
        bad = {k: r for k, r in self.ratios.items() if r >= DISPERSIVE_WARN_RATIO}
        if bad:
            warnings.warn(
                f"coupling/detuning ratios outside the dispersive regime: {bad}",
                stacklevel=3,
            )

    def __getattr__(self, name):
        values = object.__getattribute__(self, "values")
        if name in values:
            return values[name]
        raise AttributeError(name)


def _require_nonzero(dets: Detunings, names):
    for name in names:
        if dets.values.get(name, 0.0) == 0.0:
            raise SingularDetuningError(f"detuning {name} is zero")


def family_of(spec: SystemSpec) -> str:
    kinds = tuple(a.kind for a in spec.atoms)
    if kinds == ("lambda", "two_level"):
        return "lambda"
    if kinds == ("vee", "two_level"):
        return "vee"
    if kinds == ("delta", "delta"):
        return "circuit"
    raise ConfigError(f"unsupported model family for atom kinds {kinds}")


# -- detunings ----------------------------------------------------------


def detunings_lambda(spec: SystemSpec) -> Detunings:
    wc = spec.cavity.frequency
    atom1, atom2 = spec.atoms[0], spec.atoms[1]
    wi = level_frequency(atom1, "i")
    we = level_frequency(atom1, "e")
    w2 = level_frequency(atom2, "e")
    values = {"delta_p": wi - wc, "delta_s": wi - we - wc, "delta_2": w2 - wc}
    ratios = _ratio(atom1.couplings.get("gi", 0.0), values["delta_p"], "gi")
    ratios |= _ratio(atom1.couplings.get("ei", 0.0), values["delta_s"], "ei")
    ratios |= _ratio(atom2.couplings.get("ge", 0.0), values["delta_2"], "ge")
    for drv in atom1.drives:
        if drv.transition == "gi":
            values["delta_d"] = wi - drv.frequency
            ratios |= _ratio(drv.amplitude, values["delta_d"], "drive_gi")
        elif drv.transition == "ei":
            values["delta_d_prime"] = wi - we - drv.frequency
            ratios |= _ratio(drv.amplitude, values["delta_d_prime"], "drive_ei")
    return Detunings(values, ratios)


def detunings_vee(spec: SystemSpec) -> Detunings:
    wc = spec.cavity.frequency
    atom1, atom2 = spec.atoms[0], spec.atoms[1]
    wg = level_frequency(atom1, "g")
    we = level_frequency(atom1, "e")
    w2 = level_frequency(atom2, "e")
    values = {"delta_p": we - wc, "delta_s": wg - wc, "delta_2": w2 - wc}
    ratios = _ratio(atom1.couplings.get("ie", 0.0), values["delta_p"], "ie")
    ratios |= _ratio(atom1.couplings.get("ig", 0.0), values["delta_s"], "ig")
    ratios |= _ratio(atom2.couplings.get("ge", 0.0), values["delta_2"], "ge")
    return Detunings(values, ratios)


def detunings_circuit(spec: SystemSpec) -> Detunings:
    wc = spec.cavity.frequency
    values, ratios = {}, {}
    for q, atom in enumerate(spec.atoms, start=1):
        we = level_frequency(atom, "e")
        wi = level_frequency(atom, "i")
        values[f"delta_p{q}"] = wi - wc
        values[f"delta_s{q}"] = wi - we - wc
        values[f"delta_2{q}"] = we - wc
        ratios |= _ratio(atom.couplings.get("gi", 0.0), values[f"delta_p{q}"], f"gi{q}")
        ratios |= _ratio(atom.couplings.get("ei", 0.0), values[f"delta_s{q}"], f"ei{q}")
        ratios |= _ratio(atom.couplings.get("ge", 0.0), values[f"delta_2{q}"], f"ge{q}")
    return Detunings(values, ratios)


def detunings_of(spec: SystemSpec) -> Detunings:
    fam = family_of(spec)
    if fam == "lambda":
        return detunings_lambda(spec)
    if fam == "vee":
        return detunings_vee(spec)
    return detunings_circuit(spec)


def _ratio(g: float, delta: float, name: str) -> dict:
    if g == 0.0:
        return {}
    if delta == 0.0:
        return {name: float("inf")}
    return {name: abs(g) / abs(delta)}


# -- third-order pair couplings ------------------------------------------


def _chi_pair(g_pump, g_stokes, g_partner, d_pump, d_stokes, d_partner) -> float:
    """Two-path third-order coupling through one pump leg.

    (gs*g2/3)(1/Ds + 1/D2)(gp/Dp) + (gp*gs/3)(1/Dp + 1/Ds)(g2/D2)
    """
    first = (g_stokes * g_partner / 3.0) * (1.0 / d_stokes + 1.0 / d_partner) * (g_pump / d_pump)
    second = (g_pump * g_stokes / 3.0) * (1.0 / d_pump + 1.0 / d_stokes) * (g_partner / d_partner)
    return first + second


def chi_lambda(g_p: float, g_s: float, g_2: float, dets: Detunings) -> float:
    """Pair-excitation strength (GHz) for the three-level + two-level model."""
    _require_nonzero(dets, ("delta_p", "delta_s", "delta_2"))
    dets.warn_if_nondispersive()
    return _chi_pair(g_p, g_s, g_2, dets.delta_p, dets.delta_s, dets.delta_2)


def chi_vee(g_p: float, g_s: float, g_2: float, dets: Detunings) -> float:
    """Same two-path sum with the inverted-topology detuning definitions."""
    _require_nonzero(dets, ("delta_p", "delta_s", "delta_2"))
    dets.warn_if_nondispersive()
    first = (g_s * g_p / 3.0) * (1.0 / dets.delta_p + 1.0 / dets.delta_s) * (g_2 / dets.delta_2)
    second = (g_s * g_2 / 3.0) * (1.0 / dets.delta_s + 1.0 / dets.delta_2) * (g_p / dets.delta_p)
    return first + second


def chi_drive(epsilon: float, g_s: float, g_2: float, dets: Detunings) -> float:
    """Classical-pump pair coupling: the pump leg is the drive, not the cavity."""
    _require_nonzero(dets, ("delta_d", "delta_s", "delta_2"))
    dets.warn_if_nondispersive()
    return _chi_pair(epsilon, g_s, g_2, dets.delta_d, dets.delta_s, dets.delta_2)


def chi_circuit(spec: SystemSpec) -> float:
    """Four-term pair coupling of the two all-transition atoms (GHz).

    Each atom contributes a pump/stokes pair completed by the partner
    atom's qubit transition; with identical atoms the two pairs are equal.
    """
    if family_of(spec) != "circuit":
        raise ConfigError("chi_circuit needs two all-transition (delta) atoms")
    dets = detunings_circuit(spec)
    names = [f"delta_{x}{q}" for q in (1, 2) for x in ("p", "s", "2")]
    _require_nonzero(dets, names)
    dets.warn_if_nondispersive()
    total = 0.0
    for q, partner in ((1, 2), (2, 1)):
        g_gi = spec.atoms[q - 1].couplings.get("gi", 0.0)
        g_ei = spec.atoms[q - 1].couplings.get("ei", 0.0)
        g_ge = spec.atoms[partner - 1].couplings.get("ge", 0.0)
        total += _chi_pair(
            g_gi,
            g_ei,
            g_ge,
            dets.values[f"delta_p{q}"],
            dets.values[f"delta_s{q}"],
            dets.values[f"delta_2{partner}"],
        )
    return total


def chi_of(spec: SystemSpec) -> float:
    fam = family_of(spec)
    dets = detunings_of(spec)
    if fam == "lambda":
        return chi_lambda(
            spec.atoms[0].couplings.get("gi", 0.0),
            spec.atoms[0].couplings.get("ei", 0.0),
            spec.atoms[1].couplings.get("ge", 0.0),
            dets,
        )
    if fam == "vee":
        return chi_vee(
            spec.atoms[0].couplings.get("ie", 0.0),
            spec.atoms[0].couplings.get("ig", 0.0),
            spec.atoms[1].couplings.get("ge", 0.0),
            dets,
        )
    return chi_circuit(spec)


def chi_drive_of(spec: SystemSpec) -> float:
    """Drive-leg pair coupling for a driven three-level + two-level system."""
    if family_of(spec) != "lambda":
        raise ConfigError("the classical-pump coupling needs the lambda family")
    pump = _pump_drive(spec.atoms[0])
    dets = detunings_lambda(spec)
    return chi_drive(
        pump.amplitude,
        spec.atoms[0].couplings.get("ei", 0.0),
        spec.atoms[1].couplings.get("ge", 0.0),
        dets,
    )


def _pump_drive(atom: AtomSpec):
    for drv in atom.drives:
        if drv.transition == "gi":
            return drv
    raise ConfigError("no pump drive on the g-i transition")


# -- second-order frequency renormalization -------------------------------


def renormalized_frequencies(spec: SystemSpec) -> dict:
    """Dispersively shifted frequencies as (constant, per-photon) pairs, GHz.

    Every cavity coupling on a transition (lo, up) with strength g and
    detuning D = w_up - w_lo - w_c pushes the upper level by +g^2/D (once
    from the vacuum plus once per photon) and pulls the lower level by
    -g^2/D per photon.  Level shifts are then re-referenced to each atom's
    g level, whose per-photon part is absorbed into the cavity frequency.

    Keys: "cavity", "qubit<q>", and "aux<q>" for three-level atoms.
    """
    wc = spec.cavity.frequency
    out = {}
    cavity_pull = 0.0
    for q, atom in enumerate(spec.atoms, start=1):
        nlev = atom_dim(atom)
        const = np.zeros(nlev)
        per_photon = np.zeros(nlev)
        for key, g in atom.couplings.items():
            if g == 0.0:
                continue
            lo, up = key[0], key[1]
            delta = level_frequency(atom, up) - level_frequency(atom, lo) - wc
            if delta == 0.0:
                raise SingularDetuningError(f"atom {q}: transition {key} is resonant")
            shift = g * g / delta
            iu = {"g": 0, "e": 1, "i": 2}[up]
            il = {"g": 0, "e": 1, "i": 2}[lo]
            const[iu] += shift
            per_photon[iu] += shift
            per_photon[il] -= shift
        cavity_pull += per_photon[0]
        const -= const[0]
        per_photon -= per_photon[0]
        wg = level_frequency(atom, "g")
        out[f"qubit{q}"] = (
            level_frequency(atom, "e") - wg + const[1],
            per_photon[1],
        )
        if nlev >= 3:
            out[f"aux{q}"] = (
                level_frequency(atom, "i") - wg + const[2],
                per_photon[2],
            )
    out["cavity"] = (wc + cavity_pull, 0.0)
    return out


# -- decoupling generator and its expansion --------------------------------


def sw_generator(spec: SystemSpec) -> OperatorMatrix:
    """Anti-Hermitian generator X with [H0, X] = -H_I.

    X = sum over couplings of (g/D) (a+ |lo><up| - a |up><lo|) where
    D = w_up - w_lo - w_c.  The identity holds exactly on the truncated
    space because every nonzero element of each term carries the same
    transition frequency.
    """
    family_of(spec)  # raises for unsupported atom arrangements
    sig = dim_signature(spec)
    a_dag = embed(destroy(spec.cavity.n_max), 0, sig).dag()
    x = OperatorMatrix(sig, np.zeros((sig.total, sig.total), dtype=complex))
    for q, atom in enumerate(spec.atoms):
        d = atom_dim(atom)
        for key, g in atom.couplings.items():
            if g == 0.0:
                continue
            lo, up = key[0], key[1]
            delta = level_frequency(atom, up) - level_frequency(atom, lo) - spec.cavity.frequency
            if delta == 0.0:
                raise SingularDetuningError(f"atom {q + 1}: transition {key} is resonant")
            lower = embed(
                transition(d, {"g": 0, "e": 1, "i": 2}[lo], {"g": 0, "e": 1, "i": 2}[up]),
                q + 1,
                sig,
            )
            term = (g / delta) * (a_dag @ lower)
            x = x + term - term.dag()
    return x


def generator_residual(h0: OperatorMatrix, h_i: OperatorMatrix, x: OperatorMatrix) -> float:
    """|| [H0, X] + H_I ||_F / ||H_I||_F (zero H_I gives the absolute norm)."""
    res = (h0 @ x - x @ h0 + h_i).norm()
    scale = h_i.norm()
    return res / scale if scale > 0 else res


def split_hamiltonian(spec: SystemSpec):
    """(H0, H_I): the diagonal bare part and the coupling part, rad/ns."""
    h = build_static_hamiltonian(spec)
    sig = h.sig
    diag = np.diag(np.diag(h.dense()))
    h0 = OperatorMatrix(sig, diag)
    return h0, h - h0


def bch_effective(
    h0: OperatorMatrix,
    h_i: OperatorMatrix,
    x: OperatorMatrix,
    order: int = 3,
    identity_rtol: float = 1e-8,
) -> OperatorMatrix:
    """Commutator expansion of the decoupled Hamiltonian.

    Returns H0 + 1/2 [H_I, X] + 1/3 [[H_I, X], X] (third order); refuses
    a generator that does not satisfy [H0, X] = -H_I to identity_rtol.
    """
    if order not in (2, 3):
        raise SimError("expansion implemented to order 2 or 3 only")
    res = generator_residual(h0, h_i, x)
    if res > identity_rtol:
        raise SimError(
            f"generator identity violated: relative residual {res:.3e} > {identity_rtol:.1e}"
        )
    c1 = h_i @ x - x @ h_i
    h_eff = h0 + 0.5 * c1
    if order == 3:
        h_eff = h_eff + (1.0 / 3.0) * (c1 @ x - x @ c1)
    return h_eff


def secular_filter(
    h: OperatorMatrix, h0: OperatorMatrix, window: float = TWO_PI * 0.050
) -> OperatorMatrix:
    """Drop couplings between bare states split by more than the window (rad/ns).

    Mirrors keeping only resonant terms after the expansion; the default
    window is 2 pi x 50 MHz.
    """
    energies = np.real(np.diag(h0.dense()))
    gap = np.abs(energies[:, None] - energies[None, :])
    keep = gap <= window
    return OperatorMatrix(h.sig, np.where(keep, h.dense(), 0.0))


# -- effective Hamiltonians -------------------------------------------------


def build_effective_hamiltonian(spec: SystemSpec, renormalized: bool = False) -> OperatorMatrix:
    """Qubit-reduced pair-coupling Hamiltonian, rad/ns.

    Undriven families: on dims (n_max+1, 2, 2),
        wc a+a + w1 |e><e|_1 + w2 |e><e|_2 - (chi a s1+ s2+ + h.c.).
    With renormalized=True the dispersively shifted frequencies are used,
    including their photon-number-dependent parts.

    A driven lambda system instead yields the pump-frame two-qubit model on
    dims (1, 2, 2): -chi_d (e^{-i phi} s1+ s2+ + h.c.), phi the pump phase.
    """
    fam = family_of(spec)
    if fam == "lambda" and spec.atoms[0].drives:
        return _build_driven_effective(spec)

    chi = chi_of(spec)
    sig = DimSignature((spec.cavity.n_max + 1, 2, 2))
    a = embed(destroy(spec.cavity.n_max), 0, sig)
    n_op = a.dag() @ a
    pe1 = embed(transition(2, 1, 1), 1, sig)
    pe2 = embed(transition(2, 1, 1), 2, sig)

    if renormalized:
        ren = renormalized_frequencies(spec)
        wc_const, _ = ren["cavity"]
        w1_const, w1_pp = ren["qubit1"]
        w2_const, w2_pp = ren["qubit2"]
        h = TWO_PI * wc_const * n_op
        h = h + TWO_PI * w1_const * pe1 + TWO_PI * w1_pp * (n_op @ pe1)
        h = h + TWO_PI * w2_const * pe2 + TWO_PI * w2_pp * (n_op @ pe2)
    else:
        w1 = _qubit_frequency(spec.atoms[0])
        w2 = _qubit_frequency(spec.atoms[1])
        h = TWO_PI * spec.cavity.frequency * n_op + TWO_PI * w1 * pe1 + TWO_PI * w2 * pe2

    pair = a @ embed(transition(2, 1, 0), 1, sig) @ embed(transition(2, 1, 0), 2, sig)
    coupling = -TWO_PI * chi * pair
    return h + coupling + coupling.dag()


def _qubit_frequency(atom: AtomSpec) -> float:
    return level_frequency(atom, "e") - level_frequency(atom, "g")


def _build_driven_effective(spec: SystemSpec) -> OperatorMatrix:
    chi_d = chi_drive_of(spec)
    phase = _pump_drive(spec.atoms[0]).phase
    sig = DimSignature((1, 2, 2))
    pair = embed(transition(2, 1, 0), 1, sig) @ embed(transition(2, 1, 0), 2, sig)
    coupling = -TWO_PI * chi_d * np.exp(-1j * phase) * pair
    return coupling + coupling.dag()


@dataclass
class EffectiveParams:
    """Analytic summary for reporting: couplings, detunings, validity, timing."""

    family: str
    chi: float                      # GHz
    detunings: dict                 # GHz
    ratios: dict
    dispersive: bool
    period_ns: float | None         # pi / |chi| in angular terms
    renormalized: dict
    chi_drive: float | None = None  # GHz, driven systems only
    ghz_time_ns: float | None = None

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "chi_ghz": self.chi,
            "chi_rad_per_ns": TWO_PI * self.chi,
            "detunings_ghz": self.detunings,
            "coupling_detuning_ratios": self.ratios,
            "dispersive": self.dispersive,
            "period_ns": self.period_ns,
            "renormalized_frequencies_ghz": {
                k: {"constant": v[0], "per_photon": v[1]} for k, v in self.renormalized.items()
            },
            "chi_drive_ghz": self.chi_drive,
            "ghz_time_ns": self.ghz_time_ns,
        }


def effective_params(spec: SystemSpec) -> EffectiveParams:
    fam = family_of(spec)
    dets = detunings_of(spec)
    chi = chi_of(spec)
    period = None if chi == 0.0 else 1.0 / (2.0 * abs(chi))
    chi_d = None
    t_ghz = None
    if fam == "lambda" and any(d.transition == "gi" for d in spec.atoms[0].drives):
        chi_d = chi_drive_of(spec)
        if chi_d != 0.0:
            t_ghz = 1.0 / (8.0 * abs(chi_d))
    return EffectiveParams(
        family=fam,
        chi=chi,
        detunings=dict(dets.values),
        ratios=dict(dets.ratios),
        dispersive=dets.dispersive,
        period_ns=period,
        renormalized=renormalized_frequencies(spec),
        chi_drive=chi_d,
        ghz_time_ns=t_ghz,
    )


# -- matching-point estimate -------------------------------------------------


def matching_guess(spec: SystemSpec, initial, target) -> float:
    """Cavity frequency where second-order-shifted levels cross, GHz.

    initial/target are (photon_n, atom_levels) pairs; the bare crossing is
    corrected by the perturbative level pushes and solved by bisection.
    Used to seed a scan bracket, not as an operating point.
    """
    n_i, lv_i = initial
    n_t, lv_t = target
    if n_i == n_t:
        raise ConfigError("states carry the same photon number; no cavity crossing")

    def shifted_gap(wc: float) -> float:
        trial = replace(spec, cavity=replace(spec.cavity, frequency=wc))
        h = build_static_hamiltonian(trial).dense()
        e0 = np.real(np.diag(h))
        ii = bare_index(trial, n_i, lv_i)
        it = bare_index(trial, n_t, lv_t)
        gap = e0[ii] - e0[it]
        for s, idx_other in ((1.0, ii), (-1.0, it)):
            col = h[:, idx_other].copy()
            col[idx_other] = 0.0
            nz = np.nonzero(col)[0]
            denom = e0[idx_other] - e0[nz]
            if np.any(denom == 0.0):
                raise SingularDetuningError("degenerate intermediate state in guess")
            gap += s * float(np.sum(np.abs(col[nz]) ** 2 / denom))
        return gap / TWO_PI

    atoms_gap = sum(level_frequency(spec.atoms[q], l) for q, l in enumerate(lv_t)) - sum(
        level_frequency(spec.atoms[q], l) for q, l in enumerate(lv_i)
    )
    wc0 = atoms_gap / (n_i - n_t)
    lo, hi = wc0 - 0.2, wc0 + 0.2
    return float(brentq(shifted_gap, lo, hi, xtol=1e-9))
