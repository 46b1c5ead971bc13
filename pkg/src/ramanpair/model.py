"""Declarative system description and the Hamiltonians built from it.

Configs carry linear frequencies in GHz (the values a spectrum analyzer
would show divided by 2 pi).  Every operator produced here is in angular
units, rad/ns, so that exp(-iHt) uses plain nanoseconds.

Level indices are fixed for every atom kind: g=0, e=1, i=2.  A coupling
or drive is keyed by its transition written lower-to-upper, e.g. "gi".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .operators import DimSignature, OperatorMatrix, QuantumState, destroy, embed, transition

TWO_PI = 2.0 * np.pi

LEVEL_INDEX = {"g": 0, "e": 1, "i": 2}

# transitions each kind may couple to the cavity, written (lower, upper)
ALLOWED_TRANSITIONS = {
    "two_level": ("ge",),
    "lambda": ("gi", "ei"),
    "vee": ("ie", "ig"),
    "xi": ("gi", "ie"),
    "delta": ("ge", "gi", "ei"),
}

LEVELS_OF_KIND = {
    "two_level": ("g", "e"),
    "lambda": ("g", "e", "i"),
    "vee": ("g", "e", "i"),
    "xi": ("g", "e", "i"),
    "delta": ("g", "e", "i"),
}


@dataclass(frozen=True)
class DriveSpec:
    """Classical drive on one atomic transition.

    Assembled at integration time as
    amplitude * |upper><lower| * exp(-i(2 pi f t + phase)) + h.c.
    """

    transition: str
    amplitude: float   # GHz
    frequency: float   # GHz
    phase: float = 0.0  # rad


@dataclass(frozen=True)
class AtomSpec:
    kind: str
    level_frequencies: dict = field(default_factory=dict)  # level -> GHz
    couplings: dict = field(default_factory=dict)          # transition -> GHz
    drives: tuple = ()


@dataclass(frozen=True)
class CavitySpec:
    frequency: float  # GHz
    n_max: int
    decay: float = 0.0  # GHz


@dataclass(frozen=True)
class SystemSpec:
    cavity: CavitySpec
    atoms: tuple
    relaxation: tuple = ()  # one {transition: rate GHz} mapping per atom

    def __post_init__(self):
        validate_spec(self)


def _transition_indices(key: str) -> tuple[int, int]:
    if len(key) != 2 or key[0] not in LEVEL_INDEX or key[1] not in LEVEL_INDEX:
        raise ConfigError(f"bad transition key {key!r}")
    return LEVEL_INDEX[key[0]], LEVEL_INDEX[key[1]]


def validate_spec(spec: SystemSpec):
    if len(spec.atoms) < 1:
        raise ConfigError("at least one atom is required")
    if spec.cavity.n_max < 0:
        raise ConfigError("cavity n_max must be >= 0")
    if spec.cavity.decay < 0:
        raise ConfigError("cavity decay must be >= 0")
    if spec.relaxation and len(spec.relaxation) != len(spec.atoms):
        raise ConfigError("relaxation list must align with atoms")
    for q, atom in enumerate(spec.atoms):
        if atom.kind not in ALLOWED_TRANSITIONS:
            raise ConfigError(f"unknown atom kind {atom.kind!r}")
        allowed = ALLOWED_TRANSITIONS[atom.kind]
        levels = LEVELS_OF_KIND[atom.kind]
        for lvl in atom.level_frequencies:
            if lvl not in levels:
                raise ConfigError(f"atom {q}: level {lvl!r} not in kind {atom.kind}")
        for key, g in atom.couplings.items():
            if key not in allowed:
                raise ConfigError(
                    f"atom {q}: transition {key!r} not allowed for kind {atom.kind}"
                )
            if g < 0:
                raise ConfigError(f"atom {q}: coupling {key} must be >= 0")
        for drv in atom.drives:
            if drv.transition not in allowed:
                raise ConfigError(
                    f"atom {q}: drive transition {drv.transition!r} not allowed "
                    f"for kind {atom.kind}"
                )
            if drv.amplitude < 0:
                raise ConfigError(f"atom {q}: drive amplitude must be >= 0")
        if spec.relaxation:
            for key, rate in spec.relaxation[q].items():
                if key not in allowed:
                    raise ConfigError(
                        f"atom {q}: relaxation transition {key!r} not allowed "
                        f"for kind {atom.kind}"
                    )
                if rate < 0:
                    raise ConfigError(f"atom {q}: relaxation rate must be >= 0")


def atom_dim(atom: AtomSpec) -> int:
    return len(LEVELS_OF_KIND[atom.kind])


def dim_signature(spec: SystemSpec) -> DimSignature:
    return DimSignature((spec.cavity.n_max + 1,) + tuple(atom_dim(a) for a in spec.atoms))


def level_frequency(atom: AtomSpec, level: str) -> float:
    """Level frequency in GHz; unset levels sit at the zero reference."""
    return float(atom.level_frequencies.get(level, 0.0))


def build_static_hamiltonian(spec: SystemSpec) -> OperatorMatrix:
    """Rotating-wave Hamiltonian of cavity + atoms + couplings, rad/ns.

    H = wc a+a + sum_q sum_j w_j |j><j|_q + sum couplings g (a T+ + a+ T),
    drives excluded.
    """
    sig = dim_signature(spec)
    a = embed(destroy(spec.cavity.n_max), 0, sig)
    h = TWO_PI * spec.cavity.frequency * (a.dag() @ a)
    for q, atom in enumerate(spec.atoms):
        d = atom_dim(atom)
        for lvl in LEVELS_OF_KIND[atom.kind]:
            w = level_frequency(atom, lvl)
            if w != 0.0:
                proj = transition(d, LEVEL_INDEX[lvl], LEVEL_INDEX[lvl])
                h = h + TWO_PI * w * embed(proj, q + 1, sig)
        for key, g in atom.couplings.items():
            if g == 0.0:
                continue
            lo, up = _transition_indices(key)
            raise_op = embed(transition(d, up, lo), q + 1, sig)
            term = a @ raise_op
            h = h + TWO_PI * g * (term + term.dag())
    return h


def build_drive_terms(spec: SystemSpec) -> list:
    """Drive terms as (operator rad/ns, angular frequency rad/ns, phase).

    Each entry is assembled by the integrator as A exp(-i(w t + phi)) + h.c.
    """
    sig = dim_signature(spec)
    terms = []
    for q, atom in enumerate(spec.atoms):
        d = atom_dim(atom)
        for drv in atom.drives:
            lo, up = _transition_indices(drv.transition)
            op = TWO_PI * drv.amplitude * embed(transition(d, up, lo), q + 1, sig)
            terms.append((op, TWO_PI * drv.frequency, drv.phase))
    return terms


def build_collapse_channels(spec: SystemSpec) -> list:
    """Collapse channels as (operator, angular rate rad/ns); zero rates dropped."""
    sig = dim_signature(spec)
    channels = []
    if spec.cavity.decay > 0.0:
        channels.append((embed(destroy(spec.cavity.n_max), 0, sig), TWO_PI * spec.cavity.decay))
    if spec.relaxation:
        for q, rates in enumerate(spec.relaxation):
            d = atom_dim(spec.atoms[q])
            for key, rate in rates.items():
                if rate <= 0.0:
                    continue
                lo, up = _transition_indices(key)
                channels.append((embed(transition(d, lo, up), q + 1, sig), TWO_PI * rate))
    return channels


def bare_index(spec: SystemSpec, photon_n: int, atom_levels) -> int:
    sig = dim_signature(spec)
    occ = [photon_n]
    for q, lvl in enumerate(atom_levels):
        if lvl not in LEVELS_OF_KIND[spec.atoms[q].kind]:
            raise ConfigError(f"level {lvl!r} invalid for atom {q}")
        occ.append(LEVEL_INDEX[lvl])
    return sig.index(occ)


def bare_state(spec: SystemSpec, photon_n: int, atom_levels) -> QuantumState:
    """Product basis ket |photon_n, levels...>."""
    sig = dim_signature(spec)
    vec = np.zeros(sig.total, dtype=complex)
    vec[bare_index(spec, photon_n, atom_levels)] = 1.0
    return QuantumState(sig, "ket", vec)


def superposition(spec: SystemSpec, terms) -> QuantumState:
    """Normalized superposition of bare states, terms = [(amp, n, levels), ...]."""
    sig = dim_signature(spec)
    vec = np.zeros(sig.total, dtype=complex)
    for amp, n, levels in terms:
        vec[bare_index(spec, n, levels)] += amp
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ConfigError("superposition has zero norm")
    return QuantumState(sig, "ket", vec / nrm)


def excitation_number_candidate(spec: SystemSpec) -> OperatorMatrix:
    """a+a + |i><i| on atom 1 + |e><e| on atom 2.

    Commutes with the static Hamiltonian for the three-level + two-level
    Raman model; deliberately fails to for the all-transition (delta) kind.
    """
    sig = dim_signature(spec)
    a = embed(destroy(spec.cavity.n_max), 0, sig)
    n = a.dag() @ a
    d1 = atom_dim(spec.atoms[0])
    if d1 >= 3:
        n = n + embed(transition(d1, 2, 2), 1, sig)
    if len(spec.atoms) > 1:
        d2 = atom_dim(spec.atoms[1])
        n = n + embed(transition(d2, 1, 1), 2, sig)
    return n


# -- config document ----------------------------------------------------


def spec_from_config(doc: dict) -> SystemSpec:
    """Build a SystemSpec from a parsed config document."""
    try:
        cav = doc["cavity"]
        cavity = CavitySpec(
            frequency=float(cav["frequency"]),
            n_max=int(cav.get("n_max", 3)),
            decay=float(cav.get("decay", 0.0)),
        )
        atoms = []
        for entry in doc["atoms"]:
            drives = tuple(
                DriveSpec(
                    transition=str(d["transition"]),
                    amplitude=float(d["amplitude"]),
                    frequency=float(d["frequency"]),
                    phase=float(d.get("phase", 0.0)),
                )
                for d in entry.get("drives", [])
            )
            atoms.append(
                AtomSpec(
                    kind=str(entry["kind"]),
                    level_frequencies={k: float(v) for k, v in entry.get("level_frequencies", {}).items()},
                    couplings={k: float(v) for k, v in entry.get("couplings", {}).items()},
                    drives=drives,
                )
            )
        relax = tuple(
            {k: float(v) for k, v in entry.items()} for entry in doc.get("dissipation", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config document: {exc}") from exc
    return SystemSpec(cavity=cavity, atoms=tuple(atoms), relaxation=relax)


def spec_to_config(spec: SystemSpec) -> dict:
    """Inverse of spec_from_config; round-trips bit-identically through JSON."""
    doc = {
        "cavity": {
            "frequency": spec.cavity.frequency,
            "n_max": spec.cavity.n_max,
            "decay": spec.cavity.decay,
        },
        "atoms": [
            {
                "kind": atom.kind,
                "level_frequencies": dict(atom.level_frequencies),
                "couplings": dict(atom.couplings),
                "drives": [
                    {
                        "transition": d.transition,
                        "amplitude": d.amplitude,
                        "frequency": d.frequency,
                        "phase": d.phase,
                    }
                    for d in atom.drives
                ],
            }
            for atom in spec.atoms
        ],
    }
    if spec.relaxation:
        doc["dissipation"] = [dict(r) for r in spec.relaxation]
    return doc


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} is not a JSON object")
    return doc
