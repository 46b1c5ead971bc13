"""Cross-validation suite: every identity the analytics must satisfy.

Each check returns (name, passed, detail).  The chi_scale hook multiplies
the analytic pair coupling before the oracle comparisons; anything but 1.0
must make those comparisons fail, which is how the suite proves it can
detect a corrupted formula.
"""

from __future__ import annotations

import numpy as np

from .model import (
    TWO_PI,
    AtomSpec,
    CavitySpec,
    SystemSpec,
    bare_index,
    build_static_hamiltonian,
    excitation_number_candidate,
    spec_from_config,
)
from .effective import (
    Detunings,
    bch_effective,
    chi_circuit,
    chi_drive,
    chi_lambda,
    chi_of,
    chi_vee,
    detunings_of,
    generator_residual,
    split_hamiltonian,
    sw_generator,
)
from .operators import commutator, eig_herm
from .presets import preset_config

GENERATOR_RTOL = 1e-9
ORACLE_BAND = 0.10


def _preset_spec(name: str) -> SystemSpec:
    return spec_from_config(preset_config(name))


def check_generator_identity_presets():
    rows = []
    for name in ("lambda_pair", "vee_pair", "fig5"):
        spec = _preset_spec(name)
        h0, h_i = split_hamiltonian(spec)
        res = generator_residual(h0, h_i, sw_generator(spec))
        rows.append(
            (f"generator identity [{name}]", res <= GENERATOR_RTOL, f"residual {res:.2e}")
        )
    return rows


def _random_dispersive_spec(rng) -> SystemSpec:
    """Random family member with all coupling/detuning ratios kept below ~0.2."""
    family = rng.choice(["lambda", "vee", "circuit"])
    if family == "circuit":
        atoms = []
        for _ in range(2):
            we = rng.uniform(3.5, 4.5)
            wi = rng.uniform(6.5, 7.5)
            atoms.append(
                AtomSpec(
                    "delta",
                    {"g": 0.0, "e": we, "i": wi},
                    {
                        "ge": rng.uniform(0.02, 0.15),
                        "gi": rng.uniform(0.02, 0.12),
                        "ei": rng.uniform(0.02, 0.15),
                    },
                )
            )
        wc = rng.uniform(8.2, 8.6)  # away from every transition
        return SystemSpec(CavitySpec(wc, 3), tuple(atoms))
    if family == "lambda":
        we = rng.uniform(3.5, 4.5)
        wi = rng.uniform(8.6, 9.4)
        w2 = rng.uniform(3.2, 3.8)
        atom1 = AtomSpec(
            "lambda",
            {"g": 0.0, "e": we, "i": wi},
            {"gi": rng.uniform(0.02, 0.15), "ei": rng.uniform(0.02, 0.15)},
        )
    else:
        wg = rng.uniform(4.6, 5.4)
        we = rng.uniform(8.6, 9.4)
        w2 = rng.uniform(3.2, 3.8)
        atom1 = AtomSpec(
            "vee",
            {"i": 0.0, "g": wg, "e": we},
            {"ie": rng.uniform(0.02, 0.15), "ig": rng.uniform(0.02, 0.15)},
        )
    atom2 = AtomSpec("two_level", {"g": 0.0, "e": w2}, {"ge": rng.uniform(0.02, 0.15)})
    wc = rng.uniform(7.4, 7.8)
    return SystemSpec(CavitySpec(wc, 3), (atom1, atom2))


def check_generator_identity_randomized(n_sets: int = 20, seed: int = 20260809):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_sets):
        spec = _random_dispersive_spec(rng)
        h0, h_i = split_hamiltonian(spec)
        worst = max(worst, generator_residual(h0, h_i, sw_generator(spec)))
    ok = worst <= GENERATOR_RTOL
    return [(f"generator identity [{n_sets} randomized]", ok, f"worst residual {worst:.2e}")]


def check_conservation():
    rows = []
    spec = _preset_spec("lambda_pair")
    h = build_static_hamiltonian(spec)
    n = excitation_number_candidate(spec)
    rel = commutator(h, n).norm() / h.norm()
    rows.append(("excitation conservation [lambda_pair]", rel <= 1e-12, f"|[H,N]|/|H| = {rel:.2e}"))
    spec = _preset_spec("fig5")
    h = build_static_hamiltonian(spec)
    n = excitation_number_candidate(spec)
    rel = commutator(h, n).norm() / h.norm()
    rows.append(
        ("no single conserved counter [fig5]", rel > 1e-6, f"|[H,N]|/|H| = {rel:.2e}")
    )
    return rows


def check_oracle_consistency(chi_scale: float = 1.0):
    """Exact doublet splitting vs 2 chi, and the mechanical expansion element."""
    rows = []
    spec = _preset_spec("fig5")
    chi = chi_of(spec) * chi_scale

    from .scan import scan_cavity_frequency

    cfg = preset_config("fig5")["scan"]
    res = scan_cavity_frequency(spec, cfg["lo"], cfg["hi"], objective="min_gap")
    splitting = res.best[1]
    rel = abs(splitting - 2.0 * abs(chi) * TWO_PI) / (2.0 * abs(chi) * TWO_PI)
    rows.append(
        (
            "doublet splitting vs 2*chi",
            rel <= ORACLE_BAND,
            f"splitting {splitting:.5e} rad/ns vs {2*abs(chi)*TWO_PI:.5e}, rel dev {rel:.1%}",
        )
    )

    h0, h_i = split_hamiltonian(spec)
    h_b = bch_effective(h0, h_i, sw_generator(spec))
    el = h_b.dense()[bare_index(spec, 0, ("e", "e")), bare_index(spec, 1, ("g", "g"))]
    rel = abs(abs(el) - abs(chi) * TWO_PI) / (abs(chi) * TWO_PI)
    rows.append(
        (
            "expansion element vs chi",
            rel <= ORACLE_BAND,
            f"|element| {abs(el):.5e} rad/ns vs {abs(chi)*TWO_PI:.5e}, rel dev {rel:.1%}",
        )
    )
    return rows


def check_cubic_scaling():
    base = _preset_spec("fig5")
    chi0 = chi_of(base)
    worst = 0.0
    for s in (0.5, 0.8, 1.25):
        atoms = tuple(
            AtomSpec(a.kind, dict(a.level_frequencies), {k: s * g for k, g in a.couplings.items()})
            for a in base.atoms
        )
        chi_s = chi_of(SystemSpec(base.cavity, atoms))
        worst = max(worst, abs(chi_s - s**3 * chi0) / abs(s**3 * chi0))
    return [("cubic coupling scaling", worst <= 1e-12, f"worst rel dev {worst:.2e}")]


def check_formula_consistency():
    rows = []
    dets = Detunings({"delta_p": 1.3, "delta_s": -2.1, "delta_2": -3.7}, {})
    a = chi_lambda(0.11, 0.13, 0.17, dets)
    b = chi_vee(0.11, 0.13, 0.17, dets)
    rows.append(("vee formula is a term reordering", a == b, f"{a:.6e} vs {b:.6e}"))
    dets_d = Detunings({"delta_d": 1.3, "delta_s": -2.1, "delta_2": -3.7}, {})
    c = chi_drive(0.11, 0.13, 0.17, dets_d)
    rows.append(("drive formula is the pump substitution", a == c, f"{a:.6e} vs {c:.6e}"))

    spec = _preset_spec("fig5")
    atom = spec.atoms[0]
    single = SystemSpec(
        spec.cavity,
        (
            AtomSpec(
                "lambda",
                dict(atom.level_frequencies),
                {"gi": atom.couplings["gi"], "ei": atom.couplings["ei"]},
            ),
            AtomSpec("two_level", {"g": 0.0, "e": atom.level_frequencies["e"]},
                     {"ge": atom.couplings["ge"]}),
        ),
    )
    twice = 2.0 * chi_of(single)
    full = chi_circuit(spec)
    rows.append(
        (
            "identical atoms give twice the single-pair coupling",
            abs(full - twice) <= 1e-15,
            f"{full:.6e} vs {twice:.6e}",
        )
    )
    return rows


def check_dispersive_flag(spec: SystemSpec):
    """Surfaces a warning row; a marginal config is not a library defect."""
    dets = detunings_of(spec)
    bad = {k: round(r, 3) for k, r in dets.ratios.items() if r >= 0.3}
    if bad:
        return [("dispersive validity", True, f"warning: ratios outside dispersive regime: {bad}")]
    return [("dispersive validity", True, f"max ratio {max(dets.ratios.values()):.3f}")]


def run_all(chi_scale: float = 1.0, spec: SystemSpec | None = None):
    rows = []
    rows += check_generator_identity_presets()
    rows += check_generator_identity_randomized()
    rows += check_conservation()
    rows += check_oracle_consistency(chi_scale=chi_scale)
    rows += check_cubic_scaling()
    rows += check_formula_consistency()
    if spec is not None:
        rows += check_dispersive_flag(spec)
    return rows
