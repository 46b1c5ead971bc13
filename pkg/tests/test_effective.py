from dataclasses import replace

import numpy as np
import pytest

from ramanpair import (
    AtomSpec,
    CavitySpec,
    Detunings,
    DriveSpec,
    SystemSpec,
    bare_index,
    bch_effective,
    build_effective_hamiltonian,
    chi_circuit,
    chi_drive,
    chi_drive_of,
    chi_lambda,
    chi_of,
    chi_vee,
    detunings_circuit,
    detunings_lambda,
    detunings_of,
    eig_herm,
    generator_residual,
    matching_guess,
    renormalized_frequencies,
    secular_filter,
    spec_from_config,
    split_hamiltonian,
    sw_generator,
)
from ramanpair.errors import ConfigError, SimError, SingularDetuningError
from ramanpair.model import TWO_PI
from ramanpair.presets import preset_config
from ramanpair.validate import _random_dispersive_spec


@pytest.fixture
def circuit_spec():
    return spec_from_config(preset_config("fig5"))


@pytest.fixture
def lambda_spec():
    return spec_from_config(preset_config("lambda_pair"))


@pytest.fixture
def vee_spec():
    return spec_from_config(preset_config("vee_pair"))


def _dets(**kw):
    return Detunings(dict(kw), {})


# -- scalar formulas -----------------------------------------------------


def test_chi_lambda_arithmetic_anchor():
    # (0.01/3)(2)(0.1) + (0.01/3)(2)(0.1)
    dets = _dets(delta_p=1.0, delta_s=1.0, delta_2=1.0)
    assert chi_lambda(0.1, 0.1, 0.1, dets) == pytest.approx(4.0 / 3.0e3, rel=1e-12)


def test_chi_vanishes_with_any_zero_coupling():
    dets = _dets(delta_p=1.1, delta_s=-2.3, delta_2=-3.7)
    assert chi_lambda(0.0, 0.1, 0.1, dets) == 0.0
    assert chi_lambda(0.1, 0.0, 0.1, dets) == 0.0
    assert chi_lambda(0.1, 0.1, 0.0, dets) == 0.0
    assert chi_vee(0.0, 0.1, 0.1, dets) == 0.0
    assert chi_drive(0.0, 0.1, 0.1, _dets(delta_d=1.1, delta_s=-2.3, delta_2=-3.7)) == 0.0


def test_chi_sign_flips_with_all_detunings():
    d1 = _dets(delta_p=1.1, delta_s=-2.3, delta_2=-3.7)
    d2 = _dets(delta_p=-1.1, delta_s=2.3, delta_2=3.7)
    assert chi_lambda(0.1, 0.12, 0.14, d2) == pytest.approx(
        -chi_lambda(0.1, 0.12, 0.14, d1), rel=1e-12
    )


def test_chi_singular_detuning_raises():
    with pytest.raises(SingularDetuningError):
        chi_lambda(0.1, 0.1, 0.1, _dets(delta_p=0.0, delta_s=1.0, delta_2=1.0))


def test_chi_vee_equals_chi_lambda_termwise():
    dets = _dets(delta_p=1.4, delta_s=-2.6, delta_2=-4.0)
    a = chi_lambda(0.15, 0.13, 0.11, dets)
    b = chi_vee(0.15, 0.13, 0.11, dets)
    assert a == b


def test_chi_vee_vanishes_at_infinite_stokes_detuning():
    dets = _dets(delta_p=1.4, delta_s=1e12, delta_2=-4.0)
    assert chi_vee(0.15, 0.13, 0.11, dets) == pytest.approx(0.0, abs=1e-15)


def test_chi_drive_is_pump_substitution():
    dets = _dets(delta_p=1.4, delta_s=-2.6, delta_2=-4.0)
    dets_d = _dets(delta_d=1.4, delta_s=-2.6, delta_2=-4.0)
    assert chi_drive(0.15, 0.13, 0.11, dets_d) == chi_lambda(0.15, 0.13, 0.11, dets)


def test_ghz_time_from_chi_drive():
    spec = spec_from_config(preset_config("ghz"))
    chi_d = chi_drive_of(spec)
    assert chi_d == pytest.approx(1.0e-3, rel=1e-12)
    t_ghz = np.pi / (4 * TWO_PI * abs(chi_d))
    assert t_ghz == pytest.approx(125.0, rel=1e-9)


def test_chi_circuit_operating_point(circuit_spec):
    chi = chi_circuit(circuit_spec)
    assert chi == pytest.approx(1.126e-3, rel=1e-3)
    period = 1.0 / (2.0 * abs(chi))
    assert abs(period - 444.0) <= 1.0


def test_chi_circuit_identical_atom_symmetry(circuit_spec):
    dets = detunings_circuit(circuit_spec)
    atom = circuit_spec.atoms[0]
    from ramanpair.effective import _chi_pair

    pair1 = _chi_pair(
        atom.couplings["gi"], atom.couplings["ei"], atom.couplings["ge"],
        dets.values["delta_p1"], dets.values["delta_s1"], dets.values["delta_22"],
    )
    assert chi_circuit(circuit_spec) == pytest.approx(2 * pair1, rel=1e-14)


def test_chi_circuit_single_path_kill(circuit_spec):
    # zeroing one atom's gi coupling removes that atom's pump pair only
    atoms = list(circuit_spec.atoms)
    damaged = {k: (0.0 if k == "gi" else v) for k, v in atoms[0].couplings.items()}
    atoms0 = AtomSpec("delta", dict(atoms[0].level_frequencies), damaged)
    spec2 = SystemSpec(circuit_spec.cavity, (atoms0, atoms[1]))
    assert chi_circuit(spec2) == pytest.approx(0.5 * chi_circuit(circuit_spec), rel=1e-12)


def test_cubic_coupling_scaling(circuit_spec):
    chi0 = chi_of(circuit_spec)
    for s in (0.5, 0.8, 1.25):
        atoms = tuple(
            AtomSpec(a.kind, dict(a.level_frequencies), {k: s * g for k, g in a.couplings.items()})
            for a in circuit_spec.atoms
        )
        spec_s = SystemSpec(circuit_spec.cavity, atoms)
        assert chi_of(spec_s) == pytest.approx(s**3 * chi0, rel=1e-13)


def test_dispersive_warning_surfaced():
    dets = _dets(delta_p=0.2, delta_s=1.0, delta_2=1.0)
    dets = Detunings(dets.values, {"gi": 0.5})
    with pytest.warns(UserWarning, match="dispersive"):
        chi_lambda(0.1, 0.1, 0.1, dets)


# -- renormalized frequencies ----------------------------------------------


def test_renormalized_all_couplings_zero(lambda_spec):
    atoms = tuple(
        AtomSpec(a.kind, dict(a.level_frequencies), {k: 0.0 for k in a.couplings})
        for a in lambda_spec.atoms
    )
    ren = renormalized_frequencies(SystemSpec(lambda_spec.cavity, atoms))
    assert ren["cavity"] == (lambda_spec.cavity.frequency, 0.0)
    assert ren["qubit1"][0] == pytest.approx(lambda_spec.atoms[0].level_frequencies["e"])
    assert ren["qubit1"][1] == 0.0
    assert ren["qubit2"][1] == 0.0


def test_renormalized_pump_only(lambda_spec):
    # only the g-i coupling: cavity pulled by -gp^2/Dp, aux pushed by +gp^2/Dp
    atom1 = lambda_spec.atoms[0]
    gp = atom1.couplings["gi"]
    atoms = (
        AtomSpec("lambda", dict(atom1.level_frequencies), {"gi": gp, "ei": 0.0}),
        AtomSpec("two_level", dict(lambda_spec.atoms[1].level_frequencies), {"ge": 0.0}),
    )
    spec = SystemSpec(lambda_spec.cavity, atoms)
    dets = detunings_lambda(spec)
    shift = gp**2 / dets.delta_p
    ren = renormalized_frequencies(spec)
    assert ren["cavity"][0] == pytest.approx(spec.cavity.frequency - shift, rel=1e-12)
    assert ren["aux1"][0] == pytest.approx(
        atom1.level_frequencies["i"] + shift, rel=1e-12
    )


def test_renormalized_push_pull_per_ground_transition(lambda_spec, circuit_spec):
    # every transition anchored on the reference level pulls the cavity by
    # exactly minus its upper-level vacuum push
    for spec in (lambda_spec, circuit_spec):
        base_atoms = [
            AtomSpec(a.kind, dict(a.level_frequencies), {k: 0.0 for k in a.couplings})
            for a in spec.atoms
        ]
        for q, atom in enumerate(spec.atoms):
            for key, g in atom.couplings.items():
                if key[0] != "g" or g == 0.0:
                    continue
                atoms = [AtomSpec(a.kind, dict(a.level_frequencies), dict(a.couplings))
                         for a in base_atoms]
                coup = dict(atoms[q].couplings)
                coup[key] = g
                atoms[q] = AtomSpec(atoms[q].kind, dict(atoms[q].level_frequencies), coup)
                single = SystemSpec(spec.cavity, tuple(atoms))
                ren = renormalized_frequencies(single)
                cavity_pull = ren["cavity"][0] - spec.cavity.frequency
                upper = "qubit" if key[1] == "e" else "aux"
                bare = atoms[q].level_frequencies[key[1]]
                upper_push = ren[f"{upper}{q + 1}"][0] - bare
                assert cavity_pull == pytest.approx(-upper_push, rel=1e-12)


def test_renormalized_matches_expansion_diagonals(lambda_spec):
    """Second-order rule against the mechanical expansion, every basis state."""
    spec = lambda_spec
    h0, h_i = split_hamiltonian(spec)
    h_b = bch_effective(h0, h_i, sw_generator(spec))
    diag = np.real(np.diag(h_b.dense())) / TWO_PI
    ren = renormalized_frequencies(spec)
    wc = ren["cavity"][0]
    q1c, q1p = ren["qubit1"]
    a1c, a1p = ren["aux1"]
    q2c, q2p = ren["qubit2"]
    n_max = spec.cavity.n_max
    for n in range(n_max):  # top Fock row has truncated upward couplings
        for j, (c1, p1) in enumerate(((0.0, 0.0), (q1c, q1p), (a1c, a1p))):
            for k, (c2, p2) in enumerate(((0.0, 0.0), (q2c, q2p))):
                idx = bare_index(spec, n, ("gei"[j], "ge"[k]))
                predicted = wc * n + c1 + p1 * n + c2 + p2 * n
                assert diag[idx] == pytest.approx(predicted, abs=1e-6), (n, j, k)


def test_renormalized_vee_family(vee_spec):
    # inverted topology: the double-ground-anchored atom pushes the cavity up
    ren = renormalized_frequencies(vee_spec)
    atom1, atom2 = vee_spec.atoms
    dets = detunings_of(vee_spec)
    gs = atom1.couplings["ig"]
    gp = atom1.couplings["ie"]
    g2 = atom2.couplings["ge"]
    expected_cavity = (
        vee_spec.cavity.frequency + gs**2 / dets.delta_s - g2**2 / dets.delta_2
    )
    assert ren["cavity"][0] == pytest.approx(expected_cavity, rel=1e-12)
    w1 = atom1.level_frequencies["e"] - atom1.level_frequencies["g"]
    shift1 = gp**2 / dets.delta_p - gs**2 / dets.delta_s
    assert ren["qubit1"][0] == pytest.approx(w1 + shift1, rel=1e-12)
    assert ren["qubit1"][1] == pytest.approx(shift1, rel=1e-12)


# -- generator -------------------------------------------------------------


def test_generator_antihermitian(circuit_spec):
    x = sw_generator(circuit_spec)
    assert (x + x.dag()).max_abs() <= 1e-14


def test_generator_identity_presets(circuit_spec, lambda_spec, vee_spec):
    for spec in (circuit_spec, lambda_spec, vee_spec):
        h0, h_i = split_hamiltonian(spec)
        assert generator_residual(h0, h_i, sw_generator(spec)) <= 1e-10


def test_generator_identity_randomized():
    rng = np.random.default_rng(424242)
    for _ in range(20):
        spec = _random_dispersive_spec(rng)
        h0, h_i = split_hamiltonian(spec)
        assert generator_residual(h0, h_i, sw_generator(spec)) <= 1e-9


def test_generator_zero_couplings(circuit_spec):
    atoms = tuple(
        AtomSpec(a.kind, dict(a.level_frequencies), {k: 0.0 for k in a.couplings})
        for a in circuit_spec.atoms
    )
    x = sw_generator(SystemSpec(circuit_spec.cavity, atoms))
    assert x.max_abs() == 0.0


def test_generator_unsupported_family():
    spec = spec_from_config(preset_config("two_photon"))
    with pytest.raises(ConfigError):
        sw_generator(spec)


# -- expansion ---------------------------------------------------------------


def test_bch_with_zero_generator_returns_h0(circuit_spec):
    h0, _ = split_hamiltonian(circuit_spec)
    zero = 0.0 * h0
    h_b = bch_effective(h0, zero, zero)
    assert (h_b - h0).max_abs() == 0.0


def test_bch_refuses_wrong_generator(circuit_spec):
    h0, h_i = split_hamiltonian(circuit_spec)
    x = sw_generator(circuit_spec)
    with pytest.raises(SimError, match="generator identity"):
        bch_effective(h0, h_i, 0.5 * x)


def test_bch_offdiagonal_element_vs_chi(circuit_spec):
    h0, h_i = split_hamiltonian(circuit_spec)
    h_b = bch_effective(h0, h_i, sw_generator(circuit_spec))
    iee = bare_index(circuit_spec, 0, ("e", "e"))
    igg = bare_index(circuit_spec, 1, ("g", "g"))
    el = h_b.dense()[iee, igg]
    chi_ang = TWO_PI * chi_circuit(circuit_spec)
    assert abs(abs(el) - abs(chi_ang)) <= 0.10 * abs(chi_ang)
    # expansion fixes the sign opposite to the scalar formula arrangement
    assert el.real == pytest.approx(-chi_ang, rel=1e-10)
    # hermitian-conjugate symmetry of the resonant block
    assert h_b.dense()[igg, iee] == pytest.approx(np.conj(el), rel=1e-12)


def test_bch_diagonals_at_reference_states(circuit_spec):
    h0, h_i = split_hamiltonian(circuit_spec)
    h_b = bch_effective(h0, h_i, sw_generator(circuit_spec))
    diag = np.real(np.diag(h_b.dense())) / TWO_PI
    ren = renormalized_frequencies(circuit_spec)
    i0 = bare_index(circuit_spec, 0, ("g", "g"))
    i1 = bare_index(circuit_spec, 1, ("g", "g"))
    assert diag[i0] == pytest.approx(0.0, abs=1e-6)
    assert diag[i1] == pytest.approx(ren["cavity"][0], abs=1e-6)


def test_secular_filter_keeps_resonant_pair(circuit_spec):
    h0, h_i = split_hamiltonian(circuit_spec)
    h_b = bch_effective(h0, h_i, sw_generator(circuit_spec))
    h_sec = secular_filter(h_b, h0)
    iee = bare_index(circuit_spec, 0, ("e", "e"))
    igg = bare_index(circuit_spec, 1, ("g", "g"))
    assert h_sec.dense()[iee, igg] == h_b.dense()[iee, igg]
    # a far-off-resonant element is removed
    iig = bare_index(circuit_spec, 0, ("i", "g"))
    assert h_sec.dense()[iig, igg] == 0.0
    assert abs(h_b.dense()[iig, igg]) > 0.0


# -- oracle agreement ---------------------------------------------------------


def test_exact_splitting_matches_2chi(circuit_spec):
    from ramanpair import scan_cavity_frequency

    cfg = preset_config("fig5")["scan"]
    res = scan_cavity_frequency(circuit_spec, cfg["lo"], cfg["hi"], objective="min_gap")
    splitting = res.best[1]
    chi_ang = TWO_PI * abs(chi_circuit(circuit_spec))
    assert abs(splitting - 2 * chi_ang) <= 0.10 * 2 * chi_ang


def test_doublet_splitting_near_operating_point(circuit_spec):
    h = spec_from_config(preset_config("fig5"))
    from ramanpair import build_static_hamiltonian

    evals, evecs = eig_herm(build_static_hamiltonian(h))
    igg = bare_index(h, 1, ("g", "g"))
    iee = bare_index(h, 0, ("e", "e"))
    weight = np.abs(evecs[igg, :]) ** 2 + np.abs(evecs[iee, :]) ** 2
    a, b = np.argsort(weight)[-2:]
    splitting = abs(evals[a] - evals[b])
    chi_ang = TWO_PI * abs(chi_circuit(h))
    assert abs(splitting - 2 * chi_ang) <= 0.10 * 2 * chi_ang


# -- effective hamiltonians ----------------------------------------------------


def test_effective_decoupled_when_chi_zero(circuit_spec):
    atoms = tuple(
        AtomSpec(a.kind, dict(a.level_frequencies),
                 {k: (0.0 if k == "gi" else v) for k, v in a.couplings.items()})
        for a in circuit_spec.atoms
    )
    spec = SystemSpec(circuit_spec.cavity, atoms)
    h = build_effective_hamiltonian(spec)
    igg = 1 * 4 + 0  # |1,g,g> in the reduced (n,2,2) space
    iee = 0 * 4 + 3  # |0,e,e>
    assert h.dense()[iee, igg] == 0.0


def test_effective_rabi_splitting(circuit_spec):
    spec = replace(
        circuit_spec, cavity=replace(circuit_spec.cavity, frequency=8.0)
    )  # matched reduced model
    h = build_effective_hamiltonian(spec)
    evals, _ = eig_herm(h)
    chi_ang = TWO_PI * abs(chi_circuit(spec))
    gaps = np.diff(np.sort(evals))
    assert np.min(np.abs(gaps - 2 * chi_ang)) <= 1e-10


def test_effective_renormalized_uses_shifted_frequencies(lambda_spec):
    h = build_effective_hamiltonian(lambda_spec, renormalized=True)
    ren = renormalized_frequencies(lambda_spec)
    # |1,g,g> diagonal = shifted cavity frequency
    idx = 1 * 4 + 0
    assert h.dense()[idx, idx].real == pytest.approx(TWO_PI * ren["cavity"][0], rel=1e-12)


def test_matching_guess_near_scanned_point(circuit_spec):
    guess = matching_guess(circuit_spec, (1, ("g", "g")), (0, ("e", "e")))
    assert guess == pytest.approx(7.9655, abs=0.005)


def test_driven_effective_hamiltonian():
    spec = spec_from_config(preset_config("ghz"))
    h = build_effective_hamiltonian(spec)
    assert h.sig.dims == (1, 2, 2)
    chi_d = chi_drive_of(spec)
    el = h.dense()[3, 0]  # <ee| H |gg>
    assert abs(el) == pytest.approx(TWO_PI * abs(chi_d), rel=1e-12)
    # pump phase +pi/2 and the expansion sign make the element +i chi
    assert el == pytest.approx(1j * TWO_PI * chi_d, rel=1e-12)
