"""Measurement layer: the named operators recorded along trajectories.

Every observable is a projector or number operator built in the bare
product basis, which is the faithful readout basis in the dispersive
regime.  Trace names are fixed so CSV schemas stay stable:
n_cav, exc_q1, exc_q2, leak_q1, leak_q2, g2, pop_<state>.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError
from .operators import DimSignature, OperatorMatrix, QuantumState, destroy, embed, transition


def _zero(sig: DimSignature) -> OperatorMatrix:
    return OperatorMatrix(sig, np.zeros((sig.total, sig.total), dtype=complex))


def mean_photon(sig: DimSignature) -> OperatorMatrix:
    """Cavity number operator a+a."""
    a = embed(destroy(sig.dims[0] - 1), 0, sig)
    return a.dag() @ a


def qubit_excitation(sig: DimSignature, q: int) -> OperatorMatrix:
    """Projector onto |e> of atom q (1-based)."""
    d = sig.dims[q]
    return embed(transition(d, 1, 1), q, sig)


def leakage(sig: DimSignature, q: int) -> OperatorMatrix:
    """Projector onto the auxiliary level |i> of atom q; zero if absent."""
    d = sig.dims[q]
    if d < 3:
        return _zero(sig)
    return embed(transition(d, 2, 2), q, sig)


def g2_qubits(sig: DimSignature) -> OperatorMatrix:
    """Equal-time two-qubit correlation <s1+ s2+ s2- s1->: joint |e,e| projector."""
    return qubit_excitation(sig, 1) @ qubit_excitation(sig, 2)


def population(sig: DimSignature, photon_n: int, level_indices) -> OperatorMatrix:
    """Projector onto the bare product state |photon_n, levels...>."""
    idx = sig.index((photon_n,) + tuple(level_indices))
    data = np.zeros((sig.total, sig.total), dtype=complex)
    data[idx, idx] = 1.0
    return OperatorMatrix(sig, data)


def _pop_or_zero(sig: DimSignature, photon_n: int, level_indices) -> OperatorMatrix:
    try:
        return population(sig, photon_n, level_indices)
    except DimensionMismatchError:
        return _zero(sig)  # state outside this truncation never has weight


def standard_observables(sig: DimSignature, extra_populations=()) -> dict:
    """The fixed trace registry for a cavity + two-atom signature.

    extra_populations: iterable of (name, photon_n, level_indices) to append,
    e.g. ("pop_2gg", 2, (0, 0)).
    """
    if len(sig.dims) != 3:
        raise DimensionMismatchError("standard observables need cavity + two atoms")
    obs = {
        "n_cav": mean_photon(sig),
        "exc_q1": qubit_excitation(sig, 1),
        "exc_q2": qubit_excitation(sig, 2),
        "leak_q1": leakage(sig, 1),
        "leak_q2": leakage(sig, 2),
        "g2": g2_qubits(sig),
        "pop_1gg": _pop_or_zero(sig, 1, (0, 0)),
        "pop_0ee": _pop_or_zero(sig, 0, (1, 1)),
    }
    for name, n, levels in extra_populations:
        obs[name] = _pop_or_zero(sig, n, levels)
    return obs


def state_fidelity(state: QuantumState, target: QuantumState) -> float:
    """|<target|psi>|^2 for kets, <target|rho|target> for density matrices."""
    if state.sig != target.sig:
        raise DimensionMismatchError("state and target signatures differ")
    if target.kind != "ket":
        raise DimensionMismatchError("pure targets only")
    if state.kind == "ket":
        return float(np.abs(np.vdot(target.data, state.data)) ** 2)
    return float(np.real(np.vdot(target.data, state.data @ target.data)))
