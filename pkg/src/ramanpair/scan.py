"""Locate the frequency that compensates dispersive shifts.

The matching condition that makes the joint-excitation doublet degenerate
is shifted by level renormalizations; these scans find the compensated
operating point the way the experiment would: coarse grid, then
golden-section refinement of the bracketed extremum down to 10 kHz.

Two objectives:
  peak_transfer  max over a short window of the target-state population,
                 computed through the spectral propagator (undriven
                 systems) or the pump-frame static Hamiltonian (driven).
  min_gap        splitting of the dressed doublet identified by overlap
                 with the bare initial/target pair.

Grid evaluations run concurrently; SIM_THREADS caps the pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, ScanError
from .model import (
    TWO_PI,
    SystemSpec,
    bare_index,
    build_drive_terms,
    build_static_hamiltonian,
    excitation_number_candidate,
)
from .effective import chi_drive_of, chi_of
from .operators import eig_herm

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
DEFAULT_BUDGET = 41
DEFAULT_RESOLUTION = 1e-5  # GHz, i.e. 10 kHz
OVERLAP_FLOOR = 0.5


@dataclass
class ScanResult:
    samples: list = field(default_factory=list)   # (frequency GHz, objective)
    best: tuple = (0.0, 0.0)
    metadata: dict = field(default_factory=dict)


def _max_workers() -> int:
    env = os.environ.get("SIM_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _with_cavity(spec: SystemSpec, freq: float) -> SystemSpec:
    return replace(spec, cavity=replace(spec.cavity, frequency=freq))


def _with_drive_frequency(spec: SystemSpec, freq: float) -> SystemSpec:
    atom0 = spec.atoms[0]
    drives = tuple(replace(d, frequency=freq) for d in atom0.drives)
    atoms = (replace(atom0, drives=drives),) + spec.atoms[1:]
    return replace(spec, atoms=atoms)


def _pump_frame_hamiltonian(spec: SystemSpec) -> np.ndarray:
    """Static Hamiltonian in the frame rotating at the shared drive frequency.

    Valid when every drive sits on atom 1 at one frequency; populations are
    frame-invariant, so transfer objectives may be evaluated here.
    """
    drives = build_drive_terms(spec)
    freqs = {round(w, 12) for _, w, _ in drives}
    if len(freqs) != 1:
        raise ConfigError("pump-frame evaluation needs a single shared drive frequency")
    omega = next(iter(freqs))
    counter = excitation_number_candidate(spec).dense()
    h = build_static_hamiltonian(spec).dense() - omega * counter
    for op, _, phase in drives:
        term = op.dense() * np.exp(-1j * phase)
        h = h + term + term.conj().T
    return h


def _state_index(spec: SystemSpec, model: str, state) -> int:
    n, levels = state
    if model == "full":
        return bare_index(spec, n, levels)
    dims = (spec.cavity.n_max + 1, 2, 2)
    idx = n
    for lvl in levels:
        if lvl not in ("g", "e"):
            raise ConfigError(f"level {lvl!r} does not exist in the reduced model")
        idx = idx * 2 + (0 if lvl == "g" else 1)
    if not 0 <= n <= spec.cavity.n_max:
        raise ConfigError("photon number outside truncation")
    return idx


def _hamiltonian_for(spec: SystemSpec, model: str):
    if model == "effective":
        from .effective import build_effective_hamiltonian

        return build_effective_hamiltonian(spec)
    return build_static_hamiltonian(spec)


def _transfer_objective(spec: SystemSpec, model: str, initial, target, window: float):
    i_idx = _state_index(spec, model, initial)
    t_idx = _state_index(spec, model, target)
    if model == "full" and any(a.drives for a in spec.atoms):
        h = _pump_frame_hamiltonian(spec)
    else:
        h = _hamiltonian_for(spec, model).dense()
    psi0 = np.zeros(h.shape[0], dtype=complex)
    psi0[i_idx] = 1.0
    times = np.linspace(0.0, window, 3001)
    evals, evecs = np.linalg.eigh(h)
    c0 = evecs.conj().T @ psi0
    amps = (evecs[t_idx, :][None, :] * np.exp(-1j * np.outer(times, evals))) @ c0
    return float((np.abs(amps) ** 2).max())


def _gap_objective(spec: SystemSpec, model: str, initial, target):
    h = _hamiltonian_for(spec, model)
    evals, evecs = eig_herm(h)
    i_idx = _state_index(spec, model, initial)
    t_idx = _state_index(spec, model, target)
    weight = np.abs(evecs[i_idx, :]) ** 2 + np.abs(evecs[t_idx, :]) ** 2
    order = np.argsort(weight)
    a, b = order[-1], order[-2]
    if weight[a] < OVERLAP_FLOOR or weight[b] < OVERLAP_FLOOR:
        raise ScanError(
            f"ambiguous dressed-state identification: pair overlaps "
            f"{weight[a]:.3f}, {weight[b]:.3f} below {OVERLAP_FLOOR}"
        )
    return float(abs(evals[a] - evals[b]))


def _default_window(spec: SystemSpec) -> float:
    """1.5 x the analytic transfer period, pi / chi in angular terms."""
    try:
        if any(a.drives for a in spec.atoms):
            chi = chi_drive_of(spec)
        else:
            chi = chi_of(spec)
    except ConfigError:
        raise ConfigError(
            "no analytic coupling for this family: pass an explicit scan window"
        )
    if chi == 0.0:
        raise ConfigError("zero analytic coupling: pass an explicit scan window")
    return 1.5 * np.pi / (TWO_PI * abs(chi))


def _scan(
    make_spec,
    lo: float,
    hi: float,
    objective: str,
    budget: int,
    resolution: float,
    window,
    initial,
    target,
    parameter: str,
    model: str = "full",
) -> ScanResult:
    if hi <= lo:
        raise ScanError("scan range is empty")
    if objective not in ("peak_transfer", "min_gap"):
        raise ScanError(f"unknown objective {objective!r}")

    if objective == "peak_transfer":
        if window is None:
            window = _default_window(make_spec(0.5 * (lo + hi)))
        def evaluate(freq):
            return _transfer_objective(make_spec(freq), model, initial, target, window)
        sign = -1.0  # maximize
    else:
        def evaluate(freq):
            return _gap_objective(make_spec(freq), model, initial, target)
        sign = 1.0   # minimize

    grid = np.linspace(lo, hi, budget)
    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, grid))
    else:
        values = [evaluate(f) for f in grid]
    samples = list(zip(grid.tolist(), values))
    n_eval = budget

    signed = [sign * v for v in values]
    ib = int(np.argmin(signed))
    if ib in (0, budget - 1):
        raise ScanError(
            f"objective extremum sits at the range edge ({grid[ib]:.6f} GHz); "
            "the scan range does not bracket it"
        )

    a, b = grid[ib - 1], grid[ib + 1]
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = sign * evaluate(c), sign * evaluate(d)
    samples += [(c, sign * fc), (d, sign * fd)]
    n_eval += 2
    while b - a > resolution:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = sign * evaluate(c)
            samples.append((c, sign * fc))
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = sign * evaluate(d)
            samples.append((d, sign * fd))
        n_eval += 1

    best_freq = 0.5 * (a + b)
    best_val = evaluate(best_freq)
    samples.append((best_freq, best_val))
    n_eval += 1
    samples.sort(key=lambda p: p[0])
    return ScanResult(
        samples=samples,
        best=(best_freq, best_val),
        metadata={
            "parameter": parameter,
            "objective": objective,
            "budget": budget,
            "resolution_ghz": resolution,
            "evaluations": n_eval,
            "window_ns": window,
        },
    )


def scan_cavity_frequency(
    spec: SystemSpec,
    lo: float,
    hi: float,
    objective: str = "peak_transfer",
    budget: int = DEFAULT_BUDGET,
    resolution: float = DEFAULT_RESOLUTION,
    window: float | None = None,
    initial=None,
    target=None,
    model: str = "full",
) -> ScanResult:
    """Scan the cavity frequency over [lo, hi] GHz for the matching point."""
    initial = initial or (1, ("g",) * len(spec.atoms))
    target = target or (0, ("e",) * len(spec.atoms))
    return _scan(
        lambda f: _with_cavity(spec, f),
        lo, hi, objective, budget, resolution, window, initial, target,
        parameter="cavity_frequency",
        model=model,
    )


def scan_drive_frequency(
    spec: SystemSpec,
    lo: float,
    hi: float,
    objective: str = "peak_transfer",
    budget: int = DEFAULT_BUDGET,
    resolution: float = DEFAULT_RESOLUTION,
    window: float | None = None,
    initial=None,
    target=None,
) -> ScanResult:
    """Scan the shared classical-drive frequency of atom 1 over [lo, hi] GHz."""
    if not spec.atoms[0].drives:
        raise ConfigError("no drives on atom 1 to scan")
    initial = initial or (0, ("g",) * len(spec.atoms))
    target = target or (0, ("e",) * len(spec.atoms))
    return _scan(
        lambda f: _with_drive_frequency(spec, f),
        lo, hi, objective, budget, resolution, window, initial, target,
        parameter="drive_frequency",
    )
