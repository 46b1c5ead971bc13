"""Time evolution: unitary propagation with harmonic drive terms and
Lindblad master-equation integration.

All Hamiltonians, drive operators, and rates arrive in angular units
(rad/ns); times are in nanoseconds.  The workhorse is an adaptive
high-order explicit Runge-Kutta pair (DOP853) at rtol 1e-9 / atol 1e-12;
a fixed-step classic RK4 mode exists for debugging.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .errors import IntegrationError, SimError
from .operators import OperatorMatrix, QuantumState, eig_herm

NORM_DRIFT_TOL = 1e-8
TRACE_DRIFT_TOL = 1e-8
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class TimeGrid:
    """Output sampling window; internal steps are adaptive."""

    t_start: float
    t_end: float
    n_samples: int

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise SimError("t_end must exceed t_start")
        if self.n_samples < 2:
            raise SimError("need at least two samples")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)


@dataclass(frozen=True)
class SolverOptions:
    rtol: float = 1e-9
    atol: float = 1e-12
    method: str = "DOP853"
    fixed_step: float | None = None  # debugging mode: classic RK4 at this step


@dataclass
class Trajectory:
    """Sampled observable traces plus the final state and solver stats."""

    times: np.ndarray
    traces: dict
    final_state: QuantumState
    metadata: dict = field(default_factory=dict)


def _drive_arrays(drives):
    out = []
    for op, omega, phase in drives:
        a = op.dense() if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=complex)
        out.append((a, float(omega), float(phase)))
    return out


def _rk4_fixed(rhs, t0, t1, y0, step):
    """Classic RK4 from t0 to t1 with at most `step`-sized strides."""
    n = max(1, int(np.ceil((t1 - t0) / step)))
    h = (t1 - t0) / n
    y = y0
    t = t0
    for _ in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def _integrate(rhs, grid: TimeGrid, y0, options: SolverOptions):
    """Return (samples array shape (n_samples, len(y0)), nfev)."""
    times = grid.times
    if options.fixed_step is not None:
        ys = [y0]
        y = y0
        for t0, t1 in zip(times[:-1], times[1:]):
            y = _rk4_fixed(rhs, t0, t1, y, options.fixed_step)
            ys.append(y)
        return np.array(ys), 0
    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        y0,
        method=options.method,
        rtol=options.rtol,
        atol=options.atol,
        t_eval=times,
        dense_output=False,
    )
    if not sol.success:
        raise IntegrationError(f"integrator failed: {sol.message}")
    return sol.y.T.copy(), int(sol.nfev)


def evolve_schrodinger(
    h: OperatorMatrix,
    drives,
    psi0: QuantumState,
    grid: TimeGrid,
    observables: dict,
    options: SolverOptions | None = None,
) -> Trajectory:
    """Integrate i d/dt psi = (H + sum_k A_k e^{-i(w_k t + phi_k)} + h.c.) psi.

    The Hamiltonian is shifted by the initial state's mean energy before
    integration; this changes only the global phase and lets the stepper
    track the dynamically relevant frequencies.
    """
    if psi0.kind != "ket":
        raise SimError("evolve_schrodinger needs a ket")
    if not h.is_hermitian(rtol=1e-9):
        raise SimError("Hamiltonian must be Hermitian")
    options = options or SolverOptions()
    hd = h.dense()
    psi = psi0.data.astype(complex)
    e_ref = float(np.real(np.vdot(psi, hd @ psi)))
    m0 = -1j * (hd - e_ref * np.eye(hd.shape[0]))
    drv = _drive_arrays(drives)

    if not drv:
        def rhs(t, y):
            return m0 @ y
    else:
        def rhs(t, y):
            out = m0 @ y
            for a, omega, phase in drv:
                ph = np.exp(-1j * (omega * t + phase))
                out = out - 1j * (ph * (a @ y) + np.conj(ph) * (a.conj().T @ y))
            return out

    wall = time.perf_counter()
    samples, nfev = _integrate(rhs, grid, psi, options)
    wall = time.perf_counter() - wall

    norms = np.linalg.norm(samples, axis=1)
    drift = float(np.abs(norms - 1.0).max())
    if drift > NORM_DRIFT_TOL:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL:.1e} "
            f"(nfev={nfev}, rtol={options.rtol}, atol={options.atol})"
        )

    traces = _record_ket_traces(samples, observables)
    final = QuantumState(psi0.sig, "ket", samples[-1], check=False)
    meta = {
        "solver": options.method if options.fixed_step is None else "rk4-fixed",
        "nfev": nfev,
        "rtol": options.rtol,
        "atol": options.atol,
        "norm_drift": drift,
        "wall_time_s": wall,
    }
    return Trajectory(grid.times, traces, final, meta)


def _record_ket_traces(samples, observables) -> dict:
    traces = {}
    for name, op in observables.items():
        od = op.dense()
        vals = np.einsum("ti,ij,tj->t", samples.conj(), od, samples)
        traces[name] = np.real(vals)
    return traces


# -- Lindblad -----------------------------------------------------------


def _commutator_superop(m: sp.spmatrix, ident: sp.spmatrix) -> sp.csr_matrix:
    # row-stacked vec: vec(A rho B) = (A kron B^T) vec(rho)
    return (-1j * (sp.kron(m, ident) - sp.kron(ident, m.T))).tocsr()


def build_liouvillian(h: OperatorMatrix, channels) -> sp.csr_matrix:
    """Static superoperator for dρ/dt = -i[H,ρ] + Σ r (OρO+ - {O+O,ρ}/2)."""
    dim = h.sig.total
    ident = sp.identity(dim, dtype=complex, format="csr")
    hs = sp.csr_matrix(h.dense())
    liou = _commutator_superop(hs, ident)
    for op, rate in channels:
        o = sp.csr_matrix(op.dense() if isinstance(op, OperatorMatrix) else op)
        odo = (o.conj().T @ o).tocsr()
        liou = liou + rate * (
            sp.kron(o, o.conj())
            - 0.5 * sp.kron(odo, ident)
            - 0.5 * sp.kron(ident, odo.T)
        )
    return liou.tocsr()


def evolve_lindblad(
    h: OperatorMatrix,
    drives,
    channels,
    rho0: QuantumState,
    grid: TimeGrid,
    observables: dict,
    options: SolverOptions | None = None,
) -> Trajectory:
    """Master-equation integration; kets are promoted to density matrices.

    The time-independent part of the superoperator is assembled once;
    drives contribute phased commutator superoperators per evaluation.
    Hermiticity repair happens at output samples only, never inside the
    step loop, so the integrator's error estimate stays honest.
    """
    if rho0.kind == "ket":
        rho0 = rho0.to_density()
    if not h.is_hermitian(rtol=1e-9):
        raise SimError("Hamiltonian must be Hermitian")
    options = options or SolverOptions()
    dim = h.sig.total
    liou = build_liouvillian(h, channels)
    drv = _drive_arrays(drives)
    ident = sp.identity(dim, dtype=complex, format="csr")
    drive_supers = [
        (_commutator_superop(sp.csr_matrix(a), ident),
         _commutator_superop(sp.csr_matrix(a.conj().T), ident),
         omega, phase)
        for a, omega, phase in drv
    ]

    if not drive_supers:
        def rhs(t, v):
            return liou @ v
    else:
        def rhs(t, v):
            out = liou @ v
            for k_a, k_ad, omega, phase in drive_supers:
                ph = np.exp(-1j * (omega * t + phase))
                out = out + ph * (k_a @ v) + np.conj(ph) * (k_ad @ v)
            return out

    wall = time.perf_counter()
    samples, nfev = _integrate(rhs, grid, rho0.data.reshape(-1), options)
    wall = time.perf_counter() - wall

    rhos = samples.reshape(-1, dim, dim)
    rhos = 0.5 * (rhos + np.conj(np.transpose(rhos, (0, 2, 1))))
    trace = np.einsum("tii->t", rhos).real
    trace_drift = float(np.abs(trace - 1.0).max())
    if trace_drift > TRACE_DRIFT_TOL:
        raise IntegrationError(
            f"trace drift {trace_drift:.3e} exceeds {TRACE_DRIFT_TOL:.1e} (nfev={nfev})"
        )
    min_eig = min(float(np.linalg.eigvalsh(r).min()) for r in rhos)
    if min_eig < -POSITIVITY_TOL:
        raise IntegrationError(f"density matrix lost positivity: min eig {min_eig:.3e}")

    traces = {}
    for name, op in observables.items():
        od = op.dense()
        traces[name] = np.real(np.einsum("tij,ji->t", rhos, od))
    final = QuantumState(rho0.sig, "density", rhos[-1], check=False)
    meta = {
        "solver": options.method if options.fixed_step is None else "rk4-fixed",
        "nfev": nfev,
        "rtol": options.rtol,
        "atol": options.atol,
        "trace_drift": trace_drift,
        "min_eigenvalue": min_eig,
        "wall_time_s": wall,
    }
    return Trajectory(grid.times, traces, final, meta)


# -- exact propagator ---------------------------------------------------


def propagator_expm(h: OperatorMatrix, t: float) -> OperatorMatrix:
    """U = exp(-iHt) through the spectral decomposition (time-independent H)."""
    evals, evecs = eig_herm(h)
    u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
    return OperatorMatrix(h.sig, u)


def expm_population_trace(h: OperatorMatrix, psi0: np.ndarray, out_index: int, times) -> np.ndarray:
    """|<out| exp(-iHt) |psi0>|^2 on a time grid, via one diagonalization."""
    evals, evecs = eig_herm(h)
    c0 = evecs.conj().T @ psi0
    row = evecs[out_index, :]
    amps = (row[None, :] * np.exp(-1j * np.outer(np.asarray(times), evals))) @ c0
    return np.abs(amps) ** 2
