"""Run configuration, problem assembly, snapshots and benchmark sweeps."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .diagnostics import ErrorReport, convergence_table, l1_distance, l1_error, write_report_csv
from .dg import DGOperator, Discretization, SolutionField, project
from .equilibria import (
    CASES,
    PULSE_CENTERS,
    gaussian_pressure_pulse,
    get_case,
    initial_condition,
    orbital_period,
    planet_gravity,
)
from .euler import AdmissibilityError
from .grid import build_mesh, gauss_legendre, legendre_eval
from .limiter import LimiterConfig, PositivityLimiter
from .timestepping import StepControl, buffer_wrapper, cfl_dt, integrate, reset_inner, tableau, tableau_for_degree
from .well_balanced import WBOperator, build_cache, project_delta

__all__ = [
    "RunConfig",
    "ConfigError",
    "Problem",
    "Snapshot",
    "parse_config",
    "run_single",
    "run_convergence",
    "run_pulse_sweep",
    "run_disc",
    "output_dir",
    "JUPITER_LIMITER_ETA",
    "DISC_ANNULUS",
    "density_deviation",
    "annulus_max_deviation",
    "pulse_reference",
    "l1_quadrature",
]

OUTPUT_ENV = "WBDG_OUTPUT_DIR"
JUPITER_LIMITER_ETA = 9.5e-4
# radial window for disc diagnostics: clear of the inner reset disc and the
# outer damping zone
DISC_ANNULUS = (1.0, 3.5)
ORDERS = {"DG": range(2, 6), "WBDG": range(2, 4)}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything that defines one run.

    ``order`` follows the scheme labels (DG2 = linear polynomials). When
    ``t_final`` is unset the case default is used; disc runs may give
    ``rotations`` of the planet orbit instead.
    """

    case: str = "hydro1d"
    scheme: str = "WBDG"
    order: int = 2
    N: int = 32
    cfl: float = 0.2
    eta: float = 0.0
    t_final: Optional[float] = None
    rotations: Optional[float] = None
    strategy: str = "mem"
    limiter: Optional[bool] = None
    limiter_eps: Optional[float] = None
    output_every: Optional[float] = None
    output_dir: Optional[str] = None
    samples_per_cell: int = 4
    write_snapshots: bool = False
    l1_points: Optional[int] = None
    printed_tableau: bool = False
    reference: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        self.scheme = str(self.scheme).upper()
        if self.case not in CASES:
            raise ConfigError(f"unknown case {self.case!r}; choose from {sorted(CASES)}")
        if self.scheme not in ORDERS:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose DG or WBDG")
        if int(self.order) not in ORDERS[self.scheme]:
            lo, hi = ORDERS[self.scheme][0], ORDERS[self.scheme][-1]
            raise ConfigError(f"{self.scheme} supports orders {lo}..{hi}, got {self.order}")
        self.order = int(self.order)
        if int(self.N) < 1:
            raise ConfigError("N must be >= 1")
        self.N = int(self.N)
        if not self.eta >= 0.0:
            raise ConfigError("eta must be >= 0")
        if self.eta > 0.0 and self.case not in PULSE_CENTERS and self.case != "disc":
            raise ConfigError(f"case {self.case!r} defines no perturbation parameter")
        if self.rotations is not None and self.case != "disc":
            raise ConfigError("rotations only apply to the disc case")
        if self.strategy.lower() not in ("mem", "rec", "stored", "recompute"):
            raise ConfigError(f"unknown WB strategy {self.strategy!r}")
        if not self.cfl > 0.0:
            raise ConfigError("cfl must be positive")
        if self.t_final is not None and not self.t_final > 0.0:
            raise ConfigError("t_final must be positive")

    @property
    def degree(self) -> int:
        return self.order - 1

    @property
    def label(self) -> str:
        return f"{self.scheme}{self.order}"

    def resolved_t_final(self) -> float:
        if self.t_final is not None:
            return float(self.t_final)
        if self.case == "disc":
            return (self.rotations or 1.0) * orbital_period(2.2)
        return get_case(self.case).t_final

    def limiter_enabled(self) -> bool:
        if self.limiter is not None:
            return bool(self.limiter)
        if self.case != "disc":
            return False
        # the classical projection of the disc is not admissible near the
        # star, and large planets need limiting with either scheme
        return self.scheme == "DG" or self.eta >= JUPITER_LIMITER_ETA

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def hash(self) -> str:
        d = self.to_dict()
        d.pop("output_dir", None)
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def parse_config(path=None, **overrides) -> RunConfig:
    """Build a :class:`RunConfig` from a JSON file and keyword overrides.

    Overrides whose value is ``None`` are ignored, so unset command line
    flags never clobber file values.
    """
    data = {}
    if path is not None:
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    return RunConfig(**data)


def output_dir(config: Optional[RunConfig] = None) -> Path:
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env)
    if config is not None and config.output_dir:
        return Path(config.output_dir)
    return Path("wbdg_output")


# --- problem assembly -------------------------------------------------------

class Problem:
    """A configured discretisation ready to be marched in time."""

    def __init__(self, config: RunConfig):
        cfg = config
        self.config = cfg
        self.spec = spec = get_case(cfg.case)
        self.mesh = build_mesh(spec.dimension, spec.bounds, cfg.N)
        self.disc = disc = Discretization(self.mesh, cfg.degree, spec.gamma)
        self.wb = cfg.scheme == "WBDG"

        pert = None
        if cfg.eta > 0.0 and cfg.case in PULSE_CENTERS:
            pert = gaussian_pressure_pulse(PULSE_CENTERS[cfg.case], cfg.eta)
        self.perturbation = pert
        if cfg.case == "disc" and cfg.eta > 0.0:
            p = spec.params
            self.gravity = planet_gravity(cfg.eta, r_c=p["r_c"], star_softening=p["softening"])
        else:
            self.gravity = spec.gravity
        ic = initial_condition(spec, pert)

        t_setup = time.perf_counter()
        self.cache = None
        if self.wb:
            self.cache = build_cache(spec, disc, cfg.strategy)
            self.field: SolutionField = project_delta(ic, spec, disc, self.cache)
            self.operator = WBOperator(disc, self.gravity, self.cache)
        else:
            self.field = project(ic, disc)
            self.operator = DGOperator(disc, self.gravity, spec.primitive)
        self.setup_s = time.perf_counter() - t_setup

        self.hooks = []
        self.limiter = None
        if cfg.limiter_enabled():
            eps = cfg.limiter_eps
            if eps is None:
                # the tampered disc edge carries pressures of order 1e-10
                eps = 1e-13 if cfg.case == "disc" else 1e-10
            self.limiter = PositivityLimiter(disc, LimiterConfig(eps=eps), background=self.cache)
            self.hooks.append(self.limiter)

        centers = self.mesh.cell_centers()
        self.inner_mask = None
        self.buffer_weights = None
        if spec.inner_radius is not None:
            r = spec.radius(centers)
            self.inner_mask = r < spec.inner_radius
            if self.wb:
                target = 0.0
            else:
                eq = project(spec.primitive, disc).coeffs
                if self.limiter is not None:
                    self.limiter(eq)
                target = eq
            mask = self.inner_mask
            self.hooks.append(lambda U, t: reset_inner(U, target, mask))
        if spec.buffer is not None:
            self.buffer_weights = spec.buffer(spec.radius(centers))

        rhs = self.operator.residual
        if self.buffer_weights is not None:
            rhs = buffer_wrapper(rhs, self.buffer_weights)
        self.rhs = rhs

        self.tableau = (tableau(tableau_for_degree(cfg.degree).name, printed=True)
                        if cfg.printed_tableau else tableau_for_degree(cfg.degree))
        self._centers = centers
        self._grad_norm = None
        if not self.gravity.time_dependent:
            self._grad_norm = self._grad_norm_at(0.0)
        self._dt_mask = None if self.inner_mask is None else ~self.inner_mask

        for h in self.hooks:
            h(self.field.coeffs, 0.0)

    def _grad_norm_at(self, t):
        g = self.gravity(self._centers, t)
        return np.sqrt(np.sum(g * g, axis=0))

    def averages(self, U):
        d = self.disc
        avg = U[..., 0] * d.basis.left[0] if d.dim == 1 else U[..., 0, 0] * d.basis.left[0] ** 2
        if self.cache is not None:
            avg = avg + self.cache.averages
        return avg

    def dt(self, U, t):
        g = self._grad_norm if self._grad_norm is not None else self._grad_norm_at(t)
        return cfl_dt(self.averages(U), g, self.mesh.spacing, self.disc.degree,
                      self.config.cfl, self.disc.gamma, self._dt_mask)

    def control(self, output_times=()):
        return StepControl(cfl=self.config.cfl, t_final=self.config.resolved_t_final(),
                           output_times=tuple(output_times))

    def snapshot(self, U, t) -> "Snapshot":
        return Snapshot.from_problem(self, U, t)

    def run(self, on_stop=None, output_times=()):
        U, t, steps = integrate(self.field.coeffs, 0.0, self.rhs, self.tableau,
                                self.control(output_times), self.dt, self.hooks, on_stop)
        self.field.coeffs = U
        self.field.t = t
        return steps


# --- snapshots --------------------------------------------------------------

_MAGIC = b"WBDGSNAP"
_VERSION = 1


@dataclass
class Snapshot:
    """Modal solution at one instant plus the metadata to resample it.

    ``delta`` marks well-balanced coefficients; resampling then adds the
    analytic equilibrium of ``case``.
    """

    case: str
    scheme: str
    order: int
    dims: int
    N: int
    time: float
    config_hash: str
    bounds: tuple
    delta: bool
    coeffs: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_problem(cls, problem: Problem, U, t):
        cfg = problem.config
        return cls(cfg.case, cfg.scheme, cfg.order, problem.disc.dim, cfg.N, float(t), cfg.hash(),
                   tuple(tuple(b) for b in problem.mesh.bounds), problem.wb, np.array(U, copy=True),
                   dict(eta=cfg.eta))

    def header(self) -> dict:
        return dict(case=self.case, scheme=self.scheme, order=self.order, dims=self.dims, N=self.N,
                    time=self.time, config_hash=self.config_hash, bounds=self.bounds,
                    delta=self.delta, shape=list(self.coeffs.shape), meta=self.meta)

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        head = json.dumps(self.header(), sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<II", _VERSION, len(head)))
            fh.write(head)
            fh.write(np.ascontiguousarray(self.coeffs, dtype="<f8").tobytes())
        return path

    @classmethod
    def load(cls, path) -> "Snapshot":
        with open(path, "rb") as fh:
            if fh.read(len(_MAGIC)) != _MAGIC:
                raise ValueError(f"{path} is not a snapshot file")
            version, n = struct.unpack("<II", fh.read(8))
            if version != _VERSION:
                raise ValueError(f"unsupported snapshot version {version}")
            h = json.loads(fh.read(n))
            data = np.frombuffer(fh.read(), dtype="<f8").reshape(h["shape"]).copy()
        return cls(h["case"], h["scheme"], h["order"], h["dims"], h["N"], h["time"], h["config_hash"],
                   tuple(tuple(b) for b in h["bounds"]), h["delta"], data, h.get("meta", {}))

    @property
    def mesh(self):
        return build_mesh(self.dims, self.bounds, self.N)

    def conserved_at(self, coords, include_equilibrium=True):
        """Conserved state of the DG polynomial at physical points."""
        mesh = self.mesh
        deg = self.order - 1
        idx, phis = [], []
        for a, x in enumerate(coords):
            x = np.asarray(x, dtype=float)
            lo, _ = mesh.bounds[a]
            h = mesh.spacing[a]
            i = np.clip(np.floor((x - lo) / h).astype(int), 0, mesh.counts[a] - 1)
            xi = np.clip(2.0 * (x - (lo + (i + 0.5) * h)) / h, -1.0, 1.0)
            idx.append(i)
            phis.append(legendre_eval(deg, xi)[0])
        if self.dims == 1:
            c = self.coeffs[:, idx[0]]
            out = np.einsum("v...i,...i->v...", c, phis[0])
        else:
            c = self.coeffs[:, idx[0], idx[1]]
            out = np.einsum("v...ij,...i,...j->v...", c, phis[0], phis[1])
        if self.delta and include_equilibrium:
            out = out + get_case(self.case).conserved(tuple(np.asarray(x, float) for x in coords), check=False)
        return out

    def plotting_grid(self, samples_per_cell=4):
        """Uniform sample coordinates, ``samples_per_cell`` per cell and axis."""
        mesh = self.mesh
        axes = []
        for a in range(self.dims):
            lo, hi = mesh.bounds[a]
            n = mesh.counts[a] * samples_per_cell
            axes.append(lo + (np.arange(n) + 0.5) * (hi - lo) / n)
        if self.dims == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def sample(self, samples_per_cell=4):
        """``(coords, primitive values)`` on the plotting grid."""
        coords = self.plotting_grid(samples_per_cell)
        u = self.conserved_at(coords)
        gamma = get_case(self.case).gamma
        w = np.empty_like(u)
        w[0] = u[0]
        w[1:-1] = u[1:-1] / u[0]
        w[-1] = (gamma - 1.0) * (u[-1] - 0.5 * np.sum(u[1:-1] * w[1:-1], axis=0))
        return coords, w

    def write_csv(self, path, samples_per_cell=4):
        coords, w = self.sample(samples_per_cell)
        names = ["x", "y"][: self.dims] + (["rho", "vx", "p"] if self.dims == 1 else ["rho", "vx", "vy", "p"])
        cols = [c.ravel() for c in coords] + [v.ravel() for v in w]
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, np.column_stack(cols), delimiter=",", header=",".join(names), comments="",
                   fmt="%.17g")
        return path


# --- drivers ----------------------------------------------------------------

def _snapshot_name(cfg: RunConfig, t: float) -> str:
    return f"{cfg.case}_{cfg.label}_N{cfg.N}_eta{cfg.eta:g}_t{t:.6g}"


def run_single(config: RunConfig, problem: Optional[Problem] = None):
    """Project, march to the final time, and report errors.

    Errors are measured against ``config.reference`` (a snapshot file) when
    given, otherwise against the analytic equilibrium of the case. An
    admissibility failure ends the run early with ``report.failed`` set
    and the last good state in the snapshot.
    """
    cfg = config
    prob = problem or Problem(cfg)
    outdir = output_dir(cfg)
    times = []
    T = cfg.resolved_t_final()
    if cfg.output_every:
        k = int(math.floor(T / cfg.output_every + 1e-9))
        times = [i * cfg.output_every for i in range(1, k + 1) if i * cfg.output_every < T]
    snaps = []
    last = {"U": prob.field.coeffs.copy(), "t": 0.0}

    def on_stop(U, t):
        last["U"], last["t"] = U.copy(), t
        s = prob.snapshot(U, t)
        snaps.append(s)
        if cfg.write_snapshots:
            s.save(outdir / (_snapshot_name(cfg, t) + ".snap"))

    report = ErrorReport(cfg.case, cfg.scheme, cfg.order, cfg.N,
                         wb_cache_bytes=prob.cache.nbytes if prob.cache is not None else 0)
    t0 = time.perf_counter()
    try:
        report.steps = prob.run(on_stop, times)
    except (AdmissibilityError, FloatingPointError, RuntimeError) as exc:
        report.runtime_s = time.perf_counter() - t0
        report.failed = str(exc)
        snap = prob.snapshot(last["U"], last["t"])
        return snap, report
    report.runtime_s = time.perf_counter() - t0

    snap = prob.snapshot(prob.field.coeffs, prob.field.t)
    if cfg.write_snapshots:
        snap.save(outdir / (_snapshot_name(cfg, snap.time) + ".snap"))
        snap.write_csv(outdir / (_snapshot_name(cfg, snap.time) + ".csv"), cfg.samples_per_cell)
    report.errors = final_errors(prob, cfg)
    return snap, report


def l1_quadrature(cfg: RunConfig):
    """Gauss rule for error norms: ``l1_points`` or ``degree + 3`` points.

    The scheme's own nodes are avoided by default because the projection
    is interpolatory there, which inflates the observed order.
    """
    return gauss_legendre(cfg.l1_points or cfg.degree + 3)


def final_errors(prob: Problem, cfg: RunConfig) -> dict:
    quad = l1_quadrature(cfg)
    if cfg.reference:
        ref = Snapshot.load(cfg.reference)
        gamma = prob.disc.gamma

        def reference(coords):
            u = ref.conserved_at(coords)
            w = np.empty_like(u)
            w[0] = u[0]
            w[1:-1] = u[1:-1] / u[0]
            w[-1] = (gamma - 1.0) * (u[-1] - 0.5 * np.sum(u[1:-1] * w[1:-1], axis=0))
            return w

        return l1_error(prob.field, reference, quad)
    return l1_error(prob.field, prob.spec.primitive, quad)


def run_convergence(template: RunConfig, Ns: Sequence[int], orders: Sequence[int] = None,
                    schemes: Sequence[str] = None, csv_path=None) -> list[ErrorReport]:
    """Sweep resolutions (and orders / schemes); slopes filled per group."""
    if len(Ns) < 2:
        raise ConfigError("a convergence sweep needs at least two resolutions")
    orders = list(orders or [template.order])
    schemes = list(schemes or [template.scheme])
    reports = []
    for scheme in schemes:
        for order in orders:
            if order not in ORDERS[scheme.upper()]:
                continue
            for N in Ns:
                cfg = dataclasses.replace(template, scheme=scheme, order=order, N=N)
                try:
                    _, rep = run_single(cfg)
                except AdmissibilityError as exc:
                    rep = ErrorReport(cfg.case, cfg.scheme, cfg.order, N, failed=str(exc))
                reports.append(rep)
    convergence_table(reports)
    if csv_path is not None:
        Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
        write_report_csv(reports, csv_path)
    return reports


def pulse_reference(case: str, eta: float, N: int = None, order: int = 3, t_final=None,
                    cache_dir=None) -> Snapshot:
    """High-resolution WBDG reference for a pressure-pulse run (cached on disk)."""
    if N is None:
        N = 512 if get_case(case).dimension == 1 else 128
    cfg = RunConfig(case=case, scheme="WBDG", order=order, N=N, eta=eta, t_final=t_final)
    if cache_dir is not None:
        path = Path(cache_dir) / f"reference_{cfg.hash()}.snap"
        if path.exists():
            return Snapshot.load(path)
    snap, rep = run_single(cfg)
    if rep.failed:
        raise RuntimeError(f"reference run failed: {rep.failed}")
    if cache_dir is not None:
        snap.save(path)
    return snap


def pressure_deviation(prob: Problem, coords=None):
    """``p - p_eq`` at the volume quadrature points (or given coords)."""
    from .diagnostics import conserved_at

    d = prob.disc
    u = conserved_at(prob.field)
    coords = d.vol_coords if coords is None else coords
    p = (d.gamma - 1.0) * (u[-1] - 0.5 * np.sum(u[1:-1] ** 2, axis=0) / u[0])
    return p - prob.spec.primitive(coords)[-1]


def run_pulse_sweep(case: str, etas: Sequence[float], labels: Sequence[str], N: int = 64,
                    t_final: float = 0.25, reference_N: int = None, out=None,
                    samples_per_cell: int = 4) -> list[dict]:
    """Pulse-capture sweep: waveform samples and L1 distance to a reference.

    ``labels`` are scheme labels such as ``"DG2"`` or ``"WBDG2"``. Returns
    one dict per (eta, label) with the L1 distance of ``p - p_eq`` to the
    reference, the L1 mass of the initial pulse (amplitude included) and the
    sampled waveform.
    """
    rows = []
    outdir = Path(out) if out is not None else None
    for eta in etas:
        ref = pulse_reference(case, eta, reference_N, t_final=t_final, cache_dir=outdir)
        for label in labels:
            scheme = "WBDG" if label.upper().startswith("WB") else "DG"
            order = int(label[len(scheme):])
            cfg = RunConfig(case=case, scheme=scheme, order=order, N=N, eta=eta, t_final=t_final)
            prob = Problem(cfg)
            pulse_mass = _pulse_mass(prob, eta)
            t0 = time.perf_counter()
            failed = None
            try:
                prob.run()
            except AdmissibilityError as exc:
                failed = str(exc)
            runtime = time.perf_counter() - t0
            d = prob.disc
            dev = pressure_deviation(prob)
            u_ref = ref.conserved_at(d.vol_coords)
            p_ref = (d.gamma - 1.0) * (u_ref[-1] - 0.5 * np.sum(u_ref[1:-1] ** 2, axis=0) / u_ref[0])
            dev_ref = p_ref - prob.spec.primitive(d.vol_coords)[-1]
            dist = l1_distance(dev, dev_ref, d)
            snap = prob.snapshot(prob.field.coeffs, prob.field.t)
            coords, w = snap.sample(samples_per_cell)
            wave = w[-1] - prob.spec.primitive(coords)[-1]
            row = dict(case=case, eta=eta, label=label, N=N, l1_to_reference=dist, pulse_l1=pulse_mass,
                       runtime_s=runtime, failed=failed, coords=coords, waveform=wave)
            rows.append(row)
            if outdir is not None:
                outdir.mkdir(parents=True, exist_ok=True)
                cols = [c.ravel() for c in coords] + [wave.ravel()]
                names = ["x", "y"][: d.dim] + ["dp"]
                np.savetxt(outdir / f"pulse_{case}_{label}_N{N}_eta{eta:g}.csv", np.column_stack(cols),
                           delimiter=",", header=",".join(names), comments="", fmt="%.17g")
    if outdir is not None:
        with open(outdir / f"pulse_{case}_summary.csv", "w") as fh:
            fh.write("case,eta,label,N,l1_to_reference,pulse_l1,runtime_s,failed\n")
            for r in rows:
                fh.write(f"{r['case']},{r['eta']!r},{r['label']},{r['N']},{r['l1_to_reference']!r},"
                         f"{r['pulse_l1']!r},{r['runtime_s']:.6f},{'1' if r['failed'] else ''}\n")
    return rows


def _pulse_mass(prob: Problem, eta: float) -> float:
    """L1 norm of the initial pressure pulse on the domain."""
    if prob.perturbation is None:
        return 0.0
    d = prob.disc
    vals = prob.perturbation.shape(d.vol_coords)
    return l1_distance(vals, np.zeros_like(vals), d)


def run_disc(config: RunConfig, eta: float = None, rotations: float = None, out=None):
    """Disc run with one snapshot per planet revolution.

    Returns ``(snapshots, report, problem)``; a failure keeps the snapshots
    made so far and records the error in the report.
    """
    cfg = dataclasses.replace(config, case="disc",
                              eta=config.eta if eta is None else eta,
                              rotations=config.rotations if rotations is None else rotations,
                              t_final=None)
    prob = Problem(cfg)
    period = orbital_period(prob.spec.params["r_c"])
    n_rot = cfg.rotations or 1.0
    times = [k * period for k in range(1, int(math.floor(n_rot + 1e-9)) + 1)]
    snaps = []
    outdir = Path(out) if out is not None else None

    def on_stop(U, t):
        s = prob.snapshot(U, t)
        snaps.append(s)
        if outdir is not None:
            s.save(outdir / (_snapshot_name(cfg, t) + ".snap"))

    report = ErrorReport("disc", cfg.scheme, cfg.order, cfg.N,
                         wb_cache_bytes=prob.cache.nbytes if prob.cache is not None else 0)
    t0 = time.perf_counter()
    try:
        report.steps = prob.run(on_stop, times)
        report.errors = l1_error(prob.field, prob.spec.primitive, l1_quadrature(cfg))
    except (AdmissibilityError, FloatingPointError) as exc:
        report.failed = str(exc)
    report.runtime_s = time.perf_counter() - t0
    return snaps, report, prob


def density_deviation(snapshot: Snapshot, samples_per_cell=2):
    """``(coords, rho - rho_eq)`` on the plotting grid of a disc snapshot."""
    coords = snapshot.plotting_grid(samples_per_cell)
    u = snapshot.conserved_at(coords)
    return coords, u[0] - get_case(snapshot.case).primitive(coords)[0]


def annulus_max_deviation(snapshot: Snapshot, annulus=DISC_ANNULUS, samples_per_cell=2) -> float:
    """Largest ``|rho - rho_eq|`` of a disc snapshot inside the radial window."""
    (x, y), dev = density_deviation(snapshot, samples_per_cell)
    r = np.hypot(x, y)
    ring = (r > annulus[0]) & (r < annulus[1])
    return float(np.abs(dev[ring]).max())
