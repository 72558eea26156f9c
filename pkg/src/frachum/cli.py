"""Command-line experiment runner.

A problem is described by plain ``key = value`` lines (``#`` starts a
comment)::

    alpha    = 0.7
    T        = 1.0
    actuator = zone:0.25,0.75     # or point:0.3
    region   = 0.3,0.7
    z0       = zero               # zero | mode:i | bump:center,width | coeffs:c1,c2,...
    z_T      = mode:2
    n_modes  = 32
    epsilon  = 1e-8
    gain_tol = 1e-10
    quad     = 32x8               # panels x nodes per panel
    out_dir  = out

Modes: ``analyze`` writes the controllability report only, ``simulate``
runs the uncontrolled dynamics to ``T``, ``hum`` synthesizes and audits the
minimum-energy control.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from frachum import __version__
from frachum.actuators import ActuatorSpec, mode_gains
from frachum.controllability import analyze
from frachum.dynamics import SIGNAL_SAMPLES, ControlSignal, QuadratureConfig, mild_solution
from frachum.errors import DomainError, InputError, UnreachableTargetError
from frachum.hum import (
    ENERGY_NODES,
    ENERGY_PANELS,
    GRAMIAN_RTOL,
    RESIDUAL_TOL,
    assemble_gramian,
    assemble_lambda,
    solve_hum,
    verify_minimality,
)
from frachum.mlf import DEFAULT_MLF
from frachum.spectral import (
    EigenBasis,
    Region,
    SpectralField,
    build_basis,
    evaluate_field,
    expand_function,
    region_mass,
    restrict_norm,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNREACHABLE = 2

STATE_POINTS = 401
MODES = ("simulate", "analyze", "hum")


class ConfigError(InputError):
    """Bad configuration text; the message names the key and line."""


@dataclass(frozen=True)
class Profile:
    """A named field profile: ``zero``, ``mode``, ``bump`` or ``coeffs``."""

    kind: str
    params: tuple[float, ...] = ()

    def describe(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "mode":
            return f"mode:{int(self.params[0])}"
        return f"{self.kind}:" + ",".join(repr(p) for p in self.params)

    def field(self, basis: EigenBasis) -> SpectralField:
        n = basis.n_modes
        if self.kind == "zero":
            return SpectralField.zeros(n)
        if self.kind == "mode":
            return SpectralField.mode(int(self.params[0]), n)
        if self.kind == "coeffs":
            c = np.zeros(n)
            m = min(n, len(self.params))
            c[:m] = self.params[:m]
            return SpectralField(c)
        center, width = self.params

        def bump(x):
            s = (np.asarray(x) - center) / width
            out = np.zeros_like(s)
            inside = np.abs(s) < 1.0
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
            return out

        return expand_function(bump, basis, quad_nodes=64 * n)


ZERO = Profile("zero")


@dataclass(frozen=True)
class ProblemConfig:
    alpha: float
    actuator: ActuatorSpec
    T: float = 1.0
    region: Region = Region(0.0, 1.0)
    z0: Profile = ZERO
    z_T: Profile = ZERO
    n_modes: int = 32
    epsilon: float = 1e-8
    gain_tol: float = 1e-10
    quad: QuadratureConfig = QuadratureConfig()
    out_dir: str = "out"
    seed: int = 1
    minimality_trials: int = 16
    # keys that were given explicitly; everything else is a default
    explicit: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha out of (0,1]: {self.alpha}")
        if not self.T > 0.0:
            raise DomainError(f"T must be positive, got {self.T}")
        if self.n_modes < 1:
            raise DomainError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.epsilon < 0.0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")
        if not self.gain_tol > 0.0:
            raise DomainError(f"gain_tol must be positive, got {self.gain_tol}")
        if self.minimality_trials < 0:
            raise DomainError("minimality_trials must be >= 0")
        for name in ("z0", "z_T"):
            p = getattr(self, name)
            if p.kind == "mode" and not 1 <= p.params[0] <= self.n_modes:
                raise DomainError(f"{name}: mode {int(p.params[0])} outside 1..{self.n_modes}")

    def with_overrides(self, **kw) -> ProblemConfig:
        kw = {k: v for k, v in kw.items() if v is not None}
        return dataclasses.replace(self, explicit=self.explicit | frozenset(kw), **kw)


# {{{ parsing


def _floats(text: str, count: int | None = None) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if any(p == "" for p in parts):
        raise ValueError("empty list entry")
    vals = tuple(float(p) for p in parts)
    if count is not None and len(vals) != count:
        raise ValueError(f"expected {count} comma-separated numbers")
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("values must be finite")
    return vals


def _parse_actuator(text: str) -> ActuatorSpec:
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == "zone":
        a1, a2 = _floats(rest, 2)
        return ActuatorSpec.zone(a1, a2)
    if kind == "point":
        (b,) = _floats(rest, 1)
        return ActuatorSpec.pointwise(b)
    raise ValueError("expected zone:a1,a2 or point:b")


def _parse_region(text: str) -> Region:
    s1, s2 = _floats(text, 2)
    return Region(s1, s2)


def _parse_profile(text: str) -> Profile:
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == "zero" and not rest.strip():
        return ZERO
    if kind == "mode":
        i = int(rest.strip())
        if i < 1:
            raise ValueError("mode index must be >= 1")
        return Profile("mode", (float(i),))
    if kind == "bump":
        center, width = _floats(rest, 2)
        if not width > 0:
            raise ValueError("bump width must be positive")
        return Profile("bump", (center, width))
    if kind == "coeffs":
        return Profile("coeffs", _floats(rest))
    raise ValueError("expected zero, mode:i, bump:center,width or coeffs:list")


def _parse_quad(text: str) -> QuadratureConfig:
    panels, sep, nodes = text.lower().partition("x")
    if not sep:
        raise ValueError("expected <panels>x<nodes>")
    return QuadratureConfig(int(panels), int(nodes))


def _parse_count(text: str) -> int:
    return int(text.strip())


_PARSERS = {
    "alpha": float,
    "T": float,
    "n_modes": _parse_count,
    "actuator": _parse_actuator,
    "region": _parse_region,
    "z0": _parse_profile,
    "z_T": _parse_profile,
    "epsilon": float,
    "gain_tol": float,
    "quad": _parse_quad,
    "out_dir": str,
    "seed": _parse_count,
    "minimality_trials": _parse_count,
}
REQUIRED = ("alpha", "actuator")


def parse_config(text: str, base: ProblemConfig | None = None) -> ProblemConfig:
    """Parse ``key = value`` lines into a validated :class:`ProblemConfig`.

    Keys given in ``text`` override those of ``base``. Errors name the
    offending key and its line number.
    """
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except (ValueError, DomainError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
        lines[key] = lineno

    if base is not None:
        merged = {f.name: getattr(base, f.name) for f in dataclasses.fields(base)
                  if f.name != "explicit"}
        merged.update(values)
        explicit = base.explicit | frozenset(values)
    else:
        missing = [k for k in REQUIRED if k not in values]
        if missing:
            raise ConfigError(f"missing required key {missing[0]!r}")
        merged = dict(values)
        explicit = frozenset(values)
    try:
        return ProblemConfig(**merged, explicit=explicit)
    except DomainError as exc:
        msg = str(exc)
        key = next((k for k in _PARSERS if msg.startswith(k)), None)
        where = f"line {lines[key]}: " if key in lines else ""
        raise ConfigError(f"{where}{msg}") from None


PRESETS = {
    "example41": """
        alpha = 0.7
        T = 1.0
        actuator = zone:0.25,0.75
        region = 0.3,0.7
        z0 = zero
        z_T = mode:2
    """,
    "example42": """
        alpha = 0.7
        T = 1.0
        actuator = point:0.3
        region = 0.2,0.8
        z0 = zero
        z_T = mode:1
    """,
}


def preset(name: str) -> ProblemConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return parse_config(PRESETS[name])


# }}}

# {{{ output


def _fmt(x: float) -> str:
    return "%.17g" % x


def _num(x: float) -> str:
    # shortest text that reads back to the same float
    return repr(float(x))


def write_csv(path: Path, header: tuple[str, ...], columns) -> None:
    rows = np.column_stack(columns)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _config_lines(cfg: ProblemConfig) -> list[str]:
    def tag(key):
        return "" if key in cfg.explicit else "  (default)"

    a = cfg.actuator
    return [
        "configuration",
        f"  alpha: {_num(cfg.alpha)}{tag('alpha')}",
        f"  T: {_num(cfg.T)}{tag('T')}",
        f"  n_modes: {cfg.n_modes}{tag('n_modes')}",
        f"  actuator: {a.describe()}{tag('actuator')}",
        f"  region: {_num(cfg.region.sigma1)},{_num(cfg.region.sigma2)}{tag('region')}",
        f"  z0: {cfg.z0.describe()}{tag('z0')}",
        f"  z_T: {cfg.z_T.describe()}{tag('z_T')}",
        f"  epsilon: {_num(cfg.epsilon)}{tag('epsilon')}",
        f"  gain_tol: {_num(cfg.gain_tol)}{tag('gain_tol')}",
        f"  quad: {cfg.quad.panels}x{cfg.quad.nodes_per_panel} "
        f"transform={cfg.quad.transform}{tag('quad')}",
        f"  seed: {cfg.seed}{tag('seed')}",
        f"  minimality_trials: {cfg.minimality_trials}{tag('minimality_trials')}",
        f"  out_dir: {cfg.out_dir}{tag('out_dir')}",
        "numerical settings",
        f"  mittag_leffler: series_tol={_num(DEFAULT_MLF.series_tol)} "
        f"series_max_terms={DEFAULT_MLF.series_max_terms} "
        f"asymptotic_crossover={_num(DEFAULT_MLF.asymptotic_crossover)} "
        f"asymptotic_terms={DEFAULT_MLF.asymptotic_terms}",
        f"  gramian_rtol: {_num(GRAMIAN_RTOL)}",
        f"  energy_quadrature: {ENERGY_PANELS}x{ENERGY_NODES}",
        f"  residual_tol (relative): {_num(RESIDUAL_TOL)}",
        f"  signal_samples: {SIGNAL_SAMPLES}",
        f"  state_points: {STATE_POINTS}",
        "  minimality tolerances: orthogonality=1e-06 energy_slack=1e-08 steering=1e-06",
    ]


def _write_state(out: Path, target: SpectralField, achieved: SpectralField) -> None:
    x = np.linspace(0.0, 1.0, STATE_POINTS)
    write_csv(out / "state_T.csv", ("x", "z_T_target", "z_T_achieved"),
              (x, evaluate_field(target, x), evaluate_field(achieved, x)))


def _write_control(out: Path, u: ControlSignal) -> None:
    write_csv(out / "control.csv", ("t", "u_star"), (u.grid, u.values))


# }}}


def run_experiment(cfg: ProblemConfig, mode: str = "hum") -> int:
    """Run one experiment, write its files and return the exit status."""
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    basis = build_basis(cfg.n_modes)
    mass = region_mass(cfg.region, basis)
    report = analyze(cfg.actuator, cfg.region, basis, cfg.gain_tol)
    z0 = cfg.z0.field(basis)
    target = cfg.z_T.field(basis)

    lines = [f"frachum {__version__} experiment report", f"mode: {mode}"]
    lines += _config_lines(cfg)
    lines.append(report.to_text())
    status = EXIT_OK

    if mode == "simulate":
        u = ControlSignal.zero(cfg.T)
        final = mild_solution(z0, cfg.actuator, u, cfg.alpha, cfg.T, basis, cfg.quad)
        lines += [
            "simulation (uncontrolled, u = 0)",
            f"  ||z(T)||_L2(0,1): {_fmt(final.norm())}",
            f"  ||p_omega z(T)||: {_fmt(restrict_norm(final, mass))}",
            f"  ||p_omega (z(T) - z_T)||: {_fmt(restrict_norm(final - target, mass))}",
        ]
        _write_state(out, target, final)
        _write_control(out, u)

    elif mode == "hum":
        if not 0.5 < cfg.alpha <= 1.0:
            raise DomainError(f"alpha: HUM synthesis needs alpha in (1/2, 1), got {cfg.alpha}")
        gram = assemble_gramian(cfg.alpha, cfg.T, basis, cfg.quad)
        gains = mode_gains(cfg.actuator, basis)
        op = assemble_lambda(gram, gains, mass, cfg.epsilon, cfg.gain_tol)
        try:
            sol = solve_hum(op, target, z0, cfg.alpha, cfg.T, basis, cfg.actuator, cfg.quad)
        except UnreachableTargetError as exc:
            lines += ["hum", f"  status: {exc}"]
            (out / "report.txt").write_text("\n".join(lines) + "\n")
            return EXIT_UNREACHABLE
        energy_gap = abs(sol.energy - sol.zstar_norm**2) / max(sol.energy, 1e-300)
        lines += [
            "hum",
            f"  status: {sol.status}",
            f"  residual ||p_omega z(T,u*) - z_T||: {_fmt(sol.residual)}",
            f"  relative residual: {_fmt(sol.relative_residual)}",
            f"  energy J(u*): {_fmt(sol.energy)}",
            f"  ||f||_Z*: {_fmt(sol.zstar_norm)}",
            f"  |J(u*) - ||f||_Z*^2| / J(u*): {_fmt(energy_gap)}",
            f"  gramian change under panel doubling: {_fmt(gram.error)}",
            f"  obstructed target norm on region: {_fmt(sol.obstructed_norm)}",
            "  reachable / obstructed split of z_T - phi_0(T) (mode, reachable, obstructed):",
        ]
        lines += [f"    {i:4d}  {_fmt(r)}  {_fmt(o)}" for i, (r, o) in
                  enumerate(zip(sol.reachable.coeffs, sol.obstructed.coeffs), start=1)]
        if cfg.minimality_trials:
            mini = verify_minimality(sol, op, gains, mass, trials=cfg.minimality_trials,
                                     seed=cfg.seed)
            lines += [
                "minimality audit",
                f"  kernel dimension: {mini.kernel_dim}",
                f"  trials: {len(mini.trials)}",
                f"  all passed: {mini.all_passed}",
            ]
            if mini.note:
                lines.append(f"  note: {mini.note}")
            if mini.trials:
                lines += [
                    "  max orthogonality: "
                    + _fmt(max(t.orthogonality for t in mini.trials)),
                    "  min J(u*+v) - J(u*): "
                    + _fmt(min(t.energy_perturbed - t.energy_star for t in mini.trials)),
                    "  max steering change: "
                    + _fmt(max(t.steering_change for t in mini.trials)),
                ]
        _write_state(out, target, sol.final_state)
        _write_control(out, sol.u_star)
        if not sol.steered and sol.obstructed_norm > 0:
            status = EXIT_UNREACHABLE

    (out / "report.txt").write_text("\n".join(lines) + "\n")
    return status


class _Parser(argparse.ArgumentParser):
    # usage errors share the generic error status; 2 means unreachable target
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frachum", description=__doc__.split("\n\n")[0])
    src = p.add_argument_group("problem")
    src.add_argument("--config", type=Path, help="key = value problem file")
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in example problem")
    p.add_argument("--mode", choices=MODES, default="hum")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--modes", type=int, dest="n_modes", help="truncation N")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None and args.preset is None:
            raise ConfigError("give --config or --preset")
        cfg = preset(args.preset) if args.preset else None
        if args.config is not None:
            cfg = parse_config(args.config.read_text(encoding="utf-8"), base=cfg)
        cfg = cfg.with_overrides(out_dir=args.out_dir, n_modes=args.n_modes,
                                 epsilon=args.epsilon, seed=args.seed)
        return run_experiment(cfg, args.mode)
    except (InputError, DomainError, ArithmeticError, OSError) as exc:
        print(f"frachum: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
