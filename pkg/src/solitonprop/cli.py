"""``solitonprop`` command line.

Every subcommand reads a JSON :class:`~solitonprop.config.RunConfig`,
tabulates library results and writes CSV (complex columns split into
``_re``/``_im``) or JSON (complex values as ``{"re", "im"}``).  No numbers
are computed here beyond the sampling grid.

Exit status: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from collections.abc import Sequence

import numpy as np

from . import propagator as prop
from . import soliton_core as core
from .config import FORMATS, ConfigError, RunConfig
from .errors import SolitonError
from .verify import run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


class Table:
    """Column-named rows; complex cells are detected per column."""

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: list[tuple] = []

    def add(self, *values):
        self.rows.append(values)

    def extend_columns(self, *arrays):
        for vals in zip(*(np.asarray(a).reshape(-1) for a in arrays)):
            self.rows.append(vals)

    def _complex_cols(self):
        return [any(isinstance(r[i], (complex, np.complexfloating)) for r in self.rows) for i in range(len(self.columns))]

    def to_csv(self) -> str:
        cplx = self._complex_cols()
        header = []
        for name, c in zip(self.columns, cplx):
            header += [f"{name}_re", f"{name}_im"] if c else [name]
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in self.rows:
            cells = []
            for v, c in zip(row, cplx):
                if c:
                    v = complex(v)
                    cells += [format(v.real, ".17g"), format(v.imag, ".17g")]
                elif isinstance(v, (int, np.integer)):
                    cells.append(str(int(v)))
                else:
                    cells.append(format(float(v), ".17g"))
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        def cell(v):
            if isinstance(v, (complex, np.complexfloating)):
                return {"re": float(v.real), "im": float(v.imag)}
            if isinstance(v, (int, np.integer)):
                return int(v)
            return float(v)

        records = [{k: cell(v) for k, v in zip(self.columns, row)} for row in self.rows]
        return json.dumps(records, indent=1) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()


def _require_time(cfg: RunConfig) -> prop.TimeParam:
    if cfg.time is None:
        raise ConfigError("time", "this command needs a time section")
    return cfg.time.param()


def cmd_potential(cfg: RunConfig) -> Table:
    xs = cfg.grid.values()
    table = Table(["x", "V"])
    table.extend_columns(xs, core.potential(cfg.params, xs))
    return table


def cmd_spectrum(cfg: RunConfig) -> Table:
    p = cfg.params
    xs = cfg.grid.values()
    table = Table(["n", "E", "norm", "x", "phi"])
    for n in range(1, p.N + 1):
        energy = p.bound_energies[n - 1]
        norm = core.bound_state_norm(p, n)
        for x, phi in zip(xs, core.bound_state(p, n, xs)):
            table.add(n, energy, norm, x, phi)
    return table


def cmd_kernel(cfg: RunConfig) -> Table:
    t = _require_time(cfg)
    xs = cfg.grid.values()
    ys = cfg.kernel.y_grid.values() if cfg.kernel.y_grid is not None else xs
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    K = np.asarray(prop.kernel_closed(cfg.params, X, Y, t), dtype=complex)
    if cfg.kernel.split:
        kd, kc = prop.kernel_split(cfg.params, X, Y, t)
        table = Table(["x", "y", "K", "K_d", "K_c"])
        table.extend_columns(X, Y, K, np.asarray(kd, dtype=complex), np.asarray(kc, dtype=complex))
    else:
        table = Table(["x", "y", "K"])
        table.extend_columns(X, Y, K)
    return table


def cmd_evolve(cfg: RunConfig) -> Table:
    ev = cfg.evolve
    times = ev.times or ((cfg.time.re,) if cfg.time is not None else ())
    if not times:
        raise ConfigError("evolve.times", "give at least one time (or a time section)")
    xs = cfg.grid.values()
    pk = ev.packet
    if pk.bound_state is not None:
        psi0 = core.bound_state(cfg.params, pk.bound_state, xs).astype(complex)
    else:
        psi0 = prop.gaussian_packet(xs, pk.center, pk.width, pk.momentum)
    table = Table(["t", "x", "psi", "norm"])
    norm0 = prop.l2_norm(xs, psi0)
    table.extend_columns(np.zeros_like(xs), xs, psi0.astype(complex), np.full(xs.size, norm0))
    for t in times:
        psi = prop.evolve(cfg.params, xs, psi0, t, ev.quadrature)
        table.extend_columns(np.full(xs.size, t), xs, psi, np.full(xs.size, prop.l2_norm(xs, psi)))
    return table


COMMANDS = {
    "potential": cmd_potential,
    "spectrum": cmd_spectrum,
    "kernel": cmd_kernel,
    "evolve": cmd_evolve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="solitonprop", description="N-soliton potentials and their exact propagators.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "potential": "tabulate V_N(x)",
        "spectrum": "bound-state energies and sampled eigenfunctions",
        "kernel": "closed-form propagator on an (x, y) grid",
        "evolve": "propagate a Gaussian packet with the exact kernel",
        "verify": "run the oracle suite, JSON lines out",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="path to a JSON run configuration")
        p.add_argument("--out", help="output path (default: config output.path, else stdout)")
        if name != "verify":
            p.add_argument("--format", choices=FORMATS, help="output format (default: config output.format)")
        else:
            p.add_argument("--seed", type=int, default=0, help="seed for the random sample points")
    return parser


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config)
        out = args.out or cfg.output.path
        if args.command == "verify":
            if args.seed < 0:
                raise ConfigError("--seed", "must be a non-negative integer")
            reports = run_suite(cfg.params, args.seed, corrupt=cfg.verify.corrupt)
            _emit("".join(r.to_json() + "\n" for r in reports), out)
            return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED
        table = COMMANDS[args.command](cfg)
        _emit(table.render(args.format or cfg.output.format), out)
    except SolitonError as exc:
        print(f"solitonprop {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
