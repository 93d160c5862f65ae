"""Batch driver: every check and construction behind one command.

Reports are deterministic JSON (or CSV for the trace table): identical
(config, seed) pairs produce byte-identical output.  Exit status is 0 when
every residual passes, 1 when a check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import braid, hamiltonian, rtt, spectrum, transfer
from .linalg import eig_oracle
from .rand import random_weight_grid, random_x, seeded_rng
from .reports import CheckReport
from .scalars import PolyX, rat


@dataclass
class RunConfig:
    command: str
    n: int = 1
    r: int = 4
    backend: str = "exact"
    params_path: str | None = None
    x_values: tuple = ()
    seed: int = 7
    tolerance: float = 1e-10
    out: str | None = None
    draws: int = 3
    periodic: bool = False
    with_eig: bool = False

    def validate(self):
        if self.backend not in ("exact", "float", "poly"):
            raise UsageError(f"unknown backend {self.backend!r}")
        if self.command in ("spectrum",) and self.backend == "poly":
            raise UsageError("eigen-decompositions need the float backend")
        if self.command == "recursion-check" and self.backend == "float":
            raise UsageError("recursion checks are exact; use backend exact or poly")
        if self.backend == "poly" and self.n != 1:
            raise UsageError("the polynomial backend is the normalized n=1 mode")
        if self.n < 1 or self.r < 1:
            raise UsageError("n and r must be positive")


class UsageError(Exception):
    pass


def _parse_x_list(values):
    return tuple(rat(v) for v in values)


def _load_params(cfg: RunConfig, label: str):
    if cfg.params_path:
        return braid.ParameterSet.load(cfg.params_path)
    rng = seeded_rng(cfg.seed, label)
    return braid.ParameterSet(cfg.n, random_weight_grid(rng, cfg.n), random_weight_grid(rng, cfg.n))


def _emit(doc: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)


def _finish(reports, cfg: RunConfig, extra=None) -> int:
    body = {
        "schema": 1,
        "command": cfg.command,
        "seed": cfg.seed,
        "reports": [rep.to_json() for rep in reports],
    }
    if extra:
        body.update(extra)
    ok = all(rep.to_json()["pass"] for rep in reports)
    body["pass"] = ok
    _emit(json.dumps(body, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_braid_check(cfg: RunConfig) -> int:
    reports = []
    for d in range(cfg.draws):
        rng = seeded_rng(cfg.seed, f"braid:{cfg.n}:{d}")
        p1 = braid.ParameterSet(cfg.n, random_weight_grid(rng, cfg.n), random_weight_grid(rng, cfg.n))
        p2 = braid.ParameterSet(cfg.n, random_weight_grid(rng, cfg.n), random_weight_grid(rng, cfg.n))
        reports.append(braid.check_braid_relation(p1, p2))
    return _finish(reports, cfg)


def cmd_unitarity(cfg: RunConfig) -> int:
    rng = seeded_rng(cfg.seed, f"unitarity:{cfg.n}")
    m_plus = [[rng.randint(1, 5) for _ in range(cfg.n)] for _ in range(cfg.n)]
    m_minus = [[rng.randint(-5, -1) for _ in range(cfg.n)] for _ in range(cfg.n)]
    params = braid.ParameterSet.from_imaginary_exponents(m_plus, m_minus, theta=0.73)
    reports = [braid.check_unitarity(params, tol=max(cfg.tolerance, 1e-12))]
    return _finish(reports, cfg)


def cmd_transfer(cfg: RunConfig) -> int:
    if cfg.backend == "poly":
        t = transfer.transfer_x(PolyX.x(), cfg.r)
    elif cfg.backend == "exact" and cfg.n == 1 and cfg.x_values:
        t = transfer.transfer_x(cfg.x_values[0], cfg.r)
    else:
        params = _load_params(cfg, f"transfer:{cfg.n}")
        m = transfer.monodromy(transfer.monodromy_level1(params), cfg.r)
        t = transfer.transfer_matrix(m)
    doc = {
        "schema": 1,
        "command": "transfer",
        "n": cfg.n,
        "r": cfg.r,
        "backend": cfg.backend,
        "matrix": t.matrix.to_json(),
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0


def cmd_trace_table(cfg: RunConfig) -> int:
    params = _load_params(cfg, f"trace:{cfg.n}")
    lvl1 = transfer.monodromy_level1(params)
    lines = ["r,trace,formula,match"]
    m = lvl1
    ok_all = True
    for r in range(1, cfg.r + 1):
        if r > 1:
            m = transfer.coproduct_step(lvl1, m)
        t = transfer.transfer_matrix(m)
        tr = t.matrix.trace()
        formula = 2 * sum(params.w_plus[i][i] ** r for i in range(cfg.n))
        match = tr == formula
        ok_all = ok_all and match
        lines.append(f"{r},{tr},{formula},{str(match).lower()}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0 if ok_all else 1


def cmd_recursion_check(cfg: RunConfig) -> int:
    reports = []
    for r in range(1, cfg.r + 1):
        if cfg.backend == "poly":
            reports.append(transfer.check_recursions(r))
            m = transfer.monodromy_x(PolyX.x(), r)
        else:
            x = cfg.x_values[0] if cfg.x_values else random_x(seeded_rng(cfg.seed, f"rec:{r}"))
            reports.append(transfer.check_recursions(r, x))
            m = transfer.monodromy_x(x, r)
        reports.append(transfer.check_BC_relations(m))
    return _finish(reports, cfg)


def cmd_xfamily(cfg: RunConfig) -> int:
    reports = []
    for r in range(1, cfg.r + 1):
        dec = spectrum.extract_X_family(r)
        fresh = Fraction(3, 7)
        reports.append(spectrum.check_reconstruction(dec, fresh))
        reports.append(spectrum.check_annihilation(dec))
        reports.append(spectrum.check_X_r0(r, dec))
    return _finish(reports, cfg)


def cmd_spectrum(cfg: RunConfig) -> int:
    x0 = cfg.x_values[0] if cfg.x_values else Fraction(1, 2)
    rep = spectrum.classify_multiplets(cfg.r, x0, tol=max(cfg.tolerance, 1e-8))
    dom = spectrum.dominant_eigenvalue(cfg.r, x0, seed=cfg.seed)
    expected = float((1 + x0)) ** cfg.r
    dom_ok = abs(dom - expected) <= 1e-10 * expected
    body = rep.to_json()
    body["dominant_check"] = dom_ok
    body["dominant"] = dom
    body["command"] = "spectrum"
    _emit(json.dumps(body, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0 if (rep.passed and dom_ok) else 1


def cmd_fixtures(cfg: RunConfig) -> int:
    reports = [spectrum.fixtures_r_le_4()]
    for r in range(1, min(cfg.r, 6) + 1):
        reports.append(spectrum.check_parity_invariance(r))
    rng = seeded_rng(cfg.seed, "bridge")
    from .rand import random_fraction

    for r in (2, 5):
        u, v = random_fraction(rng), random_fraction(rng)
        reports.append(spectrum.normalization_bridge(r, u, v))
    return _finish(reports, cfg)


def cmd_hamiltonian(cfg: RunConfig) -> int:
    if cfg.params_path:
        with open(cfg.params_path) as fh:
            tables = json.load(fh)
        m_plus = [[rat(v) for v in row] for row in tables["m_plus"]]
        m_minus = [[rat(v) for v in row] for row in tables["m_minus"]]
    else:
        rng = seeded_rng(cfg.seed, f"ham:{cfg.n}")
        m_plus = [[Fraction(rng.randint(1, 5)) for _ in range(cfg.n)] for _ in range(cfg.n)]
        m_minus = [[Fraction(rng.randint(-3, 3)) for _ in range(cfg.n)] for _ in range(cfg.n)]
    dens = hamiltonian.local_density(m_plus, m_minus)
    chain = hamiltonian.chain_hamiltonian(dens, cfg.r, periodic=cfg.periodic)
    reports = [
        hamiltonian.check_hermiticity_and_unitary_generator(dens),
        hamiltonian.derivative_check(dens),
    ]
    if cfg.periodic:
        reports.append(hamiltonian.check_translation_covariance(chain))
    extra = {"matrix": chain.matrix.to_json()}
    if cfg.with_eig:
        groups, resid = eig_oracle(chain.matrix.map_values(complex))
        extra["eigenvalues"] = [[ev.real, ev.imag, mult] for ev, mult in groups]
        extra["eig_residual"] = resid
    return _finish(reports, cfg, extra=extra)


def cmd_rtt(cfg: RunConfig) -> int:
    reports = []
    for d in range(cfg.draws):
        rng = seeded_rng(cfg.seed, f"rtt:{cfg.r}:{d}")
        x1 = random_x(rng)
        x2 = random_x(rng, avoid=(x1,))
        x3 = random_x(rng, avoid=(x1, x2))
        triple = rtt.SpectralTriple(x1, x2, x3)
        for r in range(1, cfg.r + 1):
            reports.extend(rtt.run_all(r, triple))
    body = {
        "schema": 1,
        "command": "rtt",
        "seed": cfg.seed,
        "reports": [rep.to_json() for rep in reports],
    }
    ok = all(rep.passed for rep in reports)
    body["pass"] = ok
    _emit(json.dumps(body, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0 if ok else 1


def cmd_all(cfg: RunConfig) -> int:
    reports: list[CheckReport] = []

    # braid layer: projector algebra, braid relation, unitarity
    for n in (1, 2, 3):
        rep = _projector_report(n)
        reports.append(rep)
        for d in range(2):
            rng = seeded_rng(cfg.seed, f"all:braid:{n}:{d}")
            p1 = braid.ParameterSet(n, random_weight_grid(rng, n), random_weight_grid(rng, n))
            p2 = braid.ParameterSet(n, random_weight_grid(rng, n), random_weight_grid(rng, n))
            reports.append(braid.check_braid_relation(p1, p2))
    for n in (1, 2):
        rng = seeded_rng(cfg.seed, f"all:unitary:{n}")
        mp = [[rng.randint(1, 5) for _ in range(n)] for _ in range(n)]
        mm = [[rng.randint(-5, -1) for _ in range(n)] for _ in range(n)]
        reports.append(braid.check_unitarity(braid.ParameterSet.from_imaginary_exponents(mp, mm, 0.61)))

    # transfer layer
    for r in (1, 2, 3, 4):
        reports.append(transfer.check_recursions(r))
    rng = seeded_rng(cfg.seed, "all:x")
    for r in (5, 6):
        reports.append(transfer.check_recursions(r, random_x(rng)))
    x1, x2 = Fraction(1, 2), Fraction(1, 3)
    for r in (4, 6):
        t1 = transfer.transfer_x(x1, r)
        t2 = transfer.transfer_x(x2, r)
        reports.append(transfer.check_commutation(t1, t2))
    m = transfer.monodromy_x(Fraction(2, 5), 5)
    reports.append(transfer.check_BC_relations(m))
    reports.append(transfer.trace_formula(m))
    reports.append(transfer.row_col_sums(transfer.transfer_matrix(m)))
    for n in (2, 3):
        params = _load_params_n(cfg, n, "all:weights")
        lvl1 = transfer.monodromy_level1(params)
        depth = 3 if n == 2 else 2
        mm_ = transfer.monodromy(lvl1, depth)
        reports.append(transfer.trace_formula(mm_))
        reports.append(transfer.check_Kn_relations(mm_))
        t1 = transfer.transfer_matrix(mm_)
        t2 = transfer.transfer_matrix(transfer.monodromy(transfer.monodromy_level1(params.power(2)), depth))
        reports.append(transfer.check_commutation(t1, t2))
    reports.append(transfer.check_bordered_product(6))

    # spectrum layer
    for r in (2, 4, 6):
        dec = spectrum.extract_X_family(r)
        reports.append(spectrum.check_reconstruction(dec, Fraction(3, 7)))
        reports.append(spectrum.check_annihilation(dec))
        reports.append(spectrum.check_X_r0(r, dec))
    reports.append(spectrum.fixtures_r_le_4())
    for r in (3, 5):
        reports.append(spectrum.check_parity_invariance(r))
    srep = spectrum.classify_multiplets(4, Fraction(1, 2))
    reports.append(CheckReport("spectrum_r4", srep.passed, srep.residual, n=1, r=4, backend="float"))
    dom = spectrum.dominant_eigenvalue(6, Fraction(1, 3), seed=cfg.seed)
    expected = (1 + 1 / 3) ** 6
    reports.append(CheckReport("dominant_eigenvalue", abs(dom - expected) <= 1e-10 * expected,
                               abs(dom - expected), n=1, r=6, backend="float"))
    fermat_ok = all(spectrum.fermat_check(L) == l for L, l in ((3, 1), (5, 3), (7, 9), (11, 93)))
    reports.append(CheckReport("fermat_counts", fermat_ok, 0.0))
    rngb = seeded_rng(cfg.seed, "all:bridge")
    from .rand import random_fraction

    reports.append(spectrum.normalization_bridge(5, random_fraction(rngb), random_fraction(rngb)))

    # hamiltonian layer
    for n in (1, 2):
        rng = seeded_rng(cfg.seed, f"all:ham:{n}")
        mp = [[Fraction(rng.randint(1, 5)) for _ in range(n)] for _ in range(n)]
        mmn = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        dens = hamiltonian.local_density(mp, mmn)
        reports.append(hamiltonian.check_hermiticity_and_unitary_generator(dens))
        reports.append(hamiltonian.derivative_check(dens))
        chain = hamiltonian.chain_hamiltonian(dens, 4 if n == 1 else 3, periodic=True)
        reports.append(hamiltonian.check_translation_covariance(chain))

    # rtt layer
    for d in range(2):
        rng = seeded_rng(cfg.seed, f"all:rtt:{d}")
        x1d = random_x(rng)
        x2d = random_x(rng, avoid=(x1d,))
        x3d = random_x(rng, avoid=(x1d, x2d))
        triple = rtt.SpectralTriple(x1d, x2d, x3d)
        for r in (1, 2, 4):
            for rep in rtt.run_all(r, triple):
                reports.append(CheckReport(f"rtt_{rep.relation}", rep.passed, rep.residual, n=1, r=rep.r))

    return _finish(reports, cfg)


def _projector_report(n: int) -> CheckReport:
    """Idempotence, orthogonality, completeness of the projector family."""
    from .linalg import SpMatrix

    fam = list(braid.projector_family(n))
    total = SpMatrix.zero((2 * n) ** 2)
    ok = True
    for proj in fam:
        if not (proj.matrix @ proj.matrix - proj.matrix).is_zero():
            ok = False
        total = total + proj.matrix
    for a in range(len(fam)):
        for b in range(len(fam)):
            if a != b and not (fam[a].matrix @ fam[b].matrix).is_zero():
                ok = False
    if not (total - SpMatrix.identity((2 * n) ** 2)).is_zero():
        ok = False
    return CheckReport("projector_algebra", ok, 0.0 if ok else 1.0, n=n)


def _load_params_n(cfg: RunConfig, n: int, label: str):
    rng = seeded_rng(cfg.seed, f"{label}:{n}")
    return braid.ParameterSet(n, random_weight_grid(rng, n), random_weight_grid(rng, n))


# ---------------------------------------------------------------------------


_COMMANDS = {
    "braid-check": cmd_braid_check,
    "unitarity": cmd_unitarity,
    "transfer": cmd_transfer,
    "trace-table": cmd_trace_table,
    "recursion-check": cmd_recursion_check,
    "xfamily": cmd_xfamily,
    "spectrum": cmd_spectrum,
    "fixtures": cmd_fixtures,
    "hamiltonian": cmd_hamiltonian,
    "rtt": cmd_rtt,
    "all": cmd_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braidtm",
        description="Verification engine for the even multiparameter braid-matrix hierarchy",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, default=1, help="hierarchy index (matrix dim (2n)^2)")
        p.add_argument("--r", type=int, default=4, help="coproduct level / chain length")
        p.add_argument("--backend", choices=("exact", "float", "poly"), default=None)
        p.add_argument("--params", dest="params_path", help="JSON weight/exponent file")
        p.add_argument("--x", action="append", default=[], help='spectral value as "p/q"')
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--draws", type=int, default=3)
        p.add_argument("--cap", type=int, help="override the dimension cap")
        p.add_argument("--periodic", action="store_true")
        p.add_argument("--eig", dest="with_eig", action="store_true")
    return parser


_DEFAULT_BACKENDS = {
    "spectrum": "float",
    "unitarity": "float",
    "recursion-check": "poly",
    "fixtures": "poly",
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    backend = args.backend or _DEFAULT_BACKENDS.get(args.command, "exact")
    cfg = RunConfig(
        command=args.command,
        n=args.n,
        r=args.r,
        backend=backend,
        params_path=args.params_path,
        x_values=_parse_x_list(args.x),
        seed=args.seed,
        tolerance=args.tol,
        out=args.out,
        draws=args.draws,
        periodic=args.periodic,
        with_eig=args.with_eig,
    )
    if args.cap is not None:
        os.environ["VERTEX_CAP"] = str(args.cap)
    try:
        cfg.validate()
        return _COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
