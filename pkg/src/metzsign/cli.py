"""Command-line interface.

Exit codes: 0 holds, 1 fails, 2 unknown, 64 usage error, 65 input or domain
error, 66 unreadable input file, 70 disagreement between equivalent routes.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .appstab import (
    ReactionNetworkSigns,
    delay_ct_structural,
    delay_dt_structural,
    ergodicity_structural,
    impulsive_structural,
    nonlinear_invariance_structural,
    switched_structural,
)
from .blocks import BlockSystem, assemble, block_hurwitz, block_sign_stable
from .errors import InconsistencyError, MetzsignError
from .graphkit import bipartite_digraph, bipartite_labels, digraph_of
from .hull import common_linear_lyapunov, common_quadratic_lyapunov, hull_sign_stable
from .kernel import CAP_LPLUS, CAP_SQ, is_lplus, ker_b_sign_stable, lplus_complexity_estimate, sign_inverse, sq_expand
from .matfile import format_matrix_file, parse_matrix_file
from .mixedstab import MixedSystem, mixed_instability_witness, mixed_sign_stable
from .montecarlo import max_abscissa, sample_batch
from .numkit import spectral_abscissa_metzler
from .qualcore import MixedMatrix, QualMatrix, Sign, Status, derived_seed, sample_qual
from .signstab import instability_witness, potentially_sign_stable, schur_sign_stable, sign_stable

EXIT = {Status.HOLDS: 0, Status.FAILS: 1, Status.UNKNOWN: 2}
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_SOFTWARE = 64, 65, 66, 70


class UsageError(Exception):
    pass


class DomainError(MetzsignError, ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# ---------------------------------------------------------------- conversions

def as_sign(M: MixedMatrix, name: str) -> QualMatrix:
    if not M.is_all_sign():
        raise DomainError(f"matrix {name} must contain sign entries only")
    return M.to_qual()


def as_real(M: MixedMatrix, name: str) -> np.ndarray:
    if not M.is_all_real():
        raise DomainError(f"matrix {name} must contain real entries only")
    return M.to_real()


def jsonable(x: Any) -> Any:
    if isinstance(x, QualMatrix):
        return x.to_rows()
    if isinstance(x, Sign):
        return x.symbol
    if isinstance(x, Status):
        return x.value
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


class Report:
    def __init__(self, command: str, mats: dict[str, MixedMatrix], args: argparse.Namespace) -> None:
        self.command = command
        self.inputs = [{"name": k, "shape": list(v.shape)} for k, v in mats.items()]
        self.status = Status.UNKNOWN
        self.statements: dict[str, Any] = {}
        self.certificates: dict[str, Any] = {}
        self.witnesses: dict[str, Any] = {}
        self.diagnostics: dict[str, Any] = {"seed": args.seed, "samples": args.samples, "scale": args.scale,
                                            "full_check": args.full_check}
        self.dot: Optional[str] = None
        self.text: list[str] = []

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.status.value,
            "statements": self.statements,
            "certificates": self.certificates,
            "witnesses": self.witnesses,
            "diagnostics": self.diagnostics,
            "version": __version__,
        }
        return json.dumps(jsonable(doc), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.status.value}"] + self.text
        return "\n".join(lines) + "\n"


def _status(flag: bool) -> Status:
    return Status.HOLDS if flag else Status.FAILS


def _single(mats: dict[str, MixedMatrix], args: argparse.Namespace) -> tuple[str, MixedMatrix]:
    if args.name:
        if args.name not in mats:
            raise DomainError(f"no matrix named {args.name!r}")
        return args.name, mats[args.name]
    if not mats:
        raise DomainError("input contains no matrices")
    name = next(iter(mats))
    return name, mats[name]


def _need(mats: dict[str, MixedMatrix], *names: str) -> list[MixedMatrix]:
    missing = [n for n in names if n not in mats]
    if missing:
        raise DomainError(f"missing matrices: {', '.join('@' + n for n in missing)}")
    return [mats[n] for n in names]


def _fmt_matrix(M: np.ndarray) -> str:
    return "; ".join(" ".join(repr(float(x)) for x in row) for row in np.asarray(M))


# ---------------------------------------------------------------- commands

def cmd_check(rep: Report, mats, args) -> None:
    name, M = _single(mats, args)
    A = as_sign(M, name)
    v = sign_stable(A, full_check=args.full_check)
    rep.status = _status(v.verdict)
    rep.statements = dict(v.statements)
    if v.verdict:
        rep.certificates["permutation"] = v.permutation
        if v.lyapunov is not None:
            rep.certificates["lyapunov"] = {"v": v.lyapunov.point, "margin": v.lyapunov.margin}
        rep.text.append(f"permutation: {list(map(int, v.permutation))}")
        if args.samples:
            scales = [args.scale] if args.scale != 1.0 else [1e-3, 1.0, 1e3]
            worst = max_abscissa(A, args.samples, args.seed, scales)
            rep.diagnostics["max_sample_abscissa"] = worst
            rep.diagnostics["sample_scales"] = scales
    else:
        if v.bad_diagonal is not None:
            rep.witnesses["diagonal"] = v.bad_diagonal
        if v.cycle is not None:
            rep.witnesses["cycle"] = v.cycle
            rep.text.append(f"cycle: {v.cycle}")
        if v.counterexample is not None:
            rep.witnesses["counterexample"] = v.counterexample
            rep.witnesses["counterexample_abscissa"] = spectral_abscissa_metzler(v.counterexample)
    rep.dot = digraph_of(A).to_dot()


def cmd_potential(rep: Report, mats, args) -> None:
    name, M = _single(mats, args)
    ok, W = potentially_sign_stable(as_sign(M, name))
    rep.status = _status(ok)
    rep.statements["negative_diagonal"] = ok
    if ok:
        rep.certificates["stable_member"] = W
        rep.text.append(f"stable member: {_fmt_matrix(W)}")


def cmd_schur(rep: Report, mats, args) -> None:
    name, M = _single(mats, args)
    A = as_sign(M, name)
    v = schur_sign_stable(A, full_check=args.full_check)
    rep.status = _status(v.verdict)
    rep.statements = dict(v.statements)
    if v.verdict:
        rep.certificates["permutation"] = v.permutation
        if v.lyapunov is not None:
            rep.certificates["lyapunov"] = {"v": v.lyapunov.point, "margin": v.lyapunov.margin}
    else:
        if v.bad_diagonal is not None:
            rep.witnesses["diagonal"] = v.bad_diagonal
        if v.cycle is not None:
            rep.witnesses["cycle"] = v.cycle
    rep.dot = digraph_of(A).to_dot()


def cmd_inverse(rep: Report, mats, args) -> None:
    name, M = _single(mats, args)
    A = as_sign(M, name)
    v = sign_stable(A, witness=False)
    rep.status = _status(v.verdict)
    if v.verdict:
        inv = sign_inverse(A)
        rep.certificates["sign_inverse"] = inv
        rep.text.append(f"inverse: {inv.to_string()}")
    elif v.cycle is not None:
        rep.witnesses["cycle"] = v.cycle


def cmd_lplus(rep: Report, mats, args) -> None:
    name, M = _single(mats, args)
    R = as_sign(M, name)
    members = sq_expand(R, args.cap_sq)
    rep.diagnostics["members"] = len(members)
    rep.diagnostics["work"] = lplus_complexity_estimate(R.rows, len(R.indef_positions()))
    rep.diagnostics["cap_sq"], rep.diagnostics["cap_lplus"] = args.cap_sq, args.cap_lplus
    for S in members:
        ok, D = is_lplus(S, args.cap_lplus)
        if not ok:
            rep.status = Status.FAILS
            rep.witnesses["member"] = S
            rep.witnesses["scaling"] = D
            return
    rep.status = Status.HOLDS


def cmd_kerb(rep: Report, mats, args) -> None:
    A, B = _need(mats, "A", "B")
    v = ker_b_sign_stable(as_sign(A, "A"), as_real(B, "B"), args.cap_sq, args.cap_lplus,
                          samples=args.samples, seed=args.seed)
    _kerb_report(rep, v)


def _kerb_report(rep: Report, v) -> None:
    rep.status = v.status
    rep.statements["all_members_lplus"] = v.status is Status.HOLDS
    rep.diagnostics["members_checked"] = v.checked_count
    if v.pattern is not None:
        rep.certificates["pattern"] = v.pattern
    if v.sample_certificates:
        rep.certificates["sample_vectors"] = [{"v": x, "margin": m} for x, m in v.sample_certificates]
    failing = [(R, D) for R, ok, D in v.member_results if not ok]
    if failing:
        rep.witnesses["member"], rep.witnesses["scaling"] = failing[0]
    if v.indefinite_positions:
        rep.witnesses["indefinite"] = v.indefinite_positions
    for k, val in v.notes.items():
        rep.diagnostics[k] = val


_BLOCK_NAME = re.compile(r"^([BC])(\d+)_(\d+)$|^([BC])(\d)(\d)$")


def _block_system(mats: dict[str, MixedMatrix]) -> BlockSystem:
    diag: dict[int, MixedMatrix] = {}
    factors: dict[tuple[int, int], dict[str, MixedMatrix]] = {}
    for name, M in mats.items():
        m = re.fullmatch(r"A(\d+)", name)
        if m:
            diag[int(m.group(1))] = M
            continue
        m = _BLOCK_NAME.match(name)
        if not m:
            raise DomainError(f"unexpected matrix name {name!r} in a block system")
        kind, i, j = (m.group(1), m.group(2), m.group(3)) if m.group(1) else (m.group(4), m.group(5), m.group(6))
        factors.setdefault((int(i), int(j)), {})[kind] = M
    N = len(diag)
    if sorted(diag) != list(range(1, N + 1)):
        raise DomainError("diagonal blocks must be named A1..AN")
    real = all(M.is_all_real() for M in mats.values())
    conv = (lambda M, n: as_real(M, n)) if real else (lambda M, n: as_sign(M, n))
    couplings = {}
    for (i, j), pair in sorted(factors.items()):
        if set(pair) != {"B", "C"}:
            raise DomainError(f"coupling ({i},{j}) needs both B and C factors")
        if not (1 <= i <= N and 1 <= j <= N and i != j):
            raise DomainError(f"invalid coupling index ({i},{j})")
        couplings[(i - 1, j - 1)] = (conv(pair["B"], f"B{i}{j}"), conv(pair["C"], f"C{i}{j}"))
    return BlockSystem([conv(diag[k], f"A{k}") for k in range(1, N + 1)], couplings)


def _multiplier_json(cert) -> dict:
    return {
        "v": cert.v,
        "ell": {f"{i + 1},{j + 1}": x for (i, j), x in sorted(cert.ell.items())},
        "margin": cert.margin,
        "strict_b_rows": cert.strict_b_rows,
        "form": cert.form,
    }


def cmd_block(rep: Report, mats, args) -> None:
    system = _block_system(mats)
    if not system.is_sign:
        cert = block_hurwitz(system, cross_check=args.full_check)
        rep.status = _status(cert is not None)
        rep.statements["multiplier_lp"] = cert is not None
        if cert is not None:
            rep.certificates["multipliers"] = _multiplier_json(cert)
        return
    v = block_sign_stable(system, args.variant, cross_check=True)
    rep.status = v.status
    rep.statements = dict(v.statements)
    rep.diagnostics["variant"] = args.variant
    rep.diagnostics["hypotheses"] = {f"{i + 1},{j + 1}": h for (i, j), h in sorted(v.hypotheses.items())}
    rep.diagnostics["hypotheses_hold"] = v.hypotheses_hold
    if v.certificate is not None:
        rep.certificates["multipliers"] = _multiplier_json(v.certificate)
    rep.dot = digraph_of(assemble(system)).to_dot()


def cmd_hull(rep: Report, mats, args) -> None:
    family = [as_sign(M, n) for n, M in mats.items()]
    v = hull_sign_stable(family, full_check=args.full_check)
    rep.status = _status(v.verdict)
    rep.statements = dict(v.statements)
    rep.statements["summable"] = v.summable
    if v.conflict is not None:
        rep.witnesses["conflict_position"] = v.conflict
    if v.sum_verdict is not None and v.sum_verdict.cycle is not None:
        rep.witnesses["cycle"] = v.sum_verdict.cycle
    if v.failing_beta is not None:
        rep.witnesses["beta"] = list(v.failing_beta)
    if v.verdict and args.samples:
        vs, qs = [], []
        for k in range(args.samples):
            rng = derived_seed(args.seed, k)
            tup = [sample_qual(A, rng, args.scale) for A in family]
            vs.append(common_linear_lyapunov(tup))
            qs.append(common_quadratic_lyapunov(tup).q)
        rep.certificates["linear"] = vs
        rep.certificates["quadratic_diagonal"] = qs


def _mixed_system(mats: dict[str, MixedMatrix], args) -> MixedSystem:
    if {"As", "Ap", "B", "C"} <= set(mats):
        As, Ap, B, C = _need(mats, "As", "Ap", "B", "C")
        return MixedSystem(as_sign(As, "As"), as_real(Ap, "Ap"), as_real(B, "B"), as_real(C, "C"))
    name, M = _single(mats, args)
    ns = args.n_sigma
    if ns is None:
        ns = 0
        while ns < M.shape[0] and isinstance(M.entries[ns][ns], Sign):
            ns += 1
    if ns == 0 or not M.block(slice(0, ns), slice(0, ns)).is_all_sign():
        raise DomainError("could not identify a leading sign block")
    return MixedSystem.from_mixed(M, ns)


def cmd_mixed(rep: Report, mats, args) -> None:
    system = _mixed_system(mats, args)
    v = mixed_sign_stable(system, full_check=True)
    rep.status = _status(v.verdict)
    rep.statements = dict(v.statements)
    rep.statements["sigma_sign_stable"] = v.sigma_stable
    rep.statements["phi_hurwitz"] = v.phi_hurwitz
    rep.diagnostics["n_sigma"] = system.n_sigma
    if v.m_phi is not None:
        rep.certificates["m_phi"] = v.m_phi
        rep.certificates["m_sigma"] = v.m_sigma
        rep.certificates["product_pattern"] = v.product_pattern.astype(int)
        rep.diagnostics["spectral_radius"] = v.spectral_radius
    if v.lp_point is not None:
        rep.certificates["lp_point"] = v.lp_point
    if v.verdict:
        if args.samples:
            worst = -np.inf
            for k in range(args.samples):
                M = sample_qual(system.A_sigma, derived_seed(args.seed, k), args.scale)
                worst = max(worst, spectral_abscissa_metzler(system.realize(M)))
            rep.diagnostics["max_sample_abscissa"] = worst
    else:
        if v.cycle is not None:
            rep.witnesses["bipartite_cycle"] = v.cycle
        W = mixed_instability_witness(system, seed=args.seed)
        rep.witnesses["sigma_member"] = W
        rep.witnesses["assembled_abscissa"] = spectral_abscissa_metzler(system.realize(W))
    if v.m_phi is not None:
        Pp = QualMatrix((v.m_phi != 0).astype(np.int8))
        Ps = QualMatrix((v.m_sigma != 0).astype(np.int8))
        rep.dot = bipartite_digraph(Ps, Pp).to_dot("B", bipartite_labels(system.n_sigma))


def cmd_witness(rep: Report, mats, args) -> None:
    name, M = _single(mats, args)
    A = as_sign(M, name)
    v = sign_stable(A, witness=False)
    rep.status = _status(v.verdict)
    if not v.verdict:
        W = instability_witness(A)
        rep.witnesses["counterexample"] = W
        rep.witnesses["abscissa"] = spectral_abscissa_metzler(W)
        rep.text.append(f"counterexample: {_fmt_matrix(W)}")


def cmd_sample(rep: Report, mats, args) -> None:
    name, M = _single(mats, args)
    A = as_sign(M, name)
    count = max(1, args.samples)
    batch = sample_batch(A, count, args.seed, args.scale)
    rep.status = Status.HOLDS
    rep.certificates["samples"] = batch
    rep.text.append(format_matrix_file({f"{name}_{k}": MixedMatrix.of(S.tolist()) for k, S in enumerate(batch)})
                    .rstrip("\n"))


def cmd_app(rep: Report, mats, args) -> None:
    kind = args.kind
    rep.diagnostics["application"] = kind
    if kind == "delay-ct":
        (M0,) = _need(mats, "M0")
        others = [as_sign(M, n) for n, M in mats.items() if n != "M0"]
        v = delay_ct_structural(as_sign(M0, "M0"), others)
    elif kind == "delay-dt":
        v = delay_dt_structural([as_sign(M, n) for n, M in mats.items()])
    elif kind == "switched":
        v = switched_structural([as_sign(M, n) for n, M in mats.items()], samples=args.samples, seed=args.seed)
    elif kind == "impulsive":
        MA, MJ = _need(mats, "MA", "MJ")
        v = impulsive_structural(as_sign(MA, "MA"), as_sign(MJ, "MJ"), samples=args.samples, seed=args.seed)
    elif kind == "nonlinear":
        M, B = _need(mats, "M", "B")
        kv = nonlinear_invariance_structural(as_sign(M, "M"), as_real(B, "B"), samples=args.samples,
                                             seed=args.seed, cap_sq=args.cap_sq, cap_lplus=args.cap_lplus)
        _kerb_report(rep, kv)
        return
    else:
        Z, Sb = _need(mats, "Z", "Sb")
        net = ReactionNetworkSigns(as_sign(Z, "Z"), as_real(Sb, "Sb"), args.irreducible)
        kv = ergodicity_structural(net, samples=args.samples, seed=args.seed,
                                   cap_sq=args.cap_sq, cap_lplus=args.cap_lplus)
        _kerb_report(rep, kv)
        return
    rep.status = v.status
    for k, val in v.notes.items():
        rep.diagnostics[k] = val
    for k, val in v.certificates.items():
        rep.certificates[k] = val
    detail = v.detail
    cycle = getattr(detail, "cycle", None)
    if cycle is None and getattr(detail, "sum_verdict", None) is not None:
        cycle = detail.sum_verdict.cycle
    if v.status is Status.FAILS and cycle is not None:
        rep.witnesses["cycle"] = cycle


COMMANDS: dict[str, Callable[[Report, dict, argparse.Namespace], None]] = {
    "check": cmd_check,
    "potential": cmd_potential,
    "schur": cmd_schur,
    "inverse": cmd_inverse,
    "lplus": cmd_lplus,
    "kerb": cmd_kerb,
    "block": cmd_block,
    "hull": cmd_hull,
    "mixed": cmd_mixed,
    "witness": cmd_witness,
    "sample": cmd_sample,
    "app": cmd_app,
}

HELP = {
    "check": "sign-stability of a Metzler sign-matrix",
    "potential": "potential sign-stability",
    "schur": "Schur sign-stability of a nonnegative sign-matrix",
    "inverse": "sign pattern of the inverse",
    "lplus": "L+ test (indefinite entries are expanded)",
    "kerb": "kernel-constrained sign-stability (@A sign, @B real)",
    "block": "block matrix via multipliers (@A1.., @B12/@C12 ..)",
    "hull": "convex hull of a family of sign-matrices",
    "mixed": "mixed sign/real matrix (single matrix or @As @Ap @B @C)",
    "witness": "counterexample member of the qualitative class",
    "sample": "draw members of the qualitative class",
    "app": "application wrappers",
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", "-i", default="-", help="matrix file (default: stdin)")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--dot", metavar="FILE", help="write the relevant graph in DOT format")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=0)
    common.add_argument("--scale", type=float, default=1.0)
    common.add_argument("--cap-sq", type=int, default=CAP_SQ)
    common.add_argument("--cap-lplus", type=int, default=CAP_LPLUS)
    common.add_argument("--full-check", action="store_true", help="run every equivalent route")
    common.add_argument("--name", help="matrix to use when the file holds several")

    parser = _Parser(prog="metzsign", description="Qualitative stability analysis of Metzler sign-matrices.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=HELP[name])
        if name == "block":
            p.add_argument("--variant", choices=["product", "factored"], default="factored")
        if name == "mixed":
            p.add_argument("--n-sigma", type=int, default=None)
        if name == "app":
            p.add_argument("kind", choices=["delay-ct", "delay-dt", "switched", "impulsive", "nonlinear", "ergodic"])
            p.add_argument("--irreducible", action="store_true", help="declare the state space irreducible")
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EX_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.samples < 0 or not args.scale > 0:
        print("usage error: --samples must be >= 0 and --scale > 0", file=stderr)
        return EX_USAGE
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"cannot read input: {exc}", file=stderr)
        return EX_NOINPUT
    try:
        mats = parse_matrix_file(text)
        rep = Report(args.command, mats, args)
        COMMANDS[args.command](rep, mats, args)
    except InconsistencyError as exc:
        print(f"internal disagreement: {exc} {exc.results}", file=stderr)
        return EX_SOFTWARE
    except (MetzsignError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EX_DATAERR
    if args.dot and rep.dot is not None:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(rep.dot)
    stdout.write(rep.to_json() if args.json else rep.to_text())
    return EXIT[rep.status]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
