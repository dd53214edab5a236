"""Batch front end: map spec in, classification / normal form / embedding
certificate / semigroup / verification report out.

Input is a single JSON document per map (complex numbers are always
two-element [re, im] arrays).  The machine-readable report is emitted
with sorted keys and shortest round-trip floats, so identical inputs
and seeds produce byte-identical bytes.

Exit codes: 0 embeddable and verified, 1 criterion definitively fails,
2 inconclusive (or verification failed), 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .embedding import (
    CONDITION_FAILS,
    EMBEDDABLE,
    INCONCLUSIVE,
    build_semigroup,
    embed_elliptic_split,
    embed_elliptic_u0,
    embed_parabolic,
    embed_hyperbolic,
    is_automorphism,
)
from .errors import LfmError
from .maps import (
    BALL,
    ELLIPTIC,
    PARABOLIC,
    SIEGEL,
    BallMap,
    SiegelMap,
    cayley_to_ball,
    classify,
    domain_margin,
    unitary_index,
)
from .normal_forms import (
    conjugation_residual,
    elliptic_split,
    elliptic_u0,
    hyperbolic_conditions,
    hyperbolic_normal_form,
    parabolic_conditions,
    parabolic_normal_form,
    siegel_conditions,
)
from .verify import SamplerCfg, verify_family

SCHEMA_VERSION = 1

TOL_PROFILES = {
    "default": {"law": 1e-8, "self_map": 1e-9, "time_one": 1e-8,
                "generator": 1e-5, "identity": 1e-10},
    "strict": {"law": 1e-9, "self_map": 1e-10, "time_one": 1e-9,
               "generator": 1e-6, "identity": 1e-11},
}

EXIT_EMBEDDABLE = 0
EXIT_CONDITION_FAILS = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT_ERROR = 3


# ---------------------------------------------------------------------------
# (de)serialization


class SpecError(LfmError):
    """Malformed map specification."""


def _complex_in(value, where: str) -> complex:
    if not (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(x, (int, float)) for x in value)):
        raise SpecError(f"{where}: complex numbers must be [re, im] pairs, got {value!r}")
    return complex(value[0], value[1])


def _vector_in(value, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise SpecError(f"{where}: expected a list of [re, im] pairs")
    return np.array([_complex_in(v, f"{where}[{i}]") for i, v in enumerate(value)],
                    dtype=complex)


def _matrix_in(value, where: str) -> np.ndarray:
    if not (isinstance(value, list) and all(isinstance(row, list) for row in value)):
        raise SpecError(f"{where}: expected a matrix of [re, im] pairs")
    return np.array([[_complex_in(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)]
                     for i, row in enumerate(value)], dtype=complex)


def to_jsonable(x):
    """Recursively convert report values into JSON-safe structures;
    complex numbers become [re, im]."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(np.real(x)), float(np.imag(x))]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def parse_map_spec(obj: dict):
    """Build a validated map from a spec document.

    Raises :class:`SpecError` naming the offending field or the violated
    constructor invariant.
    """
    if not isinstance(obj, dict):
        raise SpecError("map spec must be a JSON object")
    domain = obj.get("domain", BALL)
    if domain not in (BALL, SIEGEL):
        raise SpecError(f"domain: expected 'ball' or 'siegel', got {domain!r}")
    dim = obj.get("dimension")
    if not isinstance(dim, int) or dim < 1:
        raise SpecError("dimension: expected a positive integer")
    try:
        if domain == BALL:
            for key in ("A", "B", "C", "D"):
                if key not in obj:
                    raise SpecError(f"{key}: required for ball maps")
            a = _matrix_in(obj["A"], "A")
            b = _vector_in(obj["B"], "B")
            c = _vector_in(obj["C"], "C")
            d = _complex_in(obj["D"], "D")
            if a.shape != (dim, dim) or len(b) != dim or len(c) != dim:
                raise SpecError(f"A/B/C: shapes disagree with dimension = {dim}")
            return BallMap(a, b, c, d)
        for key in ("lambda", "b"):
            if key not in obj:
                raise SpecError(f"{key}: required for siegel maps")
        k = dim - 1
        lam = _complex_in(obj["lambda"], "lambda")
        bval = _complex_in(obj["b"], "b")
        m = _matrix_in(obj["M"], "M") if k else np.zeros((0, 0), dtype=complex)
        avec = _vector_in(obj.get("a", []), "a") if k else np.zeros(0, dtype=complex)
        cvec = _vector_in(obj.get("c", []), "c") if k else np.zeros(0, dtype=complex)
        if k and (m.shape != (k, k) or len(avec) != k or len(cvec) != k):
            raise SpecError(f"M/a/c: shapes disagree with dimension = {dim}")
        return SiegelMap(lam, avec, bval, m, cvec)
    except LfmError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"constructor invariant violated: {exc}") from exc


# ---------------------------------------------------------------------------
# pipeline


def run_pipeline(spec_obj: dict, seed: int = 20250808, tol_profile: str = "default",
                 t_grid=(0.0, 0.25, 0.5, 1.0, 2.0), z0=None, stop_after: str = "verify"):
    """Classify -> normal form -> embed -> build -> verify, recording each
    stage outcome; stage errors are captured, later stages marked skipped."""
    tols = TOL_PROFILES[tol_profile]
    report = {
        "schema_version": SCHEMA_VERSION,
        "input": to_jsonable(spec_obj),
        "seed": seed,
        "tol_profile": tol_profile,
        "stages": {},
    }
    order = ["classify", "normal_form", "embed", "semigroup", "verify"]
    stages = order[: order.index(stop_after) + 1]

    def skip_rest(from_stage):
        for name in stages[stages.index(from_stage):]:
            report["stages"].setdefault(name, {"status": "skipped"})

    try:
        f = parse_map_spec(spec_obj)
        if isinstance(f, SiegelMap):
            f = cayley_to_ball(f)
    except LfmError as exc:
        report["error"] = str(exc)
        report["exit_status"] = EXIT_INPUT_ERROR
        skip_rest("classify")
        return report

    cert = None
    nf = None
    sg = None
    for stage in stages:
        try:
            if stage == "classify":
                cls = classify(f)
                entry = {
                    "status": "ok",
                    "kind": cls.kind,
                    "interior_fixed_points": cls.interior_fixed_points,
                    "boundary_fixed_points": cls.boundary_fixed_points,
                    "dw_point": cls.dw_point,
                    "delta": cls.delta,
                }
                if cls.kind == ELLIPTIC:
                    entry["unitary_index"] = unitary_index(
                        f, fixed_point=cls.interior_fixed_points[0])
                report["stages"]["classify"] = to_jsonable(entry)
            elif stage == "normal_form":
                nf, conditions = _normal_form_for(f, cls, report["stages"]["classify"])
                entry = {
                    "status": "ok",
                    "form_kind": nf.form_kind,
                    "parameters": nf.parameters,
                    "chain_length": len(nf.conjugations),
                    "chain_residual": conjugation_residual(nf, f),
                    "conditions": [vars(c) for c in conditions],
                }
                report["stages"]["normal_form"] = to_jsonable(entry)
            elif stage == "embed":
                cert = _certificate_for(nf, seed)
                entry = {
                    "status": "ok",
                    "verdict": cert.verdict,
                    "criterion_id": cert.criterion_id,
                    "margins": [vars(c) for c in cert.margins],
                    "automorphism": is_automorphism(f),
                    "notes": cert.notes,
                }
                report["stages"]["embed"] = to_jsonable(entry)
            elif stage == "semigroup":
                if cert.verdict != EMBEDDABLE:
                    report["stages"]["semigroup"] = {
                        "status": "skipped", "reason": f"verdict {cert.verdict}"}
                    continue
                sg = build_semigroup(cert)
                start = z0 if z0 is not None else _default_start(sg)
                rows = emit_trajectory(sg, start, [t for t in t_grid])
                report["stages"]["semigroup"] = to_jsonable({
                    "status": "ok",
                    "case_kind": sg.case_kind,
                    "trajectory_domain": sg.domain,
                    "trajectory_start": start,
                    "trajectory": rows,
                })
            elif stage == "verify":
                if sg is None:
                    report["stages"]["verify"] = {
                        "status": "skipped", "reason": "no semigroup built"}
                    continue
                cfg = SamplerCfg(seed=seed, count=60, domain=sg.domain)
                reports = verify_family(sg, cfg)
                report["stages"]["verify"] = to_jsonable({
                    "status": "ok",
                    "checks": [_check_entry(r) for r in reports],
                    "all_passed": all(r.passed for r in reports),
                })
        except LfmError as exc:
            report["stages"][stage] = {"status": "error", "error": str(exc)}
            skip_rest(stage)
            break
    report["exit_status"] = _exit_status(report, cert)
    return report


def _normal_form_for(f, cls, classify_entry):
    if cls.kind == ELLIPTIC:
        if classify_entry["unitary_index"] >= 1:
            nf = elliptic_split(f)
            return nf, []
        nf = elliptic_u0(f)
        return nf, []
    if cls.kind == PARABOLIC:
        nf = parabolic_normal_form(f)
        return nf, parabolic_conditions(nf)
    nf = hyperbolic_normal_form(f)
    return nf, hyperbolic_conditions(nf)


def _certificate_for(nf, seed: int):
    from .normal_forms import (
        FORM_ELLIPTIC_SPLIT,
        FORM_ELLIPTIC_U0,
        FORM_PARABOLIC,
    )

    if nf.form_kind == FORM_ELLIPTIC_SPLIT:
        return embed_elliptic_split(nf)
    if nf.form_kind == FORM_ELLIPTIC_U0:
        return embed_elliptic_u0(nf, sampler=SamplerCfg(seed=seed, count=2000))
    if nf.form_kind == FORM_PARABOLIC:
        return embed_parabolic(nf)
    return embed_hyperbolic(nf)


def _check_entry(r):
    return {
        "check_id": r.check_id,
        "passed": r.passed,
        "worst_margin": r.worst_margin,
        "tolerance": r.tolerance,
        "samples_used": r.samples_used,
    }


def _default_start(sg) -> np.ndarray:
    dim = sg.at(0.0).dim
    if sg.domain == BALL:
        z = np.zeros(dim, dtype=complex)
        z[0] = 0.3
        return z
    z = np.zeros(dim, dtype=complex)
    z[0] = 1j
    return z


def _exit_status(report, cert) -> int:
    if any(entry.get("status") == "error" for entry in report["stages"].values()):
        return EXIT_INPUT_ERROR
    if "embed" not in report["stages"]:
        return EXIT_EMBEDDABLE  # partial pipeline that completed cleanly
    if cert is None:
        return EXIT_INPUT_ERROR
    if cert.verdict == CONDITION_FAILS:
        return EXIT_CONDITION_FAILS
    if cert.verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    verify_stage = report["stages"].get("verify", {})
    if verify_stage.get("status") == "ok" and not verify_stage.get("all_passed", False):
        return EXIT_INCONCLUSIVE
    return EXIT_EMBEDDABLE


def emit_trajectory(sg, z0, t_grid) -> list:
    """Rows (t, coordinates of at(t)(z0)); t must be non-decreasing."""
    from .errors import DomainError

    z0 = np.asarray(z0, dtype=complex)
    ts = [float(t) for t in t_grid]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise SpecError("trajectory time grid must be non-decreasing")
    if domain_margin(z0, sg.domain) < -1e-9:
        raise DomainError(f"trajectory start {z0} lies outside the {sg.domain} domain")
    rows = []
    for t in ts:
        img = sg.at(t)(z0)
        rows.append([t] + [x for z in img for x in (float(z.real), float(z.imag))])
    return rows


def trajectory_csv(rows, dim: int) -> str:
    header = "t," + ",".join(f"re_{j+1},im_{j+1}" for j in range(dim))
    lines = [header]
    for row in rows:
        lines.append(",".join(f"{x:.17g}" for x in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point


def _read_spec(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise SpecError(str(exc))


def _dump_report(report, path):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _human_summary(report) -> str:
    lines = []
    if "error" in report:
        lines.append(f"input error: {report['error']}")
    stages = report["stages"]
    cls = stages.get("classify", {})
    if cls.get("status") == "ok":
        line = f"classification: {cls['kind']}"
        if cls.get("delta") is not None:
            line += f" (delta = {cls['delta']:.9g})"
        lines.append(line)
    nf = stages.get("normal_form", {})
    if nf.get("status") == "ok":
        lines.append(f"normal form: {nf['form_kind']} "
                     f"(chain residual {nf['chain_residual']:.3e})")
    embed = stages.get("embed", {})
    if embed.get("status") == "ok":
        lines.append(f"embedding: {embed['verdict']} via {embed['criterion_id']}")
        for margin in embed["margins"]:
            lines.append(f"  {margin['name']}: margin {margin['margin']:.6g}")
    ver = stages.get("verify", {})
    if ver.get("status") == "ok":
        for chk in ver["checks"]:
            status = "pass" if chk["passed"] else "FAIL"
            lines.append(f"  check {chk['check_id']}: {status} "
                         f"(worst margin {chk['worst_margin']:.3e})")
        lines.append(f"verification: {'all passed' if ver['all_passed'] else 'FAILED'}")
    for name, entry in stages.items():
        if entry.get("status") == "error":
            lines.append(f"stage {name} error: {entry['error']}")
    lines.append(f"exit status: {report['exit_status']}")
    return "\n".join(lines) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=20250808,
                        help="seed for all sampled verification points")
    common.add_argument("--tol-profile", choices=sorted(TOL_PROFILES), default="default")
    common.add_argument("--output", default=None,
                        help="write the machine-readable report to this path ('-' = stdout)")
    parser = argparse.ArgumentParser(
        prog="lfmsemi",
        description="Classify linear fractional self-maps of the unit ball, "
                    "reduce them to normal form, decide semigroup embedding, "
                    "and verify the construction numerically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, stop in [("classify", "classify"), ("normalize", "normal_form"),
                       ("embed", "embed"), ("semigroup", "semigroup"),
                       ("verify", "verify"), ("report", "verify")]:
        p = sub.add_parser(name, parents=[common])
        p.add_argument("spec", help="path to the map spec JSON ('-' for stdin)")
        p.set_defaults(stop_after=stop)
        if name in ("semigroup", "report"):
            p.add_argument("--t", default="[0,0.25,0.5,1,2]",
                           help="JSON list of trajectory times")
            p.add_argument("--z0", default=None,
                           help="JSON start point, complex entries as [re, im]")
            p.add_argument("--csv", default=None,
                           help="write the trajectory as CSV to this path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec_obj = _read_spec(args.spec)
        t_grid = (0.0, 0.25, 0.5, 1.0, 2.0)
        z0 = None
        if getattr(args, "t", None) is not None and hasattr(args, "t"):
            t_grid = tuple(json.loads(args.t))
        if getattr(args, "z0", None):
            z0 = np.array([complex(p[0], p[1]) for p in json.loads(args.z0)])
    except (SpecError, ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT_ERROR
    report = run_pipeline(spec_obj, seed=args.seed, tol_profile=args.tol_profile,
                          t_grid=t_grid, z0=z0, stop_after=args.stop_after)
    if getattr(args, "csv", None):
        semi = report["stages"].get("semigroup", {})
        if semi.get("status") == "ok":
            dim = len(semi["trajectory"][0][1:]) // 2
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(trajectory_csv(semi["trajectory"], dim))
    if args.output:
        _dump_report(report, args.output)
    if args.output != "-":
        sys.stdout.write(_human_summary(report))
    return int(report["exit_status"])


if __name__ == "__main__":
    sys.exit(main())
