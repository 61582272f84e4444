"""Command-line front end.

    qmsdf analyze MODEL [--modes ...] [--tol-rank X] [--tol-spec X] [--seed N] [--out FILE]
    qmsdf evolve MODEL STATE --times t1,t2,...
    qmsdf crosscheck MODEL
    qmsdf fixtures list | dump NAME

MODEL is a path to a JSON model or ``fixture:NAME``.  Every flag can also
be given through an environment variable QMSDF_<FLAG>, e.g.
QMSDF_TOL_RANK=1e-10.

Exit codes: 0 ok, 1 a structure check failed, 2 invalid model or state,
3 numerical degeneracy or structure mismatch, 4 usage error.
"""
import argparse
import hashlib
import json
import os
import sys
import warnings

import jsonschema
import numpy as np

from . import _linalg as lin
from . import asymptotics as asy
from . import structure as st
from .algebra import BlockStructure, atomic_decomposition
from .errors import DegeneracyError, ModelValidationError, StructureMismatchError
from .fixtures import (FIXTURES, decode_matrix, encode_matrix, fixture_names, get_fixture,
                       model_from_json, model_to_json, tensor_K12)
from .model import as_density, build_generator, build_predual_generator, semigroup_map, validate_minimality

EXIT_OK, EXIT_CHECK, EXIT_VALIDATION, EXIT_DEGENERACY, EXIT_USAGE = 0, 1, 2, 3, 4
ENV_PREFIX = "QMSDF_"
ALL_MODES = ("nt", "ft", "blocks", "spectrum", "states", "eid", "crosscheck")

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _COMPLEX}}

MODEL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "GKSL model",
    "type": "object",
    "required": ["dim", "hamiltonian"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "hamiltonian": _MATRIX,
        "jumps": {"type": "array", "items": _MATRIX},
        "labels": {"type": "array", "items": {"type": "string"}},
        "comment": {"type": "string"},
        "reference_frame": {
            "type": "object",
            "required": ["blocks", "unitary"],
            "properties": {
                "blocks": {"type": "array", "items": {
                    "type": "array", "items": {"type": "integer", "minimum": 1},
                    "minItems": 2, "maxItems": 2}},
                "unitary": _MATRIX,
            },
        },
    },
}

STATE_SCHEMA = {
    "type": "object",
    "required": ["matrix"],
    "properties": {"dim": {"type": "integer", "minimum": 1}, "matrix": _MATRIX},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env(name, default):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _num(x):
    """Round to 12 significant digits so reports are stable text."""
    x = float(x)
    if not np.isfinite(x):
        return str(x)
    return float(f"{x:.12g}")


def _cnum(z):
    return [_num(np.real(z)), _num(np.imag(z))]


def _mat(x):
    x = np.asarray(x)
    x = np.where(np.abs(x) < 1e-14, 0, x)
    return [[_cnum(v) for v in row] for row in x]


def _claim(value, tol, ok=None):
    ok = bool(value <= tol) if ok is None else bool(ok)
    return {"value": _num(value), "tol": _num(tol), "ok": ok}


def _validate(data, schema):
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(data), key=lambda e: list(e.path))
    if errors:
        msgs = [f"{e.json_path}: {e.message}" for e in errors[:10]]
        raise ModelValidationError("schema violations:\n  " + "\n  ".join(msgs))


def load_model_data(spec):
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in FIXTURES:
            raise UsageError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
        return fixture_json(name)
    if not os.path.exists(spec):
        raise UsageError(f"model file {spec!r} not found")
    with open(spec) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelValidationError(f"$: invalid JSON ({exc})") from None
    return data


def parse_model(data):
    _validate(data, MODEL_SCHEMA)
    d = data["dim"]
    for path, m in [("$.hamiltonian", data["hamiltonian"])] + [
            (f"$.jumps[{k}]", l) for k, l in enumerate(data.get("jumps", []))]:
        if len(m) != d or any(len(r) != d for r in m):
            raise ModelValidationError(f"{path}: expected a {d}x{d} matrix")
    model = model_from_json(data)
    frame = None
    if "reference_frame" in data:
        rf = data["reference_frame"]
        u = decode_matrix(rf["unitary"], "$.reference_frame.unitary")
        blocks = tuple(tuple(b) for b in rf["blocks"])
        if u.shape != (d, d) or sum(n * m for n, m in blocks) != d:
            raise ModelValidationError("$.reference_frame: blocks do not match the dimension")
        frame = frame_from_unitary(u, blocks)
    return model, frame


def frame_from_unitary(u, blocks):
    projs, o = [], 0
    for n, m in blocks:
        rows = u[o:o + n * m]
        projs.append(rows.conj().T @ rows)
        o += n * m
    return BlockStructure(u, tuple(blocks), tuple(projs))


def fixture_json(name):
    model = get_fixture(name)
    data = model_to_json(model, FIXTURES[name][1])
    if name == "tensor_K12_corrupted":
        clean = tensor_K12()
        bs = atomic_decomposition(st.compute_NT(clean))
        data["reference_frame"] = {"blocks": [list(b) for b in bs.blocks],
                                   "unitary": encode_matrix(bs.unitary)}
    return data


def model_hash(data):
    canon = json.dumps({k: data[k] for k in ("dim", "hamiltonian", "jumps") if k in data},
                       sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


class Config:
    def __init__(self, args):
        try:
            self._parse(args)
        except ValueError as exc:
            raise UsageError(f"bad numeric option ({exc})") from None

    def _parse(self, args):
        self.tol_rank = float(args.tol_rank)
        self.tol_eq = float(args.tol_eq)
        self.tol_spec = None if args.tol_spec in (None, "auto") else float(args.tol_spec)
        self.tol_pos = float(args.tol_pos)
        self.seed = int(args.seed)
        self.t_samples = tuple(float(t) for t in str(args.t_samples).split(","))
        for name in ("tol_rank", "tol_eq", "tol_pos"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if self.tol_spec is not None and self.tol_spec <= 0:
            raise UsageError("tol_spec must be positive")
        if any(t < 0 for t in self.t_samples):
            raise UsageError("t_samples must be nonnegative")

    def echo(self):
        return {"tol_rank": self.tol_rank, "tol_eq": self.tol_eq,
                "tol_spec": "auto (1e-9 * |L|)" if self.tol_spec is None else self.tol_spec,
                "tol_pos": self.tol_pos, "seed": self.seed, "t_samples": list(self.t_samples)}


class Analysis:
    """Lazily computed, shared intermediate results for one model."""

    def __init__(self, model, cfg, frame=None):
        self.model = model
        self.cfg = cfg
        self.frame = frame
        self._cache = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def nt(self):
        return self._get("nt", lambda: st.compute_NT(self.model, self.cfg.tol_rank))

    @property
    def ft(self):
        return self._get("ft", lambda: st.compute_FT(self.model, self.cfg.tol_rank))

    @property
    def nt_blocks(self):
        return self._get("ntb", lambda: atomic_decomposition(self.nt, self.cfg.seed, self.cfg.tol_rank))

    @property
    def ft_blocks(self):
        return self._get("ftb", lambda: atomic_decomposition(self.ft, self.cfg.seed, self.cfg.tol_rank))

    @property
    def split(self):
        return self._get("split", lambda: asy.generator_spectrum(build_generator(self.model),
                                                                 self.cfg.tol_spec))

    @property
    def rho(self):
        return self._get("rho", lambda: asy.faithful_invariant_state(
            self.model, self.cfg.tol_pos, self.cfg.tol_spec))

    @property
    def faithful(self):
        return self.rho is not None


def section_nt(an):
    return {"dim": len(an.nt), "basis": [_mat(b) for b in an.nt.basis]}


def section_ft(an):
    out = {"dim": len(an.ft), "basis": [_mat(b) for b in an.ft.basis]}
    if not an.faithful:
        out["advisory"] = "no faithful invariant state: {H, L, L^dag}' need not equal the fixed points"
        fixed = st.fixed_point_space(an.model, an.cfg.tol_rank)
        out["fixed_point_space_dim"] = len(fixed)
    return out


def section_blocks(an):
    out = {"seed": an.cfg.seed, "nt_blocks": [list(b) for b in an.nt_blocks.blocks],
           "ft_blocks": [list(b) for b in an.ft_blocks.blocks]}
    ops = st.extract_block_operators(an.model, an.nt_blocks, an.cfg.tol_eq, strict=False)
    out["nt_block_fit"] = _claim(ops.residual, an.cfg.tol_eq)
    out["K_spectra"] = [[_num(v) for v in np.linalg.eigvalsh(k)] for k in ops.K]
    return out


def section_spectrum(an):
    s = an.split
    ev = sorted(s.eigenvalues, key=lambda z: (-z.real, z.imag))
    return {
        "eigenvalues": [_cnum(z) for z in ev],
        "tol_spec": _num(s.tol_spec),
        "peripheral_values": [_cnum(z) for z in s.peripheral_values],
        "peripheral_dim": s.peripheral_dim,
        "mr_dim": len(s.eigen_basis),
        "gap": _num(s.gap),
        "max_real_part": _num(s.max_real),
        "jordan_ok": s.jordan_ok,
    }


def section_states(an):
    inv = asy.invariant_states(an.model, an.cfg.tol_spec, an.cfg.seed)
    rev = asy.reversible_subspace(an.model, an.cfg.tol_spec, an.nt, an.faithful)
    out = {
        "invariant_functional_dim": inv.functional_dim,
        "faithful": an.faithful,
        "tol_pos": an.cfg.tol_pos,
        "max_support_state": _mat(inv.max_support_state),
        "max_support_state_min_eigenvalue": _num(np.linalg.eigvalsh(inv.max_support_state)[0]),
        "reversible_dim": rev.dim,
        "nt_dim": rev.nt_dim,
        "rt_differs_from_nt_predual": not (rev.dim == rev.nt_dim and (rev.nt_pairing_rank in (None, rev.dim))),
    }
    if an.faithful:
        out["faithful_state"] = _mat(an.rho)
        out["annihilator_pairing"] = _claim(rev.annihilator_pairing, an.cfg.tol_eq)
    return out


def section_eid(an):
    r = asy.eid_verdict(an.model, an.cfg.tol_spec, nt=an.nt, ft=an.ft)
    return {
        "faithful_state_found": r.faithful_state_found,
        "nt_dim": r.nt_dim,
        "mr_dim": r.mr_dim,
        "m0_dim": r.m0_dim,
        "nt_equals_mr": _claim(r.nt_mr_distance, 1e-7),
        "nt_cap_ms_dim": r.nt_cap_ms_dim,
        "eid1_complete": r.eid1_complete,
        "eid2_decay": _claim(r.eid2_decay, asy.EID_DECAY_TOL),
        "mr_is_algebra": _claim(r.mr_product_residual, 1e-7),
        "eid_holds": r.eid_holds,
        "peripheral_group_order": r.peripheral_group_order,
        "tol_spec": _num(r.tol_spec),
        "gap": _num(r.gap),
        "status": "VERIFIED" if r.faithful_state_found else "ADVISORY",
        "advisories": list(r.advisories),
    }


def _row(name, residual, tol, hypothesis=True, reason="no faithful invariant state", ok=None):
    if not hypothesis:
        return {"check": name, "status": f"SKIPPED({reason})", "residual": None, "tol": _num(tol)}
    passed = bool(residual <= tol) if ok is None else bool(ok)
    return {"check": name, "status": "PASS" if passed else "FAIL", "residual": _num(residual),
            "tol": _num(tol)}


def crosscheck_rows(an):
    cfg = an.cfg
    m = an.model
    f = an.faithful
    rows = []
    aut = st.verify_automorphism_action(m, an.nt, cfg.t_samples)
    rows.append(_row("automorphism_action_on_NT",
                     max(aut.conjugation_error, aut.multiplicativity_error, aut.inversion_error),
                     aut.tol))
    frame = an.frame if an.frame is not None else an.nt_blocks
    # raises StructureMismatchError when the fit fails
    ops = st.extract_block_operators(m, frame, cfg.tol_eq)
    rows.append(_row("block_operator_fit", ops.residual, cfg.tol_eq))
    rows.append(_row("block_evolution", st.verify_block_evolution(m, ops, (0.1, 1.0), cfg.seed), 1e-7))
    rows.append(_row("FT_subset_NT", max((an.nt.residual(x) for x in an.ft.basis), default=0.0)
                     if f else 0.0, cfg.tol_eq, f))
    if f:
        spec = st.spectrum_of_K(ops, cfg.tol_eq)
        pred = st.ft_from_nt(spec, frame)
        rows.append(_row("FT_from_NT", pred.algebra.distance(an.ft), 1e-7))
        models, _, _ = st.ft_block_models(m, an.ft_blocks, cfg.tol_eq)
        ntp = st.nt_from_ft(an.ft_blocks, models, nt=an.nt, tol=cfg.tol_eq)
        dist = ntp.algebra.distance(an.nt)
        rows.append(_row("NT_from_FT", dist, 1e-7, ok=dist <= 1e-7 and not ntp.inconsistencies))
        ef = asy.conditional_expectation_FT(m, cfg.tol_spec, cfg.tol_eq, an.ft, an.rho, cfg.seed)
        en = asy.conditional_expectation_NT(m, cfg.tol_spec, cfg.tol_eq, an.nt, an.rho, cfg.seed)
        core = {k: v for k, v in ef.checks.items() if k != "cesaro"}
        rows.append(_row("conditional_expectation_FT", max(v["value"] for v in core.values()),
                         cfg.tol_eq, ok=all(v["ok"] for v in core.values())))
        if "cesaro" in ef.checks:
            c = ef.checks["cesaro"]
            rows.append(_row("cesaro_vs_spectral_projection", c["value"], c["tol"]))
        rows.append(_row("conditional_expectation_NT",
                         max(v["value"] for v in en.checks.values()), cfg.tol_eq, ok=en.ok))
        rev = asy.reversible_subspace(m, cfg.tol_spec, an.nt, True)
        sig = lin.unvec_rows(rev.basis, m.dim)
        rows.append(_row("predual_evolution",
                         max((asy.predual_evolution_check(m, s, (0.1, 1.0), en) for s in sig),
                             default=0.0), 1e-8))
        forms = [asy.reversible_state_structure(s, frame, ops) for s in sig]
        rows.append(_row("reversible_state_form",
                         max((max(r.off_block_mass, r.reconstruction_error) for r in forms), default=0.0),
                         1e-7, ok=all(not r.violations for r in forms)))
        inv = asy.invariant_state_form_check(m, an.ft_blocks)
        rows.append(_row("invariant_state_form",
                         max(inv["max_reconstruction_error"], inv["trace_error"]), 1e-8, ok=inv["ok"]))
        eid = asy.eid_verdict(m, cfg.tol_spec, nt=an.nt, ft=an.ft)
        rows.append(_row("EID_NT_equals_Mr", eid.nt_mr_distance, 1e-7, ok=eid.eid_holds))
    else:
        for name, tol in (("FT_from_NT", 1e-7), ("NT_from_FT", 1e-7),
                          ("conditional_expectation_FT", cfg.tol_eq),
                          ("conditional_expectation_NT", cfg.tol_eq), ("predual_evolution", 1e-8),
                          ("reversible_state_form", 1e-7), ("invariant_state_form", 1e-8),
                          ("EID_NT_equals_Mr", 1e-7)):
            rows.append(_row(name, 0.0, tol, False))
    return rows


SECTIONS = {
    "nt": section_nt,
    "ft": section_ft,
    "blocks": section_blocks,
    "spectrum": section_spectrum,
    "states": section_states,
    "eid": section_eid,
}


def analyze(data, cfg, modes=ALL_MODES):
    model, frame = parse_model(data)
    an = Analysis(model, cfg, frame)
    mini = validate_minimality(model, cfg.tol_rank)
    report = {
        "model": {"dim": model.dim, "jumps": len(model.jumps), "labels": list(model.labels),
                  "sha256": model_hash(data), "minimal_representation": mini.minimal},
        "config": cfg.echo(),
        "modes": [m for m in ALL_MODES if m in modes],
    }
    for mode in ALL_MODES:
        if mode in modes and mode in SECTIONS:
            report[mode] = SECTIONS[mode](an)
    if "crosscheck" in modes:
        report["crosscheck"] = crosscheck_rows(an)
    advisories = []
    if not an.faithful:
        advisories.append("ADVISORY: no faithful invariant state; results that assume one are advisory")
    report["advisories"] = advisories
    return report, an


def render_text(report):
    lines = [f"model: d={report['model']['dim']}, {report['model']['jumps']} jump(s), "
             f"sha256 {report['model']['sha256'][:12]}"]
    for mode in ("nt", "ft"):
        if mode in report:
            lines.append(f"{mode}: dim {report[mode]['dim']}")
    if "blocks" in report:
        b = report["blocks"]
        lines.append(f"N(T) blocks {b['nt_blocks']}  F(T) blocks {b['ft_blocks']}")
    if "spectrum" in report:
        s = report["spectrum"]
        lines.append(f"spectrum: peripheral dim {s['peripheral_dim']}, M_r dim {s['mr_dim']}, "
                     f"gap {s['gap']}, tol_spec {s['tol_spec']}")
    if "states" in report:
        s = report["states"]
        lines.append(f"states: invariant functionals {s['invariant_functional_dim']}, "
                     f"faithful {s['faithful']}, R(T) dim {s['reversible_dim']}")
    if "eid" in report:
        e = report["eid"]
        lines.append(f"EID [{e['status']}]: holds {e['eid_holds']}, N(T) dim {e['nt_dim']}, "
                     f"M_r dim {e['mr_dim']}, M_0 dim {e['m0_dim']}")
    for row in report.get("crosscheck", []):
        lines.append(f"  {row['status']:<40} {row['check']} (residual {row['residual']}, tol {row['tol']})")
    lines.extend(report.get("advisories", []))
    return "\n".join(lines)


def dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_config_flags(p):
    p.add_argument("--tol-rank", default=_env("tol_rank", lin.TOL_RANK))
    p.add_argument("--tol-eq", default=_env("tol_eq", lin.TOL_EQ))
    p.add_argument("--tol-spec", default=_env("tol_spec", "auto"))
    p.add_argument("--tol-pos", default=_env("tol_pos", asy.TOL_POS))
    p.add_argument("--seed", default=_env("seed", 0), type=int)
    p.add_argument("--t-samples", default=_env("t_samples", ",".join(map(str, st.DEFAULT_T_SAMPLES))))
    p.add_argument("--out", default=_env("out", None))
    p.add_argument("--text", action="store_true", default=_env("text", "") not in ("", "0"))


def build_parser():
    parser = _Parser(prog="qmsdf", description="Decoherence-free and fixed-point analysis of GKSL models.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("analyze", help="run the analysis modes on a model")
    p.add_argument("model")
    p.add_argument("--modes", default=_env("modes", ",".join(ALL_MODES)),
                   help="comma-separated subset of " + ",".join(ALL_MODES))
    _add_config_flags(p)
    p = sub.add_parser("evolve", help="distance of T_*t(eta) from its reversible part")
    p.add_argument("model")
    p.add_argument("state")
    p.add_argument("--times", default=_env("times", "0,1,2,4"))
    _add_config_flags(p)
    p = sub.add_parser("crosscheck", help="pass/fail matrix of the structure checks")
    p.add_argument("model")
    _add_config_flags(p)
    p = sub.add_parser("fixtures", help="list or dump bundled models")
    p.add_argument("action", choices=["list", "dump"])
    p.add_argument("name", nargs="?")
    p.add_argument("--out", default=None)
    return parser


def cmd_analyze(args):
    cfg = Config(args)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    bad = [m for m in modes if m not in ALL_MODES]
    if bad:
        raise UsageError(f"unknown modes {bad}")
    report, _ = analyze(load_model_data(args.model), cfg, modes)
    _emit(render_text(report) + "\n" if args.text else dump_json(report), args.out)
    if "crosscheck" in report and any(r["status"] == "FAIL" for r in report["crosscheck"]):
        return EXIT_CHECK
    return EXIT_OK


def cmd_crosscheck(args):
    cfg = Config(args)
    report, _ = analyze(load_model_data(args.model), cfg, ("crosscheck",))
    _emit(render_text(report) + "\n" if args.text else dump_json(report), args.out)
    return EXIT_CHECK if any(r["status"] == "FAIL" for r in report["crosscheck"]) else EXIT_OK


def load_state(spec, dim):
    if not os.path.exists(spec):
        raise UsageError(f"state file {spec!r} not found")
    with open(spec) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelValidationError(f"$: invalid JSON ({exc})") from None
    if isinstance(data, list):
        data = {"matrix": data}
    _validate(data, STATE_SCHEMA)
    rho = decode_matrix(data["matrix"], "$.matrix")
    if rho.shape != (dim, dim):
        raise ModelValidationError(f"$.matrix: state has shape {rho.shape}, model dimension is {dim}")
    return as_density(rho)


def evolve_distances(model, eta, times, tol_spec=None):
    """Trace distance between T_*t(eta) and T_*t(E_N*(eta)) for each t."""
    gen = build_generator(model)
    e, _, _ = asy.peripheral_projection(gen, tol_spec)
    rev = lin.unvec(e.conj().T @ lin.vec(eta), model.dim)
    pred = build_predual_generator(model)
    out = []
    for t in times:
        tt = semigroup_map(pred, t)
        out.append(lin.trace_norm(tt.apply(eta) - tt.apply(rev)))
    return out


def cmd_evolve(args):
    cfg = Config(args)
    model, _ = parse_model(load_model_data(args.model))
    eta = load_state(args.state, model.dim)
    try:
        times = [float(t) for t in args.times.split(",")]
    except ValueError:
        raise UsageError(f"bad --times {args.times!r}") from None
    if any(t < 0 for t in times):
        raise UsageError("times must be nonnegative")
    dist = evolve_distances(model, eta, times, cfg.tol_spec)
    text = "t,trace_distance\n" + "".join(f"{t:.12g},{v:.12g}\n" for t, v in zip(times, dist))
    _emit(text, args.out)
    return EXIT_OK


def cmd_fixtures(args):
    if args.action == "list":
        text = "".join(f"{name}: {FIXTURES[name][1]}\n" for name in fixture_names())
        _emit(text, args.out)
        return EXIT_OK
    if not args.name:
        raise UsageError("fixtures dump needs a fixture name")
    if args.name not in FIXTURES:
        raise UsageError(f"unknown fixture {args.name!r}; available: {', '.join(fixture_names())}")
    _emit(dump_json(fixture_json(args.name)), args.out)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "evolve": cmd_evolve, "crosscheck": cmd_crosscheck,
            "fixtures": cmd_fixtures}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a command is required")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StructureMismatchError as exc:
        print(f"structure mismatch: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except DegeneracyError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY


if __name__ == "__main__":
    sys.exit(main())
