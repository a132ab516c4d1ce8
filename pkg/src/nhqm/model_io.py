"""Model files, result emission and the ``nhqm`` command line.

A model file is a single JSON object with a ``kind`` and flat, kind-specific
fields.  Matrix entries and time coefficients are expression strings (see
``nhqm.expression``) or plain numbers; names in ``parameters`` are visible
inside every expression.

    {"kind": "matrix", "H": [["1", "i*g"], ["i*g", "-1"]], "parameters": {"g": 0.3}}
    {"kind": "brachistochrone", "r": 1, "s": 2, "theta": 1.5707963}
    {"kind": "driven-oscillator", "m": 1, "omega0": 1, "lambda": 0.1, "omega": 2, "truncation": 40}
    {"kind": "swanson", "omega": 2, "alpha": 0.5, "beta": 1, "truncation": 40}
"""
from __future__ import annotations

import argparse
import copy
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .driven_oscillator import FockTruncation, OscillatorParams, build_hamiltonian, quasienergy_closed_form
from .dynamics import TimeDependentModel, integrate_schrodinger
from .errors import InputError, NHQMError, NotPTInvariant, NumericalError, ParseError, SchemaError
from .expression import compile_expression, free_names, parse_expression
from .floquet import floquet_decompose, unfold_to
from .linalg_core import DEFAULT_TOL, ToleranceConfig, eig_general
from .metric import hermitian_equivalent, metric_from_spectrum, pseudo_hermiticity_residual
from .models import Brachistochrone
from .swanson_invariant import (
    AuxiliaryParams,
    SwansonCoefficients,
    build_invariant_pair,
    constraint_residuals,
    gamma_phase,
    safe_block,
    static_auxiliary,
    swanson_model,
    von_neumann_residual,
)
from .symmetry import ParityOperator, classify_pt, default_parity

_COMMON = {"kind", "hbar", "psi0", "parameters"}
SCHEMAS = {
    "matrix": ({"H"}, {"terms", "parity"}),
    "brachistochrone": ({"r", "s", "theta"}, set()),
    "driven-oscillator": ({"m", "omega0", "lambda", "omega"}, {"phi", "truncation"}),
    "swanson": ({"omega", "alpha", "beta"}, {"truncation", "auxiliary"}),
}
DEFAULT_TRUNCATION = 40


@dataclass
class ModelFile:
    kind: str
    fields: dict
    parameters: dict = field(default_factory=dict)

    @property
    def hbar(self) -> float:
        return float(self.fields.get("hbar", 1.0))


@dataclass
class LoadedModel:
    """A built model plus what the commands need to know about it."""

    kind: str
    model: TimeDependentModel
    static: bool
    hbar: float
    parity: np.ndarray | None
    psi0: np.ndarray
    oscillator: OscillatorParams | None = None
    swanson: tuple | None = None
    truncation: int | None = None


def validate_model(raw) -> ModelFile:
    if not isinstance(raw, dict):
        raise SchemaError("model file must hold a JSON object")
    kind = raw.get("kind")
    if kind not in SCHEMAS:
        raise SchemaError(f"unknown or missing kind {kind!r}; expected one of {sorted(SCHEMAS)}")
    required, optional = SCHEMAS[kind]
    missing = sorted(required - raw.keys())
    extra = sorted(raw.keys() - required - optional - _COMMON)
    if missing or extra:
        parts = []
        if missing:
            parts.append("missing fields: " + ", ".join(missing))
        if extra:
            parts.append("unexpected fields: " + ", ".join(extra))
        raise SchemaError(f"{kind}: " + "; ".join(parts))
    params = raw.get("parameters", {})
    if not isinstance(params, dict) or not all(_is_number(v) for v in params.values()):
        raise SchemaError("parameters must map names to numbers")
    return ModelFile(kind, dict(raw), dict(params))


def read_model_file(path: str) -> ModelFile:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}", exc.pos) from exc
    return validate_model(raw)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _real(mf: ModelFile, name: str) -> float:
    """A scalar field: number or time-independent expression with a real value."""
    v = mf.fields[name]
    if _is_number(v):
        return float(v)
    if not isinstance(v, str):
        raise SchemaError(f"field {name!r} must be a number or an expression")
    ast = parse_expression(v)
    if "t" in free_names(ast):
        raise SchemaError(f"field {name!r} must not depend on t")
    z = compile_expression(v, mf.parameters)(0.0)
    if abs(z.imag) > 0:
        raise SchemaError(f"field {name!r} must be real")
    return z.real


def _coefficient(mf: ModelFile, value):
    if _is_number(value) or isinstance(value, str):
        return compile_expression(value, mf.parameters)
    raise SchemaError(f"expected a number or expression, got {value!r}")


def _depends_on_t(value) -> bool:
    return isinstance(value, str) and "t" in free_names(parse_expression(value))


def _matrix_terms(mf: ModelFile, entries, label: str):
    """Split a matrix of expressions into a constant part and (basis, coefficient) terms."""
    if not isinstance(entries, list) or not entries or not all(isinstance(r, list) for r in entries):
        raise SchemaError(f"{label} must be a non-empty array of arrays")
    n = len(entries)
    if any(len(r) != n for r in entries):
        raise SchemaError(f"{label} must be square")
    const = np.zeros((n, n), dtype=complex)
    basis, coeffs = [], []
    for i, row in enumerate(entries):
        for j, v in enumerate(row):
            f = _coefficient(mf, v)
            if _depends_on_t(v):
                E = np.zeros((n, n), dtype=complex)
                E[i, j] = 1.0
                basis.append(E)
                coeffs.append(f)
            else:
                const[i, j] = f(0.0)
    return const, basis, coeffs


def _psi0(mf: ModelFile, dim: int) -> np.ndarray:
    if "psi0" not in mf.fields:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    raw = mf.fields["psi0"]
    if not isinstance(raw, list):
        raise SchemaError("psi0 must be an array")
    v = np.array([_coefficient(mf, x)(0.0) for x in raw], dtype=complex)
    if len(v) > dim:
        raise SchemaError(f"psi0 has {len(v)} entries, model dimension is {dim}")
    return np.pad(v, (0, dim - len(v)))


def _truncation(mf: ModelFile, override: int | None) -> int:
    if override is not None:
        return int(override)
    N = mf.fields.get("truncation", DEFAULT_TRUNCATION)
    if not isinstance(N, int) or isinstance(N, bool) or N < 3:
        raise SchemaError("truncation must be an integer >= 3")
    return N


def build_model(mf: ModelFile, truncation: int | None = None) -> LoadedModel:
    hbar = mf.hbar
    if mf.kind == "matrix":
        const, basis, coeffs = _matrix_terms(mf, mf.fields["H"], "H")
        for k, term in enumerate(mf.fields.get("terms", [])):
            if not isinstance(term, dict) or set(term) != {"matrix", "coefficient"}:
                raise SchemaError(f"terms[{k}] needs exactly 'matrix' and 'coefficient'")
            c2, b2, f2 = _matrix_terms(mf, term["matrix"], f"terms[{k}].matrix")
            if b2:
                raise SchemaError(f"terms[{k}].matrix must not depend on t")
            if c2.shape != const.shape:
                raise SchemaError(f"terms[{k}].matrix has the wrong size")
            basis.append(c2)
            coeffs.append(_coefficient(mf, term["coefficient"]))
        model = TimeDependentModel([const] + basis, [lambda t: 1.0] + coeffs)
        parity = None
        if "parity" in mf.fields:
            parity, b3, _ = _matrix_terms(mf, mf.fields["parity"], "parity")
            if b3 or parity.shape != const.shape:
                raise SchemaError("parity must be a constant matrix of the model's size")
        return LoadedModel("matrix", model, not basis, hbar, parity, _psi0(mf, const.shape[0]))
    if mf.kind == "brachistochrone":
        H = Brachistochrone(_real(mf, "r"), _real(mf, "s"), _real(mf, "theta")).hamiltonian()
        return LoadedModel(mf.kind, TimeDependentModel.constant(H), True, hbar, None, _psi0(mf, 2))
    N = _truncation(mf, truncation)
    if mf.kind == "driven-oscillator":
        params = OscillatorParams(m=_real(mf, "m"), omega0=_real(mf, "omega0"), lam=_real(mf, "lambda"),
                                  omega=_real(mf, "omega"),
                                  phi=_real(mf, "phi") if "phi" in mf.fields else 0.0, hbar=hbar)
        model = build_hamiltonian(params, FockTruncation(N))
        return LoadedModel(mf.kind, model, False, hbar, ParityOperator.fock(N).matrix, _psi0(mf, N),
                           oscillator=params, truncation=N)
    # swanson
    vals = [mf.fields[k] for k in ("omega", "alpha", "beta")]
    coeffs = SwansonCoefficients(*[_coefficient(mf, v) for v in vals])
    static = not any(_depends_on_t(v) for v in vals)
    aux = None
    if "auxiliary" in mf.fields:
        given = mf.fields["auxiliary"]
        if not isinstance(given, dict) or set(given) != {"Phi", "chi"}:
            raise SchemaError("auxiliary needs exactly 'Phi' and 'chi'")
        fP, fc = _coefficient(mf, given["Phi"]), _coefficient(mf, given["chi"])
        aux_static = not any(_depends_on_t(given[k]) for k in ("Phi", "chi"))
        aux = AuxiliaryParams(lambda t: fP(t).real, lambda t: fc(t).real, is_static=aux_static)
        if aux_static:
            aux = AuxiliaryParams.static(fP(0.0).real, fc(0.0).real)
    elif static:
        w, al, be = coeffs.at(0.0)
        if max(abs(w.imag), abs(al.imag), abs(be.imag)) == 0:
            aux = static_auxiliary(w.real, al.real, be.real)
    model = swanson_model(coeffs, N)
    return LoadedModel(mf.kind, model, static, hbar, ParityOperator.fock(N).matrix, _psi0(mf, N),
                       swanson=(coeffs, aux), truncation=N)


def load_model(path: str, truncation: int | None = None):
    """The Hamiltonian described by a model file: a matrix when static, else a TimeDependentModel."""
    lm = build_model(read_model_file(path), truncation)
    return lm.model.hamiltonian(0.0) if lm.static else lm.model


# --- output -----------------------------------------------------------------

def format_float(x: float) -> str:
    return "%.17g" % x


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else format_float(v) for v in row) + "\n")
    return buf.getvalue()


def _complex_json(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix_json(A) -> list:
    return [[_complex_json(z) for z in row] for row in np.asarray(A)]


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


# --- commands ---------------------------------------------------------------

@dataclass(frozen=True)
class RunOptions:
    steps: int = 1000
    t0: float = 0.0
    t1: float = 10.0
    period: float | None = None
    truncation: int | None = None
    tol: ToleranceConfig = DEFAULT_TOL
    levels: int = 4


def _parity(lm: LoadedModel):
    return lm.parity if lm.parity is not None else default_parity(lm.model.dim)


def cmd_spectrum(lm: LoadedModel, opt: RunOptions) -> dict:
    H = lm.model.hamiltonian(opt.t0)
    spec = eig_general(H, opt.tol)
    try:
        cls = classify_pt(H, _parity(lm), opt.tol)
        kind, res = cls.kind, cls.pt_residual
    except NotPTInvariant:
        kind, res = "NotPTInvariant", None
    return {
        "eigenvalues": [_complex_json(z) for z in spec.eigenvalues],
        "classification": kind,
        "pt_residual": res,
    }


def cmd_metric(lm: LoadedModel, opt: RunOptions) -> dict:
    H = lm.model.hamiltonian(opt.t0)
    spec = eig_general(H, opt.tol)
    mp = metric_from_spectrum(spec, opt.tol, unit_determinant=True)
    he = hermitian_equivalent(H, mp, opt.tol)
    return {
        "eta": _matrix_json(mp.eta),
        "rho": _matrix_json(mp.rho),
        "h": _matrix_json(he.h),
        "pseudo_hermiticity_residual": pseudo_hermiticity_residual(H, mp.eta),
        "transform_residual": he.transform_residual,
    }


def _evolution_metric(lm: LoadedModel, opt: RunOptions):
    """Metric of H(t0) for static models with a real spectrum, else the identity."""
    if lm.static:
        try:
            spec = eig_general(lm.model.hamiltonian(opt.t0), opt.tol)
            return metric_from_spectrum(spec, opt.tol).eta
        except NHQMError:
            pass
    return np.eye(lm.model.dim)


def cmd_evolve(lm: LoadedModel, opt: RunOptions):
    eta = _evolution_metric(lm, opt)
    traj = integrate_schrodinger(lm.model, lm.psi0, opt.t0, opt.t1, opt.steps, lm.hbar, eta=eta)
    header = ["t"] + [f"{p}_{k}" for k in range(lm.model.dim) for p in ("re", "im")] + ["pseudo_norm"]
    rows = []
    for t, psi, nrm in zip(traj.times, traj.states, traj.norms_eta):
        row = [t]
        for z in psi:
            row += [z.real, z.imag]
        rows.append(row + [nrm])
    return header, rows


def _period(lm: LoadedModel, opt: RunOptions) -> float:
    if opt.period is not None:
        return opt.period
    if lm.oscillator is not None:
        return lm.oscillator.period
    raise InputError("--period is required for this model")


def cmd_floquet(lm: LoadedModel, opt: RunOptions):
    tau = _period(lm, opt)
    fr = floquet_decompose(lm.model, tau, opt.steps, lm.hbar, opt.tol)
    header = ["n", "re_quasienergy", "im_quasienergy", "closed_form", "stability"]
    rows = []
    if lm.oscillator is not None:
        n = np.arange(min(opt.levels, lm.model.dim))
        exact = quasienergy_closed_form(lm.oscillator, n)
        _, _, vals = unfold_to(fr.quasienergies, exact, tau, lm.hbar)
        for k in n:
            rows.append([str(k), vals[k].real, vals[k].imag, exact[k], fr.stability])
    else:
        for k, q in enumerate(fr.quasienergies):
            rows.append([str(k), q.real, q.imag, "", fr.stability])
    return header, rows


def cmd_invariant(lm: LoadedModel, opt: RunOptions):
    if lm.swanson is None:
        raise InputError("invariant needs a swanson model")
    coeffs, aux = lm.swanson
    if aux is None:
        raise InputError("no auxiliary Phi, chi available: give 'auxiliary' in the model file")
    times = np.linspace(opt.t0, opt.t1, opt.steps + 1)
    N = lm.model.dim
    b = safe_block(N)
    cons = max(max(abs(r) for r in constraint_residuals(coeffs, aux, t, lm.hbar)) for t in times)
    I_s = [build_invariant_pair(aux, t, N).I_ph for t in times]
    H_s = [lm.model.hamiltonian(t) for t in times]
    vn = von_neumann_residual(I_s, H_s, times, lm.hbar, b)
    levels = min(opt.levels, b)
    ev = np.sort(np.linalg.eigvals(I_s[0][:b, :b]).real)[:levels]
    gam, imag = zip(*(gamma_phase(coeffs, aux, n, times, lm.hbar) for n in range(levels)))
    report = {
        "constraint_residual": cons,
        "von_neumann_residual": vn,
        "invariant_eigenvalues": [float(e) for e in ev],
        "gamma_final": [float(g[-1]) for g in gam],
        "gamma_imag_max": float(max(np.max(np.abs(i)) for i in imag)),
        "safe_block": b,
    }
    header = ["t"] + [f"gamma_{n}" for n in range(levels)]
    rows = [[t] + [g[k] for g in gam] for k, t in enumerate(times)]
    return report, header, rows


COMMANDS = ("spectrum", "metric", "evolve", "floquet", "invariant")


def _run_one(command: str, mf: ModelFile, opt: RunOptions):
    """Returns (json_report or None, csv header or None, csv rows)."""
    lm = build_model(mf, opt.truncation)
    if command == "spectrum":
        return cmd_spectrum(lm, opt), None, None
    if command == "metric":
        return cmd_metric(lm, opt), None, None
    if command == "evolve":
        return (None, *cmd_evolve(lm, opt))
    if command == "floquet":
        return (None, *cmd_floquet(lm, opt))
    return cmd_invariant(lm, opt)


def parse_sweep(text: str):
    """'name=start:stop:count' -> (name, values)."""
    try:
        name, rng = text.split("=", 1)
        start, stop, count = rng.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise InputError(f"bad --sweep {text!r}; expected name=start:stop:count") from exc
    if not name or int(count) < 1:
        raise InputError(f"bad --sweep {text!r}")
    return name, values


def with_parameter(mf: ModelFile, name: str, value: float) -> ModelFile:
    raw = copy.deepcopy(mf.fields)
    if name in mf.parameters:
        raw["parameters"][name] = value
    elif name in raw and name != "kind":
        raw[name] = value
    else:
        raise InputError(f"--sweep parameter {name!r} is not a field or parameter of the model")
    return validate_model(raw)


def worker_count(jobs: int) -> int:
    cap = os.environ.get("NHQM_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, int(cap))
        except ValueError as exc:
            raise InputError("NHQM_THREADS must be an integer") from exc
    return max(1, min(n, jobs))


def _merge(name, values, results):
    reports = [r[0] for r in results]
    if results[0][1] is None:
        return [dict(rep, **{name: float(v)}) for v, rep in zip(values, reports)], None, None
    header = [name] + list(results[0][1])
    rows = [[float(v)] + list(row) for v, r in zip(values, results) for row in r[2]]
    merged = None
    if reports[0] is not None:
        merged = [dict(rep, **{name: float(v)}) for v, rep in zip(values, reports)]
    return merged, header, rows


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nhqm", description="Non-Hermitian quantum dynamics toolkit.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("model", help="model JSON file")
    p.add_argument("--out", help="write the CSV (evolve, floquet, invariant) or JSON here instead of stdout")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=10.0)
    p.add_argument("--period", type=float)
    p.add_argument("--truncation", type=int)
    p.add_argument("--tol", type=float, help="eigen-residual and reality tolerance")
    p.add_argument("--levels", type=int, default=4, help="number of levels reported by floquet/invariant")
    p.add_argument("--sweep", help="name=start:stop:count, run once per value")
    return p


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    parser.__class__ = _Parser
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        print(f"nhqm: error: {exc}", file=stderr)
        return 2
    try:
        if args.steps < 1:
            raise InputError("--steps must be positive")
        tol = DEFAULT_TOL if args.tol is None else replace(DEFAULT_TOL, residual_tol=args.tol)
        opt = RunOptions(args.steps, args.t0, args.t1, args.period, args.truncation, tol, args.levels)
        mf = read_model_file(args.model)
        if args.sweep:
            name, values = parse_sweep(args.sweep)
            variants = [with_parameter(mf, name, v) for v in values]
            with ThreadPoolExecutor(max_workers=worker_count(len(values))) as pool:
                results = list(pool.map(lambda m: _run_one(args.command, m, opt), variants))
            report, header, rows = _merge(name, values, results)
        else:
            report, header, rows = _run_one(args.command, mf, opt)
        _emit(args, report, header, rows, stdout)
    except NHQMError as exc:
        print(f"nhqm: {type(exc).__name__}: {exc}", file=stderr)
        return exc.exit_code
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"nhqm: {type(exc).__name__}: {exc}", file=stderr)
        return NumericalError.exit_code
    return 0


def _emit(args, report, header, rows, stdout):
    if header is None:
        text = dump_json(report)
        if args.out:
            _write(args.out, text)
        else:
            stdout.write(text)
        return
    csv = write_csv(header, rows)
    if args.out:
        _write(args.out, csv)
        if report is not None:
            stdout.write(dump_json(report))
    else:
        stdout.write(csv)
        if report is not None:
            print(dump_json(report), end="", file=sys.stderr)


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc
