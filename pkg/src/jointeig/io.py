"""Serialization: canonical JSON schemas and CSV emission.

Complex scalars are encoded as ``[re, im]`` pairs; every float is written
in shortest round-trip decimal, so write -> read -> write is byte-stable.
See docs/formats.md for the full schemas.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .errors import KindMismatchError, ParseError, SchemaError
from .mep import MepProblem, MepSolution
from .polyroots import MultiplicationFamily, PolynomialSystem
from .rjea import CommutingFamily, JointEigenResult

KIND_FAMILY = "family"
KIND_MEP = "mep"
KIND_MULT = "mult"


# --- low-level encoding -----------------------------------------------------

def encode_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(m: np.ndarray) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _decode_entry(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
    ):
        raise SchemaError(f"{where}: expected an [re, im] pair, got {entry!r}")
    z = complex(entry[0], entry[1])
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise SchemaError(f"{where}: non-finite entry {entry!r}")
    return z


def decode_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise SchemaError(f"{where}: expected a non-empty array of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or not row:
            raise SchemaError(f"{where} row {i}: expected a non-empty array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(f"{where} row {i}: ragged row of length {len(row)}")
        out.append([_decode_entry(e, f"{where}[{i}][{j}]") for j, e in enumerate(row)])
    return np.array(out, dtype=complex)


def format_complex(z: complex) -> str:
    """Shortest round-trip ``re+imj`` string accepted by ``complex()``."""
    sign = "+" if z.imag >= 0 or np.isnan(z.imag) else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}j"


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _dump_json(obj, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def _expect_kind(doc, kind: str, path: str):
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object")
    found = doc.get("kind")
    if found != kind:
        raise KindMismatchError(f"{path}: kind is {found!r}, expected {kind!r}")


# --- family -----------------------------------------------------------------

def write_family(family: CommutingFamily, path: str):
    doc = {
        "kind": KIND_FAMILY,
        "d": family.d,
        "sizes": [family.n],
        "matrices": [encode_matrix(m) for m in family.matrices],
    }
    _dump_json(doc, path)


def read_family(path: str) -> CommutingFamily:
    doc = _load_json(path)
    _expect_kind(doc, KIND_FAMILY, path)
    mats = doc.get("matrices")
    if not isinstance(mats, list) or not mats:
        raise SchemaError(f"{path}: 'matrices' must be a non-empty array")
    decoded = [decode_matrix(m, f"matrices[{k}]") for k, m in enumerate(mats)]
    n = decoded[0].shape[0]
    for k, m in enumerate(decoded):
        if m.shape != (n, n):
            raise SchemaError(f"{path}: matrices[{k}] has shape {m.shape}, expected ({n}, {n})")
    if "d" in doc and doc["d"] != len(decoded):
        raise SchemaError(f"{path}: d = {doc['d']} does not match {len(decoded)} matrices")
    if "sizes" in doc and list(doc["sizes"]) != [n]:
        raise SchemaError(f"{path}: sizes {doc['sizes']} do not match matrix size {n}")
    return CommutingFamily(decoded)


# --- multiparameter problem ---------------------------------------------------

def write_mep(problem: MepProblem, path: str):
    doc = {
        "kind": KIND_MEP,
        "d": problem.d,
        "sizes": list(problem.sizes),
        "matrices": [[encode_matrix(b) for b in row] for row in problem.matrices],
    }
    _dump_json(doc, path)


def read_mep(path: str) -> MepProblem:
    doc = _load_json(path)
    _expect_kind(doc, KIND_MEP, path)
    rows = doc.get("matrices")
    if not isinstance(rows, list) or not rows:
        raise SchemaError(f"{path}: 'matrices' must be a non-empty array of equations")
    d = len(rows)
    decoded = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d + 1:
            raise SchemaError(f"{path}: equation {i} must hold d+1 = {d + 1} blocks")
        decoded.append([decode_matrix(b, f"matrices[{i}][{j}]") for j, b in enumerate(row)])
    problem = MepProblem(decoded)
    if "sizes" in doc and list(doc["sizes"]) != list(problem.sizes):
        raise SchemaError(f"{path}: sizes {doc['sizes']} do not match blocks {list(problem.sizes)}")
    return problem


# --- multiplication family ----------------------------------------------------

def write_mult(fam: MultiplicationFamily, path: str):
    doc = {
        "kind": KIND_MULT,
        "s": fam.s,
        "sizes": [fam.m],
        "matrices": [encode_matrix(m) for m in fam.matrices],
    }
    if fam.basis_note:
        doc["basis_note"] = fam.basis_note
    _dump_json(doc, path)


def read_mult(path: str) -> MultiplicationFamily:
    doc = _load_json(path)
    _expect_kind(doc, KIND_MULT, path)
    mats = doc.get("matrices")
    if not isinstance(mats, list) or not mats:
        raise SchemaError(f"{path}: 'matrices' must be a non-empty array")
    decoded = [decode_matrix(m, f"matrices[{k}]") for k, m in enumerate(mats)]
    if "s" in doc and doc["s"] != len(decoded):
        raise SchemaError(f"{path}: s = {doc['s']} does not match {len(decoded)} matrices")
    return MultiplicationFamily(decoded, basis_note=doc.get("basis_note"))


def read_polynomial_system(path: str) -> PolynomialSystem:
    doc = _load_json(path)
    _expect_kind(doc, "polysystem", path)
    s = doc.get("s")
    if not isinstance(s, int) or s < 1:
        raise SchemaError(f"{path}: 's' must be a positive integer")
    polys = doc.get("polynomials")
    if not isinstance(polys, list):
        raise SchemaError(f"{path}: 'polynomials' must be an array")
    parsed = []
    for i, poly in enumerate(polys):
        terms = []
        for j, term in enumerate(poly):
            if not isinstance(term, list) or len(term) != 2:
                raise SchemaError(f"{path}: polynomials[{i}][{j}] must be [coeff, exponents]")
            coeff = _decode_entry(term[0], f"polynomials[{i}][{j}] coefficient")
            exps = term[1]
            if not isinstance(exps, list) or len(exps) != s:
                raise SchemaError(f"{path}: polynomials[{i}][{j}] exponents must have length {s}")
            terms.append((coeff, tuple(int(e) for e in exps)))
        parsed.append(tuple(terms))
    return PolynomialSystem(s, tuple(parsed))


# --- matrix market (secondary, real only) --------------------------------------

def read_real_matrix_market(path: str) -> np.ndarray:
    """Secondary reader for real matrices; the JSON schema is canonical."""
    from scipy.io import mmread

    m = mmread(path)
    if hasattr(m, "todense"):
        m = m.todense()
    m = np.asarray(m)
    if np.iscomplexobj(m):
        raise SchemaError(f"{path}: matrix-market import supports real matrices only")
    return m.astype(float)


# --- result documents -----------------------------------------------------------

def joint_result_to_dict(res: JointEigenResult) -> dict:
    return {
        "kind": "joint-result",
        "mode": res.mode,
        "seed": res.combination.seed,
        "defective": bool(res.defective_flag),
        "commutator_residual": float(res.commutator_residual),
        "mu": [encode_complex(z) for z in res.combination.mu],
        "combination_values": [encode_complex(z) for z in res.combination_values],
        "left_norms": [float(v) for v in res.left_norms],
        "tuples": [[encode_complex(z) for z in row] for row in res.tuples],
    }


def mep_solution_to_dict(sol: MepSolution) -> dict:
    doc = {
        "kind": "mep-solution",
        "mode": sol.mode,
        "strategy": sol.strategy,
        "defective": bool(sol.defective_flag),
        "eigenvalues": [[encode_complex(z) for z in row] for row in sol.eigenvalues],
        "residuals": [[float(v) for v in row] for row in sol.residuals],
    }
    if sol.combination is not None:
        doc["seed"] = sol.combination.seed
        doc["mu"] = [encode_complex(z) for z in sol.combination.mu]
    return doc


def write_json_doc(doc: dict, path: str):
    _dump_json(doc, path)


# --- CSV ---------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, complex) or isinstance(value, np.complexfloating):
        return format_complex(complex(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, header, rows):
    """RFC-4180 CSV with a header row and shortest round-trip numerics."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])


def write_cdf_csv(path: str, errors):
    """Sorted error samples with their empirical CDF levels."""
    errs = np.sort(np.asarray(errors, dtype=float))
    n = errs.shape[0]
    rows = [(errs[i], (i + 1) / n) for i in range(n)]
    write_csv(path, ["error", "empirical_cdf"], rows)
