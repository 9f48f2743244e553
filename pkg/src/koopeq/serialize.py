"""File formats: spectrum and comparison JSON, trajectory CSV, external
trajectory ingestion.

Floats are serialized with Python's shortest round-trip representation, so a
re-parsed file reproduces the in-memory values bit for bit.
"""
from __future__ import annotations

import csv
import json
from typing import Optional

import numpy as np

from .compare import ComparisonTolerances, SpectrumComparison, Verdict
from .errors import ParseError
from .spectral import KoopmanSpectrum, principal_eigenvalues
from .trajectory import Trajectory, TrajectoryStatus

SPECTRUM_REQUIRED_KEYS = {"method", "dictionary", "rank", "reconstruction_error",
                          "eigenvalues", "modes", "principal"}


def _c2pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _cvec(v) -> list:
    return [_c2pair(z) for z in np.asarray(v).ravel()]


def _pair2c(p) -> complex:
    return complex(p[0], p[1])


def spectrum_to_dict(spec: KoopmanSpectrum, principal: Optional[np.ndarray] = None) -> dict:
    """JSON-ready form of a spectrum. Eigenvalues are [re, im] pairs to avoid
    complex-number format ambiguity; `principal` defaults to extraction with
    the module defaults."""
    if principal is None:
        principal = principal_eigenvalues(spec)
    return {
        "method": spec.method,
        "dictionary": spec.dictionary_tag,
        "rank": int(spec.rank),
        "reconstruction_error": float(spec.reconstruction_error),
        "eigenvalues": _cvec(spec.eigenvalues),
        "modes": [_cvec(spec.modes[:, r]) for r in range(spec.eigenvalues.size)],
        "principal": _cvec(principal),
        "eigfn_coeffs": [_cvec(spec.eigfn_coeffs[r]) for r in range(spec.eigenvalues.size)],
        "meta": {"centering": spec.centering_tag},
    }


def spectrum_from_dict(d: dict) -> KoopmanSpectrum:
    """Parse a spectrum dict back into a KoopmanSpectrum (strict schema)."""
    if not isinstance(d, dict):
        raise ParseError("spectrum file must hold a JSON object")
    missing = SPECTRUM_REQUIRED_KEYS - d.keys()
    if missing:
        raise ParseError(f"spectrum file missing keys: {sorted(missing)}")
    if d["method"] not in ("dmd", "edmd"):
        raise ParseError(f"unknown method {d['method']!r}")
    try:
        lam = np.array([_pair2c(p) for p in d["eigenvalues"]], dtype=complex)
        modes = np.array([[_pair2c(p) for p in col] for col in d["modes"]],
                         dtype=complex).T if d["modes"] else np.empty((0, 0), complex)
        coeffs_raw = d.get("eigfn_coeffs")
        if coeffs_raw is not None:
            coeffs = np.array([[_pair2c(p) for p in row] for row in coeffs_raw],
                              dtype=complex)
        else:
            coeffs = np.empty((lam.size, 0), dtype=complex)
        rank = int(d["rank"])
        err = float(d["reconstruction_error"])
    except (TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed spectrum file: {exc}") from exc
    if modes.size and modes.shape[1] != lam.size:
        raise ParseError("modes do not match the eigenvalue count")
    meta = d.get("meta", {})
    return KoopmanSpectrum(eigenvalues=lam, modes=modes, eigfn_coeffs=coeffs,
                           method=d["method"], rank=rank,
                           dictionary_tag=d["dictionary"],
                           reconstruction_error=err,
                           centering_tag=meta.get("centering", "identity"))


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc


def comparison_to_dict(cmp: SpectrumComparison) -> dict:
    return {
        "verdict": cmp.verdict.value,
        "wasserstein": cmp.wasserstein,
        "directed_hausdorff_ab": cmp.directed_hausdorff_ab,
        "directed_hausdorff_ba": cmp.directed_hausdorff_ba,
        "matching": [list(p) for p in cmp.matching],
        "principal_a": _cvec(cmp.principal_a),
        "principal_b": _cvec(cmp.principal_b),
        "tolerances": {"eps_conj": cmp.tolerances_used.eps_conj,
                       "eps_semi": cmp.tolerances_used.eps_semi},
        "notes": list(cmp.notes),
    }


def comparison_from_dict(d: dict) -> SpectrumComparison:
    try:
        return SpectrumComparison(
            wasserstein=d["wasserstein"],
            directed_hausdorff_ab=d["directed_hausdorff_ab"],
            directed_hausdorff_ba=d["directed_hausdorff_ba"],
            matching=[tuple(p) for p in d["matching"]],
            verdict=Verdict(d["verdict"]),
            tolerances_used=ComparisonTolerances(**d["tolerances"]),
            principal_a=np.array([_pair2c(p) for p in d["principal_a"]], dtype=complex),
            principal_b=np.array([_pair2c(p) for p in d["principal_b"]], dtype=complex),
            notes=list(d.get("notes", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed comparison file: {exc}") from exc


def write_trajectory_csv(path, labeled_trajectories) -> None:
    """One CSV holding several aligned trajectories: column blocks
    `<label>_<i>` per trajectory, rows indexed by iteration k. Shorter
    trajectories leave trailing cells empty."""
    labeled = [(label, np.asarray(t.states if isinstance(t, Trajectory) else t))
               for label, t in labeled_trajectories]
    header = ["k"]
    for label, states in labeled:
        header += [f"{label}_{i}" for i in range(states.shape[1])]
    n_rows = max(states.shape[0] for _, states in labeled)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(n_rows):
            row = [str(k)]
            for _, states in labeled:
                if k < states.shape[0]:
                    row += [repr(float(v)) for v in states[k]]
                else:
                    row += [""] * states.shape[1]
            writer.writerow(row)


def write_grid_csv(path, result) -> None:
    """Sweep output: one row per grid cell, row-major over (axis1, axis2)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["xi1_0", "xi2_0", "distance", "flag"])
        for i, a in enumerate(result.axis1):
            for j, b in enumerate(result.axis2):
                writer.writerow([repr(float(a)), repr(float(b)),
                                 repr(float(result.distances[i, j])),
                                 str(int(result.flags[i, j]))])


def ingest_external_trajectory(path, eps: float = 1e-12) -> Trajectory:
    """Read a trajectory produced outside this package.

    Expected format: header `k,x0,x1,...`, one row per iterate with k counting
    up from 0 without gaps. Returns status BUDGET_EXHAUSTED (convergence is
    unknown for external data) unless the final two rows coincide within eps.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty trajectory file", line=1) from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0] != "k":
            raise ParseError("header must be of the form k,x0,x1,...", line=1)
        expected = ["x" + str(i) for i in range(len(header) - 1)]
        if header[1:] != expected:
            raise ParseError(f"state columns must be named {','.join(expected)}", line=1)
        dim = len(header) - 1
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 1:
                raise ParseError(f"expected {dim + 1} cells, got {len(row)}", line=lineno)
            try:
                k = int(row[0])
                vals = [float(c) for c in row[1:]]
            except ValueError:
                raise ParseError(f"non-numeric cell in row {lineno}", line=lineno) from None
            if k != len(rows):
                kind = "duplicate" if k < len(rows) else "gap in"
                raise ParseError(f"{kind} iteration index k={k}", line=lineno)
            rows.append(vals)
    if len(rows) < 2:
        raise ParseError("need at least two states")
    states = np.array(rows, dtype=float)
    status = TrajectoryStatus.BUDGET_EXHAUSTED
    fpe = None
    if np.linalg.norm(states[-1] - states[-2]) <= eps:
        status = TrajectoryStatus.CONVERGED
        fpe = states[-1]
    return Trajectory(states=states, status=status, fixed_point_estimate=fpe)
