"""Text formats: dense matrices, Pauli sums, purified densities, phase lists."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .encoding import PauliDecomposition, PurifiedDensity
from .errors import ContractError, FileFormatError


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _lines(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    return [ln.strip() for ln in text.splitlines()]


def _content(lines):
    return [ln for ln in lines if ln and not ln.startswith("#")]


def _floats(tokens, where):
    try:
        return [float(tok) for tok in tokens]
    except ValueError as exc:
        raise FileFormatError(f"{where}: {exc}") from exc


def read_dense(path) -> np.ndarray:
    rows = _content(_lines(path))
    if not rows:
        raise FileFormatError(f"{path}: empty matrix file")
    head = rows[0].split()
    if len(head) != 2:
        raise FileFormatError(f"{path}: first line must be 'rows cols'")
    try:
        r, c = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FileFormatError(f"{path}: bad dimensions") from exc
    if r <= 0 or c <= 0 or len(rows) - 1 != r:
        raise FileFormatError(f"{path}: expected {r} data rows, found {len(rows) - 1}")
    out = np.empty((r, c), dtype=complex)
    for i, ln in enumerate(rows[1:]):
        vals = _floats(ln.split(), f"{path} row {i}")
        if len(vals) != 2 * c:
            raise FileFormatError(f"{path} row {i}: expected {2 * c} numbers")
        out[i] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    if not np.all(np.isfinite(out)):
        raise FileFormatError(f"{path}: non-finite entries")
    return out


def write_dense(path, m) -> None:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    buf = io.StringIO()
    buf.write(f"{m.shape[0]} {m.shape[1]}\n")
    for row in m:
        buf.write(" ".join(f"{fmt(z.real)} {fmt(z.imag)}" for z in row) + "\n")
    Path(path).write_text(buf.getvalue())


def _pauli_terms(rows, where):
    terms = []
    for ln in rows:
        parts = ln.split()
        if len(parts) != 2:
            raise FileFormatError(f"{where}: expected '<coef> <word>', got {ln!r}")
        (c,) = _floats(parts[:1], where)
        terms.append((c, parts[1].upper()))
    return terms


def read_pauli(path) -> PauliDecomposition:
    try:
        return PauliDecomposition(_pauli_terms(_content(_lines(path)), path))
    except ContractError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def read_pauli_blocks(path) -> list[tuple[str, PauliDecomposition]]:
    """Blocks separated by '# label <name>' comment lines."""
    blocks, label, rows = [], None, []

    def flush():
        if rows:
            try:
                blocks.append((label or f"block{len(blocks)}", PauliDecomposition(_pauli_terms(rows, path))))
            except ContractError as exc:
                raise FileFormatError(f"{path}: {exc}") from exc

    for ln in _lines(path):
        if ln.startswith("#"):
            body = ln.lstrip("#").strip()
            if body.lower().startswith("label"):
                flush()
                label, rows = body[5:].strip(" :=") or None, []
            continue
        if ln:
            rows.append(ln)
    flush()
    if not blocks:
        raise FileFormatError(f"{path}: no Pauli terms")
    return blocks


def write_pauli(path, p: PauliDecomposition, label: str | None = None) -> None:
    lines = [f"# label {label}"] if label else []
    lines += [f"{fmt(c)} {w}" for c, w in p.terms]
    Path(path).write_text("\n".join(lines) + "\n")


def read_purified(path) -> PurifiedDensity:
    rows = _content(_lines(path))
    if not rows:
        raise FileFormatError(f"{path}: empty file")
    head = rows[0].split()
    try:
        nj, n = int(head[0]), int(head[1])
    except (ValueError, IndexError) as exc:
        raise FileFormatError(f"{path}: first line must be 'J n'") from exc
    if len(rows) - 1 != nj:
        raise FileFormatError(f"{path}: expected {nj} weight lines")
    dim = 2**n
    w, states = [], []
    for i, ln in enumerate(rows[1:]):
        vals = _floats(ln.split(), f"{path} line {i + 2}")
        if len(vals) != 1 + 2 * dim:
            raise FileFormatError(f"{path} line {i + 2}: expected {1 + 2 * dim} numbers")
        w.append(vals[0])
        states.append(np.array(vals[1::2]) + 1j * np.array(vals[2::2]))
    try:
        return PurifiedDensity(np.array(w), np.array(states))
    except ContractError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def write_purified(path, p: PurifiedDensity) -> None:
    lines = [f"{p.weights.size} {p.n}"]
    for wt, st in zip(p.weights, p.states):
        lines.append(" ".join([fmt(wt)] + [f"{fmt(z.real)} {fmt(z.imag)}" for z in st]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_phases(path) -> np.ndarray:
    rows = _content(_lines(path))
    if not rows:
        raise FileFormatError(f"{path}: no phases")
    if "," in rows[0]:
        reader = csv.reader(rows)
        out = []
        for rec in reader:
            if rec and rec[0].strip().lower() == "index":
                continue
            if len(rec) != 2:
                raise FileFormatError(f"{path}: expected 'index,phase'")
            idx, ph = _floats(rec, path)
            out.append((int(idx), ph))
        out.sort()
        return np.array([ph for _, ph in out])
    return np.array([_floats(ln.split()[:1], path)[0] for ln in rows])


def write_phases(path, phases) -> None:
    Path(path).write_text("".join(f"{fmt(p)}\n" for p in np.asarray(phases, float)))
