"""Line-oriented coefficient files.

::

    # comments start with '#'
    field Fp 101          # or: field Q
    name example
    seed 7
    A 0 0 0 : 1
    B 0 0 0 0 0 1 : 3/2

Entries not listed are zero.  B is symmetrized on load, so a cross term may
be written once (as above) or split across both index orders.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

from triq.algebra import QQ, Field, PrimeField, parse_field, parse_rational
from triq.exceptions import BadField, DivisionByZero, DuplicateIndex, NonPrimeModulus, ParseError
from triq.variety import CoefficientTensorA, CoefficientTensorB, Variety


@dataclass
class VarietySpec:
    field: Field
    A: CoefficientTensorA
    B: CoefficientTensorB
    name: Optional[str] = None
    seed: Optional[int] = None
    metadata: dict = dc_field(default_factory=dict)

    @property
    def variety(self) -> Variety:
        return Variety(self.A, self.B, self.name)

    def reduced(self, field: PrimeField) -> VarietySpec:
        """Reduce the coefficients into ``field`` (e.g. a Q spec modulo p)."""
        A = CoefficientTensorA(field, {idx: field.coerce(v) for idx, v in self.A.entries()})
        B = CoefficientTensorB(field, {idx: field.coerce(v) for idx, v in self.B.entries()})
        return VarietySpec(field, A, B, self.name, self.seed, dict(self.metadata))

    def echo(self) -> dict:
        return {
            "field": self.field.descriptor,
            "name": self.name,
            "seed": self.seed,
            "nonzero_A": sum(1 for _ in self.A.entries()),
            "nonzero_B": sum(1 for _ in self.B.entries()),
        }


def _field_line(tokens: list, lineno: int) -> Field:
    rest = " ".join(tokens[1:])
    try:
        return parse_field(rest)
    except NonPrimeModulus as exc:
        raise NonPrimeModulus(str(exc), lineno, 7) from None
    except BadField as exc:
        raise BadField(str(exc), lineno, 7) from None


def parse_text(text: str) -> VarietySpec:
    fld: Optional[Field] = None
    name = seed = None
    metadata = {}
    a_entries: dict = {}
    b_entries: dict = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = line.split()
        head = tokens[0]
        col = raw.index(head) + 1
        if head == "field":
            if fld is not None:
                raise ParseError("field declared twice", lineno, col)
            fld = _field_line(tokens, lineno)
        elif head == "name":
            name = line.strip()[len("name"):].strip() or None
        elif head == "seed":
            try:
                seed = int(tokens[1])
            except (IndexError, ValueError):
                raise ParseError("seed must be an integer", lineno, col) from None
        elif head == "meta":
            if len(tokens) < 3:
                raise ParseError("meta needs a key and a value", lineno, col)
            metadata[tokens[1]] = " ".join(tokens[2:])
        elif head in ("A", "B"):
            want = 3 if head == "A" else 6
            if ":" not in line:
                raise ParseError(f"missing ':' in {head} entry", lineno, col)
            left, right = line.split(":", 1)
            idx_tokens = left.split()[1:]
            if len(idx_tokens) != want:
                raise ParseError(f"{head} entry needs {want} indices, got {len(idx_tokens)}", lineno, col)
            idx = []
            pos = col - 1 + len(head)
            for tok in idx_tokens:
                tpos = raw.index(tok, pos)
                pos = tpos + len(tok)
                if tok not in ("0", "1", "2"):
                    raise ParseError(f"index {tok!r} out of range 0..2", lineno, tpos + 1)
                idx.append(int(tok))
            idx = tuple(idx)
            target = a_entries if head == "A" else b_entries
            if idx in target:
                raise DuplicateIndex(f"duplicate {head} index {idx}", lineno, col)
            colon = raw.index(":")
            after = raw[colon + 1:]
            vcol = colon + 2 + len(after) - len(after.lstrip())
            target[idx] = (right.strip(), lineno, vcol)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)

    if fld is None:
        raise BadField("missing 'field' line")

    def convert(entries: dict) -> dict:
        out = {}
        for idx, (vtext, lineno, vcol) in entries.items():
            try:
                val = parse_rational(vtext)
                out[idx] = fld.coerce(val)
            except (ValueError, ZeroDivisionError, DivisionByZero) as exc:
                raise ParseError(f"bad value {vtext!r}: {exc}", lineno, vcol) from None
        return out

    try:
        A = CoefficientTensorA(fld, convert(a_entries))
        B = CoefficientTensorB(fld, convert(b_entries))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from None
    return VarietySpec(fld, A, B, name, seed, metadata)


def parse_spec(path) -> VarietySpec:
    return parse_text(Path(path).read_text())


def serialize(spec: VarietySpec) -> str:
    """Canonical text: header lines, then nonzero entries in index order."""
    if isinstance(spec.field, PrimeField):
        lines = [f"field Fp {spec.field.p}"]
    else:
        lines = ["field Q"]
    if spec.name:
        lines.append(f"name {spec.name}")
    if spec.seed is not None:
        lines.append(f"seed {spec.seed}")
    for key in sorted(spec.metadata):
        lines.append(f"meta {key} {spec.metadata[key]}")
    lines += [f"A {' '.join(map(str, idx))} : {v}" for idx, v in spec.A.entries()]
    lines += [f"B {' '.join(map(str, idx))} : {v}" for idx, v in spec.B.entries()]
    return "\n".join(lines) + "\n"


def _random_tensor(field: Field, rng: random.Random, rank: int, sparsity: float) -> dict:
    out = {}
    for idx in itertools.product(range(3), repeat=rank):
        if rng.random() < sparsity:
            out[idx] = field.random_element(rng, nonzero=True)
    return out


def generate(seed: int, field: Field = QQ, sparsity: float = 1.0, kind: str = "random",
             name: Optional[str] = None) -> VarietySpec:
    """Reproducible pseudo-random member of the family.

    ``kind="product"`` builds Q = L * L' for a second random (1,1,1)-form
    L', a member whose fibers are all degenerate.
    """
    if not 0 < sparsity <= 1:
        raise ValueError("sparsity must be in (0, 1]")
    rng = random.Random(seed)
    while True:
        a = _random_tensor(field, rng, 3, sparsity)
        if a:
            break
    A = CoefficientTensorA(field, a)
    if kind == "product":
        while True:
            a2 = _random_tensor(field, rng, 3, sparsity)
            if a2:
                break
        B = CoefficientTensorB.from_product(A, CoefficientTensorA(field, a2))
    elif kind == "random":
        while True:
            b = _random_tensor(field, rng, 6, sparsity)
            try:
                B = CoefficientTensorB(field, b)
                break
            except ValueError:
                continue
    else:
        raise ValueError(f"unknown kind {kind!r}")
    meta = {"generator": kind, "sparsity": repr(sparsity)}
    return VarietySpec(field, A, B, name or f"{kind}-{seed}", seed, meta)
