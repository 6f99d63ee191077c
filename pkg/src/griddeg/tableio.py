"""Text format for dense function tables.

    sizes: 2 3
    codomain: Z5
    0 0 | 1
    0 1 | 4
    ...

One row per grid point in lexicographic order.  The codomain is ``Z<m>``
(or a product such as ``Z2xZ3``, values then written ``a,b``) or ``F<p>``.
"""
from __future__ import annotations

import os

import numpy as np

from .field_poly import PrimeField
from .grid import FunctionOracle, GridDomain, enumerate_points
from .groups import AbelianGroup, as_group


class TableParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_codomain(text: str):
    text = text.strip()
    if text.startswith("F"):
        return PrimeField.parse(text)
    return AbelianGroup.parse(text)


def codomain_descriptor(codomain) -> str:
    return codomain.descriptor


def dumps_function(f: FunctionOracle) -> str:
    dense = f.to_dense()
    lines = [
        "sizes: " + " ".join(map(str, f.domain.sizes)),
        "codomain: " + codomain_descriptor(f.codomain),
    ]
    flat = dense.table.reshape(-1, dense.group.arity)
    for x, v in zip(enumerate_points(f.domain), flat):
        lines.append(" ".join(map(str, x)) + " | " + ",".join(str(int(c)) for c in v))
    return "\n".join(lines) + "\n"


def save_function(f: FunctionOracle, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_function(f))


def loads_function(text: str) -> FunctionOracle:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("sizes:"):
        raise TableParseError(1, "expected 'sizes: s1 ... sn'")
    try:
        domain = GridDomain(tuple(int(v) for v in lines[0][len("sizes:"):].split()))
    except ValueError as exc:
        raise TableParseError(1, str(exc)) from exc
    if len(lines) < 2 or not lines[1].startswith("codomain:"):
        raise TableParseError(2, "expected 'codomain: Z<m> | F<p>'")
    try:
        codomain = parse_codomain(lines[1][len("codomain:"):])
    except ValueError as exc:
        raise TableParseError(2, str(exc)) from exc
    group = as_group(codomain)
    domain.check_budget()

    rows = [(no, line) for no, line in enumerate(lines[2:], start=3) if line.strip()]
    if len(rows) != domain.cardinality:
        last = rows[-1][0] if rows else 2
        raise TableParseError(last, f"expected {domain.cardinality} rows, found {len(rows)}")
    values = np.zeros((domain.cardinality, group.arity), dtype=np.int64)
    for k, ((no, line), expected) in enumerate(zip(rows, enumerate_points(domain))):
        if "|" not in line:
            raise TableParseError(no, "missing '|' between point and value")
        lhs, rhs = line.split("|", 1)
        try:
            point = tuple(int(v) for v in lhs.split())
            value = tuple(int(v) for v in rhs.split(","))
        except ValueError:
            raise TableParseError(no, f"non-integer entry in {line.strip()!r}") from None
        if point != expected:
            raise TableParseError(no, f"point {point} out of order, expected {expected}")
        if len(value) != group.arity or any(not 0 <= v < m for v, m in zip(value, group.orders)):
            raise TableParseError(no, f"value {rhs.strip()} out of range for {codomain_descriptor(codomain)}")
        values[k] = value
    return FunctionOracle(domain, codomain, table=values.reshape(domain.sizes + (group.arity,)))


def load_function(path: str | os.PathLike) -> FunctionOracle:
    with open(path) as fh:
        return loads_function(fh.read())
