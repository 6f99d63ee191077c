import numpy as np
import pytest

from griddeg.field_poly import PrimeField
from griddeg.grid import FunctionOracle, GridDomain
from griddeg.groups import AbelianGroup
from griddeg.tableio import TableParseError, dumps_function, load_function, loads_function, save_function


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    D = GridDomain((2, 3))
    for codomain in (AbelianGroup.cyclic(5), AbelianGroup.parse("Z2xZ3"), PrimeField(7)):
        arity = len(getattr(codomain, "orders", (1,)))
        orders = getattr(codomain, "orders", (7,))
        table = np.stack([rng.integers(0, m, size=(2, 3)) for m in orders], axis=-1)
        f = FunctionOracle(D, codomain, table=table)
        path = tmp_path / "f.txt"
        save_function(f, path)
        g = load_function(path)
        assert g.domain == D and g.codomain == codomain
        assert np.array_equal(g.table.reshape(6, arity), table.reshape(6, arity))


def test_format_header():
    f = FunctionOracle(GridDomain((2,)), AbelianGroup.cyclic(3), table=np.array([[1], [2]]))
    assert dumps_function(f) == "sizes: 2\ncodomain: Z3\n0 | 1\n1 | 2\n"


def test_bad_codomain_names_line_2():
    with pytest.raises(TableParseError) as err:
        loads_function("sizes: 2\ncodomain: Q\n0 | 1\n1 | 0\n")
    assert err.value.line == 2


def test_out_of_range_value_names_row():
    with pytest.raises(TableParseError) as err:
        loads_function("sizes: 2\ncodomain: Z3\n0 | 1\n1 | 3\n")
    assert err.value.line == 4


def test_missing_rows_and_order():
    with pytest.raises(TableParseError):
        loads_function("sizes: 2\ncodomain: Z3\n0 | 1\n")
    with pytest.raises(TableParseError) as err:
        loads_function("sizes: 2\ncodomain: Z3\n1 | 1\n0 | 0\n")
    assert err.value.line == 3
