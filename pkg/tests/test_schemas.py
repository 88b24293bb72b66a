import json

import pytest
from pydantic import ValidationError

from singkit.core.exceptions import InvalidInputError
from singkit.schemas.files import dumps, read_model, write_atomic
from singkit.schemas.landau import PointRecord, SingularityEntryModel, singularity_set_from_models
from singkit.schemas.operator import OperatorFile
from singkit.schemas.polynomial import FactoredPolynomialModel, FieldModel, PolynomialModel
from singkit.schemas.series import SeriesFile
from singkit.services.exactalg import Polynomial, factor_poly
from singkit.services.numerics import ComplexPoint
from singkit.services.odefit import DiffOperator, SingularityEntry
from singkit.services.seriesgen import phiH_series


def test_series_file_keeps_exact_coefficients():
    s = phiH_series(3, 12)
    record = SeriesFile.from_series(s, config={"subcommand": "series"})
    assert record.coeffs[0] == "1/6"
    assert record.to_series() == s


def test_series_file_rejects_inexact_coefficients():
    with pytest.raises(ValidationError):
        SeriesFile(model="phiH", order=2, coeffs=["1", "0.1e-3x"])


def test_series_file_checks_order_and_variable():
    with pytest.raises(ValidationError):
        SeriesFile(model="phiH", order=3, coeffs=["1", "2"])
    with pytest.raises(ValidationError):
        SeriesFile(model="phiH", order=1, coeffs=["1"], var="q")


def test_operator_file_round_trip():
    L = DiffOperator((Polynomial.parse("-4"), Polynomial.parse("1-4*w")))
    record = OperatorFile.from_operator(L)
    assert record.order == 1
    assert record.to_operator() == L


def test_operator_file_order_must_match():
    with pytest.raises(ValidationError):
        OperatorFile(order=2, coeffs=[PolynomialModel(coeffs=["1"])])


def test_field_model_types():
    assert FieldModel().to_field().prime is None
    assert FieldModel(type="prime", p="7").to_field().prime == 7
    with pytest.raises(ValidationError):
        FieldModel(type="complex")


def test_factored_polynomial_model():
    factored = factor_poly(Polynomial.parse("(1-w)**2*(1+2*w)"))
    model = FactoredPolynomialModel.from_factored(factored)
    assert model.to_factored().expand() == factored.expand()
    with pytest.raises(ValidationError):
        FactoredPolynomialModel(factors=[(PolynomialModel(coeffs=["1", "1"]), 0)])


def test_singularity_entries_from_models():
    entry = SingularityEntry(Polynomial.parse("1-4*w"), 1, frozenset({"head"}))
    models = [SingularityEntryModel.from_entry(entry), SingularityEntryModel.from_entry(entry)]
    result = singularity_set_from_models(models)
    assert len(result) == 1
    assert result.entries[0].tags == frozenset({"head"})


def test_point_record_reads_tags():
    point = ComplexPoint(0.5, -1.0).with_tags(n=7, family="crescent", k=2)
    record = PointRecord.from_point(point)
    assert (record.n, record.k, record.p1) == (7, 2, None)
    assert record.family == "crescent"


def test_dumps_is_deterministic():
    text = dumps({"b": 1, "a": [1, 2]})
    assert text == dumps({"a": [1, 2], "b": 1})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')


def test_write_atomic_then_read_model(tmp_path):
    path = tmp_path / "out" / "series.json"
    write_atomic(str(path), dumps(SeriesFile.from_series(phiH_series(2, 6)).model_dump()))
    assert read_model(str(path), SeriesFile).order == 6
    assert [p.name for p in path.parent.iterdir()] == ["series.json"]


def test_read_model_errors_are_bad_input(tmp_path):
    with pytest.raises(InvalidInputError):
        read_model(str(tmp_path / "missing.json"), SeriesFile)
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(InvalidInputError):
        read_model(str(broken), SeriesFile)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"model": "phiH", "order": 2, "coeffs": ["1"]}))
    with pytest.raises(InvalidInputError) as exc:
        read_model(str(wrong), SeriesFile)
    assert exc.value.details["errors"]
