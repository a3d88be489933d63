from __future__ import annotations

import csv
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlab.cli import main
from hyperlab.errors import PreconditionError
from hyperlab.suites import ExperimentSpec, SUITES, rows_to_csv


def write_spec(tmp_path, data, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def read_rows(prefix):
    with open(f"{prefix}.csv") as fh:
        return list(csv.DictReader(fh))


def test_eig_command(capsys):
    assert main(["eig", "--family", "product", "--m", "3", "--x", "1,2,3"]) == 0
    assert json.loads(capsys.readouterr().out) == [3.0, 2.0, 1.0]


def test_eig_usage_errors(capsys):
    assert main(["eig", "--family", "product", "--m", "3", "--x", "1,2"]) == 2
    assert main(["eig", "--family", "product", "--m", "3", "--x", "a,b,c"]) == 2
    assert main(["frobnicate"]) == 2


def test_run_eig_suite(tmp_path):
    spec = {"suite": "eig", "seed": 1, "family": {"type": "product", "m": 3}, "vectors": {"explicit": [[1, 2, 3]]}}
    prefix = str(tmp_path / "eig")
    assert main(["run", write_spec(tmp_path, spec), "--out", prefix]) == 0
    summary = json.load(open(f"{prefix}.json"))
    assert summary["schema"] == 1 and summary["results"]["spectra"] == [[3.0, 2.0, 1.0]]
    assert read_rows(prefix)[0]["values"] == "3.0 2.0 1.0"


def test_run_mixed_suite(tmp_path):
    spec = {"suite": "mixed", "seed": 1, "family": {"type": "product", "m": 3}, "vectors": {"explicit": [[1, 0, 0]]}}
    prefix = str(tmp_path / "mixed")
    assert main(["run", write_spec(tmp_path, spec), "--out", prefix]) == 0
    assert float(read_rows(prefix)[0]["lambda_max_mixed"]) == pytest.approx(1.0)


def test_chernoff_suite_bit_identical(tmp_path):
    spec = {"suite": "chernoff", "seed": 7, "family": {"type": "product", "m": 4},
            "vectors": {"generator": "unit_norm", "n": 12}}
    path = write_spec(tmp_path, spec)
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", path, "--out", a]) == 0
    assert main(["run", path, "--out", b, "--threads", "8"]) == 0
    assert open(f"{a}.csv").read() == open(f"{b}.csv").read()
    assert len(read_rows(a)) == 50


def test_invalid_specs_exit_2(tmp_path):
    base = {"suite": "eig", "seed": 1, "family": {"type": "product", "m": 3}, "vectors": {"explicit": [[1, 2, 3]]}}
    bad = [
        {k: v for k, v in base.items() if k != "seed"},
        {**base, "suite": "nope"},
        {**base, "family": {"type": "mystery"}},
        {**base, "vectors": {"generator": "gaussian", "n": 0}},
        {**base, "suite": "kadison_singer"},
        {**base, "extra": 1},
    ]
    for i, data in enumerate(bad):
        assert main(["run", write_spec(tmp_path, data, f"s{i}.json"), "--out", str(tmp_path / f"o{i}")]) == 2
    (tmp_path / "broken.json").write_text("{not json")
    assert main(["run", str(tmp_path / "broken.json")]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_numerical_failure_exit_1(tmp_path):
    quartic = {"type": "dense", "m": 3, "d": 4, "e": [0, 0, 1],
               "terms": [{"exp": [0, 0, 4], "coef": 1}, {"exp": [4, 0, 0], "coef": -1}, {"exp": [0, 4, 0], "coef": -1}]}
    spec = {"suite": "eig", "seed": 1, "family": quartic, "vectors": {"explicit": [[1.0, 0.3, 0.0]]}}
    assert main(["run", write_spec(tmp_path, spec), "--out", str(tmp_path / "q")]) == 1


family_st = st.sampled_from([{"type": "product", "m": 3}, {"type": "det_symmetric", "d": 2}, {"type": "lorentz", "m": 4}])
vectors_st = st.one_of(
    st.builds(lambda n: {"generator": "gaussian", "n": n}, st.integers(1, 30)),
    st.builds(lambda n, R: {"generator": "cone_uniform", "n": n, "R": R}, st.integers(1, 30), st.floats(0.1, 5)),
)
params_st = st.fixed_dictionaries({"k": st.integers(2, 4), "tau": st.floats(0.01, 1), "delta": st.floats(0.01, 2),
                                   "trials": st.integers(100, 10**6)})


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([s for s in SUITES if s != "verify_all"]), st.integers(0, 2**64 - 1), family_st, vectors_st, params_st)
def test_spec_roundtrip(suite, seed, family, vectors, params):
    spec = ExperimentSpec(suite, seed, family, vectors, params, "out/run")
    assert ExperimentSpec.from_json(spec.to_json()) == spec


def test_spec_rejects_bad_seed():
    with pytest.raises(PreconditionError):
        ExperimentSpec("verify_all", -1)
    with pytest.raises(PreconditionError):
        ExperimentSpec("verify_all", 2**64)


def test_csv_columns_are_a_deterministic_union():
    text = rows_to_csv([{"suite": "x", "verdict": "pass"}, {"suite": "x", "bound": 1.5}])
    assert text.splitlines() == ["suite,bound,verdict", "x,,pass", "x,1.5,"]
