import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entangle_boundary import io
from entangle_boundary.boundary import boundary_state_from_sigma
from entangle_boundary.cli import main
from entangle_boundary.errors import StateFileError
from entangle_boundary.states import bell_diagonal, concurrence_signed, random_density


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    assert main(["gen", "--seed", "42", "--count", "10", "--out", str(out)]) == 0
    return out


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_state_round_trip_bit_exact(tmp_path_factory, seed):
    rho = random_density(np.random.default_rng(seed))
    path = tmp_path_factory.mktemp("rt") / "s.json"
    io.save_state(path, rho, {"label": "x", "seed": seed})
    back, meta = io.load_state(path)
    assert np.array_equal(back, rho)
    assert meta == {"label": "x", "seed": seed}


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return path


def test_load_rejections(tmp_path):
    good = io.state_to_dict(np.eye(4) / 4)
    bad_trace = json.loads(json.dumps(good))
    bad_trace["matrix"][0][0][0] += 0.01
    bad_herm = json.loads(json.dumps(good))
    bad_herm["matrix"][0][1] = [0.1, 0.0]
    bad_shape = dict(good, matrix=good["matrix"][:3])
    bad_version = dict(good, format_version="0.1")
    for doc in (bad_trace, bad_herm, bad_shape, bad_version, {"no": "matrix"}):
        with pytest.raises(StateFileError):
            io.load_state(_write(tmp_path / "b.json", doc))
    (tmp_path / "junk.json").write_text("{not json")
    with pytest.raises(StateFileError):
        io.load_state(tmp_path / "junk.json")


def test_gen_outputs(generated, tmp_path):
    manifest, paths = io.load_manifest(generated / "manifest.json")
    assert manifest["seed"] == 42 and len(paths) == 10
    for p in paths:
        rho, meta = io.load_state(p)
        assert abs(concurrence_signed(rho)) <= 1e-9
        assert meta["seed"] == 42
    again = tmp_path / "again"
    assert main(["gen", "--seed", "42", "--count", "10", "--out", str(again)]) == 0
    assert (again / "manifest.json").read_bytes() == (generated / "manifest.json").read_bytes()


def test_gen_unit_condition_is_bell_diagonal_up_to_local_unitary(tmp_path):
    assert main(["gen", "--seed", "5", "--count", "3", "--max-condition", "1", "--out", str(tmp_path)]) == 0
    _, paths = io.load_manifest(tmp_path / "manifest.json")
    for p in paths:
        bs = boundary_state_from_sigma(io.load_state(p)[0])
        np.testing.assert_allclose(bs.gram.Q, np.eye(4), atol=1e-10)


def test_gen_limit_flag(tmp_path):
    assert main(["gen", "--seed", "1", "--count", "2", "--limit", "1e-5", "--out", str(tmp_path)]) == 0
    manifest, paths = io.load_manifest(tmp_path / "manifest.json")
    assert manifest["limit"] == 1e-5
    for entry, p in zip(manifest["states"], paths):
        assert min(entry["p"]) == 0.0
        rho, _ = io.load_state(p)
        assert abs(concurrence_signed(rho)) <= 1e-9


def test_gen_usage_errors(tmp_path):
    assert main(["gen", "--max-condition", "0.5", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as info:
        main(["gen", "--count", "0", "--out", str(tmp_path)])
    assert info.value.code == 2


def test_verify_manifest(generated, tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", str(generated / "manifest.json"), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["summary"]["passed"] == 10
    for rec in rep["records"]:
        assert rec["w_rank"] == 12
        assert rec["seed"] == 0 and rec["tol"] == 1e-8
        assert max(rec["residuals"]) <= 1e-8


def test_verify_rejects_corrupted(generated, tmp_path):
    doc = json.loads((generated / "state_0000.json").read_text())
    doc["matrix"][0][0][0] += 0.01  # trace 1.01
    bad = _write(tmp_path / "bad.json", doc)
    assert main(["verify", str(bad), "--out", str(tmp_path / "r.json")]) == 2


def test_verify_fails_on_tight_tolerance(generated, tmp_path):
    code = main(["verify", str(generated / "state_0001.json"), "--tol", "1e-30", "--out", str(tmp_path / "r.json")])
    assert code == 1


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_ray_bell_diagonal(tmp_path):
    state = tmp_path / "bd.json"
    io.save_state(state, bell_diagonal([0.5, 0.25, 0.15, 0.1]))
    out = tmp_path / "ray.csv"
    assert main(["ray", str(state), "--x", "0", "0.5", "1", "1.5", "--out", str(out)]) == 0
    assert out.read_bytes().count(b"\r") == 0
    rows = _read_csv(out)
    assert list(rows[0]) == ["x", "s_exact", "c_signed", "min_eig", "residual_max"]
    assert float(rows[0]["s_exact"]) == pytest.approx(0.0, abs=1e-15)
    assert float(rows[2]["c_signed"]) == pytest.approx(1.0, abs=1e-6)
    assert float(rows[2]["s_exact"]) == pytest.approx(math.log(2), abs=1e-9)
    assert math.isnan(float(rows[3]["s_exact"])) and float(rows[3]["min_eig"]) < 0


def test_ray_fraction_sweep_monotone(generated, tmp_path):
    out = tmp_path / "sweep.csv"
    fracs = [str(f) for f in np.linspace(0, 0.9, 50)]
    assert main(["ray", str(generated / "state_0002.json"), "--x-fraction", *fracs, "--out", str(out)]) == 0
    s = np.array([float(r["s_exact"]) for r in _read_csv(out)])
    assert np.all(np.diff(s) > 0)
    assert max(float(r["residual_max"]) for r in _read_csv(out)) <= 1e-8


def test_ray_rejects_entangled_input(tmp_path):
    state = tmp_path / "e.json"
    io.save_state(state, bell_diagonal([0.8, 0.1, 0.05, 0.05]))
    assert main(["ray", str(state), "--x", "0.1", "--out", str(tmp_path / "o.csv")]) == 1


def test_ree_werner_and_bits(tmp_path):
    state = tmp_path / "w.json"
    io.save_state(state, bell_diagonal([0.75, 0.25 / 3, 0.25 / 3, 0.25 / 3]))
    out = tmp_path / "ree.json"
    assert main(["ree", str(state), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["e_r"] == pytest.approx(0.130812, abs=1e-4)
    assert rep["units"] == "nats"
    sigma, _ = io.state_from_dict(rep["sigma_star"])
    np.testing.assert_allclose(sigma, bell_diagonal([0.5, 1 / 6, 1 / 6, 1 / 6]), atol=1e-4)
    assert main(["ree", str(state), "--bits", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["e_r"] == pytest.approx(0.130812 / math.log(2), abs=1e-4)


def test_ree_separable_and_strict(tmp_path):
    state = tmp_path / "s.json"
    io.save_state(state, bell_diagonal([0.4, 0.3, 0.2, 0.1]))
    out = tmp_path / "r.json"
    assert main(["ree", str(state), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["e_r"] <= 1e-6
    ent = tmp_path / "e.json"
    io.save_state(ent, bell_diagonal([0.9, 0.05, 0.03, 0.02]))
    assert main(["ree", str(ent), "--max-iter", "1", "--gap", "1e-14", "--out", str(out)]) == 0
    assert main(["ree", str(ent), "--max-iter", "1", "--gap", "1e-14", "--strict", "--out", str(out)]) == 1


def test_ree_matches_ray(generated, tmp_path):
    bs = boundary_state_from_sigma(io.load_state(generated / "state_0003.json")[0])
    pt = bs.ray(0.5 * bs.x_max)
    state = tmp_path / "rho.json"
    io.save_state(state, pt.rho)
    out = tmp_path / "r.json"
    assert main(["ree", str(state), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["e_r"] == pytest.approx(pt.s_exact, abs=1e-4)


def test_validate_deterministic_and_jobs_independent(generated, tmp_path):
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    m = str(generated / "manifest.json")
    assert main(["validate", m, "--seed", "7", "--out", str(a)]) == 0
    assert main(["validate", m, "--seed", "7", "--out", str(b)]) == 0
    assert main(["validate", m, "--seed", "7", "--jobs", "2", "--out", str(c)]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["summary"]["pass_rate"] == 1.0


def test_validate_small_fraction_quadratic_column(generated, tmp_path):
    out = tmp_path / "q.json"
    gap = 1e-6
    assert main(["validate", str(generated / "manifest.json"), "--x-fraction", "1e-3", "--out", str(out)]) == 0
    for rec in json.loads(out.read_text())["records"]:
        assert rec["quadratic_law_error"] <= 1e-6 + gap


def test_validate_usage(generated, tmp_path):
    assert main(["validate", str(generated / "manifest.json"), "--x-fraction", "2", "--out", str(tmp_path / "x")]) == 2
    assert main(["validate", str(generated / "state_0000.json"), "--out", str(tmp_path / "x")]) == 2


def test_jobs_env_default(monkeypatch):
    from entangle_boundary.cli import _default_jobs

    monkeypatch.setenv("ENTANGLE_BOUNDARY_JOBS", "3")
    assert _default_jobs() == 3
    monkeypatch.setenv("ENTANGLE_BOUNDARY_JOBS", "nope")
    assert _default_jobs() == 1
