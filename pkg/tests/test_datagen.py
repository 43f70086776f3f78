import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from costboost import boosters as B
from costboost.core import Dataset
from costboost.datagen import (CounterRNG, DataFormatError, SchemaError, SynthSpec,
                               dataset_csv_text, generate, load_csv, random_dataset, read_csv,
                               save_csv)
from costboost.weaklearn import StumpPool


def test_counter_rng_known_values():
    # SplitMix64 with seed 0: first output of the reference implementation
    assert int(CounterRNG(0).raw(1)[0]) == 0xE220A8397B1DCDAF
    u = CounterRNG(42).uniforms(1000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.05


def test_counter_rng_is_counter_based():
    a = CounterRNG(7)
    first = np.concatenate([a.raw(3), a.raw(2)])
    assert np.array_equal(first, CounterRNG(7).raw(5))


def test_normals_moments():
    z = CounterRNG(3).normals(20_000)
    assert abs(z.mean()) < 0.03 and abs(z.std() - 1) < 0.03


@pytest.mark.parametrize("kind", ["vj_counterexample", "vj_inverted", "gaussian_blobs",
                                  "uniform_random"])
def test_generation_is_deterministic(kind):
    spec = SynthSpec(kind, 12, 9, seed=5)
    a, b = generate(spec), generate(spec)
    assert a.features.tobytes() == b.features.tobytes()
    assert a.labels.tobytes() == b.labels.tobytes()


def test_inverted_is_label_swap():
    base = generate(SynthSpec("vj_counterexample", seed=3))
    inv = generate(SynthSpec("vj_inverted", seed=3))
    assert inv == base.swap_labels()
    assert inv.swap_labels().m == base.m


def test_counterexample_needs_many_rounds():
    ds = generate(SynthSpec("vj_counterexample"))
    errs = StumpPool(ds).errors(np.full(ds.n, 1.0 / ds.n))
    assert errs.min() > 0
    model = B.train(B.TrainConfig("adaboost", 10), ds)
    assert model.trace[-1].train_error > 0


def test_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec("nope")
    with pytest.raises(ValueError):
        SynthSpec("gaussian_blobs", 0, 3)


def test_csv_round_trip(tmp_path):
    ds = random_dataset(25, 3, seed=2)
    costs = np.linspace(0.1, 1.0, ds.n)
    path = tmp_path / "d.csv"
    save_csv(ds, path, costs)
    back, back_costs = read_csv(path)
    assert back == ds
    assert np.array_equal(back_costs, costs)


def test_load_reorders_positives_first(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("f1,label\n0.5,-1\n0.25,1\n0.75,1\n")
    ds = load_csv(path)
    assert ds.labels.tolist() == [1, 1, -1]
    assert ds.permutation.tolist() == [1, 2, 0]


@pytest.mark.parametrize("body,line,err", [
    ("f1,label\n0.5,1\n0.2,0\n", 3, SchemaError),
    ("f1,label\n0.5,1\nabc,-1\n", 3, DataFormatError),
    ("f1,label\n0.5,1\n0.4\n", 3, DataFormatError),
])
def test_bad_rows_name_the_line(tmp_path, body, line, err):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(err) as info:
        load_csv(path)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,1\n")
    with pytest.raises(SchemaError):
        load_csv(path)


def test_large_file_loads_quickly(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.random((10_000, 3))
    y = np.where(rng.random(10_000) < 0.3, 1, -1)
    ds = Dataset.from_unordered(x, y)
    path = tmp_path / "big.csv"
    path.write_text(dataset_csv_text(ds))
    start = time.perf_counter()
    load_csv(path)
    assert time.perf_counter() - start < 1.0


@given(st.integers(0, 2 ** 32), st.integers(2, 40))
def test_random_dataset_valid(seed, n):
    ds = random_dataset(n, 2, seed)
    assert 1 <= ds.m < ds.n and np.isfinite(ds.features).all()
