import numpy as np
import pytest

from walshscape import (
    ARCHETYPES,
    CategoricalSeries,
    Dataset,
    DatasetError,
    archetype_template,
    generate_synthetic,
    load_dataset,
    make_shard_plan,
    save_dataset,
)

from conftest import toy_dataset


class TestDatasetValidation:
    def test_levels_must_fit_j(self):
        with pytest.raises(DatasetError, match="level out of range at row 2"):
            toy_dataset([[0, 1, 2], [0, 3, 1]], J=3)

    def test_lengths_must_agree(self):
        with pytest.raises(DatasetError, match="inconsistent series length at row 2"):
            toy_dataset([[0, 1, 2], [0, 1]])

    def test_negative_weight_rejected(self):
        with pytest.raises(DatasetError, match="negative weight"):
            CategoricalSeries(id="x", values=np.array([0, 1]), weight=-1.0)

    def test_j_inferred_from_levels(self):
        assert toy_dataset([[0, 1, 2]]).J == 3
        assert toy_dataset([[0, 0, 0]]).J == 2  # J is at least 2

    def test_values_matrix_order(self):
        ds = toy_dataset([[0, 1], [2, 0]])
        assert np.array_equal(ds.values_matrix(), [[0, 1], [2, 0]])


class TestRoundTrips:
    @pytest.fixture
    def dataset(self):
        return toy_dataset(
            [[0, 1, 2, 0], [2, 2, 1, 0], [1, 0, 0, 1]],
            weights=[0.1, 2.5, 1.0],
            attrs=[
                {"wave": "1995", "gender": "f"},
                {"wave": "2017"},
                {"gender": "m", "income": "25k-55k"},
            ],
        )

    @pytest.mark.parametrize("fmt", ["csv", "binary"])
    def test_exact_round_trip(self, dataset, fmt, tmp_path):
        path = tmp_path / f"data.{fmt}"
        save_dataset(dataset, path, format=fmt)
        back = load_dataset(path, format=fmt)
        assert back.T == dataset.T and back.J == dataset.J and back.N == dataset.N
        for a, b in zip(dataset.series, back.series):
            assert a.id == b.id
            assert np.array_equal(a.values, b.values)
            assert a.weight == b.weight
            assert a.attributes == b.attributes

    def test_csv_level_out_of_range_reports_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,J,t0,t1\np1,3,0,1\np2,3,0,3\n")
        with pytest.raises(DatasetError, match="level out of range at row 2"):
            load_dataset(path)

    def test_csv_malformed_row_reports_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,t0,t1\np1,0,1\np2,0\n")
        with pytest.raises(DatasetError, match="malformed row 2"):
            load_dataset(path)

    def test_csv_negative_weight_reports_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,w,t0\np1,1.0,0\np2,-2.0,1\n")
        with pytest.raises(DatasetError, match="negative weight at row 2"):
            load_dataset(path)

    def test_csv_weight_defaults_to_one(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("id,t0,t1,t2\np1,0,0,1\n")
        ds = load_dataset(path)
        assert ds.series[0].weight == 1.0
        assert np.array_equal(ds.series[0].values, [0, 0, 1])

    def test_binary_rejects_garbage(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"not a dataset")
        with pytest.raises(DatasetError, match="magic"):
            load_dataset(path, format="binary")


class TestSyntheticGeneration:
    def test_workday_template_at_length_eight(self):
        assert list(archetype_template("C3", 8)) == [0, 0, 1, 2, 2, 2, 1, 0]

    def test_zero_noise_returns_templates(self):
        ds = generate_synthetic(1, 8, noise=0.0, seed=42)
        for s in ds.series:
            assert np.array_equal(s.values, archetype_template(s.attributes["truth"], 8))

    def test_home_archetype_mostly_home(self):
        tpl = archetype_template("C1", 1440)
        assert (tpl == 0).mean() > 0.7
        assert (tpl[700:960] == 2).any()  # the afternoon excursion

    def test_night_archetype_out_through_final_minute(self):
        tpl = archetype_template("C2", 1440)
        assert tpl[-1] == 2 and (tpl[720:] == 2).all()

    def test_truth_matches_nearest_template(self):
        ds = generate_synthetic(5, 64, noise=0.0, seed=1)
        templates = {arch: archetype_template(arch, 64) for arch in ARCHETYPES}
        for s in ds.series:
            nearest = min(templates, key=lambda a: int((s.values != templates[a]).sum()))
            assert nearest == s.attributes["truth"]

    def test_flip_noise_concentrates_around_templates(self):
        # per-(minute, level) proportions stay near the template indicator;
        # the 5-sigma radius accounts for the max over 1440*3*3 binomial cells
        n, t, noise = 1000, 1440, 0.05
        ds = generate_synthetic(n, t, noise=noise, seed=7)
        values = ds.values_matrix()
        bound = noise + 5 * np.sqrt(noise / n)
        flip_rates = []
        off_level_rates = []
        for ai, arch in enumerate(ARCHETYPES):
            block = values[ai * n : (ai + 1) * n]
            template = archetype_template(arch, t)
            for level in range(3):
                proportions = (block == level).mean(axis=0)
                deviation = np.abs(proportions - (template == level))
                assert deviation.max() <= bound
            flips = block != template
            flip_rates.append(flips.mean())
            # flipped minutes split evenly between the two other levels
            other = (block + 3 - template) % 3
            off_level_rates.append((other == 1).mean())
        assert np.allclose(flip_rates, noise, atol=0.002)
        assert np.allclose(off_level_rates, noise / 2, atol=0.002)

    def test_deterministic_given_seed(self):
        a = generate_synthetic(10, 32, 0.1, seed=5)
        b = generate_synthetic(10, 32, 0.1, seed=5)
        assert np.array_equal(a.values_matrix(), b.values_matrix())

    def test_preconditions(self):
        with pytest.raises(ValueError):
            generate_synthetic(0, 8, 0.0, 1)
        with pytest.raises(ValueError):
            generate_synthetic(1, 1, 0.0, 1)
        with pytest.raises(ValueError):
            generate_synthetic(1, 8, 0.5, 1)


class TestShardPlan:
    def test_survey_scale_arithmetic(self):
        plan = make_shard_plan(250882, 100, seed=0)
        assert plan.shard_sizes == tuple([2508] * 99 + [2590])
        assert sum(plan.shard_sizes) == 250882

    def test_single_shard(self):
        plan = make_shard_plan(10, 1, seed=3)
        assert plan.shard_sizes == (10,)
        assert sorted(plan.order) == list(range(10))

    def test_remainder_goes_to_last_shard(self):
        assert make_shard_plan(7, 3, seed=0).shard_sizes == (2, 2, 3)

    def test_deterministic_and_seed_sensitive(self):
        a = make_shard_plan(50, 4, seed=9)
        b = make_shard_plan(50, 4, seed=9)
        c = make_shard_plan(50, 4, seed=10)
        assert np.array_equal(a.order, b.order)
        assert not np.array_equal(a.order, c.order)

    def test_order_is_a_permutation(self):
        plan = make_shard_plan(123, 7, seed=1)
        assert sorted(plan.order) == list(range(123))

    def test_restore_inverts_shard_concatenation(self, rng):
        plan = make_shard_plan(40, 6, seed=2)
        original = rng.normal(size=40)
        concatenated = np.concatenate(
            [original[plan.shard_indices(s)] for s in range(plan.S)]
        )
        assert np.array_equal(plan.restore(concatenated), original)

    def test_shard_of_agrees_with_indices(self):
        plan = make_shard_plan(23, 4, seed=8)
        shard_of = plan.shard_of
        for s in range(plan.S):
            assert (shard_of[plan.shard_indices(s)] == s).all()

    def test_rejects_bad_shard_count(self):
        with pytest.raises(ValueError):
            make_shard_plan(5, 6, seed=0)
        with pytest.raises(ValueError):
            make_shard_plan(5, 0, seed=0)
