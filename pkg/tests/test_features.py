import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liketraits.core import Big5Scores, CategoryPath, Dataset, FeatureSpace, UserRecord
from liketraits.errors import EmptyDatasetError, UnknownCategoryError, ZeroTotalError
from liketraits.features import (
    MODE_ABSOLUTE,
    TAXONOMY_CATEGORY_ONLY,
    TAXONOMY_SUBCATEGORY_ONLY,
    apply_taxonomy,
    build_feature_space,
    build_matrix,
    drop_unknown,
    filter_min_likes,
    normalize_counts,
    remap_counts,
)

MID = Big5Scores(3.0, 3.0, 3.0, 3.0, 3.0)


def _user(uid, counts):
    return UserRecord(uid, MID, counts)


class TestBuildFeatureSpace:
    def test_lexicographic(self):
        ds = Dataset((
            _user("u1", {CategoryPath("Sports"): 1}),
            _user("u2", {CategoryPath("Politics"): 1}),
        ))
        space = build_feature_space(ds)
        assert [p.category for p in space.paths] == ["Politics", "Sports"]

    def test_single_category(self):
        ds = Dataset((_user("u1", {CategoryPath("A"): 3}),))
        assert build_feature_space(ds).dimension == 1

    def test_shared_categories_not_duplicated(self):
        counts = {CategoryPath("A"): 1, CategoryPath("B"): 2}
        ds = Dataset((_user("u1", counts), _user("u2", dict(counts))))
        assert build_feature_space(ds).dimension == 2

    def test_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            build_feature_space(Dataset(()))


class TestFilterMinLikes:
    def _dataset(self, totals):
        return Dataset(tuple(
            _user(f"u{i}", {CategoryPath("A"): t} if t else {})
            for i, t in enumerate(totals)
        ))

    def test_direct_comparison(self):
        kept = filter_min_likes(self._dataset([10, 100, 300]), 250)
        assert len(kept) == 1

    def test_zero_threshold_keeps_all(self):
        assert len(filter_min_likes(self._dataset([0, 1, 2]), 0)) == 3

    def test_monotone_in_threshold(self):
        ds = self._dataset([0, 5, 10, 50, 100])
        for t1, t2 in [(0, 5), (5, 50), (10, 200)]:
            at_t1 = {u.user_id for u in filter_min_likes(ds, t1)}
            at_t2 = {u.user_id for u in filter_min_likes(ds, t2)}
            assert at_t2 <= at_t1

    def test_original_unmodified(self):
        ds = self._dataset([1, 2])
        filter_min_likes(ds, 2)
        assert len(ds) == 2

    def test_negative_threshold(self):
        with pytest.raises(ValueError):
            filter_min_likes(self._dataset([1]), -1)


class TestNormalizeCounts:
    def test_politics_sports_proportions(self):
        # 30 politics likes next to 300 sports likes -> ~9.1% politics
        space = FeatureSpace.from_categories([CategoryPath("Politics"), CategoryPath("Sports")])
        vec = normalize_counts({CategoryPath("Politics"): 30, CategoryPath("Sports"): 300}, space)
        np.testing.assert_allclose(vec, [30 / 330, 300 / 330], rtol=0, atol=0)
        assert abs(vec[0] - 0.090909) < 1e-6
        assert abs(vec[1] - 0.909091) < 1e-6

    def test_single_category(self):
        space = FeatureSpace.from_categories([CategoryPath("A")])
        vec = normalize_counts({CategoryPath("A"): 7}, space)
        assert vec.tolist() == [1.0]

    def test_hand_arithmetic(self):
        space = FeatureSpace.from_categories([CategoryPath(c) for c in "ABC"])
        vec = normalize_counts(
            {CategoryPath("A"): 1, CategoryPath("B"): 1, CategoryPath("C"): 2}, space
        )
        assert vec.tolist() == [0.25, 0.25, 0.5]

    def test_zero_total(self):
        space = FeatureSpace.from_categories([CategoryPath("A")])
        with pytest.raises(ZeroTotalError):
            normalize_counts({}, space)

    def test_unknown_category(self):
        space = FeatureSpace.from_categories([CategoryPath("A")])
        with pytest.raises(UnknownCategoryError):
            normalize_counts({CategoryPath("Z"): 1}, space)

    def test_drop_unknown_then_renormalize(self):
        space = FeatureSpace.from_categories([CategoryPath("A")])
        counts = drop_unknown({CategoryPath("A"): 1, CategoryPath("Z"): 9}, space)
        assert normalize_counts(counts, space).tolist() == [1.0]

    @given(
        st.dictionaries(
            st.integers(0, 11),
            st.integers(1, 10_000),
            min_size=1,
            max_size=12,
        ),
        st.integers(2, 7),
    )
    @settings(max_examples=150, deadline=None)
    def test_simplex_and_scale_invariance(self, raw, multiplier):
        counts = {CategoryPath(f"c{k:02d}"): v for k, v in raw.items()}
        space = FeatureSpace.from_categories([CategoryPath(f"c{k:02d}") for k in range(12)])
        vec = normalize_counts(counts, space)
        assert np.all(vec >= 0) and np.all(vec <= 1)
        assert abs(vec.sum() - 1.0) <= 1e-9
        scaled = normalize_counts({p: c * multiplier for p, c in counts.items()}, space)
        assert np.array_equal(vec, scaled)  # bit-identical


class TestBuildMatrix:
    def _dataset(self):
        return Dataset((
            _user("u1", {CategoryPath("A"): 2, CategoryPath("B"): 2}),
        ))

    def test_relative_row(self):
        ds = self._dataset()
        matrix = build_matrix(ds, build_feature_space(ds), 1)
        assert matrix.X[0].tolist() == [0.5, 0.5]

    def test_absolute_row(self):
        ds = self._dataset()
        matrix = build_matrix(ds, build_feature_space(ds), 1, MODE_ABSOLUTE)
        assert matrix.X[0].tolist() == [2.0, 2.0]

    def test_filter_precedes_normalize(self):
        ds = self._dataset()
        matrix = build_matrix(ds, build_feature_space(ds), 5)
        assert matrix.n_rows == 0  # no ZeroTotalError

    def test_rows_sorted_by_user_id(self):
        ds = Dataset((
            _user("ub", {CategoryPath("A"): 1}),
            _user("ua", {CategoryPath("A"): 1}),
        ))
        matrix = build_matrix(ds, build_feature_space(ds), 1)
        assert matrix.user_ids == ("ua", "ub")

    def test_mode_agreement(self):
        rng = np.random.default_rng(3)
        users = []
        for i in range(20):
            counts = {
                CategoryPath(f"c{j}"): int(rng.integers(0, 50))
                for j in range(6)
            }
            counts = {p: c for p, c in counts.items() if c > 0}
            if not counts:
                counts = {CategoryPath("c0"): 1}
            users.append(_user(f"u{i:02d}", counts))
        ds = Dataset(tuple(users))
        space = build_feature_space(ds)
        rel = build_matrix(ds, space, 1)
        ab = build_matrix(ds, space, 1, MODE_ABSOLUTE)
        recovered = ab.X / ab.X.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(recovered, rel.X, atol=1e-12, rtol=0)

    def test_matrix_csv_dump(self):
        ds = self._dataset()
        matrix = build_matrix(ds, build_feature_space(ds), 1)
        buf = io.StringIO()
        matrix.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "userid,total_likes,A,B,ope,con,ext,agr,neu"
        assert lines[1].startswith("u1,4,0.5,0.5,")


class TestTaxonomy:
    def test_category_only_merges(self):
        counts = {
            CategoryPath("Sports", "Gym"): 2,
            CategoryPath("Sports", "Pool"): 3,
            CategoryPath("Music"): 1,
        }
        merged = remap_counts(counts, TAXONOMY_CATEGORY_ONLY)
        assert merged == {CategoryPath("Sports"): 5, CategoryPath("Music"): 1}

    def test_subcategory_only_with_fallback(self):
        counts = {CategoryPath("Sports", "Gym"): 2, CategoryPath("Music"): 1}
        remapped = remap_counts(counts, TAXONOMY_SUBCATEGORY_ONLY)
        assert remapped == {CategoryPath("Gym"): 2, CategoryPath("Music"): 1}

    def test_apply_taxonomy_preserves_totals(self, tiny_dataset):
        merged = apply_taxonomy(tiny_dataset, TAXONOMY_CATEGORY_ONLY)
        for before, after in zip(tiny_dataset, merged):
            assert before.total_likes == after.total_likes
