import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from walshscape import ARCHETYPES, CategoricalSeries, Dataset


def truth_labels(dataset) -> np.ndarray:
    """Planted archetype of every series as an integer in 1..3."""
    index = {arch: i + 1 for i, arch in enumerate(ARCHETYPES)}
    return np.array([index[s.attributes["truth"]] for s in dataset.series], dtype=np.int64)


def label_agreement(truth: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of points matched under the best cluster-to-truth relabeling."""
    k = int(max(truth.max(), labels.max()))
    confusion = np.zeros((k, k), dtype=np.int64)
    for t, l in zip(truth, labels):
        confusion[t - 1, l - 1] += 1
    rows, cols = linear_sum_assignment(-confusion)
    return confusion[rows, cols].sum() / len(truth)


def toy_dataset(values_rows, weights=None, attrs=None, J=None) -> Dataset:
    """Small dataset from a list of level rows."""
    series = []
    for i, row in enumerate(values_rows):
        series.append(
            CategoricalSeries(
                id=f"s{i}",
                values=np.asarray(row, dtype=np.int64),
                weight=1.0 if weights is None else weights[i],
                attributes={} if attrs is None else dict(attrs[i]),
            )
        )
    return Dataset.from_series(series, J=J)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
