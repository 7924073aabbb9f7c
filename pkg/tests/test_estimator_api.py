import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from wsncodes import (
    CompanderCodec,
    DiscusCodec,
    DPCMCodec,
    FibonacciCodec,
    HaarCodec,
    ModuloCodec,
    TCodeCodec,
)

SCALAR = [CompanderCodec(law="A"), CompanderCodec(), DPCMCodec(frame_length=8),
          FibonacciCodec(), FibonacciCodec(ranking="frequency"), TCodeCodec(), TCodeCodec(ranking="frequency")]
PAIR = [ModuloCodec(n=16), HaarCodec(), DiscusCodec()]


@pytest.mark.parametrize("est", SCALAR + PAIR, ids=lambda e: repr(e))
def test_params_and_clone(est):
    params = est.get_params()
    twin = clone(est)
    assert twin.get_params() == params
    assert twin is not est


@pytest.mark.parametrize("est", SCALAR + PAIR, ids=lambda e: repr(e))
def test_transform_before_fit_raises(est):
    X = [[1, 1]] if est in PAIR else [1]
    with pytest.raises(NotFittedError):
        clone(est).transform(X)


@pytest.mark.parametrize("est", SCALAR, ids=lambda e: repr(e))
def test_scalar_fit_transform_shapes(est):
    X = np.arange(40, 120).reshape(-1, 1)
    coded = clone(est).fit(X).transform(X)
    assert coded.shape == (80, 2)
    assert (coded[:, 1] >= 1).all() and (coded[:, 1] <= 16).all()


@pytest.mark.parametrize("est", PAIR, ids=lambda e: repr(e))
def test_pair_fit_transform_shapes(est):
    X = np.column_stack([np.arange(0, 100), np.arange(0, 100) ^ 1])
    coded = clone(est).fit_transform(X)
    assert coded.shape == (100, 4)
    assert (clone(est).fit(X).inverse_transform(coded) == X).all()


def test_set_params_rebuilds_on_fit():
    codec = CompanderCodec().fit()
    codec.set_params(law="A").fit()
    assert codec.params_.law == "A"


def test_composes_in_pipeline():
    quantize = FunctionTransformer(lambda X: np.clip(np.asarray(X) // 4, 0, 255))
    pipe = make_pipeline(quantize, FibonacciCodec(ranking="frequency"))
    X = np.arange(0, 1024).reshape(-1, 1)
    coded = pipe.fit_transform(X)
    assert coded.shape == (1024, 2)
    assert (pipe[-1].inverse_transform(coded) == (X[:, 0] // 4)).all()
