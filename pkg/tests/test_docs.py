import doctest

import wsncodes


def test_package_docstring_examples():
    failures, _ = doctest.testmod(wsncodes)
    assert failures == 0
