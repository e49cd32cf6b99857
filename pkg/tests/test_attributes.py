import pytest

import lrpossib


@pytest.mark.parametrize("attribute", ["__version__"])
def test_attribute(attribute):
    assert getattr(lrpossib, attribute)


def test_main():
    import lrpossib.__main__

    assert lrpossib.__main__.main
