import json
import math
from unittest.mock import patch

import pytest

from lrpossib import types, utils


@pytest.mark.parametrize(
    "value, expected",
    [(2.0, "2.0"), (0.5, "0.5"), (math.inf, "null"), (-math.inf, "null"), (math.nan, "null")],
)
def test_format_float(value, expected):
    assert utils.format_float(value) == expected


def test_format_float_round_trips():
    for value in (0.1, 1 / 3, 0.96 ** 4, 1e-64):
        assert float(utils.format_float(value)) == value


def test_setup_logging_rejects_unknown_levels():
    with pytest.raises(ValueError):
        utils.setup_logging("verbose")


def test_init_sentry():
    with patch("lrpossib.config.SENTRY_DSN", None):
        assert not utils.init_sentry()
    with patch("lrpossib.config.SENTRY_DSN", "https://key@sentry.invalid/1"), patch(
        "lrpossib.utils.sentry_sdk.init"
    ) as mock_init:
        assert utils.init_sentry()
    mock_init.assert_called_once_with("https://key@sentry.invalid/1")


def test_to_json_keeps_field_order():
    report = types.UpperLowerReport(upper=1.0, lower=0.0, uniform_posterior=1 / 3)
    text = utils.to_json(report)
    assert list(json.loads(text)) == ["upper", "lower", "uniform_posterior"]
    assert json.loads(text)["uniform_posterior"] == 1 / 3


def test_to_json_writes_null_for_infinities():
    text = utils.to_json({"log_nu": -math.inf, "values": [1, 2.5], "nested": [{"a": True}]})
    assert json.loads(text) == {"log_nu": None, "values": [1, 2.5], "nested": [{"a": True}]}


def test_to_csv():
    text = utils.to_csv(["a", "b"], [[1, 0.5], ["x", math.inf]])
    assert text == "a,b\n1,0.5\nx,null\n"
