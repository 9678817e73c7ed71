"""Tests for the pydantic config base."""

import pytest
from pydantic import Field

from ebus3d.core.config import ConfigModel, IntPair, build_config
from ebus3d.core.errors import ConfigError


class Section(ConfigModel):
    size: IntPair = (4, 3)
    rate: float = Field(0.5, gt=0.0)
    name: str = "x"


@pytest.mark.unit
class TestBuildConfig:
    """Validation failures become ConfigError with line and key."""

    def test_defaults(self):
        section = build_config(Section, {})
        assert section.size == (4, 3)
        assert section.items() == {"size": (4, 3), "rate": 0.5, "name": "x"}

    def test_pair_from_text(self):
        assert build_config(Section, {"size": "704, 576"}).size == (704, 576)
        assert build_config(Section, {"size": "8 6"}).size == (8, 6)

    def test_invalid_value_names_line(self):
        with pytest.raises(ConfigError) as info:
            build_config(Section, {"rate": "-1"}, lines={"rate": 7}, prefix="synth.")
        assert info.value.line == 7
        assert info.value.key == "synth.rate"
        assert "line 7" in str(info.value)

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            build_config(Section, {"colour": "red"}, lines={"colour": 2})
        assert info.value.key == "colour"
        assert info.value.line == 2

    def test_frozen(self):
        section = build_config(Section, {})
        with pytest.raises(Exception):
            section.rate = 1.0

    def test_pair_arity(self):
        with pytest.raises(ConfigError):
            build_config(Section, {"size": "1 2 3"})
