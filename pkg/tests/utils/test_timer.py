import time

from loguru import logger

from lipres.utils.timer import Timer, timing


class Tester:
    """TestCase for Timer."""

    tz_info = "Asia/Hong_Kong"

    @timing
    def _method_with_delay(self, name: str, pause: float) -> float:
        """Delay for pause, return pause."""
        time.sleep(pause)
        return pause

    def test_timing(self) -> None:
        """Test timing decorator logs the wrapped name."""
        messages: list = []
        sink = logger.add(messages.append, level="DEBUG")
        try:
            assert self._method_with_delay("fit", pause=0.05) == 0.05
        finally:
            logger.remove(sink)
        assert any("_method_with_delay" in str(m) for m in messages)
        assert self._method_with_delay.__name__ == "_method_with_delay"

    def test_to_str(self) -> None:
        """Test timestamp formatting in the configured zone."""
        timer = Timer(tz_info=self.tz_info)
        now = timer.to_now()
        assert now.utcoffset().total_seconds() == 8 * 3600
        text = timer.to_str(now)
        assert text.endswith("+08:00")
        assert timer.to_str(now, fmt="YYYY") == str(now.year)

    def test_stages(self) -> None:
        """Test elapsed time and stage accumulation."""
        timer = Timer()
        timer.add_stage("fit", 1.5)
        timer.add_stage("fit", 0.5)
        timer.add_stage("train", 2.0)
        assert timer.stages == {"fit": 2.0, "train": 2.0}
        stages = timer.stages
        stages["fit"] = 0.0
        assert timer.stages["fit"] == 2.0
        time.sleep(0.01)
        assert timer.elapsed() > 0.0
