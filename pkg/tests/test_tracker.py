from capfin.solver.tracker import NullTracker, SolverTracker


class _Writer:
    def __init__(self):
        self.scalars = []

    def add_scalar(self, tag, value, step):
        self.scalars.append((tag, value, step))


def test_tracker_writes_log_and_scalars(tmp_path, capsys):
    writer = _Writer()
    log = tmp_path / "logs" / "run.log"
    tracker = SolverTracker(writer=writer, log_file=str(log))
    tracker.step = 2
    tracker.log_metrics({"estimate": 0.5, "clusters": 3, "flag": True, "name": "x"}, split="capacity")
    tracker.done("capacity", "finished")

    text = log.read_text()
    assert "[capacity] step 2: estimate: 0.500000, clusters: 3" in text
    assert "[capacity] finished" in text
    assert writer.scalars == [("capacity/estimate", 0.5, 2), ("capacity/clusters", 3, 2)]
    assert "[capacity] finished" in capsys.readouterr().err


def test_quiet_tracker_is_silent(capsys):
    tracker = NullTracker()
    tracker.print("hidden")
    tracker.log_metrics({"estimate": 0.25}, split="capacity")
    assert capsys.readouterr().err == ""
    assert tracker.writer is None and tracker.log_file is None
