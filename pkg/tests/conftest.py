import numpy as np
import pytest

from iconsynth.dataset import synth_corpus
from iconsynth.geometry import Icon, SvgPath


@pytest.fixture(scope="session")
def small_corpus():
    return synth_corpus(64, np.random.default_rng(1234))


def random_quantized_icon(rng: np.random.Generator) -> Icon:
    """Arbitrary grammatically-valid quantized icon (not necessarily a
    sensible drawing)."""
    from iconsynth.geometry import Command, Point

    paths = []
    for _ in range(int(rng.integers(1, 4))):
        cmds = []
        n_cmds = int(rng.integers(1, 6))
        for j in range(n_cmds):
            kind = "M" if j == 0 else ("M", "L", "C")[int(rng.integers(3))]
            arity = 3 if kind == "C" else 1
            pts = tuple(
                Point(int(rng.integers(100)), int(rng.integers(100))) for _ in range(arity)
            )
            cmds.append(Command(kind, pts))
        paths.append(SvgPath(tuple(cmds)))
    return Icon(tuple(paths))
