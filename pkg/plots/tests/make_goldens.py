"""Regenerate the golden images from the synthetic CSVs.

Run from the plots/ directory: python tests/make_goldens.py
Golden bytes are only comparable under the same matplotlib version,
recorded in golden/meta.json.
"""

import json
import sys
import tempfile
from pathlib import Path

import matplotlib

sys.path.insert(0, str(Path(__file__).parent))

from synthetic import write_complexity_csv, write_fl_csv, write_learning_csv, write_sweep_csv

from pinchplots import plot

GOLDEN = Path(__file__).parent / "golden"


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        fl = write_fl_csv(tmp / "fl.csv")
        comp = write_complexity_csv(tmp / "complexity.csv")
        sweep = write_sweep_csv(tmp / "rate_sweep.csv")
        learn_a = write_learning_csv(tmp / "curve_a.csv", offset=0.0)
        learn_b = write_learning_csv(tmp / "curve_b.csv", offset=0.4)
        plot("fl_curves", [str(fl)], str(GOLDEN / "fl_curves.png"))
        plot("complexity_bars", [str(comp)], str(GOLDEN / "complexity_bars.png"))
        plot("rate_heatmap", [str(sweep)], str(GOLDEN / "rate_heatmap.png"))
        plot("learning_curves", [str(learn_a), str(learn_b)], str(GOLDEN / "learning_curves.png"))
    (GOLDEN / "meta.json").write_text(
        json.dumps({"matplotlib": matplotlib.__version__}, indent=2) + "\n"
    )
    print(f"goldens written to {GOLDEN} (matplotlib {matplotlib.__version__})")


if __name__ == "__main__":
    main()
