"""A tower A ⊂ B ⊂ C where A ⊂ C and B ⊂ C are purely inseparable but A ⊂ B is not.

Run: python demos/failed_tower.py  (about 15 s)
"""

from importlib import resources
from pathlib import Path

from pinsep import classify
from pinsep.cli import Loaded

CORPUS = Path(str(resources.files("pinsep") / "corpus"))

doc = Loaded(CORPUS / "ex_6_2.pinsep", None)
print(f"dim C = {doc.C.dim} over F_{doc.C.p}")

# %% the three legs
for lo, hi in [("A", "C"), ("B", "C"), ("A", "B")]:
    top, base = doc.pair(lo, hi)
    rep = classify(top, base, names=(lo, hi))
    pi = rep["purely_inseparable"].value
    line = f"{lo}⊂{hi}: chain {rep['chain_dims']}, purely inseparable: {pi}"
    if not pi:
        line += f" ({rep['witness']})"
    print(line)
