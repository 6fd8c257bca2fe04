"""Two Galois legs whose composite is not even an F-extension.

Run: python demos/galois_composition.py  (a few seconds)
"""

from importlib import resources
from pathlib import Path

from pinsep import TowerSpec, galois_battery, tower_report
from pinsep.cli import Loaded

CORPUS = Path(str(resources.files("pinsep") / "corpus"))

doc = Loaded(CORPUS / "composition_counterexample.pinsep", None)
T = TowerSpec(doc.C, doc.subring("A"), doc.subring("B"))
rep = tower_report(T)

# %% one line per leg
for line in rep.summary():
    print(line)

# %% the Galois characterisations evaluated separately on each leg
for lo, hi in [("A", "B"), ("B", "C")]:
    print(f"{lo}⊂{hi}:", galois_battery(*doc.pair(lo, hi)))

# %% the composition criterion: both legs Galois, the composite fails at the first Frobenius level
print("auxiliary rings:", rep.auxiliaries)
print("galois_composition holds:", rep.checks["galois_composition"].value)
