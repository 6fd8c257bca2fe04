"""Without finite exponent, two endomorphism rings can share a ring of constants.

Run: python demos/shared_constants.py
"""

from importlib import resources
from pathlib import Path

from pinsep import close_subalgebra, constants_of, end_algebra, verify_correspondence
from pinsep.cli import Loaded

CORPUS = Path(str(resources.files("pinsep") / "corpus"))

doc = Loaded(CORPUS / "kxk.pinsep", None)
E = end_algebra(doc.C)
rings = [close_subalgebra(E, seeds, label=name) for name, seeds in doc.doc.endomorphisms.items()]

# %% two different rings of dimension 3
for H in rings:
    B = constants_of(H)
    print(f"{H.label}: dim {H.dim}, constants of dim {B.dim}")
print("same ring:", rings[0] == rings[1])

# %% the correspondence check flags the missing hypothesis
rep = verify_correspondence(doc.C, endomorphism_rings=rings)
print("hypothesis:", rep.hypothesis)
print("collisions:", rep.collisions)
