"""Exact classification of purely inseparable extensions of finite F_p-algebras."""

__version__ = "0.1.0"

from .errors import ParseError, PinsepError, PreconditionError, ResourceError, RouteError, StructuralError
from .document import Document, parse_document
from .algebra import (AlgebraElement, FiniteAlgebra, FrobeniusChain, Presentation, Subalgebra, algebra_from_document,
                      build_algebra, frobenius_chain, frobenius_power, parse_presentation, prime_field,
                      subalgebra_generated, whole)
from .modules import CModule, Submodule, algebra_as_module, free_basis, is_direct_summand, is_free, minimal_generators
from .diffcalc import (DiffOperator, bracket, bracket_development, delta_alpha, derivations, diff_filtration,
                       diff_operators, extend, hom_space, iterated_bracket, kaehler, order_of, partials_from_pbasis,
                       principal_parts, restrict, tensor_square)
from .classify import (ClassificationReport, Verdict, classify, find_pbasis, galois_battery, gngs, is_f_extension,
                       is_galois, is_purely_inseparable, leg, ngs_presentation, theoremA_report)
from .jbcorr import (close_subalgebra, constants_of, end_algebra, end_over, enumerate_subalgebras, special_basis,
                     verify_correspondence)
from .towers import TowerSpec, tower_report
