"""
tabkit: exact computations with tabular algebras, Kazhdan--Lusztig bases,
cells, asymptotic algebras and cell/standard modules.
"""

from .laurent import LaurentPoly, Field, FieldScalar, QQ, GF, v, ONE, ZERO
from .coxeter import CoxeterPresentation, CoxeterGroup, GroupElement, enumerate_horizon
from .cells import (StructureTable, CellDecomposition, cell_decomposition, a_function,
                    gamma_table)
from .hecke import HeckeAlgebra, KLBasis, kl_structure_constants, distinguished_involutions
from .table_algebra import TableAlgebra, verify_table_axioms, derive_bar, kappa
from .tabular import (TableDatum, verify_tabular_axioms, r_coefficients, pairing,
                      cell_ideal_and_quotient, hecke_datum)
from .asymptotic import build_asymptotic, corner_ring, phi_lambda, n_mu
from .cellmods import (cell_module, cell_module_from_basis, e_bimodule, w_prime_and_theta,
                       specialize_module, standard_module, gamma_simples, GammaRepresentation)
from .pipeline import analyze

__version__ = "0.1.0"
