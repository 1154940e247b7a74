"""Triangular polynomial permutations over finite commutative rings."""
from .errors import (ActionError, CapExceeded, MembershipViolation, NotAUnit, NotTriangular,
                     ParseError, RingError, TripermError)
from .ring import Elem, Ring, build_ring, crt_split, parse_spec
from .poly import (FuncTable, MultiPoly, func_equiv, func_of, func_values, is_automorphism,
                   is_permutation_poly, is_unit_poly, is_unit_valued, lagrange_interpolate,
                   newton_inverse, noebauer_criterion)
from .parse import parse_poly, parse_vec
from .trimonoid import (TriElem, apply_tri, compose_tri, embed_tri, equiv_tri, from_vecpoly,
                        identity_tri, induced_perm, invert_tri, is_unit_tri, make_tri,
                        solve_preimage, to_vecpoly)
from .funcspace import (enumerate_poly_functions, enumerate_poly_permutations,
                        enumerate_unit_valued, induced_group_mt, induced_group_tr,
                        order_formula, tr_vs_mt, verify_order_formula, verify_ratio_theorems)
from .structure import (PermGroup, TableMonoid, derived_series, group_props, is_nilpotent,
                        is_normal, is_solvable, lower_central_series, semidirect, units_of,
                        verify_decomposition, verify_semidirect_units)
from .dualnum import (DualPoly, dual_eval, dual_ring, embed_phi, embed_psi, equiv_dual,
                      is_perm_dual, make_dual)

__version__ = "0.1.0"
