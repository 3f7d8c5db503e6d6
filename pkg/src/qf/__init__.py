"""Finite quasigroups and loops: F-quasigroups, NK-loops and arithmetic forms."""

from .errors import *  # noqa: F401,F403
from .qcore import (
    CayleyTable, FiniteLoop, Permutation, from_table, generate_sub, relabel, subtable,
    table_from_function,
)
from .laws import (
    LAWS, PUBLIC_LAWS, LawReport, check_law, every_k_generated, is_A_loop,
    is_automorphism, is_diassociative, is_f_quasigroup, is_moufang, k_medial,
    law_holds, sweep,
)
from .structure import (
    Congruence, SubsetReport, center, commutant, congruence_from_subloop, is_FG,
    is_NK, is_congruence, is_isomorphic, is_simple, m_set, moufang_center,
    nk_char_holds, nk_decompose, nucleus, principal_congruence, quotient,
    regular_pairs, regular_permutations, rho_congruence,
)
from .forms import (
    ArithmeticForm, FormReport, FormTrace, basepoint_shift, companion_quasigroup,
    form_at, phi, principal_isotope, psi, verify_form,
)
from .gen import EnumSpec, builtin, direct_product, enumerate_tables, iter_tables, random_form

__version__ = "0.1.0"
