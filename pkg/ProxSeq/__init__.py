# License: BSD 3 clause
from .errors import ProxSeqError, InputError, OutOfReach, SolverError
from .utils import harmonic, harmonic_diff, log_grid, log_index
from .verdict import Verdict, EnvelopeEstimate, tail_envelope, window_envelope, PASS, FAIL, INCONCLUSIVE
from .seqcore import (FamilySpec, parse_family, make_family, QuotientSeq, GevreySeq, MAlphaBetaSeq,
                      MQSeq, TableSeq, ExampleA, ExampleB)
from .props import (check_lc, check_mg, check_snq, strong_regularity, check_equiv_quotients,
                    almost_increasing_defect, estimate_omega, estimate_gamma_index)
from .assoc import nu, assoc_eval, M_assoc, d_M, d_residual, assoc_grid, d_envelope
from .regvar import (ratio_limit, regvar_index_test, bs_decompose, characterization_crosscheck,
                     RegVarReport)
from .proxord import (ProximateOrder, make_order, parse_order, validate_order, V_of, U_of,
                      conjugate_order, orders_equivalent, dM_order, admits)
from .construct import (AxisV, make_axis_V, A_of_s, mv_value, young_conjugate, build_mv_sequence,
                        build_l_sequence, admissibility_closure_check, ConstructedSeq)
from .riesz import (DeltaSeq, riesz_mean, riesz_subsequences, moricz_expression, RieszSeq)
from .report import ReportDocument, __version__
from .cli import main
