"""Secure three-party estimation of normalized sum-type functions.

Alice and Bob hold equal-length symbol sequences; a third party computes
the average of a per-symbol rational table over aligned pairs, estimated
from a uniform random subsample so accuracy costs only O(sqrt(1/m)) while
communication stays near m*log(n) bits.  Three interchangeable protocols
produce the exact subsample estimate; enumeration audits check their
privacy exactly, and experiment helpers measure distortion and cost.
"""

from .field import (FieldElement, PrimeField, decode_centered, encode_rational,
                    field_arith, interpolate_at_zero, min_field_size)
from .functions import (Alphabet, FunctionTable, builtin_table, eval_sum_type,
                        load_table, parse_table, resolve_table)
from .sampling import (IndexSet, JointTypeEstimate, estimate_function,
                       exact_expected_abs_error, hypergeometric_stats,
                       mse_and_l2_bounds, partial_frequency, sample_indices,
                       worst_case_distortion)
from .sharing import (PadSymbol, ShareTriple, additive_split, degree1_share,
                      pad_shift, triple_pointwise)
from .engine import (ProtocolResult, View, Message, distribute_index_set,
                     get_protocol, register_protocol, run_protocol_otp,
                     run_protocol_poly_direct, run_protocol_poly_l)
from .audit import (AuditParams, PrivacyReport, audit_privacy_alice,
                    audit_privacy_bob, audit_privacy_charlie, audit_protocol)

__version__ = "0.1.0"
