"""Pattern-censoring compression over unbounded integer alphabets.

The codec censors first occurrences (escape + prefix-free integer code) and
codes repeats by dictionary rank under an add-one-half mixture on the growing
alphabet. The companion modules evaluate the redundancy theory of envelope
source classes and verify the codec's behavior against it.
"""

from .codec import (Dictionary, IdealCodeLength, KTState, PcContainer, censor,
                    decode, encode, ideal_codelength, kt_predictive)
from .coders import (ArithmeticDecoder, ArithmeticEncoder, Bitstream,
                     CumulativeTable, elias_decode, elias_encode, elias_length)
from .envelopes import (Envelope, EnvelopeDistribution, ExplicitEnvelope,
                        GeometricEnvelope, PowerLawEnvelope, SourceSpec,
                        StretchedExpEnvelope, counting_function,
                        envelope_distribution, finite_source, geometric_source,
                        make_envelope, parse_envelope, perturbed_member,
                        point_mass, sample, small_mass, uniform_source)
from .errors import (BoundViolation, CorruptStream, DomainError,
                     InvalidEnvelope, InvalidSymbol, LemmaViolation,
                     LengthLimitExceeded, PccodecError, PrecisionOverflow,
                     RankOutOfRange, UnboundedSum)
from .occupancy import (OccupancyProfile, check_binomial_inverse_lemma,
                        check_occupancy_lemma, expected_distinct,
                        expected_missing_mass, expected_singletons,
                        poisson_tail_slack, profile)
from .redundancy import (Decomposition, DistFreeReport, EmpiricalRedundancy,
                         RedundancyBoundReport, check_distfree_bound,
                         direct_conditional_redundancy, empirical_redundancy,
                         idealized_elias_cost, instantaneous_decomposition,
                         redundancy_lower, redundancy_rate,
                         redundancy_rate_quadrature, redundancy_report,
                         redundancy_trials, redundancy_upper)

__version__ = "0.1.0"
