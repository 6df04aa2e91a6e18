"""coklab: Monte Carlo laboratory for cokernel distributions of random
matrices over Dedekind domains (Z, Z[i], F_p[x])."""

from .domains import (
    DomainId,
    Element,
    ElementaryQuotientIdeal,
    PrimeIdealDesc,
    ZI,
    ZZ,
    elementary_quotient_ideals,
    factor_rational_prime,
    parse_element,
    poly_domain,
    reduce_mod_prime_power,
    residue_vector,
)
from .errors import (
    BalanceError,
    CoklabError,
    ConfigError,
    DiagnosticsError,
    IndeterminateCokernelError,
    NonUnitError,
    OracleBudgetError,
    ParameterError,
    PrecisionRangeError,
    RingMismatchError,
)
from .experiments import (
    EmpiricalSummary,
    ExperimentConfig,
    emit_report,
    load_config,
    parse_config,
    run_distribution_experiment,
    run_galois_demo,
    run_moment_experiment,
)
from .local_ring import (
    LocalElement,
    LocalRingSpec,
    lr_add,
    lr_mul,
    lr_neg,
    make_local_ring,
    unit_inverse,
    valuation,
)
from .modules import (
    ModuleType,
    brute_force_count,
    count_aut,
    count_aut_local,
    count_hom,
    count_hom_local,
    count_sur,
    count_sur_local,
    enumerate_types,
    module_size,
)
from .sampler import (
    BalanceReport,
    EntryDistribution,
    balance_report,
    builtin_distribution,
    sample_matrix,
)
from .snf import (
    LocalMatrix,
    PrecisionPolicy,
    SnfResult,
    cokernel_local_type,
    cokernel_type,
    integer_snf_oracle,
    local_snf,
)
from .theory import Prediction, partial_sum, predicted_moment, predicted_probability

__version__ = "0.1.0"
