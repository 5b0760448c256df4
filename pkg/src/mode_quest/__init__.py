"""Sequential community-mode estimation in the fixed-confidence setting."""

from .algorithms import (
    Rule,
    TrialResult,
    run,
    run_ib_cme,
    run_ni_me,
    run_ni_me_1v1,
    run_trial,
    threshold_beta,
)
from .bounds import (
    BoundReport,
    bound_ratio_check,
    g_star,
    kl_bernoulli,
    lb_identity_based,
    lb_identityless,
)
from .identity import (
    GammaSolve,
    IbStatReport,
    log_integral_term,
    log_likelihood_ib,
    r_of_gamma,
    solve_gamma0,
    t1_box_sum,
    y_ab,
    y_stat,
)
from .identityless import (
    IlessStatReport,
    constrained_mle,
    log_multinomial_beta_ratio,
    z_ab,
    z_stat,
    z_tilde_ab,
)
from .model import (
    Algorithm,
    GeometricPrior,
    Instance,
    ObservationState,
    PriorSpec,
    RunConfig,
    make_instance,
    prior_pmf,
)
from .sampler import (
    Observation,
    TraceStream,
    sample_identity_based,
    sample_identityless,
    trial_rng,
)

__version__ = "0.1.0"
