"""Post-selection purification of amplitude-damping noise on few-qubit states and channels."""

from .channels import (
    ADChannel,
    ChoiState,
    KrausChannel,
    Parity,
    apply_channel,
    choi_of,
    make_ad,
    validate_cptp,
    z_parity,
)
from .protocols import (
    PostSelectionReport,
    analytic_state_purification,
    compensation_filter,
    estimate_gamma,
    purify_pair_one_ancilla,
    purify_pair_two_ancilla,
    purify_state,
    simulate_batch,
)
from .qcore import (
    Branch,
    BranchEnsemble,
    ImpossibleOutcome,
    PureState,
    apply_operator,
    bell,
    fidelity_to_pure,
    ket,
    post_select,
    tensor,
)
from .sampling import SampleSpec, sample_state, sample_unitary_channel

__version__ = "0.1.0"
