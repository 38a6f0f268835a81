"""riskbench: sectoral cyber-risk benchmarking over privacy-preserving aggregates.

Pipeline: firms encode private submissions into integer vectors, a
secure-sum session reveals only the peer-group column sums, the sums
drive a loss-weighted posture model whose exponential multiplier scales
the peer baseline into firm-private risk forecasts, and a seeded
mixture Monte Carlo turns the group's loss picture into an exceedance
curve.
"""

from .aggregation import (
    AggregateReport,
    AggregationSession,
    post_process,
    share_vector,
)
from .catalog import ControlCatalog, LossBandSchema, MaturityLevel, assign_loss_band
from .config import SectorConfig
from .forecast import (
    FirmForecast,
    PeerBaseline,
    build_baseline,
    firm_forecast,
    posture_comparison,
    risk_curve_table,
)
from .gapindex import (
    AnchorPoint,
    GapIndexModel,
    allocate_group_split,
    build_model,
    fit_gap_curve,
    gap_multiplier,
    net_weighted_deviation,
    prorate_weights,
)
from .simulation import (
    LossExceedanceCurve,
    MixtureSpec,
    histogram,
    lec_from_samples,
    lec_query,
    sample_losses,
)
from .submission import (
    IncidentRecord,
    ParticipantSubmission,
    compute_checksum,
    encode_submission_vector,
    split_incident_loss,
    validate_submission,
)

__version__ = "0.1.0"
