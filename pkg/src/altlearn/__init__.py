"""Streaming regression under concept drift with alternating long/short-memory learners."""

__version__ = "0.1.0"

from .controller import (  # noqa: F401
    ControllerConfig,
    ControllerState,
    PerfQueue,
    StepRecord,
    init_phase,
    maybe_reset,
    overfit_guard,
    predict_batch,
    records_to_csv,
    register,
    run_stream,
    step,
)
from .drift_sim import (  # noqa: F401
    Stream,
    StreamSpec,
    gen_corpus,
    gen_profile,
    gen_stream,
    load_corpus,
    make_teacher,
    save_corpus,
)
from .elm import ElmModel, select_width, train_batch  # noqa: F401
from .features import HiddenLayer, Standardizer, init_hidden, map_features  # noqa: F401
from .linear import LinearModel, linear_fit, linear_update  # noqa: F401
from .metrics import RunSummary, mape, mse, sensitivity_grid, summarize  # noqa: F401
from .numerics import (  # noqa: F401
    NumericalBreakdownError,
    SingularSystemError,
    init_inverse_gram,
    ridge_solve,
    smw_update,
)
from .oselm import OselmState, oselm_init, oselm_update, warm_restart  # noqa: F401
