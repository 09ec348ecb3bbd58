"""
Reconstruct-Translate-Average (RTA) reconstruction of first-order upwind finite
volume solutions of parameter-dependent linear transport on periodic 1-D meshes.

One stored trajectory ``u^k(mu_i)`` is enough to approximate ``u^k(mu)`` for any
other parameter ``mu`` at any stored time index ``k``, in O(N) and without time
stepping.
"""

from rtafv.errors import (
    CFLViolationError,
    DegenerateNormError,
    IncompatibleDiscretizationError,
    InvalidArgumentError,
    SnapshotNotFoundError,
    StoreIntegrityError,
    StoreParseError,
)
from rtafv.mesh import (
    CellField,
    Mesh1D,
    PiecewiseConstant,
    Sampled,
    build_mesh,
    field_to_csv,
    project_initial,
)
from rtafv.metrics import (
    ErrorReport,
    fit_convergence_rate,
    l1_abs_error,
    l1_rel_error,
    projection_error_l1,
    total_variation,
)
from rtafv.rta import (
    relative_shift,
    rta_reconstruct,
    rta_reconstruct_oracle,
    rta_shift_index,
)
from rtafv.shift_ops import (
    ShiftIndex,
    apply_generalized_shift,
    apply_K,
    apply_L_power,
    decompose_shift,
)
from rtafv.store import (
    SnapshotStore,
    load_trajectory,
    save_trajectory,
    select_best_measured,
    select_nearest,
)
from rtafv.systems import (
    ElastoModel,
    EigenBasis,
    SystemField,
    build_eigenbasis,
    from_characteristics,
    rta_elasto_reconstruct,
    run_elasto_trajectory,
    to_characteristics,
)
from rtafv.upwind import (
    SolveConfig,
    Trajectory,
    TransportModel,
    cfl_timestep,
    run_trajectory,
    upwind_step,
)

__version__ = "0.1.0"
