"""rotopt: rotation search for finite constellations on Rayleigh fading channels.

Finds rotation matrices minimizing a pairwise-error-probability union
bound via geodesic flow on SO(n), and validates them with a seeded
Monte-Carlo fading-channel simulator.
"""

__version__ = "0.1.0"

from .channel import SimulationConfig, SimulationResult, estimate_cer, ml_detect, sample_channel
from .constellation import (
    Constellation,
    load_constellation,
    make_dvb_rotation_4d,
    make_hypercube,
    make_nuqam16,
    make_rotation_2d,
    min_product_distance,
    rotate,
    save_constellation,
    signed_permutation_distance,
)
from .cyclotomic import build_generator, golden_matrix
from .lie import (
    CorruptedStateError,
    assert_rotation,
    is_rotation,
    load_matrix,
    mat_exp,
    ortho_defect,
    project_to_rotation,
    random_rotation,
    save_matrix,
    skew_lift,
)
from .objective import (
    NoiseLevel,
    PairDiffCache,
    pep_bound,
    pep_gradient_analytic,
    pep_gradient_fd,
)
from .optimizer import (
    OptimizerConfig,
    OptimizerTrace,
    check_two_param_family,
    geodesic_flow,
    geodesic_flow_continuation,
)
