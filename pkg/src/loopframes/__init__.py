"""Loop-group frames for constant-curvature immersions with flat normal bundle."""

from .discreteforms import GridChart, MatrixOneForm, MatrixTwoForm, exterior_derivative, mc_residual, wedge
from .geometry import (ResidualReport, collapse_diameter, constant_curvature_residual,
                       deformation_snapshot, induced_metric, normal_flatness_residual,
                       sym_extract, theorem1_transfer)
from .integrator import (FrameField, ImmersionMesh, extract_immersion, integrate_frame,
                         path_independence_audit)
from .loopfamily import (ComponentForms, SpectralPoint, admissible_locus, assemble_affine_form,
                         assemble_family_form, assemble_scaled_form, assemble_sphere_form,
                         c_of_lambda, derive_alpha, lambda0)
from .pseudolinalg import (MetricBlocks, SpaceFormSpec, make_metric, pseudo_exp,
                           pseudo_orthogonality_residual)

__version__ = "0.1.0"
