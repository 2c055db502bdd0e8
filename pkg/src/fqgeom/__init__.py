"""Exact counting of point configurations in F_p^d.

Submodules: ``field`` (F_p and its characters), ``geom`` (points, spheres,
dense sets), ``fourier``, ``char_sums``, ``configs`` (hinges, simplices,
census), ``ortho`` (O_d(F_p)) and ``cli``.  ``kernels.BACKEND`` names the
counting backend picked at import.
"""

from .char_sums import (MultChar, gauss_sum, kloosterman, sphere_hat_closed_form,
                        sphere_hat_decay_audit)
from .configs import (CensusResult, DistanceVector, HingeSpec, count_congruent_copies,
                      count_hinges, distance_vector, hinge_main_term, hinge_report,
                      max_hinge_point, rank_of_simplex, recover_isometry,
                      simplex_census, sphere_intersection_counts)
from .field import (FieldElement, GF, PrimeField, add, chi, inv, legendre, mul, neg,
                    sub)
from .fourier import SpectralGrid, forward, inverse, plancherel_check
from .geom import (DenseSet, Point, dist, enumerate_sphere, load_set, norm,
                   random_dense_set, save_set)
from .kernels import BACKEND
from .ortho import (OrthogonalGroup, enumerate_orthogonal_group, hinge_stabilizer_size,
                    orbit, stabilizer_size)

__version__ = "0.1.0"
