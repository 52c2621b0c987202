"""Antoine necklaces in R^3 with certified control of their shadows."""

from .geom import (Circle3, Line3, Plane3, Similarity3, SolidTorus, Tube, circle_distance,
                   linking_number, project, torus_separation)
from .necklace import (ChainParams, DefiningSequence, build_necklace, build_simple_chain,
                       build_thinned_necklace, circle_tube_cover, default_chain_params,
                       make_standard_torus, thin_to_tubes, verify_chain)
from .certify import PlankCertificate, check_certificate, empirical_cross_check
from .shadow import (ShadowRaster, connected_components, line_projection_interval,
                     max_inscribed_disk, project_torus, union_shadow)
from .planar import (ConvexPoly2, PlanarIFS, build_planar_cantor, shadow_cover_check,
                     triangle_union_cantor)

__version__ = "0.1.0"
