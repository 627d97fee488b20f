"""Desk-scale machinery for homotopy direct limits of ascending unions.

Subpackages and modules:

- ``geometry``        exact/floating scalars, points, affine simplices
- ``simplicial``      finite geometric complexes, barycentric subdivision,
                      prism triangulations
- ``convexity``       bounded-term convex-combination membership oracles
- ``filling``         the cone-based boundary-filling operator
- ``regions``         predicate algebra for open subsets of R^D
- ``filtered_spaces`` nested coordinate filtrations, well-filled charts,
                      chart surgery, compact absorption
- ``direct_limits``   finite direct systems, witness-based colimits,
                      universal maps
- ``plmaps``          piecewise-affine maps and homotopy evaluators
- ``approximation``   the simultaneous/individual approximation engine
- ``invariants``      winding/component oracles and the end-to-end
                      experiments
- ``cli``             reproducible command-line front end

Hot numeric kernels live in ``ascolim._kernels`` with a compiled extension
selected at import when available and a pure-Python fallback otherwise.
"""

from ascolim._kernels import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
