"""Numerical tolerances used across the package.

Every property test and runtime check reads its threshold from here.
"""

# algebraic identities (tensor/partial-trace/Bloch round trips)
ALGEBRAIC_TOL = 1e-12
# factorisation reconstruction, orthogonality, state/channel validation
RECONSTRUCTION_TOL = 1e-10
# eigenvalue and characteristic-polynomial residuals
EIGEN_TOL = 1e-9
# density-matrix positivity and Choi positivity floor
PSD_TOL = 1e-10
# Bloch ball containment when sampling channel images
BALL_TOL = 1e-9
# parameter-pattern matching in case classification
CASE_TOL = 1e-12
# degeneracy of D11 and D22 for admissible canonical forms
DEGENERACY_TOL = 1e-10
