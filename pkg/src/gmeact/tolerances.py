"""Central numerical tolerance table.

Every module pulls its thresholds from here so that the meaning of
"Hermitian", "positive semidefinite" or "converged" is the same everywhere.
"""

# Maximum entrywise deviation |h - h^dag| for a matrix to count as Hermitian.
HERMITICITY = 1e-10

# Eigenvalues above -PSD count as nonnegative.
PSD = 1e-10

# Relative reconstruction / closure residual for decompositions.
RESIDUAL = 1e-10

# LP optimality: reduced costs and primal/dual gaps are certified to this.
LP_OPT = 1e-9

# Strict-negativity margin used when a solver value < 0 counts as detection.
DETECT = 1e-9

# A projected state with trace below this is treated as annihilated.
ZERO_NORM = 1e-12
