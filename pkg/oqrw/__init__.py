# The MIT License (MIT)
# Copyright © 2024 OQRW developers
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.
#
# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

# Define the version of the oqrw package.
__version__ = "0.3.0"

version_split = __version__.split(".")
__version_as_int__ = (100 * int(version_split[0])) + (10 * int(version_split[1])) + (1 * int(version_split[2]))

# Walk model static vars
# Frobenius bound on ‖Σ_i B^{i*}_j B^i_j − I‖ for every source site
kraus_tol = 1e-9

# State static vars
# Allowed deviation of the total trace from 1
trace_tol = 1e-9
# Hermiticity of blocks and projections
hermitian_tol = 1e-12
# Smallest block eigenvalue accepted as positive semidefinite
psd_tol = 1e-9
# Idempotency of projection blocks
projection_tol = 1e-9
# Blocks with Frobenius norm at or below this belong to the zero set I_ρ
support_tol = 1e-12

# Invariant state search
invariant_tol = 1e-10
invariant_max_iters = 100_000
# Eigenvalues within this distance of 1 count towards the fixed-point multiplicity
eigen_tol = 1e-8
# Negative eigenvalues above -clip_tol are clipped to zero after Hermitization
clip_tol = 1e-12

# Recurrence diagnostics
decision_tol = 1e-8
access_tol = 1e-12
n_max = 200
# Number of trailing horizons used to certify a geometric ratio
certification_window = 10
# Largest spread of the successive difference ratios accepted as geometric decay
ratio_spread_tol = 1e-2
# Tolerance on both sides of the finite-horizon stopping time equivalence
theorem_tol = 1e-9

# Output settings
significant_digits = 17
