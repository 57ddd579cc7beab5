"""Shared numerical constants for the scalar and vector kernel backends.

Both kernel implementations read the same coefficient tables so that a
uniform drawn at a given (seed, iteration, variate) coordinate maps to
the same normal or chi-square deviate regardless of backend.
"""

import numpy as np

# SplitMix-style 64-bit mixing constants.  GOLDEN is the odd Weyl
# increment, MIX1/MIX2 the Stafford "variant 13" multipliers.
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
U64_MASK = 0xFFFFFFFFFFFFFFFF

# Counter layout: counter = (iteration << 32) | variate.  Variate slots
# below CHI2_BAND belong to the systematic factor (slot 0), a reserved
# anchor (slot 1) and the idiosyncratic draws (slots 2..n+1).  The
# chi-square mixing block consumes sub-slots CHI2_BAND..CHI2_BAND+66:
# one boost uniform plus two uniforms per rejection attempt.
ITERATION_SHIFT = np.uint64(32)
VARIATE_LIMIT = 1 << 31
CHI2_BAND = np.uint64(1 << 31)
CHI2_MAX_ATTEMPTS = 32

# Uniform construction: ((word >> 11) + 0.5) * 2**-53, strictly inside (0,1).
UNIFORM_SHIFT = np.uint64(11)
UNIFORM_SCALE = 2.0 ** -53

# Inverse normal CDF, Wichura's PPND16 rational approximations.
# Central branch |u - 0.5| <= 0.425, argument r = 0.180625 - q*q.
PPND_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
PPND_B = (
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
# Middle tail branch, r = sqrt(-log(min(u,1-u))) - 1.6 with r <= 5.
PPND_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
PPND_D = (
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
# Far tail branch, r - 5 with r > 5.
PPND_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
PPND_F = (
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)
PPND_CENTRAL = 0.425
PPND_R0 = 0.180625
PPND_SPLIT = 5.0

# Cody's rational erf/erfc (SPECFUN layout).
ERF_THRESH = 0.46875
ERF_XSMALL = 1.11e-16
ERFC_XBIG = 26.543
INV_SQRT_PI = 5.6418958354775628695e-1
INV_SQRT2 = 0.7071067811865475244

ERF_A = (
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
)
ERF_B = (
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
)
ERFC_C = (
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
)
ERFC_D = (
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
)
ERFC_P = (
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
)
ERFC_Q = (
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
)

# Binomial inversion switches to a log-space CDF scan when the zero-count
# probability (1-p)^m would denormalize.
BINOM_LOG_SWITCH = -700.0

# Copula family codes shared by both simulation backends.
FAMILY_GAUSSIAN = 0
FAMILY_PRODUCT = 1
FAMILY_T = 2
