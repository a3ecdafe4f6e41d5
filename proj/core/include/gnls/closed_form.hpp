#pragma once

#include "gnls/forward.hpp"
#include "gnls/numerics.hpp"

namespace gnls::closed_form {

// Third-order coefficients for Q = q2(x) u^2 with q0 = q1 = 0, valid at any complex k != 0.

/// q2 = gamma on [0, b]
ABPair constant_gamma(double gamma, double b, cplx k);

/// q2 = e^{alpha x} on [0, b]
ABPair exponential_alpha(double alpha, double b, cplx k);

/// u_3(x; k) for q2 = gamma on [0, b], from variation of parameters; x in [0, b].
cplx u3_constant_gamma(double gamma, cplx k, double x);

}  // namespace gnls::closed_form
