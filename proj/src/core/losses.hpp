#pragma once

#include <algorithm>
#include <cmath>

namespace s3lda {

// Half-width of the Huber band used to smooth the positive-part kinks for
// the first-order inner solver. The surrogate gap is at most mu_s/2 per
// smoothed term.
struct SmoothingParams {
    double mu_s = 1e-3;
};

inline double squared_loss(double y_tilde, double f) {
    const double r = y_tilde - f;
    return r * r;
}

// U(z) = (1 - |z|)_+, maximal at z = 0.
inline double modified_hinge(double z) { return std::max(0.0, 1.0 - std::abs(z)); }

// Convex split U = u1 - u2 with u1 = (|z|-1)_+ and u2 = |z|-1.
inline double u1(double z) { return std::max(0.0, std::abs(z) - 1.0); }
inline double u2(double z) { return std::abs(z) - 1.0; }

// Chosen subgradient of u2: sign(z), with 0 at z = 0.
inline double u2_subgradient(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

// Huber smoothing of t -> max(0, t): exact outside |t| >= mu, quadratic
// inside, derivative continuous; 0 <= smoothed - max(0,t) <= mu/4.
inline double smoothed_pos_part(double t, double mu) {
    if (t >= mu) return t;
    if (t <= -mu) return 0.0;
    const double s = t + mu;
    return s * s / (4.0 * mu);
}

inline double smoothed_pos_part_derivative(double t, double mu) {
    if (t >= mu) return 1.0;
    if (t <= -mu) return 0.0;
    return (t + mu) / (2.0 * mu);
}

inline double u1_smoothed(double z, const SmoothingParams& p) {
    return smoothed_pos_part(std::abs(z) - 1.0, p.mu_s);
}

inline double u1_smoothed_derivative(double z, const SmoothingParams& p) {
    const double dz = z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
    return smoothed_pos_part_derivative(std::abs(z) - 1.0, p.mu_s) * dz;
}

}  // namespace s3lda
