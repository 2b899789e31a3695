#pragma once

#include <stdexcept>
#include <string>

namespace escset {

struct IterationConfig {
    int max_iter = 1000;
    double overflow_log_threshold = 700.0;
    /// T: family-specific escape threshold on the real part.
    double escape_real_threshold = 50.0;
    double degeneracy_eps = 1e-12;
    /// R: modulus threshold for maps without a half-plane rule.
    double generic_escape_radius = 1e10;
    bool record_orbit = false;

    void check() const {
        if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
        if (!(overflow_log_threshold > 1.0 && overflow_log_threshold < 709.0))
            throw std::invalid_argument("overflow_log_threshold must lie in (1, 709)");
        if (!(escape_real_threshold > 0.0))
            throw std::invalid_argument("escape_real_threshold must be > 0");
        if (!(generic_escape_radius > 1.0))
            throw std::invalid_argument("generic_escape_radius must be > 1");
        if (!(degeneracy_eps >= 0.0))
            throw std::invalid_argument("degeneracy_eps must be >= 0");
    }
};

}  // namespace escset
