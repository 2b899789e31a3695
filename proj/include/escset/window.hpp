#pragma once

#include <cmath>
#include <stdexcept>

namespace escset {

struct Window {
    double x_min;
    double x_max;
    double y_min;
    double y_max;

    void check() const {
        if (!(x_min < x_max) || !(y_min < y_max))
            throw std::invalid_argument("window requires x_min < x_max and y_min < y_max");
        if (!std::isfinite(x_max - x_min) || !std::isfinite(y_max - y_min))
            throw std::invalid_argument("window bounds must be finite");
    }

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }

    friend bool operator==(const Window&, const Window&) = default;
};

}  // namespace escset
