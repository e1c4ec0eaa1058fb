#pragma once

#include <Eigen/Dense>

#include <string>

namespace osgmm {

/// Raw pre-normalisation class activations of one detection.
using LogitVector = Eigen::VectorXd;

/// Index of a known class, in [0, N).
using ClassId = int;

/// Axis-aligned pixel box in corner form.
struct Box {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool valid() const { return x_min < x_max && y_min < y_max; }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Throws ContractViolation for zero-area or inverted boxes.
void require_valid(const Box& box, const std::string& context);

}  // namespace osgmm
