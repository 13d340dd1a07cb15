#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pm {

using Vec2 = Eigen::Vector2d;

/// Partial derivatives of a 2D quantity with respect to one agent's
/// trajectory parameters (one column per parameter).
using Jacobian2 = Eigen::Matrix<double, 2, Eigen::Dynamic>;

/// Malformed scenario or parameter document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scenario or parameter set violating one of its invariants.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The curve is (numerically) stationary at the requested anomaly, so the
/// anomaly rate cannot be solved from a speed or acceleration constraint.
class DegenerateGeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pm
