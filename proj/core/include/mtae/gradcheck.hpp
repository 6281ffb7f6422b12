#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mtae::ad {

// Compares an analytic gradient against central finite differences
// (f(p+eps) - f(p-eps)) / (2 eps), coordinate by coordinate.
//
// `f` must be a deterministic function of the parameter vector. Returns the
// maximum over coordinates of
//     |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
// Throws NumericError if f returns a non-finite value.
double finite_difference_check(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> params,
                               std::span<const double> analytic_grad,
                               double epsilon);

}  // namespace mtae::ad
