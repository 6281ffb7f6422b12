#include "mtae/gradcheck.hpp"

#include <cmath>
#include <string>

#include "mtae/errors.hpp"

namespace mtae::ad {

double finite_difference_check(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> params,
                               std::span<const double> analytic_grad,
                               double epsilon) {
    if (epsilon <= 0.0) throw InputError("finite_difference_check: epsilon must be positive");
    if (params.size() != analytic_grad.size())
        throw DimensionError("finite_difference_check: " + std::to_string(params.size()) +
                             " params vs " + std::to_string(analytic_grad.size()) +
                             " gradient entries");

    std::vector<double> p(params.begin(), params.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + epsilon;
        const double up = f(p);
        p[i] = saved - epsilon;
        const double down = f(p);
        p[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down))
            throw NumericError("finite_difference_check: f returned a non-finite value at "
                               "coordinate " + std::to_string(i));
        const double numeric = (up - down) / (2.0 * epsilon);
        const double analytic = analytic_grad[i];
        const double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    return worst;
}

}  // namespace mtae::ad
