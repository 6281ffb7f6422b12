#include "mtae/latentlab.hpp"

#include <cmath>

#include <json.hpp>

#include "mtae/errors.hpp"

namespace mtae::latent {

std::vector<Representation> interpolate(const Representation& r1, const Representation& r2,
                                        std::size_t steps) {
    if (steps < 2) throw InputError("interpolate: at least 2 steps required");
    if (!r1.vec.same_shape(r2.vec))
        throw InputError("interpolate: representation dimensions differ, " +
                         r1.vec.shape_str() + " vs " + r2.vec.shape_str());

    std::vector<Representation> out;
    out.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double alpha = static_cast<double>(i) / static_cast<double>(steps - 1);
        ad::Tensor v = ad::Tensor::zeros(r1.vec.shape());
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] = (1.0 - alpha) * r1.vec[j] + alpha * r2.vec[j];
        out.push_back(Representation{std::move(v)});
    }
    return out;
}

std::vector<InterpolationRow> interpolate_sentences(const MultiTaskModel& m, std::string_view s1,
                                                    std::string_view s2, std::size_t steps,
                                                    Decoder dec) {
    const Representation r1 = encode(m, s1);
    const Representation r2 = encode(m, s2);
    std::vector<InterpolationRow> rows;
    rows.reserve(steps);
    std::size_t i = 0;
    for (const Representation& r : interpolate(r1, r2, steps)) {
        const double alpha = static_cast<double>(i++) / static_cast<double>(steps - 1);
        rows.push_back({alpha, decode_greedy(m, r, dec)});
    }
    return rows;
}

ArithmeticResult representation_arithmetic(const MultiTaskModel& m, std::string_view s1,
                                           std::string_view s2, std::string_view s3,
                                           Decoder dec) {
    const Representation r1 = encode(m, s1);
    const Representation r2 = encode(m, s2);
    const Representation r3 = encode(m, s3);

    // (r1 - r2) + r3, with the two cancellation identities forced exact:
    // plain IEEE evaluation cannot satisfy both r2==r3 => v==r1 and
    // r1==r2 => v==r3 at once, so equal components short-circuit.
    ad::Tensor v = ad::Tensor::zeros(r1.vec.shape());
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (r2.vec[j] == r3.vec[j])
            v[j] = r1.vec[j];
        else if (r1.vec[j] == r2.vec[j])
            v[j] = r3.vec[j];
        else
            v[j] = (r1.vec[j] - r2.vec[j]) + r3.vec[j];
    }

    ArithmeticResult out;
    out.sentence = decode_greedy(m, Representation{v}, dec);
    out.vector = Representation{std::move(v)};
    return out;
}

std::string interpolation_json(std::span<const InterpolationRow> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const InterpolationRow& r : rows)
        arr.push_back({{"alpha", r.alpha}, {"sentence", r.sentence}});
    return arr.dump(2);
}

std::string arithmetic_json(const ArithmeticResult& result) {
    double sq = 0.0;
    for (double x : result.vector.vec.values()) sq += x * x;
    nlohmann::json j{{"vector_norm", std::sqrt(sq)}, {"sentence", result.sentence}};
    return j.dump(2);
}

}  // namespace mtae::latent
