#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mtae/seqmodel.hpp"

namespace mtae::latent {

using corpus::Decoder;
using model::MultiTaskModel;
using model::Representation;

// r(alpha_i) = (1 - alpha_i) * r1 + alpha_i * r2 for alpha_i = i/(steps-1).
// Endpoints reproduce r1 and r2 exactly. steps >= 2.
std::vector<Representation> interpolate(const Representation& r1, const Representation& r2,
                                        std::size_t steps);

struct InterpolationRow {
    double alpha;
    std::string sentence;
};
// Encode both endpoints, walk the line, greedy-decode every point.
std::vector<InterpolationRow> interpolate_sentences(const MultiTaskModel& m, std::string_view s1,
                                                    std::string_view s2, std::size_t steps = 7,
                                                    Decoder dec = Decoder::Rep);

struct ArithmeticResult {
    Representation vector;  // may leave the tanh cube; decoded regardless
    std::string sentence;
};
// v = encode(s1) - encode(s2) + encode(s3), decoded greedily. Computed so
// that s2 == s3 gives exactly encode(s1) and s1 == s2 gives exactly
// encode(s3), component by component.
ArithmeticResult representation_arithmetic(const MultiTaskModel& m, std::string_view s1,
                                           std::string_view s2, std::string_view s3,
                                           Decoder dec = Decoder::Rep);

// stdout payload helpers for the command-line tools
std::string interpolation_json(std::span<const InterpolationRow> rows);
std::string arithmetic_json(const ArithmeticResult& result);

}  // namespace mtae::latent
