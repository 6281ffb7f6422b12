#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mtae/corpus.hpp"

namespace mtae::proto {

// One of the 14 fixed syntax prototypes. Placeholders: +N noun, +Ns plural
// noun, +V verb, +Vs third person, +Ving gerund, +A adjective, +D adverb.
// Category 14 is the single-whitespace sentence.
struct PrototypeTemplate {
    std::size_t category;  // 1..14
    std::string pattern;
};

std::span<const PrototypeTemplate> prototype_templates();

struct LabeledSentence {
    std::string text;
    std::size_t category;  // 1..14
};

// per_category instantiations of each template with seeded draws from the
// shared word lists. Deterministic in (seed, per_category).
std::vector<LabeledSentence> generate_prototype_sentences(std::uint64_t seed,
                                                          std::size_t per_category = 100);
// Same, against custom word lists (tests pin single-word lists).
std::vector<LabeledSentence> generate_prototype_sentences(std::uint64_t seed,
                                                          std::size_t per_category,
                                                          const corpus::SyntheticGrammar& grammar);

// TSV with a "category\tsentence" header.
void save_prototypes_tsv(const std::filesystem::path& path,
                         std::span<const LabeledSentence> sentences);

}  // namespace mtae::proto
