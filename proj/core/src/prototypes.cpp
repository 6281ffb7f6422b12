#include "mtae/prototypes.hpp"

#include <array>
#include <fstream>

#include "mtae/errors.hpp"
#include "mtae/rng.hpp"

namespace mtae::proto {

namespace {

// category 14 is the whitespace sentence
const std::array<PrototypeTemplate, 14> kTemplates = {{
    {1, "The +N is +A."},
    {2, "The +N +Vs."},
    {3, "The +N has a +N."},
    {4, "The +N +Vs a +N."},
    {5, "The +N +Vs +D."},
    {6, "No +N ever +Vs."},
    {7, "Are +Ns +A?"},
    {8, "The +Ns of +N +D +V the +A +N, but some +Ns still +V their +N."},
    {9, "In the +N of a +A +N, the +N will +V the +N of +Ving the +N."},
    {10, "+Ns +V the +A +N of +Ns +Ving on the +N."},
    {11, "In the +N of +N, +Ns would rather +V without +N than +V any +A +Ns."},
    {12, "+N +Vs in order to +V on a +N."},
    {13, "+A +Ns often +V like +Ns."},
    {14, " "},
}};

const std::string& pick(const std::vector<std::string>& list, const char* what, Rng& rng) {
    if (list.empty()) throw GrammarError(std::string("prototypes: ") + what + " list is empty");
    return list[rng.below(list.size())];
}

const corpus::VerbEntry& pick_verb(const corpus::SyntheticGrammar& g, Rng& rng) {
    if (g.verbs.empty()) throw GrammarError("prototypes: verb list is empty");
    return g.verbs[rng.below(g.verbs.size())];
}

// longest placeholder first so +Ving does not parse as +V + "ing"
std::string instantiate(const std::string& pattern, const corpus::SyntheticGrammar& g, Rng& rng) {
    std::string out;
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] != '+') {
            out += pattern[i++];
            continue;
        }
        auto matches = [&](std::string_view ph) {
            return pattern.compare(i, ph.size(), ph) == 0;
        };
        if (matches("+Ving")) {
            out += corpus::gerund(pick_verb(g, rng).en);
            i += 5;
        } else if (matches("+Vs")) {
            out += corpus::third_person(pick_verb(g, rng).en);
            i += 3;
        } else if (matches("+V")) {
            out += pick_verb(g, rng).en;
            i += 2;
        } else if (matches("+Ns")) {
            out += corpus::plural_noun(pick(g.nouns, "noun", rng));
            i += 3;
        } else if (matches("+N")) {
            out += pick(g.nouns, "noun", rng);
            i += 2;
        } else if (matches("+A")) {
            out += pick(g.adjectives, "adjective", rng);
            i += 2;
        } else if (matches("+D")) {
            out += pick(g.adverbs, "adverb", rng);
            i += 2;
        } else {
            out += pattern[i++];
        }
    }
    return out;
}

}  // namespace

std::span<const PrototypeTemplate> prototype_templates() { return kTemplates; }

std::vector<LabeledSentence> generate_prototype_sentences(std::uint64_t seed,
                                                          std::size_t per_category,
                                                          const corpus::SyntheticGrammar& grammar) {
    if (per_category == 0)
        throw InputError("generate_prototype_sentences: per_category must be at least 1");
    Rng rng(seed);
    std::vector<LabeledSentence> out;
    out.reserve(kTemplates.size() * per_category);
    for (const PrototypeTemplate& t : kTemplates) {
        for (std::size_t k = 0; k < per_category; ++k) {
            if (t.category == 14) {
                out.push_back({t.pattern, t.category});
            } else {
                out.push_back({instantiate(t.pattern, grammar, rng), t.category});
            }
        }
    }
    return out;
}

std::vector<LabeledSentence> generate_prototype_sentences(std::uint64_t seed,
                                                          std::size_t per_category) {
    return generate_prototype_sentences(seed, per_category, corpus::SyntheticGrammar::standard());
}

void save_prototypes_tsv(const std::filesystem::path& path,
                         std::span<const LabeledSentence> sentences) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write prototypes file '" + path.string() + "'");
    out << "category\tsentence\n";
    for (const LabeledSentence& s : sentences) out << s.category << '\t' << s.text << '\n';
}

}  // namespace mtae::proto
