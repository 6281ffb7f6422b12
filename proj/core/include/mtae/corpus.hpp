#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtae/decoders.hpp"
#include "mtae/rng.hpp"
#include "mtae/vocab.hpp"

namespace mtae::corpus {

// One aligned training record: the English input plus one target per task.
// The REP target is always the input sentence itself.
struct ExampleTuple {
    std::string input_en;
    std::map<Decoder, std::string> targets;

    const std::string* target(Decoder d) const {
        auto it = targets.find(d);
        return it == targets.end() ? nullptr : &it->second;
    }
};

// --- aligned-corpus TSV ----------------------------------------------------
//
// UTF-8, first line is a header of tab-separated column names drawn from
// {en, de, fr, pos} with "en" mandatory; one sentence per line, fields
// tab-separated, no escaping (tabs are forbidden inside sentences).

std::vector<ExampleTuple> load_parallel_corpus(const std::filesystem::path& path);
void save_parallel_corpus(const std::filesystem::path& path, std::span<const ExampleTuple> tuples,
                          std::span<const Decoder> columns);

// --- synthetic grammar -----------------------------------------------------

// Verb surface forms. English inflections are derived (third_person /
// gerund below); German and French forms are stored because mechanical
// suffixing produces unusable strings too often.
struct VerbEntry {
    std::string en;        // base: "bark"
    std::string de_third;  // "bellt"
    std::string de_inf;    // "bellen" (also the plural form)
    std::string fr_third;  // "aboie"
    std::string fr_plural; // "aboient"
    std::string fr_inf;    // "aboyer"
};

// Pseudo-translations for a noun/adjective/adverb.
struct LexiconEntry {
    std::string de;
    std::string fr;
};

// Word lists and lexicons backing both the corpus generator and the
// prototype sentences, plus clause templates realized in instantiate_template.
struct SyntheticGrammar {
    std::vector<std::string> nouns;
    std::vector<VerbEntry> verbs;
    std::vector<std::string> adjectives;
    std::vector<std::string> adverbs;
    std::vector<std::string> object_determiners;  // "the", "a"
    std::map<std::string, LexiconEntry> noun_lexicon;
    std::map<std::string, LexiconEntry> adjective_lexicon;
    std::map<std::string, LexiconEntry> adverb_lexicon;
    std::uint64_t seed = 0;  // default stream when the caller passes none

    // The embedded tables shared across the project.
    static const SyntheticGrammar& standard();

    // GrammarError when a required word class is empty or a lexicon is
    // missing an entry for a listed word.
    void validate() const;
};

// Naive English inflections with an embedded exceptions table.
std::string plural_noun(const std::string& noun);
std::string third_person(const std::string& verb_base);
std::string gerund(const std::string& verb_base);

// Splits a sentence on spaces, then peels leading/trailing punctuation
// marks off each chunk into their own tokens ("barks." -> "barks", ".").
std::vector<std::string> word_tokens(std::string_view sentence);

// Clause templates: subject-verb-object forms with optional adjectives and
// adverbs, a question, negations, and a subordinate clause (where the
// German rendering moves the verb clause-final).
std::size_t template_count();

// Draws words for template `index` and renders the full tuple (EN, REP,
// DE, FR, POS). Exposed so tests can pin individual templates.
ExampleTuple instantiate_template(const SyntheticGrammar& grammar, std::size_t index, Rng& rng);

// n tuples with templates and words drawn from `seed`. Deterministic:
// the same (grammar, n, seed) always yields the same corpus.
std::vector<ExampleTuple> generate_synthetic_corpus(const SyntheticGrammar& grammar,
                                                    std::size_t n, std::uint64_t seed);

// 90/10 split by hash of the tuple index; stable across runs.
std::pair<std::vector<ExampleTuple>, std::vector<ExampleTuple>> split_train_test(
    std::span<const ExampleTuple> tuples);

}  // namespace mtae::corpus
