#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <map>
#include <doctest.h>

#include <regex>
#include <set>

#include "mtae/corpus.hpp"
#include "mtae/errors.hpp"
#include "mtae/prototypes.hpp"

using namespace mtae;
using namespace mtae::proto;

namespace {

corpus::SyntheticGrammar pinned_grammar() {
    corpus::SyntheticGrammar g;
    g.nouns = {"dog"};
    g.noun_lexicon = {{"dog", {"Hund", "chien"}}};
    g.verbs = {{"bark", "bellt", "bellen", "aboie", "aboient", "aboyer"}};
    g.adjectives = {"red"};
    g.adjective_lexicon = {{"red", {"rot", "rouge"}}};
    g.adverbs = {"often"};
    g.adverb_lexicon = {{"often", {"oft", "souvent"}}};
    g.object_determiners = {"the"};
    return g;
}

// placeholders -> word-class alternations, everything else quoted
std::string template_regex(const std::string& pattern, const corpus::SyntheticGrammar& g) {
    auto alternation = [](const std::vector<std::string>& words) {
        std::string alt = "(";
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (i) alt += '|';
            alt += words[i];
        }
        return alt + ")";
    };
    std::vector<std::string> verbs, verbs_s, verbs_ing, plurals;
    for (const auto& v : g.verbs) {
        verbs.push_back(v.en);
        verbs_s.push_back(corpus::third_person(v.en));
        verbs_ing.push_back(corpus::gerund(v.en));
    }
    for (const auto& n : g.nouns) plurals.push_back(corpus::plural_noun(n));

    std::string out;
    std::size_t i = 0;
    while (i < pattern.size()) {
        auto matches = [&](std::string_view ph) {
            return pattern.compare(i, ph.size(), ph) == 0;
        };
        if (matches("+Ving")) {
            out += alternation(verbs_ing);
            i += 5;
        } else if (matches("+Vs")) {
            out += alternation(verbs_s);
            i += 3;
        } else if (matches("+V")) {
            out += alternation(verbs);
            i += 2;
        } else if (matches("+Ns")) {
            out += alternation(plurals);
            i += 3;
        } else if (matches("+N")) {
            out += alternation(g.nouns);
            i += 2;
        } else if (matches("+A")) {
            out += alternation(g.adjectives);
            i += 2;
        } else if (matches("+D")) {
            out += alternation(g.adverbs);
            i += 2;
        } else {
            char c = pattern[i++];
            if (c == '.' || c == '?') out += '\\';
            out += c;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("fourteen templates ship, category 14 is whitespace") {
    auto templates = prototype_templates();
    REQUIRE(templates.size() == 14);
    for (std::size_t i = 0; i < 14; ++i) CHECK(templates[i].category == i + 1);
    CHECK(templates[0].pattern == "The +N is +A.");
    CHECK(templates[6].pattern == "Are +Ns +A?");
    CHECK(templates[13].pattern == " ");
}

TEST_CASE("category 1 with pinned words") {
    auto sentences = generate_prototype_sentences(3, 2, pinned_grammar());
    REQUIRE(sentences.size() == 28);
    CHECK(sentences[0].text == "The dog is red.");
    CHECK(sentences[0].category == 1);
    CHECK(sentences[1].text == "The dog is red.");
}

TEST_CASE("category 14 always emits the whitespace sentence") {
    auto sentences = generate_prototype_sentences(5, 4);
    for (const auto& s : sentences)
        if (s.category == 14) CHECK(s.text == " ");
}

TEST_CASE("pinned grammar fixes every category") {
    auto sentences = generate_prototype_sentences(1, 1, pinned_grammar());
    REQUIRE(sentences.size() == 14);
    CHECK(sentences[1].text == "The dog barks.");                 // 2
    CHECK(sentences[2].text == "The dog has a dog.");             // 3
    CHECK(sentences[3].text == "The dog barks a dog.");           // 4
    CHECK(sentences[4].text == "The dog barks often.");           // 5
    CHECK(sentences[5].text == "No dog ever barks.");             // 6
    CHECK(sentences[6].text == "Are dogs red?");                  // 7
    CHECK(sentences[7].text ==
          "The dogs of dog often bark the red dog, but some dogs still bark their dog.");  // 8
    CHECK(sentences[8].text ==
          "In the dog of a red dog, the dog will bark the dog of barking the dog.");  // 9
    CHECK(sentences[9].text == "dogs bark the red dog of dogs barking on the dog.");  // 10
    CHECK(sentences[10].text ==
          "In the dog of dog, dogs would rather bark without dog than bark any red dogs.");  // 11
    CHECK(sentences[11].text == "dog barks in order to bark on a dog.");  // 12
    CHECK(sentences[12].text == "red dogs often bark like dogs.");        // 13
}

TEST_CASE("default volume is 14 x 100") {
    auto sentences = generate_prototype_sentences(11);
    CHECK(sentences.size() == 1400);
    std::map<std::size_t, std::size_t> per_cat;
    for (const auto& s : sentences) per_cat[s.category]++;
    for (std::size_t c = 1; c <= 14; ++c) CHECK(per_cat[c] == 100);
}

TEST_CASE("same seed reproduces the list") {
    auto a = generate_prototype_sentences(21, 10);
    auto b = generate_prototype_sentences(21, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
}

TEST_CASE("every sentence matches its template's regular expression") {
    const auto& g = corpus::SyntheticGrammar::standard();
    auto templates = prototype_templates();
    std::vector<std::regex> regexes;
    for (const auto& t : templates) regexes.emplace_back("^" + template_regex(t.pattern, g) + "$");

    auto sentences = generate_prototype_sentences(17, 25);
    for (const auto& s : sentences)
        CHECK(std::regex_match(s.text, regexes[s.category - 1]));
}

TEST_CASE("prototype characters are covered by a synthetic-corpus vocabulary") {
    auto corpus_tuples =
        corpus::generate_synthetic_corpus(corpus::SyntheticGrammar::standard(), 2000, 1);
    std::vector<std::string> texts;
    for (const auto& t : corpus_tuples) texts.push_back(t.input_en);
    corpus::Vocabulary v = corpus::Vocabulary::build_chars(texts);

    auto sentences = generate_prototype_sentences(9, 100);
    for (const auto& s : sentences) CHECK(v.covers(s.text));
}

TEST_CASE("empty word lists raise a grammar error") {
    corpus::SyntheticGrammar g;  // everything empty
    CHECK_THROWS_AS(generate_prototype_sentences(1, 1, g), GrammarError);
}

TEST_CASE("prototype TSV emission") {
    auto sentences = generate_prototype_sentences(2, 1, pinned_grammar());
    auto dir = std::filesystem::temp_directory_path() / "mtae_proto_tests";
    std::filesystem::create_directories(dir);
    auto p = dir / "protos.tsv";
    save_prototypes_tsv(p, sentences);

    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    CHECK(line == "category\tsentence");
    std::getline(in, line);
    CHECK(line == "1\tThe dog is red.");
}
