#include "mtae/corpus.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "mtae/errors.hpp"

namespace mtae::corpus {

std::string_view decoder_name(Decoder d) {
    switch (d) {
        case Decoder::Rep: return "REP";
        case Decoder::De: return "DE";
        case Decoder::Fr: return "FR";
        case Decoder::Pos: return "POS";
    }
    throw ConfigError("decoder_name: invalid decoder id");
}

Decoder parse_decoder(std::string_view name) {
    if (name == "REP") return Decoder::Rep;
    if (name == "DE") return Decoder::De;
    if (name == "FR") return Decoder::Fr;
    if (name == "POS") return Decoder::Pos;
    throw ConfigError("unknown decoder '" + std::string(name) + "' (expected REP, DE, FR or POS)");
}

std::string_view decoder_role(Decoder d) {
    switch (d) {
        case Decoder::Rep: return "en";
        case Decoder::De: return "de";
        case Decoder::Fr: return "fr";
        case Decoder::Pos: return "pos";
    }
    throw ConfigError("decoder_role: invalid decoder id");
}

// --- inflections -------------------------------------------------------------

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool wants_es(const std::string& w) {
    if (w.empty()) return false;
    char last = w.back();
    if (last == 's' || last == 'x' || last == 'z' || last == 'o') return true;
    if (w.size() >= 2) {
        std::string tail = w.substr(w.size() - 2);
        if (tail == "ch" || tail == "sh") return true;
    }
    return false;
}

}  // namespace

std::string plural_noun(const std::string& noun) {
    static const std::map<std::string, std::string> exceptions = {
        {"child", "children"}, {"mouse", "mice"}, {"foot", "feet"},
    };
    if (auto it = exceptions.find(noun); it != exceptions.end()) return it->second;
    if (noun.size() >= 2 && noun.back() == 'y' && !is_vowel(noun[noun.size() - 2]))
        return noun.substr(0, noun.size() - 1) + "ies";
    if (wants_es(noun)) return noun + "es";
    return noun + "s";
}

std::string third_person(const std::string& verb_base) {
    if (verb_base.size() >= 2 && verb_base.back() == 'y' && !is_vowel(verb_base[verb_base.size() - 2]))
        return verb_base.substr(0, verb_base.size() - 1) + "ies";
    if (wants_es(verb_base)) return verb_base + "es";
    return verb_base + "s";
}

std::string gerund(const std::string& verb_base) {
    static const std::map<std::string, std::string> exceptions = {
        {"run", "running"}, {"sit", "sitting"}, {"swim", "swimming"}, {"stop", "stopping"},
    };
    if (auto it = exceptions.find(verb_base); it != exceptions.end()) return it->second;
    if (verb_base.size() >= 2 && verb_base.back() == 'e' && verb_base[verb_base.size() - 2] != 'e')
        return verb_base.substr(0, verb_base.size() - 1) + "ing";
    return verb_base + "ing";
}

std::vector<std::string> word_tokens(std::string_view sentence) {
    auto is_punct = [](char c) {
        return c == '.' || c == ',' || c == '?' || c == '!' || c == ';' || c == ':';
    };
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < sentence.size()) {
        while (i < sentence.size() && sentence[i] == ' ') ++i;
        if (i >= sentence.size()) break;
        std::size_t end = i;
        while (end < sentence.size() && sentence[end] != ' ') ++end;
        std::string_view chunk = sentence.substr(i, end - i);
        std::size_t lead = 0;
        while (lead < chunk.size() && is_punct(chunk[lead])) {
            out.emplace_back(1, chunk[lead]);
            ++lead;
        }
        std::size_t tail = chunk.size();
        while (tail > lead && is_punct(chunk[tail - 1])) --tail;
        if (tail > lead) out.emplace_back(chunk.substr(lead, tail - lead));
        for (std::size_t p = tail; p < chunk.size(); ++p) out.emplace_back(1, chunk[p]);
        i = end;
    }
    return out;
}

// --- TSV ---------------------------------------------------------------------

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

std::optional<Decoder> column_decoder(const std::string& name) {
    if (name == "de") return Decoder::De;
    if (name == "fr") return Decoder::Fr;
    if (name == "pos") return Decoder::Pos;
    return std::nullopt;
}

}  // namespace

std::vector<ExampleTuple> load_parallel_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw FormatError("corpus '" + path.string() + "': missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_tabs(line);
    std::size_t en_col = header.size();
    std::vector<std::optional<Decoder>> col_decoder(header.size());
    std::set<std::string> seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (!seen.insert(name).second)
            throw FormatError("corpus header: duplicate column '" + name + "'");
        if (name == "en") {
            en_col = c;
        } else {
            auto d = column_decoder(name);
            if (!d) throw FormatError("corpus header: unknown column '" + name + "'");
            col_decoder[c] = d;
        }
    }
    if (en_col == header.size()) throw FormatError("corpus header: mandatory column 'en' missing");

    std::vector<ExampleTuple> tuples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields = split_tabs(line);
        if (fields.size() != header.size())
            throw ParseError("corpus line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        ExampleTuple t;
        t.input_en = fields[en_col];
        t.targets[Decoder::Rep] = t.input_en;
        for (std::size_t c = 0; c < fields.size(); ++c)
            if (col_decoder[c]) t.targets[*col_decoder[c]] = fields[c];
        tuples.push_back(std::move(t));
    }
    return tuples;
}

void save_parallel_corpus(const std::filesystem::path& path, std::span<const ExampleTuple> tuples,
                          std::span<const Decoder> columns) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file '" + path.string() + "'");

    std::string header = "en";
    for (Decoder d : columns) {
        if (d == Decoder::Rep) continue;  // implied by the en column
        header += '\t';
        header += decoder_role(d);
    }
    out << header << '\n';

    auto check_field = [](const std::string& s) {
        if (s.find('\t') != std::string::npos || s.find('\n') != std::string::npos)
            throw DataError("corpus field contains a tab or newline: '" + s + "'");
    };
    for (const ExampleTuple& t : tuples) {
        check_field(t.input_en);
        out << t.input_en;
        for (Decoder d : columns) {
            if (d == Decoder::Rep) continue;
            const std::string* tgt = t.target(d);
            if (!tgt)
                throw DataError("tuple lacks a " + std::string(decoder_name(d)) +
                                " target required by the column list");
            check_field(*tgt);
            out << '\t' << *tgt;
        }
        out << '\n';
    }
}

// --- synthetic generation ----------------------------------------------------

namespace {

std::string capitalized(std::string w) {
    if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return w;
}

const std::string& pick(const std::vector<std::string>& list, const char* what, Rng& rng) {
    if (list.empty()) throw GrammarError(std::string("grammar: ") + what + " list is empty");
    return list[rng.below(list.size())];
}

const VerbEntry& pick_verb(const SyntheticGrammar& g, Rng& rng) {
    if (g.verbs.empty()) throw GrammarError("grammar: verb list is empty");
    return g.verbs[rng.below(g.verbs.size())];
}

const LexiconEntry& lex(const std::map<std::string, LexiconEntry>& table, const std::string& word) {
    auto it = table.find(word);
    if (it == table.end()) throw GrammarError("grammar: no lexicon entry for '" + word + "'");
    return it->second;
}

std::string de_plural(const std::string& de_noun) {
    return de_noun.back() == 'e' ? de_noun + "n" : de_noun + "en";
}

std::string fr_plural(const std::string& fr_noun) {
    char last = fr_noun.back();
    return (last == 's' || last == 'x') ? fr_noun : fr_noun + "s";
}

// English surface plus aligned POS tags. Punctuation attaches to the
// preceding word in the text but gets its own tag.
struct EnBuilder {
    std::string text;
    std::vector<std::string> tags;

    void word(std::string_view w, std::string_view tag) {
        if (!text.empty()) text += ' ';
        text += w;
        tags.emplace_back(tag);
    }
    void punct(std::string_view p) {
        text += p;
        tags.emplace_back("PUNCT");
    }
    std::string pos() const {
        std::string out;
        for (std::size_t i = 0; i < tags.size(); ++i) {
            if (i) out += ' ';
            out += tags[i];
        }
        return out;
    }
};

struct Slots {
    const SyntheticGrammar& g;
    Rng& rng;

    struct Noun {
        std::string en, de, fr;
    };
    Noun noun() {
        const std::string& n = pick(g.nouns, "noun", rng);
        const LexiconEntry& e = lex(g.noun_lexicon, n);
        return {n, e.de, e.fr};
    }
    std::pair<std::string, LexiconEntry> adjective() {
        const std::string& a = pick(g.adjectives, "adjective", rng);
        return {a, lex(g.adjective_lexicon, a)};
    }
    std::pair<std::string, LexiconEntry> adverb() {
        const std::string& a = pick(g.adverbs, "adverb", rng);
        return {a, lex(g.adverb_lexicon, a)};
    }
    const VerbEntry& verb() { return pick_verb(g, rng); }
    // "the" -> den/le, "a" -> einen/un
    struct Det {
        std::string en, de, fr;
    };
    Det object_det() {
        const std::string& d = pick(g.object_determiners, "determiner", rng);
        if (d == "a") return {d, "einen", "un"};
        return {d, "den", "le"};
    }
};

using TemplateFn = ExampleTuple (*)(Slots&);

ExampleTuple finish(EnBuilder& en, std::string de, std::string fr) {
    ExampleTuple t;
    t.input_en = en.text;
    t.targets[Decoder::Rep] = en.text;
    t.targets[Decoder::De] = std::move(de);
    t.targets[Decoder::Fr] = std::move(fr);
    t.targets[Decoder::Pos] = en.pos();
    return t;
}

// The dog barks.
ExampleTuple t_intransitive(Slots& s) {
    auto n = s.noun();
    const VerbEntry& v = s.verb();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n.en, "NOUN");
    en.word(third_person(v.en), "VERB");
    en.punct(".");
    return finish(en, "Der " + n.de + " " + v.de_third + ".",
                  "Le " + n.fr + " " + v.fr_third + ".");
}

// The dog barks loudly.
ExampleTuple t_intransitive_adverb(Slots& s) {
    auto n = s.noun();
    const VerbEntry& v = s.verb();
    auto [adv, advl] = s.adverb();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n.en, "NOUN");
    en.word(third_person(v.en), "VERB");
    en.word(adv, "ADV");
    en.punct(".");
    return finish(en, "Der " + n.de + " " + v.de_third + " " + advl.de + ".",
                  "Le " + n.fr + " " + v.fr_third + " " + advl.fr + ".");
}

// The cat paints the house. / ... a house.
ExampleTuple t_transitive(Slots& s) {
    auto n1 = s.noun();
    const VerbEntry& v = s.verb();
    auto det = s.object_det();
    auto n2 = s.noun();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n1.en, "NOUN");
    en.word(third_person(v.en), "VERB");
    en.word(det.en, "DET");
    en.word(n2.en, "NOUN");
    en.punct(".");
    return finish(en,
                  "Der " + n1.de + " " + v.de_third + " " + det.de + " " + n2.de + ".",
                  "Le " + n1.fr + " " + v.fr_third + " " + det.fr + " " + n2.fr + ".");
}

// The cat paints the old house.  (French places the adjective after the noun)
ExampleTuple t_transitive_adjective(Slots& s) {
    auto n1 = s.noun();
    const VerbEntry& v = s.verb();
    auto det = s.object_det();
    auto [adj, adjl] = s.adjective();
    auto n2 = s.noun();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n1.en, "NOUN");
    en.word(third_person(v.en), "VERB");
    en.word(det.en, "DET");
    en.word(adj, "ADJ");
    en.word(n2.en, "NOUN");
    en.punct(".");
    return finish(en,
                  "Der " + n1.de + " " + v.de_third + " " + det.de + " " + adjl.de + " " +
                      n2.de + ".",
                  "Le " + n1.fr + " " + v.fr_third + " " + det.fr + " " + n2.fr + " " + adjl.fr +
                      ".");
}

// The tree is green.
ExampleTuple t_copula(Slots& s) {
    auto n = s.noun();
    auto [adj, adjl] = s.adjective();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n.en, "NOUN");
    en.word("is", "VERB");
    en.word(adj, "ADJ");
    en.punct(".");
    return finish(en, "Der " + n.de + " ist " + adjl.de + ".",
                  "Le " + n.fr + " est " + adjl.fr + ".");
}

// The farmer has a horse.
ExampleTuple t_have(Slots& s) {
    auto n1 = s.noun();
    auto n2 = s.noun();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n1.en, "NOUN");
    en.word("has", "VERB");
    en.word("a", "DET");
    en.word(n2.en, "NOUN");
    en.punct(".");
    return finish(en, "Der " + n1.de + " hat einen " + n2.de + ".",
                  "Le " + n1.fr + " a un " + n2.fr + ".");
}

// The child does not sleep.
ExampleTuple t_negation(Slots& s) {
    auto n = s.noun();
    const VerbEntry& v = s.verb();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n.en, "NOUN");
    en.word("does", "VERB");
    en.word("not", "ADV");
    en.word(v.en, "VERB");
    en.punct(".");
    return finish(en, "Der " + n.de + " " + v.de_third + " nicht.",
                  "Le " + n.fr + " ne " + v.fr_third + " pas.");
}

// No bird ever sings.
ExampleTuple t_negation_no(Slots& s) {
    auto n = s.noun();
    const VerbEntry& v = s.verb();
    EnBuilder en;
    en.word("No", "DET");
    en.word(n.en, "NOUN");
    en.word("ever", "ADV");
    en.word(third_person(v.en), "VERB");
    en.punct(".");
    return finish(en, "Kein " + n.de + " " + v.de_third + " jemals.",
                  "Aucun " + n.fr + " ne " + v.fr_third + " jamais.");
}

// Does the doctor smile?  (German fronts the verb)
ExampleTuple t_question_does(Slots& s) {
    auto n = s.noun();
    const VerbEntry& v = s.verb();
    EnBuilder en;
    en.word("Does", "VERB");
    en.word("the", "DET");
    en.word(n.en, "NOUN");
    en.word(v.en, "VERB");
    en.punct("?");
    return finish(en, capitalized(v.de_third) + " der " + n.de + "?",
                  "Le " + n.fr + " " + v.fr_third + "?");
}

// Are foxes clever?
ExampleTuple t_question_are(Slots& s) {
    auto n = s.noun();
    auto [adj, adjl] = s.adjective();
    EnBuilder en;
    en.word("Are", "VERB");
    en.word(plural_noun(n.en), "NOUN");
    en.word(adj, "ADJ");
    en.punct("?");
    return finish(en, "Sind " + de_plural(n.de) + " " + adjl.de + "?",
                  "Les " + fr_plural(n.fr) + " sont " + adjl.fr + "?");
}

// The teacher knows that the dog chases the cat.
// (German moves the subordinate verb clause-final.)
ExampleTuple t_subordinate(Slots& s) {
    auto n1 = s.noun();
    auto n2 = s.noun();
    const VerbEntry& v = s.verb();
    auto det = s.object_det();
    auto n3 = s.noun();
    EnBuilder en;
    en.word("The", "DET");
    en.word(n1.en, "NOUN");
    en.word("knows", "VERB");
    en.word("that", "DET");
    en.word("the", "DET");
    en.word(n2.en, "NOUN");
    en.word(third_person(v.en), "VERB");
    en.word(det.en, "DET");
    en.word(n3.en, "NOUN");
    en.punct(".");
    return finish(en,
                  "Der " + n1.de + " weiss, dass der " + n2.de + " " + det.de + " " + n3.de +
                      " " + v.de_third + ".",
                  "Le " + n1.fr + " sait que le " + n2.fr + " " + v.fr_third + " " + det.fr +
                      " " + n3.fr + ".");
}

// In the garden, the child plays quietly.
ExampleTuple t_fronted_pp(Slots& s) {
    auto n1 = s.noun();
    auto n2 = s.noun();
    const VerbEntry& v = s.verb();
    auto [adv, advl] = s.adverb();
    EnBuilder en;
    en.word("In", "ADV");
    en.word("the", "DET");
    en.word(n1.en, "NOUN");
    en.punct(",");
    en.word("the", "DET");
    en.word(n2.en, "NOUN");
    en.word(third_person(v.en), "VERB");
    en.word(adv, "ADV");
    en.punct(".");
    return finish(en,
                  "In dem " + n1.de + " " + v.de_third + " der " + n2.de + " " + advl.de + ".",
                  "Dans le " + n1.fr + ", le " + n2.fr + " " + v.fr_third + " " + advl.fr + ".");
}

// The old singer waits.  (French: adjective after the subject noun)
ExampleTuple t_adjective_subject(Slots& s) {
    auto [adj, adjl] = s.adjective();
    auto n = s.noun();
    const VerbEntry& v = s.verb();
    EnBuilder en;
    en.word("The", "DET");
    en.word(adj, "ADJ");
    en.word(n.en, "NOUN");
    en.word(third_person(v.en), "VERB");
    en.punct(".");
    return finish(en, "Der " + adjl.de + " " + n.de + " " + v.de_third + ".",
                  "Le " + n.fr + " " + adjl.fr + " " + v.fr_third + ".");
}

constexpr std::array<TemplateFn, 13> kTemplates = {
    t_intransitive,         // 0
    t_intransitive_adverb,  // 1
    t_transitive,           // 2
    t_transitive_adjective, // 3
    t_copula,               // 4
    t_have,                 // 5
    t_negation,             // 6
    t_negation_no,          // 7
    t_question_does,        // 8
    t_question_are,         // 9
    t_subordinate,          // 10
    t_fronted_pp,           // 11
    t_adjective_subject,    // 12
};

}  // namespace

std::size_t template_count() { return kTemplates.size(); }

ExampleTuple instantiate_template(const SyntheticGrammar& grammar, std::size_t index, Rng& rng) {
    if (index >= kTemplates.size())
        throw InputError("instantiate_template: index " + std::to_string(index) +
                         " out of range");
    Slots slots{grammar, rng};
    return kTemplates[index](slots);
}

std::vector<ExampleTuple> generate_synthetic_corpus(const SyntheticGrammar& grammar,
                                                    std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InputError("generate_synthetic_corpus: n must be positive");
    grammar.validate();
    Rng rng(seed);
    std::vector<ExampleTuple> tuples;
    tuples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t idx = rng.below(kTemplates.size());
        tuples.push_back(instantiate_template(grammar, idx, rng));
    }
    return tuples;
}

std::pair<std::vector<ExampleTuple>, std::vector<ExampleTuple>> split_train_test(
    std::span<const ExampleTuple> tuples) {
    std::vector<ExampleTuple> train, test;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (splitmix64(i) % 10 == 0)
            test.push_back(tuples[i]);
        else
            train.push_back(tuples[i]);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace mtae::corpus
