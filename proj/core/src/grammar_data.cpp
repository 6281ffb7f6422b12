#include "mtae/corpus.hpp"
#include "mtae/errors.hpp"

namespace mtae::corpus {

// Fixed word tables. The pseudo-translations are rule-based rather than
// natural German/French: the experiments need a systematic second mapping
// per word, not linguistic fidelity. Everything is ASCII so character
// vocabularies stay small and golden files diff cleanly.
//
// Together the lists cover every letter a-z, which keeps any sentence
// assembled from them (plus the fixed template words) inside the character
// vocabulary of a generated corpus.

namespace {

SyntheticGrammar make_standard() {
    SyntheticGrammar g;

    g.nouns = {
        "dog",     "cat",    "fox",     "house",  "tree",     "bird",   "river",   "child",
        "teacher", "garden", "city",    "book",   "horse",    "table",  "mountain", "farmer",
        "doctor",  "street", "window",  "flower", "forest",   "island", "painter", "market",
        "bridge",  "castle", "village", "singer", "valley",   "harbor", "zebra",
    };
    g.noun_lexicon = {
        {"dog", {"Hund", "chien"}},        {"cat", {"Katze", "chat"}},
        {"fox", {"Fuchs", "renard"}},      {"house", {"Haus", "maison"}},
        {"tree", {"Baum", "arbre"}},       {"bird", {"Vogel", "oiseau"}},
        {"river", {"Fluss", "riviere"}},   {"child", {"Kind", "enfant"}},
        {"teacher", {"Lehrer", "professeur"}}, {"garden", {"Garten", "jardin"}},
        {"city", {"Stadt", "ville"}},      {"book", {"Buch", "livre"}},
        {"horse", {"Pferd", "cheval"}},    {"table", {"Tisch", "table"}},
        {"mountain", {"Berg", "montagne"}}, {"farmer", {"Bauer", "fermier"}},
        {"doctor", {"Arzt", "medecin"}},   {"street", {"Strasse", "rue"}},
        {"window", {"Fenster", "fenetre"}}, {"flower", {"Blume", "fleur"}},
        {"forest", {"Wald", "foret"}},     {"island", {"Insel", "ile"}},
        {"painter", {"Maler", "peintre"}}, {"market", {"Markt", "marche"}},
        {"bridge", {"Bruecke", "pont"}},   {"castle", {"Schloss", "chateau"}},
        {"village", {"Dorf", "village"}},  {"singer", {"Saenger", "chanteur"}},
        {"valley", {"Tal", "vallee"}},     {"harbor", {"Hafen", "port"}},
        {"zebra", {"Zebra", "zebre"}},
    };

    g.verbs = {
        {"bark", "bellt", "bellen", "aboie", "aboient", "aboyer"},
        {"jump", "springt", "springen", "saute", "sautent", "sauter"},
        {"run", "rennt", "rennen", "court", "courent", "courir"},
        {"sing", "singt", "singen", "chante", "chantent", "chanter"},
        {"dance", "tanzt", "tanzen", "danse", "dansent", "danser"},
        {"sleep", "schlaft", "schlafen", "dort", "dorment", "dormir"},
        {"walk", "geht", "gehen", "marche", "marchent", "marcher"},
        {"talk", "spricht", "sprechen", "parle", "parlent", "parler"},
        {"play", "spielt", "spielen", "joue", "jouent", "jouer"},
        {"work", "arbeitet", "arbeiten", "travaille", "travaillent", "travailler"},
        {"paint", "malt", "malen", "peint", "peignent", "peindre"},
        {"cook", "kocht", "kochen", "cuisine", "cuisinent", "cuisiner"},
        {"read", "liest", "lesen", "lit", "lisent", "lire"},
        {"travel", "reist", "reisen", "voyage", "voyagent", "voyager"},
        {"listen", "lauscht", "lauschen", "ecoute", "ecoutent", "ecouter"},
        {"wander", "wandert", "wandern", "erre", "errent", "errer"},
        {"whisper", "fluestert", "fluestern", "chuchote", "chuchotent", "chuchoter"},
        {"wait", "wartet", "warten", "attend", "attendent", "attendre"},
        {"dream", "traumt", "traumen", "reve", "revent", "rever"},
        {"smile", "lachelt", "lacheln", "sourit", "sourient", "sourire"},
    };

    g.adjectives = {
        "red",   "big",  "small", "old",  "young", "happy",  "quiet", "bright",
        "green", "tall", "warm",  "cold", "soft",  "clever", "lazy",
    };
    g.adjective_lexicon = {
        {"red", {"rot", "rouge"}},       {"big", {"gross", "grand"}},
        {"small", {"klein", "petit"}},   {"old", {"alt", "vieux"}},
        {"young", {"jung", "jeune"}},    {"happy", {"froh", "heureux"}},
        {"quiet", {"still", "calme"}},   {"bright", {"hell", "brillant"}},
        {"green", {"gruen", "vert"}},    {"tall", {"hoch", "haut"}},
        {"warm", {"warm", "chaud"}},     {"cold", {"kalt", "froid"}},
        {"soft", {"weich", "doux"}},     {"clever", {"klug", "malin"}},
        {"lazy", {"faul", "paresseux"}},
    };

    g.adverbs = {
        "quickly", "slowly",  "often",  "always", "never",
        "quietly", "happily", "rarely", "gently", "proudly",
    };
    g.adverb_lexicon = {
        {"quickly", {"schnell", "vite"}},   {"slowly", {"langsam", "lentement"}},
        {"often", {"oft", "souvent"}},      {"always", {"immer", "toujours"}},
        {"never", {"nie", "jamais"}},       {"quietly", {"leise", "doucement"}},
        {"happily", {"gern", "gaiement"}},  {"rarely", {"selten", "rarement"}},
        {"gently", {"sanft", "gentiment"}}, {"proudly", {"stolz", "fierement"}},
    };

    g.object_determiners = {"the", "a"};
    return g;
}

}  // namespace

const SyntheticGrammar& SyntheticGrammar::standard() {
    static const SyntheticGrammar g = make_standard();
    return g;
}

void SyntheticGrammar::validate() const {
    if (nouns.empty()) throw GrammarError("grammar: noun list is empty");
    if (verbs.empty()) throw GrammarError("grammar: verb list is empty");
    if (adjectives.empty()) throw GrammarError("grammar: adjective list is empty");
    if (adverbs.empty()) throw GrammarError("grammar: adverb list is empty");
    if (object_determiners.empty()) throw GrammarError("grammar: determiner list is empty");
    for (const auto& n : nouns)
        if (!noun_lexicon.count(n))
            throw GrammarError("grammar: no lexicon entry for noun '" + n + "'");
    for (const auto& a : adjectives)
        if (!adjective_lexicon.count(a))
            throw GrammarError("grammar: no lexicon entry for adjective '" + a + "'");
    for (const auto& a : adverbs)
        if (!adverb_lexicon.count(a))
            throw GrammarError("grammar: no lexicon entry for adverb '" + a + "'");
}

}  // namespace mtae::corpus
