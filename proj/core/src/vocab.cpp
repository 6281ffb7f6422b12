#include "mtae/vocab.hpp"

#include <algorithm>
#include <set>

#include "mtae/errors.hpp"

namespace mtae::corpus {

std::vector<std::string> utf8_chars(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char b = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if (b >= 0xF0)
            len = 4;
        else if (b >= 0xE0)
            len = 3;
        else if (b >= 0xC0)
            len = 2;
        if (i + len > text.size()) len = 1;
        // continuation bytes must look like 10xxxxxx, otherwise fall back to
        // a single raw byte so no input is ever lost
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
                len = 1;
                break;
            }
        }
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

namespace {

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(' ', start);
        if (end == std::string_view::npos) end = text.size();
        if (end > start) out.emplace_back(text.substr(start, end - start));
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

}  // namespace

Vocabulary Vocabulary::build_chars(std::span<const std::string> texts) {
    std::set<std::string> seen;
    for (const auto& t : texts)
        for (auto& c : utf8_chars(t)) seen.insert(std::move(c));
    return from_symbols(Mode::chars, {seen.begin(), seen.end()});
}

Vocabulary Vocabulary::build_words(std::span<const std::string> texts) {
    std::set<std::string> seen;
    for (const auto& t : texts)
        for (auto& w : split_words(t)) seen.insert(std::move(w));
    return from_symbols(Mode::words, {seen.begin(), seen.end()});
}

Vocabulary Vocabulary::from_symbols(Mode mode, std::vector<std::string> symbols) {
    Vocabulary v;
    v.mode_ = mode;
    v.symbols_ = std::move(symbols);
    for (std::size_t i = 0; i < v.symbols_.size(); ++i) {
        auto [it, fresh] = v.index_.emplace(v.symbols_[i], kReserved + i);
        if (!fresh) throw ConfigError("vocabulary: duplicate symbol '" + v.symbols_[i] + "'");
    }
    return v;
}

std::optional<std::size_t> Vocabulary::id_of(std::string_view symbol) const {
    auto it = index_.find(symbol);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::symbol_of(std::size_t id) const {
    if (id < kReserved || id >= size())
        throw IndexError("vocabulary: id " + std::to_string(id) + " is not a data symbol");
    return symbols_[id - kReserved];
}

std::vector<std::string> Vocabulary::tokenize(std::string_view text) const {
    return mode_ == Mode::chars ? utf8_chars(text) : split_words(text);
}

std::vector<std::size_t> Vocabulary::encode(std::string_view text) const {
    std::vector<std::size_t> ids;
    for (const auto& tok : tokenize(text)) ids.push_back(id_of(tok).value_or(kUnk));
    return ids;
}

std::vector<std::size_t> Vocabulary::encode_strict(std::string_view text) const {
    std::vector<std::size_t> ids;
    for (const auto& tok : tokenize(text)) {
        auto id = id_of(tok);
        if (!id) throw VocabError("symbol '" + tok + "' is not in the vocabulary");
        ids.push_back(*id);
    }
    return ids;
}

bool Vocabulary::covers(std::string_view text) const {
    for (const auto& tok : tokenize(text))
        if (!id_of(tok)) return false;
    return true;
}

std::string Vocabulary::decode(std::span<const std::size_t> ids) const {
    std::string out;
    bool first = true;
    for (std::size_t id : ids) {
        if (id == kPad || id == kStart || id == kEnd) continue;
        if (mode_ == Mode::words && !first) out += ' ';
        if (id == kUnk)
            out += "\xEF\xBF\xBD";  // U+FFFD
        else
            out += symbol_of(id);
        first = false;
    }
    return out;
}

}  // namespace mtae::corpus
