#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtae::corpus {

// Splits UTF-8 text into one string per code point. Bytes that do not form
// a valid sequence are passed through as single-byte symbols, so any input
// round-trips.
std::vector<std::string> utf8_chars(std::string_view text);

// Bijection between symbols and integer ids. Ids 0..3 are reserved for
// PAD, START, END and UNK; data symbols follow in sorted order.
//
// A vocabulary knows its tokenization: `chars` splits text into UTF-8
// characters (the sentence-side vocabularies), `words` splits on single
// spaces (the POS tag vocabulary).
class Vocabulary {
public:
    enum class Mode { chars, words };
    static constexpr std::size_t kPad = 0;
    static constexpr std::size_t kStart = 1;
    static constexpr std::size_t kEnd = 2;
    static constexpr std::size_t kUnk = 3;
    static constexpr std::size_t kReserved = 4;

    Vocabulary() = default;

    static Vocabulary build_chars(std::span<const std::string> texts);
    static Vocabulary build_words(std::span<const std::string> texts);
    static Vocabulary from_symbols(Mode mode, std::vector<std::string> symbols);

    Mode mode() const { return mode_; }
    std::size_t size() const { return kReserved + symbols_.size(); }
    const std::vector<std::string>& symbols() const { return symbols_; }

    std::optional<std::size_t> id_of(std::string_view symbol) const;
    const std::string& symbol_of(std::size_t id) const;  // data ids only

    std::vector<std::string> tokenize(std::string_view text) const;

    // Unknown symbols map to UNK.
    std::vector<std::size_t> encode(std::string_view text) const;
    // Unknown symbols raise VocabError naming the symbol.
    std::vector<std::size_t> encode_strict(std::string_view text) const;
    bool covers(std::string_view text) const;

    // Drops PAD/START/END, renders UNK as U+FFFD. Word-mode symbols are
    // joined with single spaces.
    std::string decode(std::span<const std::size_t> ids) const;

private:
    Mode mode_ = Mode::chars;
    std::vector<std::string> symbols_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace mtae::corpus
