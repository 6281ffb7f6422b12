#pragma once

#include <string>
#include <string_view>

namespace mtae::corpus {

// The four decoder tasks: input reconstruction, German translation,
// French translation and part-of-speech tag emission.
enum class Decoder { Rep, De, Fr, Pos };

// External spelling ("REP", "DE", "FR", "POS"), used in config files,
// checkpoints and reports.
std::string_view decoder_name(Decoder d);
Decoder parse_decoder(std::string_view name);  // ConfigError on unknown names

// Vocabulary role the decoder reads targets from ("en", "de", "fr", "pos").
// The replicating decoder shares the input-side "en" vocabulary.
std::string_view decoder_role(Decoder d);

}  // namespace mtae::corpus
