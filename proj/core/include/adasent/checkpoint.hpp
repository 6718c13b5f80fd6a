#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "adasent/embedding.hpp"
#include "adasent/model.hpp"

namespace adasent {

inline constexpr int kCheckpointVersion = 1;

/// A trained model together with what is needed to use and reproduce it.
struct Checkpoint {
  Vocabulary vocab;
  ModelParams params;
  std::uint64_t seed = 0;
  /// key=value lines of the run configuration that produced it.
  std::string config_echo;
};

/// Text container: header, model config, config echo, vocabulary, then
/// every tensor with declared shape and hexadecimal floats (bit-exact).
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in, const std::string& source = "<stream>");

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Zero parameters with the shapes `config` implies for the given table size.
ModelParams zero_params(const ModelConfig& config, std::size_t word_dim, std::size_t vocab_size);

}  // namespace adasent
