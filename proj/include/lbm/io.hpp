#pragma once

#include "lbm/chain.hpp"
#include "lbm/data_matrix.hpp"
#include "lbm/hyperparams.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lbm {

enum class HeaderMode { Auto, Yes, No };

/// How delimited text becomes a DataMatrix.
///
/// Without a mapping every cell must be a decimal number (U+2212 is accepted
/// as a minus sign). With a mapping, cells are looked up after trimming; an
/// empty cell is looked up as "".
struct IngestOptions {
  Variant variant = Variant::Binary;
  std::map<std::string, double> mapping;
  char delimiter = 0;  ///< 0: comma if the first data line has one, else tab
  HeaderMode header = HeaderMode::Auto;
};

/// Named mapping ("voting": y -> 1; n, ?, empty -> 0) or an explicit list
/// "tok=value;tok=value". An empty string gives no mapping.
std::map<std::string, double> parse_mapping(const std::string& spec);

DataMatrix ingest_text(const std::string& text, const IngestOptions& opts);
DataMatrix ingest(const std::filesystem::path& path, const IngestOptions& opts);

/// Non-empty, non-comment lines, trimmed.
std::vector<std::string> read_annotations(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Everything needed to reproduce a run.
struct RunConfig {
  std::string input;
  Variant variant = Variant::Binary;
  std::string mapping;        ///< see parse_mapping
  std::string delimiter = "auto";  ///< "auto", "comma" or "tab"
  std::string header = "auto";     ///< "auto", "yes" or "no"
  std::string annotations;    ///< optional row annotation file
  Hyperparams hyper;
  ChainConfig chain;
  MoveSchedule schedule;
  int chains = 1;             ///< chain c uses seed chain.seed + c - 1
  std::string output_dir;     ///< where artifacts go; not part of the serialised config

  IngestOptions ingest_options() const;
  void validate() const;
};

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

/// 64-bit FNV-1a of the serialised config, as 16 hex digits.
std::string config_digest(const RunConfig& cfg);

/// Trace text: '#' lines carry the digest, seed, bounds and column names;
/// one record per sample with 1-based labels separated by spaces.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, const std::string& digest, std::uint64_t seed, int k_max,
              int g_max);
  void write(const Sample& s);

 private:
  std::ostream& out_;
};

struct TraceFile {
  std::string digest;
  std::uint64_t seed = 0;
  int k_max = 0;
  int g_max = 0;
  std::vector<Sample> samples;
};

TraceFile read_trace(std::istream& in);
TraceFile read_trace(const std::filesystem::path& path);

/// Shortest round-tripping decimal form of a double.
std::string format_double(double v);

}  // namespace lbm
