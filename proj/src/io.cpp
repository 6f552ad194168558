#include "lbm/io.hpp"

#include "lbm/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lbm {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_comment_or_blank(std::string_view line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

// Replaces U+2212 MINUS SIGN with '-'.
std::string ascii_minus(std::string s) {
  static const std::string minus = "\xE2\x88\x92";
  for (auto pos = s.find(minus); pos != std::string::npos; pos = s.find(minus, pos + 1))
    s.replace(pos, minus.size(), "-");
  return s;
}

bool parse_number(const std::string& token, double& out) {
  const std::string s = ascii_minus(token);
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool convert(const std::string& token, const IngestOptions& opts, double& out) {
  if (!opts.mapping.empty()) {
    const auto it = opts.mapping.find(token);
    if (it == opts.mapping.end()) return false;
    out = it->second;
    return true;
  }
  return parse_number(token, out);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

std::map<std::string, double> parse_mapping(const std::string& spec) {
  if (spec.empty()) return {};
  if (spec == "voting") return {{"y", 1.0}, {"n", 0.0}, {"?", 0.0}, {"", 0.0}};
  std::map<std::string, double> out;
  for (const auto& item : split(spec, ';')) {
    const auto eq = item.rfind('=');
    double v = 0.0;
    if (eq == std::string::npos || !parse_number(trim(item.substr(eq + 1)), v))
      throw std::invalid_argument("mapping entries must look like token=value: '" + item + "'");
    out[trim(item.substr(0, eq))] = v;
  }
  return out;
}

DataMatrix ingest_text(const std::string& text, const IngestOptions& opts) {
  const std::vector<std::string> lines = lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && is_comment_or_blank(lines[first])) ++first;
  if (first == lines.size()) throw ParseError("input contains no data");

  char delim = opts.delimiter;
  if (delim == 0) delim = lines[first].find(',') != std::string::npos ? ',' : '\t';

  std::vector<std::string> header;
  {
    const auto fields = split(lines[first], delim);
    bool is_header = opts.header == HeaderMode::Yes;
    if (opts.header == HeaderMode::Auto) {
      double dummy = 0.0;
      for (const auto& f : fields)
        if (!convert(f, opts, dummy)) is_header = true;
    }
    if (is_header) {
      header = fields;
      ++first;
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t width = header.size();
  for (std::size_t l = first; l < lines.size(); ++l) {
    if (is_comment_or_blank(lines[l])) continue;
    const int line_no = static_cast<int>(l) + 1;
    const auto fields = split(lines[l], delim);
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    std::vector<double> row(width);
    for (std::size_t j = 0; j < width; ++j) {
      const int col_no = static_cast<int>(j) + 1;
      if (!convert(fields[j], opts, row[j]))
        throw ParseError((opts.mapping.empty() ? "not a number: '" : "unmapped token: '") + fields[j] + "'",
                         line_no, col_no);
      if (opts.variant == Variant::Binary && row[j] != 0.0 && row[j] != 1.0)
        throw ParseError("binary data must be 0 or 1, found '" + fields[j] + "'", line_no, col_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("input has a header but no data rows");

  RowMatrix values(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) values(i, j) = rows[i][j];
  DataMatrix data(std::move(values), opts.variant);
  data.column_names = header;
  return data;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

DataMatrix ingest(const std::filesystem::path& path, const IngestOptions& opts) {
  return ingest_text(read_file(path), opts);
}

std::vector<std::string> read_annotations(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const auto& line : lines_of(read_file(path)))
    if (!is_comment_or_blank(line)) out.push_back(trim(line));
  return out;
}

IngestOptions RunConfig::ingest_options() const {
  IngestOptions o;
  o.variant = variant;
  o.mapping = parse_mapping(mapping);
  if (delimiter == "comma")
    o.delimiter = ',';
  else if (delimiter == "tab")
    o.delimiter = '\t';
  else if (delimiter != "auto")
    throw std::invalid_argument("delimiter must be auto, comma or tab");
  if (header == "yes")
    o.header = HeaderMode::Yes;
  else if (header == "no")
    o.header = HeaderMode::No;
  else if (header != "auto")
    throw std::invalid_argument("header must be auto, yes or no");
  return o;
}

void RunConfig::validate() const {
  if (input.empty()) throw std::invalid_argument("an input file is required");
  if (!std::filesystem::exists(input)) throw std::invalid_argument("input not found: " + input);
  if (!annotations.empty() && !std::filesystem::exists(annotations))
    throw std::invalid_argument("annotation file not found: " + annotations);
  if (chains < 1) throw std::invalid_argument("at least one chain is required");
  ingest_options();
  hyper.validate();
  chain.validate();
  schedule.validate();
}

std::string config_to_json(const RunConfig& c) {
  const Hyperparams& h = c.hyper;
  json j = {
      {"input", c.input},
      {"variant", std::string(to_string(c.variant))},
      {"mapping", c.mapping},
      {"delimiter", c.delimiter},
      {"header", c.header},
      {"annotations", c.annotations},
      {"hyper",
       {{"alpha", h.alpha},
        {"beta", h.beta},
        {"bernoulli", {{"gamma", h.bernoulli.gamma}, {"delta", h.bernoulli.delta}}},
        {"gaussian",
         {{"xi", h.gaussian.xi},
          {"tau2", h.gaussian.tau2},
          {"delta", h.gaussian.delta},
          {"gamma", h.gaussian.gamma}}},
        {"k_max", h.k_max},
        {"g_max", h.g_max}}},
      {"chain",
       {{"iterations", c.chain.iterations},
        {"burn_in", c.chain.burn_in},
        {"thin", c.chain.thin},
        {"seed", c.chain.seed},
        {"init", c.chain.init == InitKind::Random ? "random" : "single"},
        {"init_k", c.chain.init_k},
        {"init_g", c.chain.init_g}}},
      {"schedule",
       {{"split_probability", c.schedule.split_probability},
        {"gibbs_fraction", c.schedule.gibbs_fraction}}},
      {"chains", c.chains},
  };
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunConfig c;
  c.input = j.at("input").get<std::string>();
  c.variant = variant_from_string(j.at("variant").get<std::string>());
  c.mapping = j.value("mapping", "");
  c.delimiter = j.value("delimiter", "auto");
  c.header = j.value("header", "auto");
  c.annotations = j.value("annotations", "");
  if (j.contains("hyper")) {
    const json& h = j["hyper"];
    c.hyper.alpha = h.value("alpha", c.hyper.alpha);
    c.hyper.beta = h.value("beta", c.hyper.beta);
    if (h.contains("bernoulli")) {
      c.hyper.bernoulli.gamma = h["bernoulli"].value("gamma", c.hyper.bernoulli.gamma);
      c.hyper.bernoulli.delta = h["bernoulli"].value("delta", c.hyper.bernoulli.delta);
    }
    if (h.contains("gaussian")) {
      const json& g = h["gaussian"];
      c.hyper.gaussian.xi = g.value("xi", c.hyper.gaussian.xi);
      c.hyper.gaussian.tau2 = g.value("tau2", c.hyper.gaussian.tau2);
      c.hyper.gaussian.delta = g.value("delta", c.hyper.gaussian.delta);
      c.hyper.gaussian.gamma = g.value("gamma", c.hyper.gaussian.gamma);
    }
    c.hyper.k_max = h.value("k_max", 0);
    c.hyper.g_max = h.value("g_max", 0);
  }
  if (j.contains("chain")) {
    const json& ch = j["chain"];
    c.chain.iterations = ch.value("iterations", c.chain.iterations);
    c.chain.burn_in = ch.value("burn_in", c.chain.burn_in);
    c.chain.thin = ch.value("thin", c.chain.thin);
    c.chain.seed = ch.value("seed", c.chain.seed);
    c.chain.init = ch.value("init", std::string("single")) == "random" ? InitKind::Random
                                                                      : InitKind::SingleCluster;
    c.chain.init_k = ch.value("init_k", 1);
    c.chain.init_g = ch.value("init_g", 1);
  }
  if (j.contains("schedule")) {
    c.schedule.split_probability = j["schedule"].value("split_probability", 0.5);
    c.schedule.gibbs_fraction = j["schedule"].value("gibbs_fraction", 1.0);
  }
  c.chains = j.value("chains", 1);
  return c;
}

std::string config_digest(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

TraceWriter::TraceWriter(std::ostream& out, const std::string& digest, std::uint64_t seed,
                         int k_max, int g_max)
    : out_(out) {
  out_ << "# lbm trace\n"
       << "# config_digest: " << digest << "\n"
       << "# seed: " << seed << "\n"
       << "# k_max: " << k_max << "\n"
       << "# g_max: " << g_max << "\n"
       << "# columns: iteration,K,G,k_nonempty,g_nonempty,log_posterior,z,w\n";
}

void TraceWriter::write(const Sample& s) {
  out_ << s.iteration << ',' << s.alloc.K << ',' << s.alloc.G << ',' << s.k_nonempty << ','
       << s.g_nonempty << ',' << format_double(s.log_posterior) << ',';
  for (std::size_t i = 0; i < s.alloc.z.size(); ++i) out_ << (i ? " " : "") << s.alloc.z[i] + 1;
  out_ << ',';
  for (std::size_t j = 0; j < s.alloc.w.size(); ++j) out_ << (j ? " " : "") << s.alloc.w[j] + 1;
  out_ << '\n';
}

TraceFile read_trace(std::istream& in) {
  TraceFile tf;
  int line_no = 0;
  auto labels = [&](const std::string& field, int col) {
    std::vector<int> out;
    std::istringstream ss(field);
    for (std::string tok; ss >> tok;) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 1)
        throw ParseError("bad label '" + tok + "'", line_no, col);
      out.push_back(v - 1);
    }
    return out;
  };
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#", 0) == 0) {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(line.substr(1, colon - 1));
      const std::string value = trim(line.substr(colon + 1));
      if (key == "config_digest") tf.digest = value;
      if (key == "seed") tf.seed = std::stoull(value);
      if (key == "k_max") tf.k_max = std::stoi(value);
      if (key == "g_max") tf.g_max = std::stoi(value);
      continue;
    }
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw ParseError("trace records have 8 fields", line_no);
    Sample s;
    try {
      s.iteration = std::stol(f[0]);
      s.alloc.K = std::stoi(f[1]);
      s.alloc.G = std::stoi(f[2]);
      s.k_nonempty = std::stoi(f[3]);
      s.g_nonempty = std::stoi(f[4]);
    } catch (const std::exception&) {
      throw ParseError("bad integer field in trace record", line_no);
    }
    if (!parse_number(f[5], s.log_posterior)) throw ParseError("bad log posterior", line_no, 6);
    s.alloc.z = labels(f[6], 7);
    s.alloc.w = labels(f[7], 8);
    tf.samples.push_back(std::move(s));
  }
  return tf;
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace(in);
}

}  // namespace lbm
