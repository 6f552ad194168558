#include "lbm/run.hpp"

#include "lbm/errors.hpp"
#include "lbm/summary.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace lbm {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& file, Manifest& manifest) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + file.string());
  manifest.add(file);
}

void write_pmp(const fs::path& file, const PmpTable& t, const char* what, Manifest& manifest) {
  auto out = open_out(file);
  out << "# posterior model probabilities over " << what << ", " << t.total << " samples\n"
      << "# columns: K,G,visits,probability\n";
  for (const auto& e : t.entries)
    out << e.K << ',' << e.G << ',' << e.visits << ',' << format_double(e.probability) << '\n';
  finish(out, file, manifest);
}

void write_membership(const fs::path& file, const Eigen::MatrixXd& q, const std::vector<int>& assign,
                      const std::vector<std::string>& names, const MembershipSummary& ms,
                      Manifest& manifest) {
  auto out = open_out(file);
  const bool named = !names.empty();
  out << "# modal model K=" << ms.K << " G=" << ms.G << ", " << ms.draws << " draws\n"
      << "# columns: item," << (named ? "name," : "") << "cluster";
  for (Eigen::Index c = 0; c < q.cols(); ++c) out << ",q_" << c + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    out << i + 1 << ',' << (named ? names[i] + "," : "") << assign[i] + 1;
    for (Eigen::Index c = 0; c < q.cols(); ++c) out << ',' << format_double(q(i, c));
    out << '\n';
  }
  finish(out, file, manifest);
}

// Rows of a '#'-commented csv file as a map from column name to fields.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::runtime_error("column '" + name + "' missing");
    return static_cast<int>(it - columns.begin());
  }
};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_table(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  Table t;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# columns: ", 0) == 0) {
      t.columns = split_commas(line.substr(11));
      continue;
    }
    if (line.front() == '#') continue;
    t.rows.push_back(split_commas(line));
  }
  return t;
}

// 0-based labels of one axis from a file with "cluster" (and optionally "axis") columns.
std::vector<int> read_labels(const fs::path& file, const std::string& axis) {
  const Table t = read_table(file);
  const int c = t.index("cluster");
  const auto a = std::find(t.columns.begin(), t.columns.end(), "axis");
  const int ai = a == t.columns.end() ? -1 : static_cast<int>(a - t.columns.begin());
  std::vector<int> out;
  for (const auto& r : t.rows)
    if (ai < 0 || r.at(ai) == axis) out.push_back(std::stoi(r.at(c)) - 1);
  return out;
}

fs::path trace_path(const fs::path& dir) { return dir / "trace.csv"; }

}  // namespace

void Manifest::write(const std::string& status) const {
  std::ofstream out(dir_ / "manifest.txt", std::ios::binary);
  out << "# status: " << status << "\n";
  for (const auto& f : files_) out << fs::relative(f, dir_).generic_string() << '\n';
}

void write_acceptance(const fs::path& file, const AcceptanceReport& acc) {
  auto out = open_out(file);
  out << "# columns: move,axis,proposed,accepted,rate\n";
  const std::pair<const char*, const std::array<MoveCounter, 2>*> moves[] = {
      {"single", &acc.single}, {"reallocate", &acc.reallocate}, {"split", &acc.split}, {"combine", &acc.combine}};
  for (const auto& [name, counters] : moves)
    for (int a = 0; a < 2; ++a) {
      const MoveCounter& c = (*counters)[a];
      out << name << ',' << (a == 0 ? "rows" : "cols") << ',' << c.proposed << ',' << c.accepted << ','
          << format_double(c.rate()) << '\n';
    }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

void write_summaries(const fs::path& dir, const std::vector<Sample>& samples, const SummaryContext& ctx,
                     Manifest& manifest) {
  write_pmp(dir / "pmp.csv", pmp_table(samples), "sampled (K, G)", manifest);
  write_pmp(dir / "pmp_nonempty.csv", pmp_table(samples, true), "non-empty cluster counts", manifest);

  {
    const fs::path file = dir / "iat.csv";
    auto out = open_out(file);
    out << "# integrated autocorrelation time of the model index (K - 1) * " << ctx.g_max << " + G\n"
        << "# columns: tau,window,length,degenerate\n";
    if (samples.size() >= 100) {
      const IatEstimate e = model_iat(samples, ctx.g_max);
      out << format_double(e.tau) << ',' << e.window << ',' << e.length << ',' << (e.degenerate ? 1 : 0) << '\n';
    } else {
      out << "# fewer than 100 samples: not estimated\n";
    }
    finish(out, file, manifest);
  }

  const MembershipSummary ms = modal_summary(samples);
  write_membership(dir / "rows_membership.csv", ms.row_probs, ms.row_assign, {}, ms, manifest);
  write_membership(dir / "cols_membership.csv", ms.col_probs, ms.col_assign, ctx.column_names, ms, manifest);

  {
    const Sample& best = map_estimate(samples);
    const fs::path file = dir / "map.csv";
    auto out = open_out(file);
    out << "# MAP sample: iteration=" << best.iteration << " K=" << best.alloc.K << " G=" << best.alloc.G
        << " log_posterior=" << format_double(best.log_posterior) << "\n"
        << "# columns: axis,item,cluster\n";
    for (std::size_t i = 0; i < best.alloc.z.size(); ++i) out << "row," << i + 1 << ',' << best.alloc.z[i] + 1 << '\n';
    for (std::size_t j = 0; j < best.alloc.w.size(); ++j) out << "col," << j + 1 << ',' << best.alloc.w[j] + 1 << '\n';
    finish(out, file, manifest);
  }

  if (!ctx.annotations.empty()) {
    const Crosstab ct = crosstab(ms.row_assign, ms.K, ctx.annotations);
    const fs::path file = dir / "crosstab.csv";
    auto out = open_out(file);
    out << "# modal-model row clusters against row annotations\n# columns: cluster,size";
    for (const auto& c : ct.categories) out << ',' << c;
    out << '\n';
    for (int k = 0; k < ms.K; ++k) {
      out << k + 1 << ',' << ct.counts.row(k).sum();
      for (Eigen::Index c = 0; c < ct.counts.cols(); ++c) out << ',' << ct.counts(k, c);
      out << '\n';
    }
    finish(out, file, manifest);
  }
}

RunResult run_experiment(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.output_dir.empty()) throw std::invalid_argument("an output directory is required");
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  Manifest manifest(dir);

  try {
    const DataMatrix data = ingest(cfg.input, cfg.ingest_options());
    SummaryContext ctx;
    ctx.column_names = data.column_names;
    if (!cfg.annotations.empty()) {
      ctx.annotations = read_annotations(cfg.annotations);
      if (static_cast<int>(ctx.annotations.size()) != data.rows())
        throw std::invalid_argument("annotation file has " + std::to_string(ctx.annotations.size()) +
                                    " entries for " + std::to_string(data.rows()) + " rows");
    }

    RunResult result;
    result.resolved = cfg.hyper.resolved(data.rows(), data.cols());
    ctx.g_max = result.resolved.g_max;

    // The stored config carries the resolved bounds so it reproduces the run on its own.
    RunConfig stored = cfg;
    stored.hyper = result.resolved;
    const std::string digest = config_digest(stored);
    write_file(dir / "config.json", config_to_json(stored));
    manifest.add(dir / "config.json");
    if (log)
      *log << "data " << data.rows() << " x " << data.cols() << " (" << to_string(data.variant()) << "), "
           << cfg.chains << " chain(s), digest " << digest << "\n";

    result.chains.resize(cfg.chains);
    for (int c = 0; c < cfg.chains; ++c)
      result.chain_dirs.push_back(cfg.chains == 1 ? dir : dir / ("chain_" + std::to_string(c + 1)));
    for (const auto& d : result.chain_dirs) fs::create_directories(d);

    std::vector<std::exception_ptr> errors(cfg.chains);
    auto run_one = [&](int c) {
      try {
        ChainConfig cc = cfg.chain;
        cc.seed = cfg.chain.seed + static_cast<std::uint64_t>(c);
        std::ofstream out = open_out(trace_path(result.chain_dirs[c]));
        TraceWriter writer(out, digest, cc.seed, result.resolved.k_max, result.resolved.g_max);
        std::vector<Sample> kept;
        ChainTrace trace = run_chain(data, result.resolved, cc, cfg.schedule, [&](const Sample& s) {
          writer.write(s);
          kept.push_back(s);
        });
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + trace_path(result.chain_dirs[c]).string());
        trace.samples = std::move(kept);
        result.chains[c] = std::move(trace);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    };
    if (cfg.chains == 1) {
      run_one(0);
    } else {
      std::vector<std::thread> workers;
      for (int c = 0; c < cfg.chains; ++c) workers.emplace_back(run_one, c);
      for (auto& w : workers) w.join();
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    std::vector<Sample> pooled;
    for (int c = 0; c < cfg.chains; ++c) {
      const fs::path& cd = result.chain_dirs[c];
      manifest.add(trace_path(cd));
      write_acceptance(cd / "acceptance.csv", result.chains[c].acceptance);
      manifest.add(cd / "acceptance.csv");
      write_summaries(cd, result.chains[c].samples, ctx, manifest);
      if (cfg.chains > 1)
        pooled.insert(pooled.end(), result.chains[c].samples.begin(), result.chains[c].samples.end());
    }
    if (cfg.chains > 1) write_summaries(dir, pooled, ctx, manifest);
    manifest.write("complete");
    return result;
  } catch (const std::exception& e) {
    manifest.write(std::string("incomplete: ") + e.what());
    throw;
  }
}

double summarize_run(const fs::path& dir, int verify, std::ostream* log) {
  const RunConfig cfg = config_from_json(read_file(dir / "config.json"));
  const DataMatrix data = ingest(cfg.input, cfg.ingest_options());
  SummaryContext ctx;
  ctx.column_names = data.column_names;
  if (!cfg.annotations.empty()) ctx.annotations = read_annotations(cfg.annotations);
  const Hyperparams hp = cfg.hyper.resolved(data.rows(), data.cols());
  ctx.g_max = hp.g_max;
  const std::string digest = config_digest(cfg);

  std::vector<fs::path> chain_dirs;
  if (fs::exists(trace_path(dir))) {
    chain_dirs.push_back(dir);
  } else {
    for (int c = 1; fs::exists(trace_path(dir / ("chain_" + std::to_string(c)))); ++c)
      chain_dirs.push_back(dir / ("chain_" + std::to_string(c)));
  }
  if (chain_dirs.empty()) throw std::runtime_error("no trace.csv found under " + dir.string());

  Manifest manifest(dir);
  manifest.add(dir / "config.json");
  double worst = 0.0;
  std::vector<Sample> pooled;
  for (const auto& cd : chain_dirs) {
    TraceFile tf = read_trace(trace_path(cd));
    if (tf.samples.empty()) throw std::runtime_error("trace has no samples: " + trace_path(cd).string());
    if (tf.digest != digest && log) *log << "warning: " << trace_path(cd) << " was written under another config\n";
    const std::size_t count = tf.samples.size();
    const std::size_t checks = std::min<std::size_t>(static_cast<std::size_t>(std::max(verify, 0)), count);
    for (std::size_t v = 0; v < checks; ++v) {
      const Sample& s = tf.samples[checks == 1 ? count - 1 : v * (count - 1) / (checks - 1)];
      const double diff = std::abs(log_posterior(s.alloc, data, hp) - s.log_posterior);
      worst = std::max(worst, diff);
    }
    manifest.add(trace_path(cd));
    if (fs::exists(cd / "acceptance.csv")) manifest.add(cd / "acceptance.csv");
    write_summaries(cd, tf.samples, ctx, manifest);
    pooled.insert(pooled.end(), tf.samples.begin(), tf.samples.end());
  }
  if (chain_dirs.size() > 1) write_summaries(dir, pooled, ctx, manifest);
  manifest.write("summaries rewritten");
  if (log) *log << "verified stored log posteriors, largest discrepancy " << worst << "\n";
  return worst;
}

void write_simulation(const fs::path& dir, const SimSpec& spec, const SimResult& sim) {
  fs::create_directories(dir);
  {
    std::ostringstream out;
    const auto& y = sim.data.values();
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.cols(); ++j) out << (j ? "," : "") << static_cast<int>(y(i, j));
      out << '\n';
    }
    write_file(dir / "data.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "# columns: axis,item,cluster\n";
    for (std::size_t i = 0; i < sim.z.size(); ++i) out << "row," << i + 1 << ',' << sim.z[i] + 1 << '\n';
    for (std::size_t j = 0; j < sim.w.size(); ++j) out << "col," << j + 1 << ',' << sim.w[j] + 1 << '\n';
    write_file(dir / "truth.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "# transformed block probabilities, K rows by G columns\n";
    for (Eigen::Index k = 0; k < sim.theta.rows(); ++k) {
      for (Eigen::Index g = 0; g < sim.theta.cols(); ++g) out << (g ? "," : "") << format_double(sim.theta(k, g));
      out << '\n';
    }
    write_file(dir / "theta.csv", out.str());
  }
  nlohmann::json j = {{"n", spec.n},   {"m", spec.m},       {"K", spec.K},
                      {"G", spec.G},   {"a", spec.a},       {"b", spec.b},
                      {"seed", spec.seed}, {"scramble", spec.scramble}};
  if (spec.theta_source) {
    nlohmann::json src = nlohmann::json::array();
    for (Eigen::Index k = 0; k < spec.theta_source->rows(); ++k) {
      std::vector<double> row(spec.theta_source->cols());
      for (Eigen::Index g = 0; g < spec.theta_source->cols(); ++g) row[g] = (*spec.theta_source)(k, g);
      src.push_back(row);
    }
    j["theta_source"] = src;
  }
  write_file(dir / "sim.json", j.dump(2) + "\n");
}

Evaluation evaluate_run(const fs::path& truth_dir, const fs::path& run_dir) {
  const std::vector<int> zt = read_labels(truth_dir / "truth.csv", "row");
  const std::vector<int> wt = read_labels(truth_dir / "truth.csv", "col");
  const std::vector<int> zr = read_labels(run_dir / "rows_membership.csv", "");
  const std::vector<int> wr = read_labels(run_dir / "cols_membership.csv", "");
  const std::vector<int> zm = read_labels(run_dir / "map.csv", "row");
  const std::vector<int> wm = read_labels(run_dir / "map.csv", "col");
  Evaluation ev;
  ev.ari_rows = adjusted_rand_index(zt, zr);
  ev.ari_cols = adjusted_rand_index(wt, wr);
  ev.map_ari_rows = adjusted_rand_index(zt, zm);
  ev.map_ari_cols = adjusted_rand_index(wt, wm);
  std::ostringstream out;
  out << "# adjusted Rand index against " << (truth_dir / "truth.csv").generic_string() << "\n"
      << "# columns: estimate,axis,ari\n"
      << "modal,rows," << format_double(ev.ari_rows) << "\n"
      << "modal,cols," << format_double(ev.ari_cols) << "\n"
      << "map,rows," << format_double(ev.map_ari_rows) << "\n"
      << "map,cols," << format_double(ev.map_ari_cols) << "\n";
  write_file(run_dir / "evaluation.csv", out.str());
  return ev;
}

}  // namespace lbm
