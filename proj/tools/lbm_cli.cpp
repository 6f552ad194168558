#include "lbm/bem2.hpp"
#include "lbm/io.hpp"
#include "lbm/run.hpp"
#include "lbm/simulate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string default_output(const std::string& fallback) {
  const char* env = std::getenv("LBM_OUTPUT_DIR");
  return env && *env ? env : fallback;
}

// Options whose values are copied onto a config loaded with --config when given.
struct Overrides {
  std::vector<std::pair<CLI::Option*, std::function<void(lbm::RunConfig&, const lbm::RunConfig&)>>> items;

  template <class T>
  void add(CLI::App* app, const std::string& name, T lbm::RunConfig::*field, lbm::RunConfig& flags,
           const std::string& help) {
    items.emplace_back(app->add_option(name, flags.*field, help),
                       [field](lbm::RunConfig& dst, const lbm::RunConfig& src) { dst.*field = src.*field; });
  }

  template <class Get>
  void add_nested(CLI::App* app, const std::string& name, Get get, lbm::RunConfig& flags,
                  const std::string& help) {
    items.emplace_back(app->add_option(name, get(flags), help),
                       [get](lbm::RunConfig& dst, const lbm::RunConfig& src) {
                         get(dst) = get(const_cast<lbm::RunConfig&>(src));
                       });
  }

  void apply(lbm::RunConfig& dst, const lbm::RunConfig& src) const {
    for (const auto& [opt, copy] : items)
      if (opt->count() > 0) copy(dst, src);
  }
};

void add_data_options(CLI::App* app, lbm::RunConfig& flags, Overrides& ov, std::string& variant) {
  ov.add(app, "-i,--input", &lbm::RunConfig::input, flags, "delimited data file");
  ov.items.emplace_back(app->add_option("--variant", variant, "binary or continuous")->default_str("binary"),
                        [&variant](lbm::RunConfig& dst, const lbm::RunConfig&) {
                          dst.variant = lbm::variant_from_string(variant);
                        });
  ov.add(app, "--mapping", &lbm::RunConfig::mapping, flags, "token mapping: 'voting' or 'tok=v;tok=v'");
  ov.add(app, "--delimiter", &lbm::RunConfig::delimiter, flags, "auto, comma or tab");
  ov.add(app, "--header", &lbm::RunConfig::header, flags, "auto, yes or no");
}

void print_bem2(const lbm::Bem2Fit& fit) {
  std::set<int> rows(fit.row_assign.begin(), fit.row_assign.end());
  std::set<int> cols(fit.col_assign.begin(), fit.col_assign.end());
  std::cout << "criterion " << lbm::format_double(fit.criterion) << "\n"
            << "iterations " << fit.iterations << (fit.converged ? " (converged)" : " (iteration limit)") << "\n"
            << "restart " << fit.restart + 1 << "\n"
            << "used row clusters " << rows.size() << " of " << fit.state.K() << "\n"
            << "used column clusters " << cols.size() << " of " << fit.state.G() << "\n"
            << "hard log likelihood " << lbm::format_double(fit.hard_log_likelihood) << "\n"
            << "parameters " << fit.parameter_count << "\n"
            << "AIC3 " << lbm::format_double(fit.aic3) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collapsed latent block model: sampling, summaries, baseline and simulation"};
  app.require_subcommand(1);

  // run
  lbm::RunConfig flags;
  Overrides ov;
  std::string run_variant = "binary", init = "single", config_path;
  flags.output_dir = default_output("lbm_out");
  auto* run = app.add_subcommand("run", "sample the posterior and write traces and summaries");
  run->add_option("--config", config_path, "start from a config.json written by an earlier run");
  add_data_options(run, flags, ov, run_variant);
  ov.add(run, "--annotations", &lbm::RunConfig::annotations, flags, "one label per row, for a crosstab");
  ov.add_nested(run, "--alpha", [](lbm::RunConfig& c) -> double& { return c.hyper.alpha; }, flags, "row Dirichlet concentration");
  ov.add_nested(run, "--beta", [](lbm::RunConfig& c) -> double& { return c.hyper.beta; }, flags, "column Dirichlet concentration");
  ov.add_nested(run, "--beta-gamma", [](lbm::RunConfig& c) -> double& { return c.hyper.bernoulli.gamma; }, flags, "Beta prior first shape");
  ov.add_nested(run, "--beta-delta", [](lbm::RunConfig& c) -> double& { return c.hyper.bernoulli.delta; }, flags, "Beta prior second shape");
  ov.add_nested(run, "--xi", [](lbm::RunConfig& c) -> double& { return c.hyper.gaussian.xi; }, flags, "prior mean location");
  ov.add_nested(run, "--tau2", [](lbm::RunConfig& c) -> double& { return c.hyper.gaussian.tau2; }, flags, "prior mean scale");
  ov.add_nested(run, "--ig-delta", [](lbm::RunConfig& c) -> double& { return c.hyper.gaussian.delta; }, flags, "inverse-gamma shape (times 2)");
  ov.add_nested(run, "--ig-gamma", [](lbm::RunConfig& c) -> double& { return c.hyper.gaussian.gamma; }, flags, "inverse-gamma scale (times 2)");
  ov.add_nested(run, "--k-max", [](lbm::RunConfig& c) -> int& { return c.hyper.k_max; }, flags, "row cluster bound (0: min(50, n))");
  ov.add_nested(run, "--g-max", [](lbm::RunConfig& c) -> int& { return c.hyper.g_max; }, flags, "column cluster bound (0: min(50, m))");
  ov.add_nested(run, "--iterations", [](lbm::RunConfig& c) -> long& { return c.chain.iterations; }, flags, "sweeps including burn-in");
  ov.add_nested(run, "--burn-in", [](lbm::RunConfig& c) -> long& { return c.chain.burn_in; }, flags, "discarded sweeps");
  ov.add_nested(run, "--thin", [](lbm::RunConfig& c) -> long& { return c.chain.thin; }, flags, "keep every thin-th sweep");
  ov.add_nested(run, "--seed", [](lbm::RunConfig& c) -> std::uint64_t& { return c.chain.seed; }, flags, "RNG seed");
  ov.items.emplace_back(run->add_option("--init", init, "single or random")->check(CLI::IsMember({"single", "random"})),
                        [&init](lbm::RunConfig& dst, const lbm::RunConfig&) {
                          dst.chain.init = init == "random" ? lbm::InitKind::Random : lbm::InitKind::SingleCluster;
                        });
  ov.add_nested(run, "--init-k", [](lbm::RunConfig& c) -> int& { return c.chain.init_k; }, flags, "random start row clusters");
  ov.add_nested(run, "--init-g", [](lbm::RunConfig& c) -> int& { return c.chain.init_g; }, flags, "random start column clusters");
  ov.add_nested(run, "--split-prob", [](lbm::RunConfig& c) -> double& { return c.schedule.split_probability; }, flags, "split vs combine below the bound");
  ov.add_nested(run, "--gibbs-fraction", [](lbm::RunConfig& c) -> double& { return c.schedule.gibbs_fraction; }, flags, "share of Gibbs single-label updates");
  ov.add(run, "--chains", &lbm::RunConfig::chains, flags, "independent chains, seeds seed..seed+chains-1");
  ov.add(run, "-o,--out", &lbm::RunConfig::output_dir, flags, "output directory (default $LBM_OUTPUT_DIR or lbm_out)");

  // simulate
  lbm::SimSpec sim;
  std::string sim_out = default_output("lbm_sim"), theta_text;
  bool no_scramble = false;
  auto* simulate = app.add_subcommand("simulate", "generate a scrambled binary block matrix with its truth");
  simulate->add_option("--n", sim.n, "rows")->capture_default_str();
  simulate->add_option("--m", sim.m, "columns")->capture_default_str();
  simulate->add_option("-K", sim.K, "row clusters")->capture_default_str();
  simulate->add_option("-G", sim.G, "column clusters")->capture_default_str();
  simulate->add_option("--a", sim.a, "lower end of the probability interval")->capture_default_str();
  simulate->add_option("--b", sim.b, "upper end of the probability interval")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--theta", theta_text, "explicit K x G values in [0, 1]: rows split by ';', entries by ','");
  simulate->add_flag("--no-scramble", no_scramble, "keep rows and columns in block order");
  simulate->add_option("-o,--out", sim_out, "output directory");

  // evaluate
  std::string truth_dir, run_dir;
  auto* evaluate = app.add_subcommand("evaluate", "adjusted Rand index of a run against simulated truth");
  evaluate->add_option("--truth", truth_dir, "directory written by simulate")->required();
  evaluate->add_option("--run", run_dir, "directory written by run")->required();

  // bem2
  lbm::RunConfig bflags;
  Overrides bov;
  std::string bem_variant = "binary", bem_out;
  lbm::Bem2Options bopts;
  auto* bem2 = app.add_subcommand("bem2", "fuzzy block EM baseline at fixed (K, G)");
  add_data_options(bem2, bflags, bov, bem_variant);
  bem2->add_option("-K", bopts.K, "row clusters")->required();
  bem2->add_option("-G", bopts.G, "column clusters")->required();
  bem2->add_option("--restarts", bopts.restarts, "random starts")->capture_default_str();
  bem2->add_option("--tol", bopts.tol, "stop when the criterion changes less than this")->capture_default_str();
  bem2->add_option("--max-iter", bopts.max_iter, "iteration limit")->capture_default_str();
  bem2->add_option("--seed", bopts.seed, "RNG seed")->capture_default_str();
  bem2->add_option("-o,--out", bem_out, "optional directory for assignments");

  // summarize
  std::string sum_dir;
  int verify = 10;
  auto* summarize = app.add_subcommand("summarize", "recompute summaries from the trace(s) of a run");
  summarize->add_option("--dir", sum_dir, "run output directory")->required();
  summarize->add_option("--verify", verify, "samples per chain whose log posterior is recomputed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      lbm::RunConfig cfg;
      if (!config_path.empty()) {
        cfg = lbm::config_from_json(lbm::read_file(config_path));
        cfg.output_dir = default_output("lbm_out");
      } else {
        cfg = flags;
      }
      ov.apply(cfg, flags);
      lbm::run_experiment(cfg, &std::cerr);
      std::cerr << "wrote " << cfg.output_dir << "\n";
    } else if (simulate->parsed()) {
      if (!theta_text.empty()) {
        std::vector<std::vector<double>> rows;
        std::stringstream rs(theta_text);
        for (std::string r; std::getline(rs, r, ';');) {
          rows.emplace_back();
          std::stringstream es(r);
          for (std::string e; std::getline(es, e, ',');) rows.back().push_back(std::stod(e));
        }
        Eigen::MatrixXd t(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
          if (rows[k].size() != static_cast<std::size_t>(t.cols()))
            throw std::invalid_argument("--theta rows must have equal length");
          for (std::size_t g = 0; g < rows[k].size(); ++g) t(k, g) = rows[k][g];
        }
        sim.theta_source = t;
      }
      sim.scramble = !no_scramble;
      lbm::write_simulation(sim_out, sim, lbm::generate(sim));
      std::cerr << "wrote " << sim_out << "\n";
    } else if (evaluate->parsed()) {
      const lbm::Evaluation ev = lbm::evaluate_run(truth_dir, run_dir);
      std::cout << "modal ARI rows " << lbm::format_double(ev.ari_rows) << " cols " << lbm::format_double(ev.ari_cols)
                << "\nMAP ARI rows " << lbm::format_double(ev.map_ari_rows) << " cols "
                << lbm::format_double(ev.map_ari_cols) << "\n";
    } else if (bem2->parsed()) {
      lbm::RunConfig cfg;
      bov.apply(cfg, bflags);
      if (cfg.input.empty()) throw std::invalid_argument("--input is required");
      const lbm::DataMatrix data = lbm::ingest(cfg.input, cfg.ingest_options());
      const lbm::Bem2Fit fit = lbm::bem2_fit(data, bopts);
      print_bem2(fit);
      if (!bem_out.empty()) {
        fs::create_directories(bem_out);
        std::ostringstream out;
        out << "# columns: axis,item,cluster\n";
        for (std::size_t i = 0; i < fit.row_assign.size(); ++i) out << "row," << i + 1 << ',' << fit.row_assign[i] + 1 << '\n';
        for (std::size_t j = 0; j < fit.col_assign.size(); ++j) out << "col," << j + 1 << ',' << fit.col_assign[j] + 1 << '\n';
        lbm::write_file(fs::path(bem_out) / "bem2_assignments.csv", out.str());
        std::ostringstream trace;
        trace << "# columns: half_step,criterion\n";
        for (std::size_t h = 0; h < fit.history.size(); ++h) trace << h << ',' << lbm::format_double(fit.history[h]) << '\n';
        lbm::write_file(fs::path(bem_out) / "bem2_criterion.csv", trace.str());
      }
    } else if (summarize->parsed()) {
      lbm::summarize_run(sum_dir, verify, &std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
