#include "lbm/errors.hpp"
#include "lbm/io.hpp"
#include "lbm/rng.hpp"
#include "lbm/run.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace lbm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lbm_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

IngestOptions voting() {
  IngestOptions o;
  o.mapping = parse_mapping("voting");
  return o;
}

IngestOptions continuous() {
  IngestOptions o;
  o.variant = Variant::Continuous;
  return o;
}

template <class F>
ParseError parse_error_of(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error");
  return ParseError("");
}

RunConfig small_run(const fs::path& input, const fs::path& out) {
  RunConfig cfg;
  cfg.input = input.string();
  cfg.chain.iterations = 1500;
  cfg.chain.burn_in = 300;
  cfg.chain.thin = 4;
  cfg.chain.seed = 5;
  cfg.output_dir = out.string();
  return cfg;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("voting tokens") {
    const DataMatrix y = ingest_text("y,n,y\n", voting());
    CHECK(y.rows() == 1);
    CHECK(y(0, 0) == 1);
    CHECK(y(0, 1) == 0);
    CHECK(y(0, 2) == 1);
    const DataMatrix z = ingest_text("?,y,\n n ,?,y\n", voting());
    CHECK(z.values().row(0).sum() == 1);
    CHECK(z(1, 0) == 0);
    CHECK(z(1, 2) == 1);
  }

  TEST_CASE("explicit mapping") {
    const auto m = parse_mapping("a=1;b=0");
    CHECK(m.at("a") == 1.0);
    CHECK(m.at("b") == 0.0);
    CHECK(parse_mapping("").empty());
    CHECK_THROWS(parse_mapping("a"));
  }

  TEST_CASE("empty input is an error") {
    CHECK_THROWS_AS(ingest_text("", voting()), ParseError);
    CHECK_THROWS_AS(ingest_text("# only a comment\n\n", continuous()), ParseError);
  }

  TEST_CASE("signed reals, including the unicode minus") {
    const DataMatrix y = ingest_text("\xE2\x88\x92" "6.0, 7.0\n0.25,-1e-3\n", continuous());
    CHECK(y(0, 0) == -6.0);
    CHECK(y(0, 1) == 7.0);
    CHECK(y(1, 1) == -0.001);
  }

  TEST_CASE("errors carry coordinates") {
    const ParseError ragged = parse_error_of([] { ingest_text("1,0\n1\n", IngestOptions{}); });
    CHECK(ragged.row() == 2);
    const ParseError unmapped = parse_error_of([] { ingest_text("y,n\ny,x\n", voting()); });
    CHECK(unmapped.row() == 2);
    CHECK(unmapped.col() == 2);
    const ParseError word = parse_error_of([] { ingest_text("# note\n1.5,2\n3,abc\n", continuous()); });
    CHECK(word.row() == 3);
    CHECK(word.col() == 2);
    const ParseError not_binary = parse_error_of([] { ingest_text("0,1,2\n", IngestOptions{}); });
    CHECK(not_binary.col() == 3);
  }

  TEST_CASE("header detection") {
    const DataMatrix y = ingest_text("a,b,c\n1,0,1\n0,0,1\n", IngestOptions{});
    CHECK(y.rows() == 2);
    CHECK(y.column_names == std::vector<std::string>{"a", "b", "c"});
    IngestOptions no = IngestOptions{};
    no.header = HeaderMode::No;
    CHECK_THROWS_AS(ingest_text("a,b,c\n1,0,1\n", no), ParseError);
    IngestOptions yes = continuous();
    yes.header = HeaderMode::Yes;
    CHECK(ingest_text("1,2\n3,4\n", yes).rows() == 1);
    CHECK_THROWS_AS(ingest_text("a,b\n", IngestOptions{}), ParseError);
  }

  TEST_CASE("tab separated") {
    const DataMatrix y = ingest_text("1\t0\n0\t1\n", IngestOptions{});
    CHECK(y.cols() == 2);
    CHECK(y(1, 1) == 1);
  }
}

TEST_SUITE("files") {
  TEST_CASE("doubles round trip through text") {
    Rng rng(51);
    for (int t = 0; t < 1000; ++t) {
      const double v = (uniform01(rng) - 0.5) * std::pow(10.0, uniform_int(rng, 40) - 20);
      CHECK(std::stod(format_double(v)) == v);
    }
  }

  TEST_CASE("trace round trip") {
    std::vector<Sample> in;
    Rng rng(52);
    for (int t = 0; t < 20; ++t) {
      Sample s;
      s.iteration = 10 * (t + 1);
      s.alloc = {3, 2, std::vector<int>(7), std::vector<int>(4)};
      for (int& l : s.alloc.z) l = uniform_int(rng, 3);
      for (int& l : s.alloc.w) l = uniform_int(rng, 2);
      s.k_nonempty = count_nonempty(s.alloc.z);
      s.g_nonempty = count_nonempty(s.alloc.w);
      s.log_posterior = -100 * uniform01(rng);
      in.push_back(s);
    }
    std::stringstream buf;
    TraceWriter w(buf, "0123456789abcdef", 42, 5, 4);
    for (const auto& s : in) w.write(s);
    const TraceFile tf = read_trace(buf);
    CHECK(tf.digest == "0123456789abcdef");
    CHECK(tf.seed == 42);
    CHECK(tf.k_max == 5);
    CHECK(tf.g_max == 4);
    REQUIRE(tf.samples.size() == in.size());
    for (std::size_t t = 0; t < in.size(); ++t) {
      CHECK(tf.samples[t].iteration == in[t].iteration);
      CHECK(tf.samples[t].alloc == in[t].alloc);
      CHECK(tf.samples[t].log_posterior == in[t].log_posterior);
      CHECK(tf.samples[t].k_nonempty == in[t].k_nonempty);
    }
  }

  TEST_CASE("config round trip and digest") {
    RunConfig cfg;
    cfg.input = "x.csv";
    cfg.variant = Variant::Continuous;
    cfg.mapping = "a=1;b=0";
    cfg.hyper.gaussian.tau2 = 7.5;
    cfg.hyper.k_max = 9;
    cfg.chain.seed = 123;
    cfg.schedule.gibbs_fraction = 0.25;
    cfg.chains = 3;
    cfg.output_dir = "somewhere";
    const std::string text = config_to_json(cfg);
    CHECK(text.find("somewhere") == std::string::npos);
    const RunConfig back = config_from_json(text);
    CHECK(config_to_json(back) == text);
    CHECK(back.hyper.gaussian.tau2 == 7.5);
    CHECK(back.chains == 3);
    CHECK(config_digest(back) == config_digest(cfg));
    CHECK(config_digest(cfg).size() == 16);
    cfg.chain.seed = 124;
    CHECK(config_digest(back) != config_digest(cfg));
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("simulate, run, evaluate, rerun from config, summarize") {
    const fs::path root = scratch("pipeline");
    SimSpec spec;
    spec.n = 40;
    spec.m = 30;
    spec.K = 2;
    spec.G = 3;
    spec.seed = 8;
    spec.theta_source = (Eigen::MatrixXd(2, 3) << 0.05, 0.9, 0.5, 0.9, 0.1, 0.5).finished();
    write_simulation(root / "sim", spec, generate(spec));
    for (const char* f : {"data.csv", "truth.csv", "theta.csv", "sim.json"}) CHECK(fs::exists(root / "sim" / f));

    const RunConfig cfg = small_run(root / "sim" / "data.csv", root / "run");
    run_experiment(cfg);
    CHECK(read_file(root / "run" / "manifest.txt").rfind("# status: complete", 0) == 0);
    for (const char* f : {"config.json", "trace.csv", "acceptance.csv", "pmp.csv", "pmp_nonempty.csv", "iat.csv",
                          "rows_membership.csv", "cols_membership.csv", "map.csv"})
      CHECK(fs::exists(root / "run" / f));

    const Evaluation ev = evaluate_run(root / "sim", root / "run");
    CHECK(ev.ari_rows == doctest::Approx(1.0));
    CHECK(ev.ari_cols == doctest::Approx(1.0));
    CHECK(fs::exists(root / "run" / "evaluation.csv"));

    RunConfig again = config_from_json(read_file(root / "run" / "config.json"));
    again.output_dir = (root / "rerun").string();
    run_experiment(again);
    CHECK(read_file(root / "rerun" / "trace.csv") == read_file(root / "run" / "trace.csv"));
    CHECK(read_file(root / "rerun" / "pmp.csv") == read_file(root / "run" / "pmp.csv"));

    const std::string before = read_file(root / "run" / "rows_membership.csv");
    fs::remove(root / "run" / "pmp.csv");
    CHECK(summarize_run(root / "run", 20) < 1e-8);
    CHECK(fs::exists(root / "run" / "pmp.csv"));
    CHECK(read_file(root / "run" / "rows_membership.csv") == before);
    fs::remove_all(root);
  }

  TEST_CASE("annotations give a crosstab, several chains give pooled summaries") {
    const fs::path root = scratch("chains");
    write_file(root / "data.csv", "y,y,n,n\ny,y,n,?\nn,n,y,y\nn,?,y,y\ny,y,n,n\n");
    write_file(root / "labels.txt", "a\na\nb\nb\na\n");
    RunConfig cfg = small_run(root / "data.csv", root / "out");
    cfg.mapping = "voting";
    cfg.annotations = (root / "labels.txt").string();
    cfg.chains = 2;
    const RunResult r = run_experiment(cfg);
    REQUIRE(r.chains.size() == 2);
    CHECK(r.chains[0].seed == 5);
    CHECK(r.chains[1].seed == 6);
    CHECK(fs::exists(root / "out" / "chain_1" / "trace.csv"));
    CHECK(fs::exists(root / "out" / "chain_2" / "trace.csv"));
    CHECK(fs::exists(root / "out" / "crosstab.csv"));
    CHECK(read_file(root / "out" / "crosstab.csv").find("cluster,size,a,b") != std::string::npos);
    CHECK(summarize_run(root / "out", 10) < 1e-8);
    fs::remove_all(root);
  }

  TEST_CASE("a failing run leaves an incomplete manifest") {
    const fs::path root = scratch("fail");
    write_file(root / "data.csv", "1,0\n0\n");
    const RunConfig cfg = small_run(root / "data.csv", root / "out");
    CHECK_THROWS_AS(run_experiment(cfg), ParseError);
    REQUIRE(fs::exists(root / "out" / "manifest.txt"));
    CHECK(read_file(root / "out" / "manifest.txt").rfind("# status: incomplete", 0) == 0);
    fs::remove_all(root);
  }
}
