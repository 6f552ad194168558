#include "lbm/chain.hpp"

#include "lbm/moves.hpp"

#include <stdexcept>

namespace lbm {

void MoveSchedule::validate() const {
  if (!(split_probability > 0.0) || split_probability > 1.0)
    throw std::invalid_argument("split probability must lie in (0, 1]");
  if (!(gibbs_fraction >= 0.0) || gibbs_fraction > 1.0)
    throw std::invalid_argument("Gibbs fraction must lie in [0, 1]");
}

void ChainConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("burn-in must be non-negative and smaller than iterations");
  if (thin < 1) throw std::invalid_argument("thinning stride must be at least 1");
  if (init == InitKind::Random && (init_k < 1 || init_g < 1))
    throw std::invalid_argument("random initial cluster counts must be positive");
}

Allocation initial_allocation(int n, int m, const Hyperparams& resolved, const ChainConfig& cfg) {
  Allocation alloc{1, 1, std::vector<int>(n, 0), std::vector<int>(m, 0)};
  if (cfg.init == InitKind::SingleCluster) return alloc;
  if (cfg.init_k > resolved.k_max || cfg.init_g > resolved.g_max)
    throw std::invalid_argument("initial cluster counts exceed their bounds");
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  alloc.K = cfg.init_k;
  alloc.G = cfg.init_g;
  for (int& k : alloc.z) k = uniform_int(rng, alloc.K);
  for (int& g : alloc.w) g = uniform_int(rng, alloc.G);
  return alloc;
}

namespace {

template <class Model>
ChainTrace drive(AllocationState<Model>& st, const ChainConfig& cfg, const MoveSchedule& sched,
                 const SampleSink& sink) {
  ChainTrace trace;
  trace.seed = cfg.seed;
  trace.k_max = st.capacity(Axis::Rows);
  trace.g_max = st.capacity(Axis::Cols);
  if (!sink) trace.samples.reserve(static_cast<std::size_t>((cfg.iterations - cfg.burn_in) / cfg.thin));

  Rng rng(cfg.seed);
  for (long it = 1; it <= cfg.iterations; ++it) {
    sweep(st, sched, rng, trace.acceptance);
    // Incremental sums of squares drift; re-anchor them periodically.
    if constexpr (Model::kUsesSquares)
      if (it % 256 == 0) st.recompute();
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      Sample s;
      s.iteration = it;
      s.alloc = st.allocation();
      s.k_nonempty = st.nonempty(Axis::Rows);
      s.g_nonempty = st.nonempty(Axis::Cols);
      s.log_posterior = st.log_posterior();
      if (sink)
        sink(s);
      else
        trace.samples.push_back(std::move(s));
    }
  }
  return trace;
}

}  // namespace

ChainTrace run_chain(const DataMatrix& data, const Hyperparams& hp, const ChainConfig& cfg,
                     const MoveSchedule& sched, const SampleSink& sink) {
  cfg.validate();
  sched.validate();
  const Hyperparams h = hp.resolved(data.rows(), data.cols());
  Allocation init = initial_allocation(data.rows(), data.cols(), h, cfg);
  if (data.variant() == Variant::Binary) {
    AllocationState st(data, h, make_bernoulli_model(data, h), std::move(init));
    return drive(st, cfg, sched, sink);
  }
  AllocationState st(data, h, make_gaussian_model(data, h), std::move(init));
  return drive(st, cfg, sched, sink);
}

}  // namespace lbm
