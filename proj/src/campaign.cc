#include "linklouvain/campaign.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "linklouvain/errors.h"
#include "linklouvain/random.h"

namespace linklouvain {

std::string to_string(InterferenceKind kind) {
  switch (kind) {
    case InterferenceKind::kZero:
      return "zero";
    case InterferenceKind::kLinear:
      return "linear";
    case InterferenceKind::kSaturating:
      return "saturating";
    case InterferenceKind::kLogistic:
      return "logistic";
  }
  return "unknown";
}

InterferenceKind parse_interference_kind(const std::string& name) {
  if (name == "zero") return InterferenceKind::kZero;
  if (name == "linear") return InterferenceKind::kLinear;
  if (name == "saturating") return InterferenceKind::kSaturating;
  if (name == "logistic") return InterferenceKind::kLogistic;
  throw ConfigError("unknown interference kind '" + name +
                    "' (expected zero, linear, saturating, logistic)");
}

double InterferenceFn::operator()(double e) const {
  switch (kind) {
    case InterferenceKind::kZero:
      return 0.0;
    case InterferenceKind::kLinear:
      return c * e;
    case InterferenceKind::kSaturating:
      return c * std::min(e, s) / s;
    case InterferenceKind::kLogistic: {
      auto l = [&](double x) { return 1.0 / (1.0 + std::exp(-k * (x - s))); };
      return c * (l(e) - l(0.0)) / (l(1.0) - l(0.0));
    }
  }
  return 0.0;
}

void validate(const ResponseModel& r) {
  auto probability = [](double p, const char* key) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(key) + " must lie in [0, 1]");
  };
  probability(r.p_treated, "response.p_treated");
  probability(r.p_control, "response.p_control");
  probability(r.initial_participation, "response.initial_participation");
  probability(r.cross_block_affinity, "response.cross_block_affinity");
  if (r.horizon < 1) throw ConfigError("response.horizon must be >= 1");
  if (!(r.noise >= 0.0) || !std::isfinite(r.noise)) throw ConfigError("response.noise must be >= 0");
  if (!(r.region_effect >= 0.0) || !std::isfinite(r.region_effect)) {
    throw ConfigError("response.region_effect must be >= 0");
  }
  if (!std::isfinite(r.beta0) || !std::isfinite(r.tau) || !std::isfinite(r.g.c)) {
    throw ConfigError("response coefficients must be finite");
  }
  if (r.g.kind == InterferenceKind::kSaturating && !(r.g.s > 0.0 && r.g.s <= 1.0)) {
    throw ConfigError("response.interference.s must lie in (0, 1] for saturating g");
  }
  if (r.g.kind == InterferenceKind::kLogistic && !(r.g.k > 0.0)) {
    throw ConfigError("response.interference.k must be > 0 for logistic g");
  }
}

namespace {

enum Stream : std::uint64_t { kInit = 11, kInvite = 12, kNoise = 13, kRegion = 14 };

double standard_normal(std::uint64_t h) {
  const double u1 = 1.0 - hash_to_unit(h);
  const double u2 = hash_to_unit(mix64(h ^ 0x5851f42d4c957f2dULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

SimRun simulate_campaign(const SocialGraph& g, const std::vector<std::uint8_t>& treated,
                         const ResponseModel& r, std::uint64_t seed, const NodeGroups& groups) {
  validate(r);
  const std::size_t n = g.num_nodes();
  if (treated.size() != n) throw std::invalid_argument("treatment flags do not cover every node");
  if (!groups.block.empty() && groups.block.size() != n) {
    throw std::invalid_argument("block labels do not cover every node");
  }
  if (!groups.region.empty() && groups.region.size() != n) {
    throw std::invalid_argument("region labels do not cover every node");
  }

  constexpr int kNever = std::numeric_limits<int>::max();
  std::vector<int> joined(n, kNever);
  const std::uint64_t init_seed = derive_seed(seed, kInit);
  for (std::size_t v = 0; v < n; ++v) {
    if (hash_to_unit(hash_combine(init_seed, v)) < r.initial_participation) joined[v] = 0;
  }
  const std::uint64_t invite_seed = derive_seed(seed, kInvite);
  std::vector<LabelEdge> edges;
  for (int day = 1; day <= r.horizon; ++day) {
    for (NodeId u = 0; u < n; ++u) {
      if (joined[u] >= day) continue;
      const double p = treated[u] ? r.p_treated : r.p_control;
      if (p <= 0.0) continue;
      for (NodeId w : g.neighbors(u)) {
        if (joined[w] < day) continue;
        double prob = p;
        if (!groups.block.empty() && groups.block[u] != groups.block[w]) {
          prob *= r.cross_block_affinity;
        }
        if (hash_to_unit(hash_combine(invite_seed, u, w, static_cast<std::uint64_t>(day))) < prob) {
          edges.push_back({u, w, day});
          if (joined[w] == kNever) joined[w] = day;
        }
      }
    }
  }

  SimRun run;
  for (int d : joined) run.participants += d != kNever;
  run.labels = LabelGraph(n, r.horizon, std::move(edges));

  const std::vector<double> exposure = treated_neighbor_fraction(g, treated);
  const std::uint64_t noise_seed = derive_seed(seed, kNoise);
  const std::uint64_t region_seed = derive_seed(seed, kRegion);
  ExperimentOutcome& o = run.outcome;
  o.treated = treated;
  o.observed.resize(n);
  o.y0.resize(n);
  o.y1.resize(n);
  const double g0 = r.g(0.0);
  const double g1 = r.g(1.0);
  for (NodeId v = 0; v < n; ++v) {
    double base = r.beta0 + r.noise * standard_normal(hash_combine(noise_seed, v));
    if (!groups.region.empty() && r.region_effect > 0.0) {
      base += r.region_effect * standard_normal(hash_combine(region_seed, groups.region[v]));
    }
    const bool isolated = g.degree(v) == 0;
    o.observed[v] = base + (treated[v] ? r.tau : 0.0) + r.g(exposure[v]);
    o.y1[v] = base + r.tau + (isolated ? g0 : g1);
    o.y0[v] = base + g0;
  }
  run.true_ate = true_ate(o);
  return run;
}

nlohmann::json to_json(const ResponseModel& r) {
  return {{"beta0", r.beta0},
          {"tau", r.tau},
          {"interference", {{"kind", to_string(r.g.kind)}, {"c", r.g.c}, {"s", r.g.s}, {"k", r.g.k}}},
          {"noise", r.noise},
          {"region_effect", r.region_effect},
          {"p_treated", r.p_treated},
          {"p_control", r.p_control},
          {"horizon", r.horizon},
          {"initial_participation", r.initial_participation},
          {"cross_block_affinity", r.cross_block_affinity}};
}

}  // namespace linklouvain
