#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "linklouvain/graph.h"
#include "linklouvain/metrics.h"

namespace linklouvain {

enum class InterferenceKind { kZero, kLinear, kSaturating, kLogistic };

std::string to_string(InterferenceKind kind);
// "zero", "linear", "saturating" or "logistic"; throws ConfigError.
InterferenceKind parse_interference_kind(const std::string& name);

// Outcome shift as a function of the treated-neighbor fraction e.
//   zero:       0
//   linear:     c * e
//   saturating: c * min(e, s) / s
//   logistic:   c * (L(e) - L(0)) / (L(1) - L(0)), L(e) = 1 / (1 + exp(-k (e - s)))
struct InterferenceFn {
  InterferenceKind kind = InterferenceKind::kZero;
  double c = 0.0;
  double s = 0.5;
  double k = 10.0;

  double operator()(double e) const;
};

// Campaign and outcome model.
//
// Each day every participant invites each non-participating neighbor with
// probability p_treated or p_control (by the inviter's arm), multiplied by
// cross_block_affinity when the two sit in different blocks. Every invitation
// becomes a label edge and the invitee joins the next day. Outcomes are
//   y_i = beta0 + tau z_i + g(e_i) + r_region(i) + noise_i
// with region shifts r ~ N(0, region_effect^2) and noise ~ N(0, noise^2).
struct ResponseModel {
  double beta0 = 1.0;
  double tau = 0.5;
  InterferenceFn g;
  double noise = 1.0;
  double region_effect = 0.0;
  double p_treated = 0.1;
  double p_control = 0.02;
  int horizon = 7;
  double initial_participation = 0.05;
  double cross_block_affinity = 1.0;
};

// Throws ConfigError when a probability is outside [0, 1], horizon < 1, or a
// scale is negative or non-finite.
void validate(const ResponseModel& r);

// Block and region labels of the nodes; either may be empty (no block
// structure, no region effect).
struct NodeGroups {
  std::vector<std::uint32_t> block;
  std::vector<std::uint32_t> region;
};

struct SimRun {
  LabelGraph labels;
  ExperimentOutcome outcome;
  double true_ate = 0.0;
  std::size_t participants = 0;
};

// Runs the campaign for r.horizon days and draws outcomes. Randomness is
// counter-based on (seed, node, neighbor, day), so two runs with the same seed
// and different assignments share their random numbers. y1 / y0 are the
// outcomes under global treatment / global control; observed_i equals
// y_{z_i}(i) + g(e_i) - g(z_i), which reduces to y_{z_i}(i) when g is zero.
// Throws std::invalid_argument when `treated` or a group vector does not
// cover every node.
SimRun simulate_campaign(const SocialGraph& g, const std::vector<std::uint8_t>& treated,
                         const ResponseModel& r, std::uint64_t seed,
                         const NodeGroups& groups = {});

nlohmann::json to_json(const ResponseModel& r);

}  // namespace linklouvain
