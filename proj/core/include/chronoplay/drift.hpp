#pragma once
// User-interest drift: windowed topic distributions and the topic-weighted
// Jensen-Shannon divergence that flags phase boundaries.

#include <map>
#include <vector>

#include "chronoplay/community.hpp"
#include "chronoplay/taxonomy.hpp"

namespace chronoplay {

// Empirical topic frequencies within a time window. post_count == 0 marks
// the zero-count distribution, which is not a probability distribution and
// cannot enter divergence computations.
struct TopicDistribution {
  std::map<TopicId, double> mass;
  std::size_t post_count = 0;

  bool is_zero_count() const { return post_count == 0; }
  double at(const TopicId& topic) const {
    auto it = mass.find(topic);
    return it == mass.end() ? 0.0 : it->second;
  }
};

TopicDistribution make_distribution(const std::map<TopicId, double>& mass,
                                    std::size_t post_count = 1);

struct DriftConfig {
  Instant window = 5 * kSecondsPerDay;   // W
  double gamma = 1.5;
  double lambda_jsd = 0.001;
  Instant step = kSecondsPerDay;
  std::size_t min_posts = 20;            // 0 disables the guard
};

struct DriftReport {
  double wjsd = 0.0;
  bool flagged = false;
  Instant current_start = 0, current_end = 0;      // [max(p, c-W), c]
  Instant reference_start = 0, reference_end = 0;  // [p, c]
  std::size_t current_posts = 0, reference_posts = 0;
  bool low_sample = false;
};

// Frequencies over posts with a <= created_at <= b (closed window).
// Unclassified posts are a contract error.
TopicDistribution topic_distribution(const std::vector<CommunityPost>& posts,
                                     Instant a, Instant b);

// w = M^gamma / sum(M^gamma) over topics with positive mixture mass,
// M = (Pc + Pr) / 2.
std::map<TopicId, double> topic_weights(const TopicDistribution& pc,
                                        const TopicDistribution& pr, double gamma);

// Sum over topics of w * j, j the per-topic JSD term in log base 2 with the
// 0*log(0/x) = 0 convention.
double weighted_jsd(const TopicDistribution& pc, const TopicDistribution& pr,
                    double gamma);

// Pc over [max(p_tau, c_tau - W), c_tau], Pr over [p_tau, c_tau]. Windows
// with fewer than min_posts posts never flag.
DriftReport detect_drift(const std::vector<CommunityPost>& posts, Instant p_tau,
                         Instant c_tau, const DriftConfig& config);

// Walks c_tau from start+W to end in config.step increments, resetting the
// reference start at each flagged boundary. Returns the boundaries.
std::vector<Instant> partition_phases(const std::vector<CommunityPost>& posts,
                                      Instant start, Instant end,
                                      const DriftConfig& config);

}  // namespace chronoplay
