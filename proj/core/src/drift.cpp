#include "chronoplay/drift.hpp"

#include <algorithm>
#include <cmath>

namespace chronoplay {

TopicDistribution make_distribution(const std::map<TopicId, double>& mass,
                                    std::size_t post_count) {
  TopicDistribution d;
  d.post_count = post_count;
  double total = 0.0;
  for (const auto& [topic, m] : mass) {
    if (m < 0.0) {
      throw Error(ErrorKind::contract, "negative topic mass for " + topic.render());
    }
    if (m > 0.0) d.mass[topic] = m;
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::contract, "topic masses must sum to 1");
  }
  return d;
}

TopicDistribution topic_distribution(const std::vector<CommunityPost>& posts,
                                     Instant a, Instant b) {
  if (a > b) {
    throw Error(ErrorKind::contract, "topic_distribution: window start exceeds end");
  }
  std::map<TopicId, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& post : posts) {
    if (post.created_at < a || post.created_at > b) continue;
    if (!post.topic) {
      throw Error(ErrorKind::contract,
                  "topic_distribution: unclassified post " + post.post_id);
    }
    ++counts[*post.topic];
    ++total;
  }
  TopicDistribution d;
  d.post_count = total;
  if (total == 0) return d;  // zero-count marker
  for (const auto& [topic, n] : counts) {
    d.mass[topic] = static_cast<double>(n) / static_cast<double>(total);
  }
  return d;
}

namespace {

void require_comparable(const TopicDistribution& pc, const TopicDistribution& pr) {
  if (pc.is_zero_count() || pr.is_zero_count()) {
    throw Error(ErrorKind::contract,
                "divergence over a zero-count distribution is undefined");
  }
}

std::vector<TopicId> union_support(const TopicDistribution& pc,
                                   const TopicDistribution& pr) {
  std::vector<TopicId> topics;
  for (const auto& [t, m] : pc.mass) topics.push_back(t);
  for (const auto& [t, m] : pr.mass) {
    if (!pc.mass.count(t)) topics.push_back(t);
  }
  std::sort(topics.begin(), topics.end());
  return topics;
}

double jsd_term(double p, double m) {
  if (p <= 0.0) return 0.0;  // 0 * log(0/x) = 0
  return p * std::log2(p / m);
}

}  // namespace

std::map<TopicId, double> topic_weights(const TopicDistribution& pc,
                                        const TopicDistribution& pr, double gamma) {
  require_comparable(pc, pr);
  std::map<TopicId, double> weights;
  double denom = 0.0;
  for (const auto& topic : union_support(pc, pr)) {
    const double m = 0.5 * (pc.at(topic) + pr.at(topic));
    if (m <= 0.0) continue;
    const double w = std::pow(m, gamma);
    weights[topic] = w;
    denom += w;
  }
  for (auto& [topic, w] : weights) w /= denom;
  return weights;
}

double weighted_jsd(const TopicDistribution& pc, const TopicDistribution& pr,
                    double gamma) {
  require_comparable(pc, pr);
  const auto weights = topic_weights(pc, pr, gamma);
  double total = 0.0;
  for (const auto& topic : union_support(pc, pr)) {
    const double p = pc.at(topic);
    const double r = pr.at(topic);
    const double m = 0.5 * (p + r);
    if (m <= 0.0) continue;
    const double j = 0.5 * (jsd_term(p, m) + jsd_term(r, m));
    auto it = weights.find(topic);
    if (it != weights.end()) total += it->second * j;
  }
  return total;
}

DriftReport detect_drift(const std::vector<CommunityPost>& posts, Instant p_tau,
                         Instant c_tau, const DriftConfig& config) {
  if (p_tau > c_tau) {
    throw Error(ErrorKind::contract, "detect_drift: p_tau exceeds c_tau");
  }
  DriftReport report;
  report.current_start = std::max(p_tau, c_tau - config.window);
  report.current_end = c_tau;
  report.reference_start = p_tau;
  report.reference_end = c_tau;

  const TopicDistribution pc =
      topic_distribution(posts, report.current_start, report.current_end);
  const TopicDistribution pr =
      topic_distribution(posts, report.reference_start, report.reference_end);
  report.current_posts = pc.post_count;
  report.reference_posts = pr.post_count;

  if (pc.is_zero_count() || pr.is_zero_count()) {
    report.low_sample = true;
    return report;  // wjsd reported as 0
  }
  report.wjsd = weighted_jsd(pc, pr, config.gamma);
  if (pc.post_count < config.min_posts || pr.post_count < config.min_posts) {
    report.low_sample = true;
    return report;  // computed wjsd retained, but never flagged
  }
  report.flagged = report.wjsd > config.lambda_jsd;
  return report;
}

std::vector<Instant> partition_phases(const std::vector<CommunityPost>& posts,
                                      Instant start, Instant end,
                                      const DriftConfig& config) {
  if (start >= end) {
    throw Error(ErrorKind::contract, "partition_phases: start must precede end");
  }
  if (config.step <= 0 || config.window <= 0) {
    throw Error(ErrorKind::config, "partition_phases: step and window must be > 0");
  }
  std::vector<Instant> boundaries;
  Instant p_tau = start;
  for (Instant c_tau = start + config.window; c_tau <= end; c_tau += config.step) {
    const DriftReport report = detect_drift(posts, p_tau, c_tau, config);
    if (report.flagged) {
      boundaries.push_back(c_tau);
      p_tau = c_tau;
    }
  }
  return boundaries;
}

}  // namespace chronoplay
