#include "doctest.h"

#include <cmath>

#include "chronoplay/drift.hpp"
#include "support/oracles.hpp"

using namespace chronoplay;

namespace {

const TopicId kA{"GAME_CONTENT", "PROGRESS_GUIDE"};
const TopicId kB{"AFTER_SALES_SERVICE", "REFUND_POLICY"};
const TopicId kC{"TECHNICAL_SUPPORT", "CRASH_ERRORS"};

CommunityPost post_at(Instant t, const TopicId& topic) {
  static int counter = 0;
  CommunityPost p;
  p.post_id = "p" + std::to_string(counter++);
  p.text = "text";
  p.created_at = t;
  p.topic = topic;
  return p;
}

TopicDistribution dist(std::map<TopicId, double> mass) {
  return make_distribution(mass, 100);
}

oracles::Dist to_oracle(const TopicDistribution& d) {
  oracles::Dist out;
  for (const auto& [topic, m] : d.mass) out[topic.render()] = m;
  return out;
}

}  // namespace

TEST_CASE("topic distributions are empirical frequencies over closed windows") {
  std::vector<CommunityPost> posts = {post_at(10, kA), post_at(20, kA), post_at(30, kB),
                                      post_at(40, kC)};
  auto d = topic_distribution(posts, 0, 100);
  CHECK(d.at(kA) == doctest::Approx(0.5));
  CHECK(d.at(kB) == doctest::Approx(0.25));
  CHECK(d.at(kC) == doctest::Approx(0.25));
  CHECK(d.post_count == 4);

  auto single = topic_distribution(posts, 10, 10);  // closed bounds include both ends
  CHECK(single.at(kA) == doctest::Approx(1.0));
  CHECK(single.post_count == 1);

  auto empty = topic_distribution(posts, 500, 600);
  CHECK(empty.is_zero_count());

  CHECK_THROWS_AS((void)topic_distribution(posts, 10, 5), Error);
}

TEST_CASE("topic weights follow M^gamma normalization") {
  SUBCASE("symmetric two-topic case is uniform for any gamma") {
    auto p = dist({{kA, 0.5}, {kB, 0.5}});
    for (double gamma : {1.0, 1.5, 2.0, 3.7}) {
      auto w = topic_weights(p, p, gamma);
      CHECK(w[kA] == doctest::Approx(0.5));
      CHECK(w[kB] == doctest::Approx(0.5));
    }
  }
  SUBCASE("frozen mixture example at gamma 1.5") {
    // M = {0.65, 0.35}
    auto pc = dist({{kA, 0.8}, {kB, 0.2}});
    auto pr = dist({{kA, 0.5}, {kB, 0.5}});
    auto w = topic_weights(pc, pr, 1.5);
    CHECK(w[kA] == doctest::Approx(0.7167828083660083).epsilon(1e-9));
    CHECK(w[kB] == doctest::Approx(0.2832171916339917).epsilon(1e-9));
  }
  SUBCASE("gamma 1 reproduces the mixture itself") {
    auto pc = dist({{kA, 0.8}, {kB, 0.2}});
    auto pr = dist({{kA, 0.6}, {kB, 0.4}});
    auto w = topic_weights(pc, pr, 1.0);
    CHECK(w[kA] == doctest::Approx(0.7));
    CHECK(w[kB] == doctest::Approx(0.3));
  }
}

TEST_CASE("weighted JSD matches the frozen worked example") {
  auto pc = dist({{kA, 0.8}, {kB, 0.2}});
  auto pr = dist({{kA, 0.5}, {kB, 0.5}});
  const double w = weighted_jsd(pc, pr, 1.5);
  CHECK(w == doctest::Approx(0.0316285208206059).epsilon(1e-9));
  CHECK(w == doctest::Approx(0.03163).epsilon(1e-3));

  // Unweighted cross-check value from the same pair.
  const double plain =
      static_cast<double>(oracles::plain_jsd(to_oracle(pc), to_oracle(pr)));
  CHECK(plain == doctest::Approx(0.07310400793180983).epsilon(1e-9));
}

TEST_CASE("weighted JSD identities") {
  auto p = dist({{kA, 0.3}, {kB, 0.45}, {kC, 0.25}});
  CHECK(weighted_jsd(p, p, 1.5) <= 1e-12);

  auto pa = dist({{kA, 1.0}});
  auto pb = dist({{kB, 1.0}});
  CHECK(weighted_jsd(pa, pb, 1.5) == doctest::Approx(0.5).epsilon(1e-12));

  auto q = dist({{kA, 0.7}, {kB, 0.2}, {kC, 0.1}});
  CHECK(weighted_jsd(p, q, 1.5) == doctest::Approx(weighted_jsd(q, p, 1.5)).epsilon(1e-15));

  // Uniform weights reduce to plain JSD / n.
  auto u1 = dist({{kA, 0.9}, {kB, 0.1}});
  auto u2 = dist({{kA, 0.1}, {kB, 0.9}});  // mixture is uniform
  const double reduced = weighted_jsd(u1, u2, 1.5);
  const double plain = static_cast<double>(oracles::plain_jsd(to_oracle(u1), to_oracle(u2)));
  CHECK(reduced == doctest::Approx(plain / 2.0).epsilon(1e-12));

  auto zero = TopicDistribution{};
  CHECK_THROWS_AS((void)weighted_jsd(zero, p, 1.5), Error);
}

TEST_CASE("weighted JSD matches a high-precision oracle on random pairs") {
  Rng rng(2024);
  std::vector<TopicId> topics;
  for (int i = 0; i < 21; ++i) {
    topics.push_back(TopicId{"MAIN" + std::to_string(i % 6), "SUB" + std::to_string(i)});
  }
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t support = 2 + rng.bounded(topics.size() - 1);
    auto draw = [&](std::size_t n) {
      std::map<TopicId, double> mass;
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double v = 1.0 + static_cast<double>(rng.bounded(1000));
        mass[topics[i]] = v;
        total += v;
      }
      for (auto& [t, v] : mass) v /= total;
      return make_distribution(mass, 100);
    };
    auto pc = draw(support);
    auto pr = draw(support);
    for (double gamma : {1.0, 1.5, 2.0}) {
      const double got = weighted_jsd(pc, pr, gamma);
      const double want = static_cast<double>(
          oracles::wjsd(to_oracle(pc), to_oracle(pr), static_cast<long double>(gamma)));
      CHECK(std::abs(got - want) < 1e-9);
      CHECK(got >= 0.0);
    }
  }
}

TEST_CASE("detect_drift uses the two stated windows and the low-sample guard") {
  DriftConfig config;
  config.window = 5 * kSecondsPerDay;
  config.min_posts = 1;

  SUBCASE("stationary stream never flags") {
    std::vector<CommunityPost> posts;
    for (int day = 0; day <= 20; ++day) {
      posts.push_back(post_at(day * kSecondsPerDay, kA));
    }
    auto report = detect_drift(posts, 0, 20 * kSecondsPerDay, config);
    CHECK(report.wjsd == doctest::Approx(0.0));
    CHECK(!report.flagged);
  }
  SUBCASE("a flipped regime flags") {
    std::vector<CommunityPost> posts;
    for (int day = 0; day <= 29; ++day) posts.push_back(post_at(day * kSecondsPerDay, kA));
    for (int day = 30; day <= 40; ++day) posts.push_back(post_at(day * kSecondsPerDay, kB));
    auto report = detect_drift(posts, 0, 40 * kSecondsPerDay, config);
    CHECK(report.flagged);
    CHECK(report.current_start == 35 * kSecondsPerDay);
    CHECK(report.reference_start == 0);
  }
  SUBCASE("min_posts suppresses flags regardless of divergence") {
    DriftConfig strict = config;
    strict.min_posts = 20;
    std::vector<CommunityPost> posts;
    for (int day = 0; day <= 4; ++day) posts.push_back(post_at(day * kSecondsPerDay, kA));
    posts.push_back(post_at(6 * kSecondsPerDay, kB));
    auto report = detect_drift(posts, 0, 6 * kSecondsPerDay, strict);
    CHECK(!report.flagged);
    CHECK(report.low_sample);
  }
  CHECK_THROWS_AS((void)detect_drift({}, 10, 5, config), Error);
}

TEST_CASE("phase partitioning finds the regime flip once") {
  DriftConfig config;
  config.window = 5 * kSecondsPerDay;
  config.step = kSecondsPerDay;
  config.gamma = 1.5;
  config.lambda_jsd = 0.001;
  config.min_posts = 1;

  std::vector<CommunityPost> posts;
  for (int day = 0; day <= 29; ++day) {
    for (int i = 0; i < 3; ++i) posts.push_back(post_at(day * kSecondsPerDay + i, kA));
  }
  for (int day = 30; day <= 59; ++day) {
    for (int i = 0; i < 3; ++i) posts.push_back(post_at(day * kSecondsPerDay + i, kB));
  }
  auto boundaries = partition_phases(posts, 0, 59 * kSecondsPerDay, config);
  REQUIRE(boundaries.size() == 1);
  CHECK(boundaries[0] >= 30 * kSecondsPerDay);
  CHECK(boundaries[0] <= 36 * kSecondsPerDay);

  SUBCASE("stationary stream yields zero boundaries") {
    std::vector<CommunityPost> flat;
    for (int day = 0; day <= 59; ++day) flat.push_back(post_at(day * kSecondsPerDay, kA));
    CHECK(partition_phases(flat, 0, 59 * kSecondsPerDay, config).empty());
  }
  SUBCASE("an unreachable threshold yields zero boundaries") {
    DriftConfig never = config;
    never.lambda_jsd = std::numeric_limits<double>::infinity();
    CHECK(partition_phases(posts, 0, 59 * kSecondsPerDay, never).empty());
  }
}
