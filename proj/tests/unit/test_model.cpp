#include "sbmsdp/matrix.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/rng.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <set>

using namespace sbmsdp;

TEST_SUITE("model") {

TEST_CASE("symmetric matrix validates its entries") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2.0000001, 1;
  CHECK_THROWS_AS(SymmetricMatrix{a}, std::invalid_argument);
  a(1, 0) = 2;
  CHECK_NOTHROW(SymmetricMatrix{a});
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SymmetricMatrix{a}, std::invalid_argument);
  a(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SymmetricMatrix{a}, std::invalid_argument);

  SymmetricMatrix m(3);
  m.set(0, 2, 4.5);
  CHECK(m(2, 0) == 4.5);
  CHECK_THROWS_AS(require_same_dim(3, 4, "x"), DimensionError);
}

TEST_CASE("philox matches the reference known-answer vectors") {
  using B = Philox::Block;
  CHECK(Philox(0).block(0, 0) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox(~0ULL).block(~0ULL, ~0ULL) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  // Counter words {243f6a88, 85a308d3, 13198a2e, 03707344}, key {a4093822, 299f31d0}.
  CHECK(Philox(0x299f31d0a4093822ULL).block(0x0370734413198a2eULL, 0x85a308d3243f6a88ULL) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("split seeds are deterministic and distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(split_seed(42, i));
  CHECK(seen.size() == 1000);
  CHECK(split_seed(42, 7) == split_seed(42, 7));
  CHECK(split_seed(42, 7) != split_seed(43, 7));

  PhiloxStream a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  PhiloxStream c(9);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7u);
}

TEST_CASE("balanced assignment") {
  CHECK(balanced_assignment(6, 2).labels() == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(balanced_assignment(6, 3).labels() == std::vector<int>{0, 0, 1, 1, 2, 2});
  const CommunityAssignment r1 = balanced_assignment(60, 4, 11);
  CHECK(r1 == balanced_assignment(60, 4, 11));
  CHECK(r1.balanced());
  CHECK(r1 != balanced_assignment(60, 4, 12));
  CHECK_THROWS_AS(balanced_assignment(7, 2), std::invalid_argument);
}

TEST_CASE("membership matrix and sign vector") {
  const CommunityAssignment a = balanced_assignment(12, 3, 3);
  const Eigen::MatrixXd z = a.membership_matrix().dense();
  for (int i = 0; i < 12; ++i) {
    CHECK(z(i, i) == 1.0);
    CHECK(z.row(i).sum() == doctest::Approx(4.0));
    for (int j = 0; j < 12; ++j) CHECK(z(i, j) == (a[i] == a[j] ? 1.0 : 0.0));
  }
  const CommunityAssignment two = balanced_assignment(10, 2, 1);
  const std::vector<int> x0 = two.sign_vector();
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) CHECK((x0[i] == x0[j]) == (two[i] == two[j]));
  }
}

TEST_CASE("mean matrix conventions") {
  const auto one = mean_matrix(5, 1, 3.0, -9.0, balanced_assignment(5, 1));
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) CHECK(one(i, j) == (i == j ? 0.0 : 3.0));
  }
  const auto singletons = mean_matrix(4, 4, 3.0, -1.0, balanced_assignment(4, 4));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(singletons(i, j) == (i == j ? 0.0 : -1.0));
  }
  // Relabeling the community names leaves the matrix unchanged.
  const CommunityAssignment a({0, 1, 2, 0, 1, 2}, 3);
  const CommunityAssignment b({2, 0, 1, 2, 0, 1}, 3);
  CHECK(mean_matrix(6, 3, 5, 2, a) == mean_matrix(6, 3, 5, 2, b));
}

TEST_CASE("degenerate zero-inflated law reproduces the mean matrix") {
  const int n = 12;
  const SbmModel model(n, 3, ZeroInflatedGaussian{double(n), double(n), 5, 2, 0, 0});
  const CommunityAssignment a = balanced_assignment(n, 3, 4);
  const SymmetricMatrix w = sample_sbm(model, a, 99);
  CHECK(w == mean_matrix(n, 3, 5, 2, a));
}

TEST_CASE("sample_sbm is deterministic with zero diagonal") {
  const SbmModel zig = SbmModel::zig_dense(30, 3, 0.5, 5, 2, 1);
  const SbmModel ber(30, 3, BernoulliLaw{0.6, 0.1});
  const SbmModel gau(30, 3, GaussianLaw{1, 0, 2});
  const CommunityAssignment a = balanced_assignment(30, 3, 1);
  for (const SbmModel* m : {&zig, &ber, &gau}) {
    const SymmetricMatrix w = sample_sbm(*m, a, 1234);
    CHECK(w == sample_sbm(*m, a, 1234));
    CHECK_FALSE(w == sample_sbm(*m, a, 1235));
    for (int i = 0; i < 30; ++i) CHECK(w(i, i) == 0.0);
    CHECK((w.dense() - w.dense().transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(sample_sbm(zig, balanced_assignment(33, 3), 1), DimensionError);
}

TEST_CASE("zig in-class empirical mean") {
  const int n = 200;
  const SbmModel model = SbmModel::zig_dense(n, 4, 0.4, 5, 2, 1);
  const CommunityAssignment a = balanced_assignment(n, 4, 8);
  const SymmetricMatrix w = sample_sbm(model, a, 2024);
  double sum = 0.0, sq = 0.0;
  long long count = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (a[i] != a[j]) continue;
      sum += w(i, j);
      sq += w(i, j) * w(i, j);
      ++count;
    }
  }
  const double mean = sum / count;
  const double se = std::sqrt((sq / count - mean * mean) / count);
  CHECK(std::abs(mean - 2.0) <= 3.0 * se);
  CHECK(model.m_in() == doctest::Approx(2.0));
  CHECK(model.m_out() == doctest::Approx(0.8));
}

TEST_CASE("zig entry variance stays below the variance factor") {
  const int n = 4;
  const SbmModel model = SbmModel::zig_dense(n, 2, 0.3, 5, 2, 1);
  const SubGammaParams sg = zig_subgamma(model);
  const CommunityAssignment a = balanced_assignment(n, 2);
  const int draws = 100000;
  double s_in = 0, q_in = 0, s_out = 0, q_out = 0;
  for (int d = 0; d < draws; ++d) {
    const SymmetricMatrix w = sample_sbm(model, a, split_seed(77, d));
    s_in += w(0, 1);
    q_in += w(0, 1) * w(0, 1);
    s_out += w(0, 2);
    q_out += w(0, 2) * w(0, 2);
  }
  const double var_in = q_in / draws - std::pow(s_in / draws, 2);
  const double var_out = q_out / draws - std::pow(s_out / draws, 2);
  // Variance of a sample variance is bounded by E[X^4] / draws; generous 3 SE.
  CHECK(var_in <= sg.nu_in + 3.0 * std::sqrt(2.0 * sg.nu_in * sg.nu_in / draws));
  CHECK(var_out <= sg.nu_out + 3.0 * std::sqrt(2.0 * sg.nu_out * sg.nu_out / draws));
  // Exact law variances: rho (mu^2 + tau^2) - rho^2 mu^2.
  CHECK(var_in == doctest::Approx(0.3 * 26 - 0.09 * 25).epsilon(0.03));
  CHECK(var_out == doctest::Approx(0.3 * 5 - 0.09 * 4).epsilon(0.03));
}

TEST_CASE("zig sub-gamma bookkeeping") {
  const SbmModel m(200, 2, ZeroInflatedGaussian{100, 100, 5, 2, 1, 1});
  const SubGammaParams sg = zig_subgamma(m);
  CHECK(sg.w_plus == doctest::Approx(14400.0));
  CHECK(sg.nu_in == doctest::Approx(4 * 0.5 * 36));
  CHECK(sg.c_in == doctest::Approx(std::sqrt(2.0) * 6));
  CHECK(sg.c_out == doctest::Approx(std::sqrt(2.0) * 3));
  CHECK(sg.theta == doctest::Approx(std::max(sg.c_in, sg.c_out) / std::sqrt(sg.w_plus)));
  CHECK(200 * std::max(sg.nu_in, sg.nu_out) == sg.w_plus);

  const SbmModel sym(50, 2, ZeroInflatedGaussian{20, 20, 0, 0, 1, 1});
  const SubGammaParams s2 = zig_subgamma(sym);
  CHECK(s2.nu_in == doctest::Approx(4.0 * 20 / 50));
  CHECK(s2.nu_out == doctest::Approx(s2.nu_in));

  double prev = std::numeric_limits<double>::infinity();
  for (int n : {20, 40, 80, 160, 320}) {
    const SbmModel g(n, 2, ZeroInflatedGaussian{0.5 * n, 0.5 * n, 5, 2, 1, 1});
    const double theta = zig_subgamma(g).theta;
    CHECK(theta < prev);
    prev = theta;
  }
  CHECK_THROWS_AS(zig_subgamma(SbmModel(10, 2, BernoulliLaw{0.5, 0.1})), std::invalid_argument);
}

TEST_CASE("sub-gamma parameters of the other laws") {
  const SubGammaParams g = subgamma(SbmModel(40, 2, GaussianLaw{1, 0, 3}));
  CHECK(g.nu_in == doctest::Approx(9.0));
  CHECK(g.c_in == 0.0);
  CHECK(g.w_plus == doctest::Approx(40 * 9.0));
  const SubGammaParams b = subgamma(SbmModel(40, 2, BernoulliLaw{0.5, 0.1}));
  CHECK(b.nu_in == doctest::Approx(0.25));
  CHECK(b.nu_out == doctest::Approx(0.09));
  CHECK(b.w_plus == doctest::Approx(40 * 0.25));
}

TEST_CASE("model validation and assumption report") {
  CHECK_THROWS_AS(SbmModel(10, 3, GaussianLaw{1, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SbmModel(10, 2, BernoulliLaw{1.5, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(SbmModel(10, 2, ZeroInflatedGaussian{11, 1, 1, 0, 1, 1}), std::invalid_argument);
  CHECK(SbmModel::zig_dense(200, 2, 0.8, 5, 2, 1).assumption_violations().empty());
  CHECK_FALSE(SbmModel(10, 2, GaussianLaw{0, 1, 1}).assumption_violations().empty());
}

TEST_CASE("goe moments") {
  {
    const int draws = 10000;
    double s = 0, q = 0;
    long long count = 0;
    for (int d = 0; d < draws; ++d) {
      const SymmetricMatrix b = sample_goe(4, split_seed(5, d));
      for (int j = 0; j < 4; ++j) {
        for (int i = 0; i <= j; ++i) {
          s += b(i, j);
          q += b(i, j) * b(i, j);
          ++count;
        }
      }
    }
    const double mean = s / count;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt((q / count - mean * mean) / count));
  }
  {
    const int draws = 100000;
    double s = 0, q = 0, qd = 0;
    for (int d = 0; d < draws; ++d) {
      const SymmetricMatrix b = sample_goe(10, split_seed(6, d));
      s += b(0, 1);
      q += b(0, 1) * b(0, 1);
      qd += b(3, 3) * b(3, 3);
    }
    CHECK(q / draws - std::pow(s / draws, 2) == doctest::Approx(0.1).epsilon(0.1));
    CHECK(qd / draws == doctest::Approx(0.2).epsilon(0.1));
  }
  {
    const int n = 500;
    // Edge of the semicircle for the unnormalized ensemble sqrt(n) B.
    const SymmetricMatrix b = sample_goe(n, 3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(std::sqrt(double(n)) * b.dense(),
                                                       Eigen::EigenvaluesOnly);
    const double edge = eig.eigenvalues()(n - 1) / std::sqrt(double(n));
    CHECK(edge >= 1.8);
    CHECK(edge <= 2.1);
  }
}

TEST_CASE("null mixture has the averaged mean") {
  const int n = 120;
  const SbmModel model(n, 2, GaussianLaw{4, 0, 0.5});
  const SymmetricMatrix w = sample_null_mixture(model, 17);
  CHECK(w == sample_null_mixture(model, 17));
  double s = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) s += w(i, j);
  }
  const double pairs = n * (n - 1) / 2.0;
  // Per-entry sd is about sqrt(4 + 0.25); 4 standard errors.
  CHECK(std::abs(s / pairs - 2.0) <= 4.0 * std::sqrt(4.25 / pairs));
}

}  // TEST_SUITE
