#include "sqap/instance.hpp"

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "support.hpp"

namespace {

using sqap::GeneratorConfig;
using sqap::MatrixOrder;
using sqap::QapInstance;

const char* kTiny =
    "3\n"
    "0 2 0\n"
    "2 0 5\n"
    "0 5 0\n"
    "0 1 3\n"
    "1 0 4\n"
    "3 4 0\n";

TEST(Parse, ReadsFlowThenDistance) {
  const QapInstance inst = sqap::parse_qaplib(std::string(kTiny));
  EXPECT_EQ(inst.n, 3);
  EXPECT_EQ(inst.flow_at(0, 1), 2);
  EXPECT_EQ(inst.flow_at(1, 2), 5);
  EXPECT_EQ(inst.dist_at(0, 2), 3);
  EXPECT_EQ(inst.dist_at(1, 2), 4);
  ASSERT_EQ(inst.adjacency.size(), 3u);
  EXPECT_EQ(inst.adjacency[0].size(), 1u);
  EXPECT_EQ(inst.adjacency[1].size(), 2u);
  EXPECT_EQ(inst.adjacency[1][0].first, 0);
  EXPECT_EQ(inst.adjacency[1][1].first, 2);
}

TEST(Parse, DistFirstFlipsMatrices) {
  const QapInstance inst = sqap::parse_qaplib(std::string(kTiny), MatrixOrder::dist_first);
  EXPECT_EQ(inst.dist_at(0, 1), 2);
  EXPECT_EQ(inst.flow_at(0, 2), 3);
}

TEST(Parse, RejectsNonInteger) {
  try {
    sqap::parse_qaplib(std::string("3\n0 2 x\n"));
    FAIL() << "expected MalformedFileError";
  } catch (const sqap::MalformedFileError& e) {
    EXPECT_NE(std::string(e.what()).find("token 3"), std::string::npos);
  }
}

TEST(Parse, RejectsWrongTokenCount) {
  try {
    sqap::parse_qaplib(std::string("3\n0 2 0\n2 0 5\n"));
    FAIL() << "expected MalformedFileError";
  } catch (const sqap::MalformedFileError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("expected 19"), std::string::npos);
    EXPECT_NE(msg.find("token index 7"), std::string::npos);
  }
}

TEST(Parse, RejectsEmpty) {
  EXPECT_THROW(sqap::parse_qaplib(std::string("")), sqap::MalformedFileError);
  EXPECT_THROW(sqap::parse_qaplib(std::string("   \n\t")), sqap::MalformedFileError);
}

TEST(Parse, RejectsSizeOutOfRange) {
  EXPECT_THROW(sqap::parse_qaplib(std::string("0")), sqap::MalformedFileError);
  EXPECT_THROW(sqap::parse_qaplib(std::string("-4")), sqap::MalformedFileError);
  EXPECT_THROW(sqap::parse_qaplib(std::string("100001")), sqap::MalformedFileError);
}

TEST(Parse, RejectsNegativeEntry) {
  const std::string text = "2\n0 -1\n-1 0\n0 1\n1 0\n";
  EXPECT_THROW(sqap::parse_qaplib(text), sqap::UnsupportedInstanceError);
}

TEST(Parse, RejectsAsymmetry) {
  const std::string text = "2\n0 1\n2 0\n0 1\n1 0\n";
  try {
    sqap::parse_qaplib(text);
    FAIL() << "expected UnsupportedInstanceError";
  } catch (const sqap::UnsupportedInstanceError& e) {
    EXPECT_NE(std::string(e.what()).find("flow[0][1]"), std::string::npos);
  }
}

TEST(Parse, RejectsNonzeroDiagonal) {
  const std::string text = "2\n3 1\n1 0\n0 1\n1 0\n";
  EXPECT_THROW(sqap::parse_qaplib(text), sqap::UnsupportedInstanceError);
}

TEST(Parse, RejectsOversizedEntry) {
  const std::string text = "2\n0 9999999999\n9999999999 0\n0 1\n1 0\n";
  EXPECT_THROW(sqap::parse_qaplib(text), sqap::UnsupportedInstanceError);
}

TEST(Parse, RejectsCostOverflow) {
  // Large symmetric entries whose product with n^2 cannot fit 64 bits.
  const std::string big = "2000000000";
  const std::string text = "2\n0 " + big + "\n" + big + " 0\n0 " + big + "\n" + big + " 0\n";
  EXPECT_THROW(sqap::parse_qaplib(text), sqap::UnsupportedInstanceError);
}

TEST(RoundTrip, WriteThenParsePreservesData) {
  const QapInstance inst = sqap::generate_instance({12, 3, 7});
  const std::string text = sqap::write_qaplib(inst);
  const QapInstance back = sqap::parse_qaplib(text);
  EXPECT_TRUE(inst.same_data(back));
}

TEST(Validate, AcceptsGenerated) {
  const QapInstance inst = sqap::generate_instance({10, 3, 1});
  EXPECT_TRUE(sqap::validate(inst).empty());
}

TEST(Validate, FlagsAsymmetry) {
  QapInstance inst = sqap::generate_instance({6, 3, 1});
  inst.flow[1] += 1;  // break flow[0][1] == flow[1][0]
  const auto violations = sqap::validate(inst);
  ASSERT_FALSE(violations.empty());
  bool found = false;
  for (const auto& v : violations) found |= v.invariant == "symmetry";
  EXPECT_TRUE(found);
}

TEST(Validate, FlagsDiagonalAndAdjacency) {
  QapInstance inst = sqap::generate_instance({6, 3, 1});
  inst.dist[0] = 5;  // dist[0][0]
  inst.adjacency[2].clear();
  std::set<std::string> kinds;
  for (const auto& v : sqap::validate(inst)) kinds.insert(v.invariant);
  EXPECT_TRUE(kinds.count("null-diagonal"));
  EXPECT_TRUE(kinds.count("adjacency"));
}

TEST(Generate, ProducesKRegularSymmetricFlows) {
  for (auto [n, k] : {std::pair{16, 3}, std::pair{25, 4}, std::pair{40, 9}}) {
    const QapInstance inst = sqap::generate_instance({n, k, 99});
    EXPECT_TRUE(sqap::validate(inst).empty());
    for (int i = 0; i < n; ++i) {
      int deg = 0;
      for (int j = 0; j < n; ++j) {
        EXPECT_EQ(inst.flow_at(i, j), inst.flow_at(j, i));
        if (inst.flow_at(i, j) != 0) {
          EXPECT_EQ(inst.flow_at(i, j), 1);
          ++deg;
        }
      }
      EXPECT_EQ(deg, k) << "node " << i << " of n=" << n << " k=" << k;
      EXPECT_EQ(static_cast<int>(inst.adjacency[static_cast<std::size_t>(i)].size()), k);
    }
  }
}

TEST(Generate, GridDistances) {
  // n = 9 sits on a 3x3 grid; check a few exact rounded distances.
  const QapInstance inst = sqap::generate_instance({9, 2, 5});
  EXPECT_EQ(inst.dist_at(0, 1), 1000);   // (0,0) - (1,0)
  EXPECT_EQ(inst.dist_at(0, 4), 1414);   // diagonal sqrt(2)
  EXPECT_EQ(inst.dist_at(0, 8), 2828);   // double diagonal
  EXPECT_EQ(inst.dist_at(0, 2), 2000);
  EXPECT_EQ(inst.dist_at(3, 5), 2000);
}

TEST(Generate, DeterministicPerSeed) {
  const QapInstance a = sqap::generate_instance({30, 4, 123});
  const QapInstance b = sqap::generate_instance({30, 4, 123});
  const QapInstance c = sqap::generate_instance({30, 4, 124});
  EXPECT_TRUE(a.same_data(b));
  EXPECT_EQ(a.name, b.name);
  EXPECT_FALSE(a.same_data(c));
}

TEST(Generate, NameEncodesParameters) {
  const QapInstance inst = sqap::generate_instance({12, 3, 7});
  EXPECT_EQ(inst.name, "grid-kreg-n12-k3-s7");
}

TEST(Generate, RejectsImpossibleConfigs) {
  EXPECT_THROW(sqap::generate_instance({5, 3, 1}), sqap::InvalidConfigError);   // n*k odd
  EXPECT_THROW(sqap::generate_instance({6, 0, 1}), sqap::InvalidConfigError);   // k too small
  EXPECT_THROW(sqap::generate_instance({6, 6, 1}), sqap::InvalidConfigError);   // k >= n
  EXPECT_THROW(sqap::generate_instance({1, 1, 1}), sqap::InvalidConfigError);   // n too small
  EXPECT_THROW(sqap::generate_instance({6, 3, 1, 0}), sqap::InvalidConfigError);  // bad scale
}

TEST(Generate, HandlesDenseCornerCases) {
  // k = n-1 forces the complete graph; the pairing must still terminate.
  const QapInstance inst = sqap::generate_instance({6, 5, 3});
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      EXPECT_EQ(inst.flow_at(i, j), i == j ? 0 : 1);
}

TEST(Sparsity, CountsOffDiagonalNonzeros) {
  const QapInstance inst = sqap::generate_instance({10, 3, 1});
  EXPECT_DOUBLE_EQ(sqap::sparsity(inst), 30.0 / 90.0);
  sqap::SplitMix64 rng(4);
  const QapInstance dense = testutil::random_instance(8, 1.0, rng);
  EXPECT_DOUBLE_EQ(sqap::sparsity(dense), 1.0);
}

}  // namespace
