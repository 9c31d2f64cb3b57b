#include <catch2/catch_amalgamated.hpp>

#include "mdclab/analysis.hpp"
#include "mdclab/rng.hpp"

using namespace mdclab;

namespace {
constexpr BitPair b00{false, false}, b01{false, true}, b10{true, false}, b11{true, true};
}

TEST_CASE("epbc pair map singleton rows") {
  REQUIRE(epbc_pair_map(b11) == b10);
  REQUIRE(epbc_pair_map(b10) == b11);
  REQUIRE(epbc_pair_map(b01) == b00);
  REQUIRE(epbc_pair_map(b00) == b10);
  // the image never contains (0,1)
  for (unsigned c = 0; c < 4; ++c) REQUIRE(epbc_pair_map(BitPair::from_code(c)) != b01);
}

TEST_CASE("pair map applied positionwise equals the block-level mixer") {
  const BlockWidth w(8);
  for (unsigned v = 0; v < 256; ++v) {
    Block x = Block::from_u64(w, v);
    Block expected = Block::zeros(w);
    for (unsigned i = 1; i <= 4; ++i) {
      BitPair out = epbc_pair_map({x.bit(i), x.bit(4 + i)});
      expected = expected.with_bit(i, out.l).with_bit(4 + i, out.r);
    }
    REQUIRE(g_epbc(x) == expected);
  }
}

TEST_CASE("pair_image on published rows") {
  REQUIRE(pair_image(PairSet::all()) == PairSet{b00, b10, b11});
  REQUIRE(pair_image(PairSet{b00, b11}) == PairSet{b10});
  REQUIRE(pair_image(PairSet{b10, b11}) == PairSet{b10, b11});
  REQUIRE_THROWS_AS(pair_image(PairSet{}), bounds_error);
}

TEST_CASE("pair_image is monotone over all non-empty sets") {
  std::vector<PairSet> sets;
  for (unsigned mask = 1; mask < 16; ++mask) {
    PairSet s;
    for (unsigned c = 0; c < 4; ++c)
      if ((mask >> c) & 1u) s.insert(BitPair::from_code(c));
    sets.push_back(s);
  }
  REQUIRE(sets.size() == 15);
  for (const PairSet& a : sets) {
    for (const PairSet& b : sets) {
      if (a.subset_of(b)) REQUIRE(pair_image(a).subset_of(pair_image(b)));
    }
  }
}

TEST_CASE("the full fifteen-row table reproduces") {
  Table1Report rep = verify_table1();
  REQUIRE(rep.rows.size() == 15);
  REQUIRE(rep.all_match);
  for (const auto& row : rep.rows) {
    REQUIRE(row.match);
    REQUIRE_FALSE(row.computed.contains(b01));
  }
}

TEST_CASE("possibility propagation sizes") {
  // singleton in, singleton out
  for (unsigned f = 0; f < 4; ++f)
    for (unsigned p = 0; p < 4; ++p)
      REQUIRE(propagate_possibilities(PairSet{BitPair::from_code(f)}, BitPair::from_code(p))
                  .size() == 1);

  // two-possibility sets with difference 01 or 10 never collapse
  for (unsigned a = 0; a < 4; ++a) {
    for (unsigned b = a + 1; b < 4; ++b) {
      const unsigned diff = a ^ b;
      for (unsigned p = 0; p < 4; ++p) {
        const unsigned size =
            propagate_possibilities(PairSet{BitPair::from_code(a), BitPair::from_code(b)},
                                    BitPair::from_code(p))
                .size();
        if (diff == 1 || diff == 2) REQUIRE(size == 2);
      }
    }
  }
}

TEST_CASE("di flaw report: per-difference minima") {
  DiFlawReport rep = di_flaw_check();
  REQUIRE(rep.classes[0].difference == b01);
  REQUIRE(rep.classes[0].min_size == 2);
  REQUIRE(rep.classes[1].difference == b10);
  REQUIRE(rep.classes[1].min_size == 2);
  // difference 11 can collapse: {00,11} maps to the singleton {10}
  REQUIRE(rep.classes[2].difference == b11);
  REQUIRE(rep.classes[2].min_size == 1);
  REQUIRE(rep.classes[2].witness_out.size() == 1);
}

TEST_CASE("binomials against a Pascal-triangle oracle") {
  // independent route: Pascal's triangle by addition only
  std::vector<std::vector<BigInt>> pascal(65);
  for (unsigned m = 0; m <= 64; ++m) {
    pascal[m].resize(m + 1);
    pascal[m][0] = pascal[m][m] = 1;
    for (unsigned k = 1; k < m; ++k) pascal[m][k] = pascal[m - 1][k - 1] + pascal[m - 1][k];
  }
  for (unsigned m = 0; m <= 64; m += 3) {
    for (unsigned k = 0; k <= m; ++k) {
      REQUIRE(binomial(m, k) == pascal[m][k]);
    }
  }
  BigInt sum = 0;
  for (unsigned i = 0; i <= 8; ++i) sum += pascal[32][i];
  REQUIRE(sum == BigInt(15033173));
  REQUIRE(binom_sum(32, 8) == sum);
}

TEST_CASE("binom_sum values and bounds") {
  REQUIRE(binom_sum(32, 8) == BigInt(15033173));
  REQUIRE(binom_sum(17, 0) == BigInt(1));
  REQUIRE(binom_sum(4, 4) == BigInt(16));
  REQUIRE_THROWS_AS(binom_sum(4, 5), bounds_error);

  REQUIRE(round_3sf(binom_sum(32, 8)) == "1.50e7");
  REQUIRE(round_3sf(binom_sum(64, 16)) == "7.13e14");
  const double l32 = log2_big(binom_sum(32, 8));
  REQUIRE(l32 > 23.7);
  REQUIRE(l32 < 23.9);
  const double l64 = log2_big(binom_sum(64, 16));
  REQUIRE(l64 > 49.2);
  REQUIRE(l64 < 49.4);
}

TEST_CASE("binomial-sum bound: exact rational value and strictness") {
  // m=32, k=8: bound = C(32,8) * 25 / 17
  const BigRational bound = binco_bound(32, 8);
  REQUIRE(bound == BigRational(BigInt(10518300) * 25, 17));
  REQUIRE(BigRational(binom_sum(32, 8)) < bound);

  // the k=0 edge: both sides equal 1, the inequality is not strict there
  REQUIRE(binco_bound(20, 0) == BigRational(1));
  REQUIRE(BigRational(binom_sum(20, 0)) == binco_bound(20, 0));

  REQUIRE_THROWS_AS(binco_bound(10, 5), bounds_error);
  REQUIRE_THROWS_AS(binco_bound(10, 6), bounds_error);
  REQUIRE_THROWS_AS(binco_bound(0, 0), bounds_error);

  // strict for every 1 <= k < m/2 up to m = 64, in exact arithmetic
  for (unsigned m = 3; m <= 64; ++m)
    for (unsigned k = 1; 2 * k < m; ++k)
      REQUIRE(BigRational(binom_sum(m, k)) < binco_bound(m, k));
}

TEST_CASE("round_3sf formatting") {
  REQUIRE(round_3sf(BigInt(1)) == "1.00e0");
  REQUIRE(round_3sf(BigInt(999)) == "9.99e2");
  REQUIRE(round_3sf(BigInt(9995)) == "1.00e4");
  REQUIRE(round_3sf(BigInt(12349)) == "1.23e4");
  REQUIRE(round_3sf(BigInt(12351)) == "1.24e4");
  REQUIRE_THROWS_AS(round_3sf(BigInt(0)), bounds_error);
}

TEST_CASE("attack cost table rows") {
  const std::vector<unsigned> widths{8, 64, 128};
  auto rows = attack_cost_table(widths);
  REQUIRE(rows.size() == 3);

  REQUIRE(rows[0].n == 8);
  REQUIRE(rows[0].best_k == 5);
  REQUIRE(rows[0].best_log2 == -2);

  REQUIRE(rows[1].n == 64);
  REQUIRE(rows[1].guess_space == BigInt(15033173));
  REQUIRE(rows[1].guess_log2 == Catch::Approx(23.84).margin(0.01));
  REQUIRE(rows[1].birthday_log2 == 32.0);
  REQUIRE(rows[1].best_k == 341);
  REQUIRE(rows[1].best_log2 == -22);

  REQUIRE(rows[2].n == 128);
  REQUIRE(round_3sf(rows[2].guess_space) == "7.13e14");
  REQUIRE(rows[2].best_k == 1365);
  REQUIRE(rows[2].best_log2 == -42);

  const std::vector<unsigned> bad{12};
  REQUIRE_THROWS_AS(attack_cost_table(bad), width_error);
}

TEST_CASE("pair set string forms") {
  REQUIRE(PairSet{b00, b10, b11}.str() == "{00,10,11}");
  REQUIRE(PairSet{b10}.str() == "{10}");
  REQUIRE(b01.str() == "01");
}
