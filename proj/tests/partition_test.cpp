#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "compref/partition.hpp"

using namespace compref;

namespace {

RefinedPartition two_by_two() {
  /* [20,30]^2 in 5 cells per dim, like one projected benchmark plane */
  Box domain = Box::cube(2, 20.0, 30.0);
  return RefinedPartition(GridPartition::uniform(domain, std::vector<int>{5, 5}));
}

/* apply n random splits to random leaves */
void random_splits(RefinedPartition& p, int n, std::mt19937_64& rng) {
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> cell_dist(
        0, p.base().cell_count() - 1);
    auto leaves = p.cell_leaves(cell_dist(rng));
    std::uniform_int_distribution<std::size_t> leaf_dist(0, leaves.size() - 1);
    const auto& pick = leaves[leaf_dist(rng)];
    if (pick.depth() < 5) p.split(pick);
  }
}

}  // namespace

TEST_CASE("splitting a square yields four identical sub-squares") {
  RefinedPartition p = two_by_two();
  std::vector<double> corner{29.0, 29.0};
  SymbolId top = p.locate(corner);
  CHECK(p.symbol_box(top) == Box({0, 1}, {28.0, 28.0}, {30.0, 30.0}));

  auto children = p.split(top);
  REQUIRE(children.size() == 4);
  double parent_volume = 0.0;
  for (const auto& c : children) {
    Box b = p.symbol_box(c);
    CHECK_THAT(b.width(0), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(b.width(1), Catch::Matchers::WithinAbs(1.0, 1e-12));
    parent_volume += b.volume();
  }
  CHECK_THAT(parent_volume, Catch::Matchers::WithinRel(4.0, 1e-12));
  CHECK_FALSE(p.is_leaf(top));
  CHECK_THROWS_AS(p.split(top), std::invalid_argument);
}

TEST_CASE("splitting a segment halves it") {
  Box domain = Box::cube(1, 0.0, 1.0);
  RefinedPartition p(GridPartition::uniform(domain, std::vector<int>{1}));
  auto children = p.split(SymbolId{0, {}});
  REQUIRE(children.size() == 2);
  CHECK(p.symbol_box(children[0]) == Box({0}, {0.0}, {0.5}));
  CHECK(p.symbol_box(children[1]) == Box({0}, {0.5}, {1.0}));
}

TEST_CASE("locate follows the half-open convention") {
  RefinedPartition p = two_by_two();
  /* interior of base cell (0,3): cells are row-major, first dim slowest */
  std::vector<double> x{20.5, 26.5};
  SymbolId s = p.locate(x);
  CHECK(s.cell == 3);
  CHECK(s.path.empty());

  /* on an interior cut: upper side wins */
  SymbolId on_cut = p.locate(std::vector<double>{22.0, 21.0});
  CHECK(on_cut.cell == p.base().locate_cell(std::vector<double>{22.0, 21.0}));
  CHECK(p.symbol_box(on_cut).low(0) == 22.0);

  /* two splits toward the lowest corner give the all-zero path */
  SymbolId root = p.locate(std::vector<double>{20.1, 20.1});
  auto kids = p.split(root);
  p.split(kids[0]);
  SymbolId deep = p.locate(std::vector<double>{20.1, 20.1});
  CHECK(deep.path == std::vector<std::uint32_t>{0, 0});

  /* domain top corner stays inside the topmost symbol */
  SymbolId top = p.locate(std::vector<double>{30.0, 30.0});
  CHECK(p.symbol_box(top).high(0) == 30.0);
  CHECK_THROWS_AS(p.locate(std::vector<double>{30.5, 25.0}), OutOfDomain);
}

TEST_CASE("volume is conserved and interiors stay disjoint under splits") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 5; ++trial) {
    RefinedPartition p = two_by_two();
    random_splits(p, 60, rng);

    double total = 0.0;
    std::vector<SymbolId> leaves;
    p.for_each_leaf([&](const SymbolId& s) {
      leaves.push_back(s);
      total += p.symbol_box(s).volume();
    });
    CHECK_THAT(total, Catch::Matchers::WithinRel(p.domain().volume(), 1e-9));

    std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
    for (int i = 0; i < 300; ++i) {
      const auto& a = leaves[pick(rng)];
      const auto& b = leaves[pick(rng)];
      if (a == b) continue;
      CHECK_FALSE(p.symbol_box(a).interior_intersects(p.symbol_box(b)));
    }

    /* locate of every leaf center returns that leaf */
    for (const auto& s : leaves) {
      auto c = p.symbol_box(s).center();
      CHECK(p.locate(c) == s);
    }
  }
}

TEST_CASE("covered_by is exact on symbol unions") {
  RefinedPartition p = two_by_two();
  SymbolId target = p.locate(std::vector<double>{21.0, 21.0});
  Box target_box = p.symbol_box(target);

  SECTION("a symbol covers itself") {
    SymbolSet region{target};
    CHECK(p.covered_by(target_box, region));
  }

  SECTION("a box straddling a valid and an invalid sibling is uncovered") {
    auto kids = p.split(target);
    SymbolSet region{kids[0]};
    Box straddle({0, 1}, {20.2, 20.2}, {21.8, 20.8});
    CHECK_FALSE(p.covered_by(straddle, region));
    region.insert(kids[1]);
    CHECK(p.covered_by(straddle, region));
  }

  SECTION("the union of all four children covers the parent") {
    auto kids = p.split(target);
    SymbolSet region(kids.begin(), kids.end());
    CHECK(p.covered_by(target_box, region));

    /* dense sampling oracle agrees: every sampled point lies in a region
       box (1000 points per dimension) */
    bool oracle = true;
    for (int i = 0; i < 1000 && oracle; ++i) {
      for (int j = 0; j < 1000; ++j) {
        std::vector<double> x{
            target_box.low(0) + (i + 0.5) * target_box.width(0) / 1000.0,
            target_box.low(1) + (j + 0.5) * target_box.width(1) / 1000.0};
        if (!region.count(p.locate(x))) {
          oracle = false;
          break;
        }
      }
    }
    CHECK(oracle);
  }
}

TEST_CASE("covered_by never contradicts a sampling oracle") {
  std::mt19937_64 rng(555);
  int positives = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RefinedPartition p = two_by_two();
    random_splits(p, 25, rng);

    std::vector<SymbolId> leaves;
    p.for_each_leaf([&](const SymbolId& s) { leaves.push_back(s); });
    SymbolSet region;
    std::bernoulli_distribution keep(0.7);
    for (const auto& s : leaves)
      if (keep(rng)) region.insert(s);

    const Box& dom = p.domain();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> a{dom.low(0) + unit(rng) * dom.width(0),
                          dom.low(1) + unit(rng) * dom.width(1)};
    std::vector<double> b{dom.low(0) + unit(rng) * dom.width(0),
                          dom.low(1) + unit(rng) * dom.width(1)};
    Box query({0, 1}, {std::min(a[0], b[0]), std::min(a[1], b[1])},
              {std::max(a[0], b[0]), std::max(a[1], b[1])});

    bool claim = p.covered_by(query, region);
    positives += claim;
    for (int i = 0; i < 10000; ++i) {
      std::vector<double> x{query.low(0) + unit(rng) * query.width(0),
                            query.low(1) + unit(rng) * query.width(1)};
      bool inside = region.count(p.locate(x)) > 0;
      if (claim) CHECK(inside);   /* a false positive would break soundness */
      if (!inside) break;
    }
  }
  /* the generator must exercise both answers */
  CHECK(positives > 0);
  CHECK(positives < 100);
}

TEST_CASE("leaves_touching counts boundary contact") {
  RefinedPartition p = two_by_two();
  Box probe({0, 1}, {22.0, 22.0}, {24.0, 24.0});  /* exactly base cell (1,1) */
  auto touched = p.leaves_touching(probe);
  /* the cell itself plus its eight boundary neighbors */
  CHECK(touched.size() == 9);
}
