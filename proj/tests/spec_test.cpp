#include <catch2/catch_amalgamated.hpp>

#include "compref/spec.hpp"

using namespace compref;

namespace {

CellSequence staircase() {
  /* 2-d grid of 3x3 cells on [0,6]^2, diagonal descent */
  GridPartition grid =
      GridPartition::uniform(Box::cube(2, 0.0, 6.0), std::vector<int>{3, 3});
  std::vector<std::size_t> cells{grid.index_of(std::vector<int>{2, 2}),
                                 grid.index_of(std::vector<int>{1, 1}),
                                 grid.index_of(std::vector<int>{0, 0})};
  return CellSequence(grid, std::move(cells));
}

}  // namespace

TEST_CASE("cell sequences validate their inputs") {
  GridPartition grid =
      GridPartition::uniform(Box::cube(1, 0.0, 1.0), std::vector<int>{2});
  CHECK_THROWS_AS(CellSequence(grid, {0}), std::invalid_argument);
  CHECK_THROWS_AS(CellSequence(grid, {0, 5}), std::invalid_argument);
  CellSequence seq(grid, {0, 1, 0, 1});  /* duplicates are allowed */
  CHECK(seq.horizon() == 3);
}

TEST_CASE("projected steps read off cell bounds") {
  CellSequence seq = staircase();
  CHECK(seq.box(0) == Box({0, 1}, {4.0, 4.0}, {6.0, 6.0}));
  CHECK(seq.projected_step(1, std::vector<int>{1}) == Box({1}, {2.0}, {4.0}));
  CHECK(seq.projected_step(2, std::vector<int>{0, 1}) == seq.box(2));
  CHECK_THROWS_AS(seq.box(3), std::out_of_range);
}

TEST_CASE("trace checking is pointwise cell membership") {
  CellSequence seq = staircase();
  std::vector<std::vector<double>> centers;
  for (int k = 0; k <= seq.horizon(); ++k)
    centers.push_back(seq.box(k).center());
  CHECK(seq.check_trace(centers));

  auto off = centers;
  off[1][0] = 1.0;  /* outside cell (1,1) in the first coordinate */
  CHECK_FALSE(seq.check_trace(off));

  auto outside = centers;
  outside[2] = {-1.0, -1.0};
  CHECK_FALSE(seq.check_trace(outside));

  std::vector<std::vector<double>> wrong_length(centers.begin(),
                                                centers.end() - 1);
  CHECK_THROWS_AS(seq.check_trace(wrong_length), std::invalid_argument);
}

TEST_CASE("boundary points follow the half-open location rule") {
  CellSequence seq = staircase();
  /* the shared facet between cells (1,1) and (2,2): the point (4,4) is in
     cell (2,2) by the upper-side rule, so it satisfies step 0, not step 1 */
  std::vector<std::vector<double>> trace{
      {4.0, 4.0}, seq.box(1).center(), seq.box(2).center()};
  CHECK(seq.check_trace(trace));
  std::vector<std::vector<double>> shifted{
      seq.box(0).center(), {4.0, 4.0}, seq.box(2).center()};
  CHECK_FALSE(seq.check_trace(shifted));
}
