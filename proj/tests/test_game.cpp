#include <doctest.h>

#include <map>

#include "pursuit/game.hpp"
#include "test_util.hpp"

using namespace pursuit;

namespace {

const BoardConfig kBoard{8, 8, 4};

GameState make_state(std::vector<GridPos> captors, GridPos fugitive) {
  return GameState{std::move(captors), fugitive, 0};
}

}  // namespace

TEST_CASE("apply_direction follows the coordinate convention") {
  CHECK(apply_direction({2, 2}, MoveDir::Up, kBoard) == GridPos{2, 3});
  CHECK(apply_direction({2, 2}, MoveDir::Down, kBoard) == GridPos{2, 1});
  CHECK(apply_direction({2, 2}, MoveDir::Left, kBoard) == GridPos{1, 2});
  CHECK(apply_direction({2, 2}, MoveDir::Right, kBoard) == GridPos{3, 2});
  CHECK(apply_direction({5, 5}, MoveDir::Stay, kBoard) == GridPos{5, 5});
  CHECK_THROWS_AS(apply_direction({0, 0}, MoveDir::Left, kBoard), OutOfBounds);
  CHECK_THROWS_AS(apply_direction({7, 7}, MoveDir::Up, kBoard), OutOfBounds);
}

TEST_CASE("apply_direction then its opposite is the identity") {
  for (int x = 0; x < kBoard.width; ++x) {
    for (int y = 0; y < kBoard.height; ++y) {
      for (MoveDir d : kAllDirs) {
        const GridPos p{x, y};
        const GridPos q = displace(p, d);
        if (!kBoard.contains(q)) continue;
        CHECK(apply_direction(apply_direction(p, d, kBoard), opposite(d), kBoard) == p);
      }
    }
  }
}

TEST_CASE("board config validation") {
  CHECK_NOTHROW(BoardConfig{8, 8, 4}.validate());
  CHECK_THROWS_WITH_AS(BoardConfig({0, 5, 4}).validate(), doctest::Contains("width"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(BoardConfig({5, 2, 4}).validate(), doctest::Contains("height"),
                       std::invalid_argument);
  CHECK_THROWS(BoardConfig{3, 3, 1}.validate());
  // 9 cells cannot hold 8 entities plus an empty cell.
  CHECK_THROWS(BoardConfig{3, 3, 8}.validate());
  CHECK_NOTHROW(BoardConfig{3, 3, 7}.validate());
}

TEST_CASE("state validation") {
  CHECK(is_valid_state(make_state({{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {4, 4}), kBoard));
  CHECK_FALSE(is_valid_state(make_state({{0, 0}, {0, 0}, {2, 2}, {3, 3}}, {4, 4}), kBoard));
  CHECK_FALSE(is_valid_state(make_state({{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {3, 3}), kBoard));
  CHECK_FALSE(is_valid_state(make_state({{0, 0}, {1, 1}, {2, 2}, {8, 3}}, {4, 4}), kBoard));
  CHECK_FALSE(is_valid_state(make_state({{0, 0}, {1, 1}, {2, 2}}, {4, 4}), kBoard));
}

TEST_CASE("joint move legality verdicts") {
  const GameState s = make_state({{3, 3}, {3, 5}, {0, 3}, {7, 0}}, {6, 6});
  using D = MoveDir;

  CHECK(is_joint_move_legal(s, {{D::Stay, D::Stay, D::Stay, D::Stay}}, kBoard) ==
        Legality::NoMovement);
  CHECK(is_joint_move_legal(s, {{D::Stay, D::Stay, D::Left, D::Stay}}, kBoard) ==
        Legality::OutOfBounds);
  CHECK(is_joint_move_legal(s, {{D::Up, D::Down, D::Stay, D::Stay}}, kBoard) ==
        Legality::Collision);
  CHECK(is_joint_move_legal(s, {{D::Up, D::Stay, D::Stay, D::Stay}}, kBoard) == Legality::Legal);
  CHECK(is_joint_move_legal(s, {{D::Up, D::Stay, D::Stay}}, kBoard) == Legality::WrongLength);

  // Captors may not land on the fugitive.
  const GameState near = make_state({{5, 6}, {0, 0}, {1, 0}, {2, 0}}, {6, 6});
  CHECK(is_joint_move_legal(near, {{D::Right, D::Stay, D::Stay, D::Stay}}, kBoard) ==
        Legality::OntoFugitive);

  // A captor staying put blocks another moving into its cell.
  const GameState line = make_state({{2, 2}, {3, 2}, {0, 7}, {7, 7}}, {5, 5});
  CHECK(is_joint_move_legal(line, {{D::Right, D::Stay, D::Stay, D::Stay}}, kBoard) ==
        Legality::Collision);
  // ...but following a captor that moves away is fine.
  CHECK(is_joint_move_legal(line, {{D::Right, D::Right, D::Stay, D::Stay}}, kBoard) ==
        Legality::Legal);
}

TEST_CASE("is_joint_move_legal is pure") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const GameState s = testutil::random_state(kBoard, rng);
    const JointMove jm = testutil::random_joint_move(kBoard.num_captors, rng);
    const Legality a = is_joint_move_legal(s, jm, kBoard);
    const GameState copy = s;
    CHECK(is_joint_move_legal(copy, jm, kBoard) == a);
    CHECK(copy == s);
  }
}

TEST_CASE("apply_joint_move displaces synchronously") {
  using D = MoveDir;
  const GameState s = make_state({{3, 3}, {6, 6}, {0, 0}, {7, 0}}, {5, 1});
  const GameState n = apply_joint_move(s, {{D::Right, D::Stay, D::Up, D::Stay}}, kBoard);
  CHECK(n.captors == std::vector<GridPos>{{4, 3}, {6, 6}, {0, 1}, {7, 0}});
  CHECK(n.fugitive == s.fugitive);
  CHECK(n.turn == s.turn);

  SUBCASE("swap") {
    const GameState w = make_state({{2, 2}, {2, 3}, {6, 6}, {7, 0}}, {5, 1});
    const GameState m = apply_joint_move(w, {{D::Up, D::Down, D::Stay, D::Stay}}, kBoard);
    CHECK(m.captors[0] == GridPos{2, 3});
    CHECK(m.captors[1] == GridPos{2, 2});
    CHECK(is_valid_state(m, kBoard));
  }

  SUBCASE("illegal move is rejected") {
    CHECK_THROWS_AS(apply_joint_move(s, {{D::Stay, D::Stay, D::Stay, D::Stay}}, kBoard),
                    IllegalMove);
  }
}

TEST_CASE("legal joint moves preserve state invariants (fuzz)") {
  Rng rng(2024);
  int applied = 0;
  while (applied < 10000) {
    const GameState s = testutil::random_state(kBoard, rng);
    const JointMove jm = testutil::random_joint_move(kBoard.num_captors, rng);
    if (is_joint_move_legal(s, jm, kBoard) != Legality::Legal) continue;
    const GameState n = apply_joint_move(s, jm, kBoard);
    REQUIRE(is_valid_state(n, kBoard));
    ++applied;
  }
}

TEST_CASE("capture detection") {
  CHECK(is_captured(make_state({{1, 0}, {0, 1}, {5, 5}, {6, 6}}, {0, 0}), kBoard));
  CHECK(is_captured(make_state({{3, 4}, {5, 4}, {4, 3}, {4, 5}}, {4, 4}), kBoard));
  CHECK_FALSE(is_captured(make_state({{3, 4}, {5, 4}, {4, 3}, {0, 0}}, {4, 4}), kBoard));
  // Diagonal captors do not block.
  CHECK_FALSE(is_captured(make_state({{1, 1}, {2, 2}, {5, 5}, {6, 6}}, {0, 0}), kBoard));
  // Edge cell: three neighbours.
  CHECK(is_captured(make_state({{2, 0}, {4, 0}, {3, 1}, {6, 6}}, {3, 0}), kBoard));
}

TEST_CASE("fugitive legal moves") {
  using D = MoveDir;
  CHECK(fugitive_legal_moves(make_state({{1, 0}, {5, 5}, {6, 6}, {7, 7}}, {0, 0}), kBoard) ==
        std::vector<D>{D::Up, D::Stay});
  CHECK(fugitive_legal_moves(make_state({{0, 0}, {1, 1}, {6, 6}, {7, 7}}, {4, 4}), kBoard) ==
        std::vector<D>{D::Up, D::Down, D::Left, D::Right, D::Stay});
  CHECK(fugitive_legal_moves(make_state({{3, 4}, {5, 4}, {4, 3}, {4, 5}}, {4, 4}), kBoard) ==
        std::vector<D>{D::Stay});
}

TEST_CASE("captured implies only Stay remains (fuzz)") {
  Rng rng(5);
  int captured = 0;
  for (int k = 0; k < 20000; ++k) {
    const GameState s = testutil::random_state(BoardConfig{4, 4, 4}, rng);
    if (!is_captured(s, BoardConfig{4, 4, 4})) continue;
    ++captured;
    CHECK(fugitive_legal_moves(s, BoardConfig{4, 4, 4}) == std::vector<MoveDir>{MoveDir::Stay});
  }
  CHECK(captured > 0);
}

TEST_CASE("random fugitive move") {
  using D = MoveDir;
  SUBCASE("forced Stay") {
    const GameState s = make_state({{3, 4}, {5, 4}, {4, 3}, {4, 5}}, {4, 4});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      CHECK(random_fugitive_move(s, kBoard, rng) == D::Stay);
    }
  }
  SUBCASE("uniform over {Up, Stay}") {
    const GameState s = make_state({{1, 0}, {5, 5}, {6, 6}, {7, 7}}, {0, 0});
    Rng rng(99);
    std::map<D, int> counts;
    for (int k = 0; k < 10000; ++k) counts[random_fugitive_move(s, kBoard, rng)]++;
    CHECK(counts.size() == 2);
    CHECK(std::abs(counts[D::Up] - 5000) <= 300);
    CHECK(std::abs(counts[D::Stay] - 5000) <= 300);
  }
  SUBCASE("deterministic for a seed") {
    const GameState s = make_state({{0, 0}, {1, 1}, {6, 6}, {7, 7}}, {4, 4});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng a(seed);
      Rng b(seed);
      CHECK(random_fugitive_move(s, kBoard, a) == random_fugitive_move(s, kBoard, b));
    }
  }
}

TEST_CASE("direction names round-trip") {
  for (MoveDir d : kAllDirs) CHECK(parse_dir(to_string(d)) == d);
  CHECK_FALSE(parse_dir("Diagonal").has_value());
}
