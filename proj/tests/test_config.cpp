#include "ranging/config.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace ranging;

TEST_CASE("defaults carry the paper's dimensions") {
  const SystemConfig c;
  CHECK(c.N == 1024);
  CHECK(c.Ng == 64);
  CHECK(c.M == 144);
  CHECK(c.G == 32);
  CHECK(c.D == 186);
  CHECK(c.P_max == 30);
  CHECK(c.N1 == c.P_max + c.D);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config round trip and N1 default") {
  std::istringstream in("# comment\nN = 256\nNg=16\nM = 36 # trailing\nG = 8\nD = 40\nP_max = 8\n"
                        "pfa = 0.01\nkappa = 0.7\nsubcarrier_layout = even\n");
  const RunConfig c = parse_config(in);
  CHECK(c.system.N == 256);
  CHECK(c.system.N1 == 48);
  CHECK(c.pipeline.pfa == 0.01);
  CHECK(c.pipeline.kappa == 0.7);
  CHECK(c.system.layout == SubcarrierLayout::Even);

  std::stringstream text;
  write_config(text, c);
  const RunConfig back = parse_config(text);
  CHECK(back.system.N1 == 48);
  CHECK(back.pipeline.kappa == 0.7);
  CHECK(resolve_subcarriers(back.system) == resolve_subcarriers(c.system));
}

TEST_CASE("config errors") {
  std::istringstream unknown("bogus = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), std::invalid_argument);
  std::istringstream bad("N = ten\n");
  CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
  std::istringstream no_eq("N 10\n");
  CHECK_THROWS_AS(parse_config(no_eq), std::invalid_argument);

  SystemConfig c;
  c.D = c.N;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SystemConfig{};
  c.M = c.N + 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SystemConfig{};
  c.subcarriers = std::vector<int>(144, 3);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("subcarrier layouts") {
  SystemConfig c;
  const auto random = resolve_subcarriers(c);
  CHECK(random.size() == 144);
  CHECK(std::set<int>(random.begin(), random.end()).size() == 144);
  CHECK(std::is_sorted(random.begin(), random.end()));
  CHECK(random.front() >= 1);
  CHECK(random.back() <= 1024);

  c.layout = SubcarrierLayout::Even;
  const auto even = resolve_subcarriers(c);
  CHECK(even[0] == 1);
  CHECK(even[1] == 1 + 1024 / 144);

  c.subcarriers = {5, 3, 1};
  c.M = 3;
  CHECK(resolve_subcarriers(c) == std::vector<int>{1, 3, 5});
}
