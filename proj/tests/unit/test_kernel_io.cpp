#include <doctest.h>

#include <sstream>

#include "mixlab/ising.hpp"
#include "mixlab/kernel_io.hpp"

using namespace mixlab;

namespace {

Kernel parse(const std::string& s) {
  std::istringstream is(s);
  return read_kernel_json(is);
}

}  // namespace

TEST_CASE("kernel JSON round trip is exact") {
  const Kernel k = build_kernel(IsingChain(3, 0.37));
  std::ostringstream os;
  write_kernel_json(os, k);
  const Kernel back = parse(os.str());
  REQUIRE(back.size() == k.size());
  CHECK(back.matrix() == k.matrix());
}

TEST_CASE("kernel JSON keeps labels and sums duplicates") {
  const Kernel k = parse(R"({"n_states": 2, "triplets": [[0,0,0.25],[0,0,0.25],[0,1,0.5],[1,0,1.0]],
                             "state_labels": ["a", "b"]})");
  CHECK(k.prob(0, 0) == 0.5);
  CHECK(k.labels() == std::vector<std::string>{"a", "b"});
  std::ostringstream os;
  write_kernel_json(os, k);
  CHECK(os.str().find("\"state_labels\": [\"a\", \"b\"]") != std::string::npos);
}

TEST_CASE("kernel JSON schema errors") {
  CHECK_THROWS_AS(parse("{"), InvalidChain);
  CHECK_THROWS_AS(parse("[]"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"n_states": 1, "triplets": [[0,0,1]], "extra": 1})"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"triplets": [[0,0,1]]})"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"n_states": 0, "triplets": []})"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"n_states": 1, "triplets": [[0,0]]})"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"n_states": 1, "triplets": [[0,-1,1]]})"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"n_states": 1, "triplets": [[0,0,1]], "state_labels": [3]})"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"n_states": 2, "triplets": [[0,0,1],[1,1,0.5],[1,0,0.5]]})"), InvalidChain);
  CHECK_THROWS_AS(parse(R"({"n_states": 2, "triplets": [[0,1,1],[1,0,0.9]]})"), InvalidChain);
  CHECK_THROWS_AS(read_kernel_file("/nonexistent/kernel.json"), InvalidChain);
}
