#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "qswitch/channel_json.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/random.hpp"
#include "test_util.hpp"

using namespace qswitch;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qswitch_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QSWITCH_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("channel JSON layout") {
  const auto text = channel_to_json(named::pauli_x());
  CHECK(text == R"({"dim_in":2,"dim_out":2,"kraus":[[[[0,0],[1,0]],[[1,0],[0,0]]]]})");
}

TEST_CASE("channel JSON round trip keeps every bit with 17 digits") {
  SeededRng rng(91);
  std::vector<QuantumChannel> chans{random_choi_channel(rng, 2), random_unitary_mixture(rng, 2, 3),
                                    QuantumChannel({ginibre(rng, 3, 2)})};
  const auto back = channels_from_json(channels_to_json(chans));
  REQUIRE(back.size() == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    REQUIRE(back[c].kraus_count() == chans[c].kraus_count());
    CHECK(back[c].dim_in() == chans[c].dim_in());
    CHECK(back[c].dim_out() == chans[c].dim_out());
    for (std::size_t k = 0; k < chans[c].kraus_count(); ++k) CHECK(back[c].kraus(k) == chans[c].kraus(k));
  }
  // A single object parses as a one-element list.
  CHECK(channels_from_json(channel_to_json(chans[0])).size() == 1);
  CHECK(channel_from_json(channel_to_json(chans[1])).kraus_count() == 3);
}

TEST_CASE("malformed channel JSON is a contract violation") {
  CHECK_THROWS_AS(channels_from_json("not json"), ContractViolation);
  CHECK_THROWS_AS(channels_from_json(R"({"dim_in":2,"dim_out":2,"kraus":[]})"), ContractViolation);
  CHECK_THROWS_AS(channels_from_json(R"({"dim_in":2,"dim_out":2,"kraus":[[[[1,0]],[[0,0]]]]})"),
                  ContractViolation);
  CHECK_THROWS_AS(channels_from_json(R"({"dim_in":1,"dim_out":1,"kraus":[[[[1]]]]})"), ContractViolation);
  CHECK_THROWS_AS(channels_from_json(R"({"dim_out":1,"kraus":[[[[1,0]]]]})"), ContractViolation);
  CHECK_THROWS_AS(channel_from_json("[]"), ContractViolation);
}

TEST_CASE("file helpers report I/O errors") {
  CHECK_THROWS_AS(read_channels("/nonexistent/channels.json"), IoError);
  CHECK_THROWS_AS(write_channels("/nonexistent/dir/channels.json", {named::identity(2)}), IoError);
  const auto path = scratch("one.json");
  write_channels(path.string(), {named::depolarizing()});
  CHECK(read_channels(path.string()).front().kraus_count() == 4);
}

TEST_CASE("command line: sampling is deterministic and capacity runs on the output") {
  const auto a = scratch("cli_a.json"), b = scratch("cli_b.json"), csv = scratch("cli.csv");
  CHECK(run_cli("sample-channels --n 2 --kind choi --seed 4 --out " + a.string()) == 0);
  CHECK(run_cli("sample-channels --n 2 --kind choi --seed 4 --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  const auto chans = read_channels(a.string());
  CHECK(chans.size() == 2);
  for (const auto& c : chans) CHECK(validate_channel(c).passed());

  CHECK(run_cli("capacity --in " + a.string() + " --combiner switch --pairing consecutive --restarts 2 --hops 3 --out " +
                csv.string()) == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("index,channels,combiner,control,chi,sigma,failed_restarts\n", 0) == 0);
  CHECK(text.find("0,0;1,switch,plus,") != std::string::npos);
}

TEST_CASE("command line: unitary mixtures and named kinds") {
  const auto path = scratch("cli_mix.json");
  CHECK(run_cli("sample-channels --n 3 --kind unitary-mixture --k-ops 3 --out " + path.string()) == 0);
  CHECK(read_channels(path.string()).at(2).kraus_count() == 3);
  CHECK(run_cli("sample-channels --kind depolarizing --out " + path.string()) == 0);
  CHECK(q_commutativity(read_channels(path.string()).front()) == doctest::Approx(3.0));
}

TEST_CASE("command line exit codes") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("sample-channels --kind nonsense --out " + scratch("x.json").string()) == 1);
  CHECK(run_cli("capacity --in /nonexistent/in.json") == 2);
  CHECK(run_cli("sample-channels --out /nonexistent/dir/x.json") == 2);
  const auto path = scratch("cli_exit.json");
  CHECK(run_cli("sample-channels --out " + path.string()) == 0);
  CHECK(run_cli("capacity --in " + path.string() + " --combiner triangle") == 1);
  CHECK(run_cli("capacity --in " + path.string() + " --restarts 0") == 1);
  CHECK(run_cli("experiment fig3 --outdir " + scratch("exp").string()) == 1);
}

TEST_CASE("command line: experiment writes its outputs") {
  const auto dir = scratch("exp_pairs");
  std::filesystem::remove_all(dir);
  CHECK(run_cli("experiment pairs --n 2 --restarts 2 --hops 3 --outdir " + dir.string()) == 0);
  CHECK(std::filesystem::exists(dir / "records.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "scatter_pairs.svg"));
}

}  // TEST_SUITE
