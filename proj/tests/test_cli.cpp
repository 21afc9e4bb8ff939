#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sps/cli.hpp"
#include "sps/io.hpp"

using namespace sps;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "sps");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream log;
    int code = cli::run(int(argv.size()), argv.data(), log);
    return {code, log.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

void save(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("sps_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string at(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
    ASSERT_EQ(run({"generate", "--count", "1", "--seed", "7", "--out", at("a")}).code, 0);
    ASSERT_EQ(run({"generate", "--count", "1", "--seed", "7", "--out", at("b")}).code, 0);
    EXPECT_EQ(slurp(dir / "a" / "instance_0000.json"), slurp(dir / "b" / "instance_0000.json"));
    EXPECT_EQ(slurp(dir / "a" / "manifest.json"), slurp(dir / "b" / "manifest.json"));
    ASSERT_EQ(run({"generate", "--count", "1", "--seed", "8", "--out", at("c")}).code, 0);
    EXPECT_NE(slurp(dir / "a" / "instance_0000.json"), slurp(dir / "c" / "instance_0000.json"));
}

TEST_F(Cli, ManifestAndModes) {
    ASSERT_EQ(run({"generate", "--count", "4", "--seed", "3", "--d", "4", "--rank", "5", "--mode", "corner", "--out", at("g")}).code, 0);
    json m = load(dir / "g" / "manifest.json");
    EXPECT_EQ(m["seed"], 3);
    ASSERT_EQ(m["files"].size(), 4u);
    for (auto& f : m["files"]) {
        EXPECT_EQ(f["rank"], 5);
        auto c = circuit_from_json(load(dir / "g" / f["file"].get<std::string>()));
        auto dec = decompose(c);
        EXPECT_EQ(dec.rank, 5);
        std::set<LinearForm> t1(dec.T1.begin(), dec.T1.end());
        EXPECT_EQ(t1.size(), 1u);
        EXPECT_EQ(c.F->q, 13u);
        EXPECT_EQ(c.F->k, 6);
    }
    EXPECT_EQ(run({"generate", "--mode", "sideways", "--out", at("x")}).code, 2);
    EXPECT_EQ(run({"generate", "--q", "12", "--out", at("x")}).code, 2);
    EXPECT_EQ(run({"generate", "--rank", "30", "--out", at("x")}).code, 2);
}

TEST_F(Cli, JsonRoundTrip) {
    auto F = build_extension(13, 6);
    Rng rng(1);
    auto inst = random_instance(8, 4, F, 8, InstanceMode::general, rng);
    json j = circuit_to_json(inst.circuit);
    auto back = circuit_from_json(j);
    EXPECT_EQ(circuit_to_json(back), j);
    Point x = random_point(*F, 8, rng);
    EXPECT_EQ(eval_circuit(back, x).c, eval_circuit(inst.circuit, x).c);
    json bad = j;
    bad["modulus"] = std::vector<uint32_t>{1, 0, 0, 0, 0, 0, 1};  // x^6 + 1 = (x^2 + 1)(x^4 - x^2 + 1)
    EXPECT_THROW(circuit_from_json(bad), ParseError);
    bad = j;
    bad["gates"][0]["factors"][0][0] = 13;
    EXPECT_THROW(circuit_from_json(bad), ParseError);
    bad = j;
    bad["q"] = 15;
    EXPECT_THROW(circuit_from_json(bad), ParseError);
    bad = j;
    bad.erase("gates");
    EXPECT_THROW(circuit_from_json(bad), ParseError);
}

TEST_F(Cli, VerifyExamples) {
    ASSERT_EQ(run({"generate", "--seed", "11", "--out", at("v")}).code, 0);
    std::string a = at("v/instance_0000.json");
    auto self = run({"verify", a, a});
    EXPECT_EQ(self.code, 0);
    EXPECT_NE(self.out.find("pit: equivalent"), std::string::npos);
    EXPECT_NE(self.out.find("structural: match"), std::string::npos);

    json j = load(a);
    json swapped = j;
    std::swap(swapped["gates"][0], swapped["gates"][1]);
    save(dir / "swapped.json", swapped);
    auto sw = run({"verify", a, at("swapped.json")});
    EXPECT_EQ(sw.code, 0);
    EXPECT_NE(sw.out.find("structural: match"), std::string::npos);

    json perturbed = j;
    auto c0 = perturbed["gates"][0]["coeff"].get<std::vector<uint32_t>>();
    c0[0] = (c0[0] + 1) % 13;
    perturbed["gates"][0]["coeff"] = c0;
    save(dir / "perturbed.json", perturbed);
    auto pt = run({"verify", a, at("perturbed.json")});
    EXPECT_EQ(pt.code, 1);
    EXPECT_NE(pt.out.find("pit: not-equivalent"), std::string::npos);
}

TEST_F(Cli, TruncatedInputIsUsageError) {
    ASSERT_EQ(run({"generate", "--seed", "12", "--out", at("t")}).code, 0);
    std::string text = slurp(dir / "t" / "instance_0000.json");
    std::ofstream(dir / "cut.json") << text.substr(0, text.size() / 2);
    EXPECT_EQ(run({"reconstruct", "--in", at("cut.json")}).code, 2);
    EXPECT_EQ(run({"verify", at("cut.json"), at("cut.json")}).code, 2);
    EXPECT_EQ(run({"reconstruct", "--in", at("missing.json")}).code, 2);
    EXPECT_EQ(run({"reconstruct"}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
}

TEST_F(Cli, ReconstructHighRankReport) {
    ASSERT_EQ(run({"generate", "--seed", "5", "--out", at("h")}).code, 0);
    std::string in = at("h/instance_0000.json");
    auto r = run({"reconstruct", "--in", in, "--algo", "high", "--seed", "2", "--out", at("rec.json"), "--report", at("report.jsonl")});
    ASSERT_EQ(r.code, 0) << r.out;
    auto r2 = run({"reconstruct", "--in", in, "--algo", "high", "--seed", "2", "--report", at("report.jsonl")});
    ASSERT_EQ(r2.code, 0);
    std::ifstream rep(dir / "report.jsonl");
    std::string line;
    std::vector<json> lines;
    while (std::getline(rep, line)) lines.push_back(json::parse(line));
    ASSERT_EQ(lines.size(), 2u);  // appended, not overwritten
    for (auto& l : lines) {
        EXPECT_EQ(l["status"], "success");
        EXPECT_EQ(l["structural_match"], true);
        EXPECT_EQ(l["fan_in"], 2);
        EXPECT_GE(l["pit_trials"].get<int>(), 40);
        EXPECT_GT(l["queries"].get<uint64_t>(), 0u);
    }
    // same seed, same answer
    EXPECT_EQ(lines[0]["queries"], lines[1]["queries"]);
    auto v = run({"verify", in, at("rec.json")});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("structural: match"), std::string::npos);
}

TEST_F(Cli, CornerInstanceRoutedByAuto) {
    ASSERT_EQ(run({"generate", "--seed", "21", "--d", "4", "--rank", "5", "--mode", "corner", "--out", at("c")}).code, 0);
    auto r = run({"reconstruct", "--in", at("c/instance_0000.json")});
    ASSERT_EQ(r.code, 0) << r.out;
    json rep = json::parse(r.out);
    EXPECT_EQ(rep["path"], "corner");
    EXPECT_EQ(rep["status"], "success");
    EXPECT_EQ(rep["structural_match"], true);
}

TEST_F(Cli, BadConfigIsUsageError) {
    ASSERT_EQ(run({"generate", "--seed", "5", "--out", at("h")}).code, 0);
    EXPECT_EQ(run({"reconstruct", "--in", at("h/instance_0000.json"), "--pit-trials", "1"}).code, 2);
    EXPECT_EQ(run({"reconstruct", "--in", at("h/instance_0000.json"), "--algo", "magic"}).code, 2);
}

TEST_F(Cli, BinaryExitCodes) {
    std::string tool = SPS_TOOL_PATH;
    std::string gen = tool + " generate --seed 4 --out " + at("b") + " > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(gen.c_str())), 0);
    std::string ver = tool + " verify " + at("b/instance_0000.json") + " " + at("nope.json") + " > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(ver.c_str())), 2);
}
