#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qsg/cli.hpp"

using namespace qsg;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "qsg");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            lines.push_back(line);
        }
    }
    return lines;
}

const std::string kData = QSG_DATA_DIR;

std::string write_temp(const std::string& name, const std::string& body) {
    const std::string path = std::string(QSG_BINARY_DIR) + "/" + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_CASE("enumerate P3") {
    const Result r = run({"enumerate", "--graph", kData + "/p3.txt", "--x", "1"});
    REQUIRE(r.code == kExitOk);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "config_bits,d_tilde,D_classical,argmin");
    CHECK(lines[1] == "10,01,4,1");
    CHECK(lines[2] == "01,10,36,0");
    CHECK(r.out.find("# seed: 0") != std::string::npos);
    CHECK(r.out.find("# alpha: 4") != std::string::npos);
    CHECK(r.out.find("# layout: dicke:2,edge1:5,edge2:5,flag:1") != std::string::npos);
}

TEST_CASE("enumerate 9 edges, x=2 gives 36 rows") {
    const Result r = run({"enumerate", "--graph", kData + "/grid9.txt", "--x", "2", "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"].size() == 36);
    CHECK(j["provenance"]["version"] == kVersion);
}

TEST_CASE("exit codes") {
    CHECK(run({"enumerate", "--gen", "cycle:4", "--x", "5"}).code == kExitUsage);
    CHECK(run({"enumerate", "--x", "1"}).code == kExitUsage);
    CHECK(run({"bogus"}).code == kExitUsage);
    CHECK(run({"enumerate", "--gen", "cycle:4"}).code == kExitUsage);
    CHECK(run({"enumerate", "--graph", kData + "/missing.txt", "--x", "1"}).code == kExitMalformed);

    const std::string bad = write_temp("bad_graph.txt", "3 2\n0 1 1\n1 2 -3\n");
    const Result malformed = run({"enumerate", "--graph", bad, "--x", "1"});
    CHECK(malformed.code == kExitMalformed);
    CHECK(malformed.err.find("line 3") != std::string::npos);

    const Result cap = run({"sample", "--graph", kData + "/ring4.txt", "--x", "2", "--cap", "10"});
    CHECK(cap.code == kExitResourceCap);
    CHECK(cap.err.find("requires 15 qubits") != std::string::npos);

    const Result full = run({"minfind", "--graph", kData + "/grid9.txt", "--x", "2"});
    CHECK(full.code == kExitResourceCap);
    CHECK(full.err.find("hybrid") != std::string::npos);
}

TEST_CASE("sample output is byte-identical for equal seeds") {
    const std::vector<std::string> args{"sample", "--graph", kData + "/ring4.txt", "--x", "2",
                                        "--shots", "100000", "--seed", "11"};
    const Result a = run(args);
    const Result b = run(args);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    const auto lines = data_lines(a.out);
    CHECK(lines[0] == "config_bits,D_quantum,D_classical,abs_err");
    CHECK(lines.size() == 7);
}

TEST_CASE("sample: infinite-shot mode is exact") {
    const Result r = run({"sample", "--graph", kData + "/ring4.txt", "--x", "2", "--mode", "infinite-shot",
                          "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["delta"].get<double>() <= 1e-9);
}

TEST_CASE("sample: more shots, smaller delta") {
    auto delta = [](const std::string& shots) {
        const Result r = run({"sample", "--graph", kData + "/ring4.txt", "--x", "2", "--shots", shots,
                              "--seed", "5", "--format", "json"});
        return nlohmann::json::parse(r.out)["delta"].get<double>();
    };
    const double d4 = delta("10000");
    const double d6 = delta("1000000");
    CHECK(d6 > 0.0);
    CHECK(d6 < d4);
}

TEST_CASE("sample: shot list runs a convergence study") {
    const Result r = run({"sample", "--graph", kData + "/ring4.txt", "--x", "2", "--shots",
                          "1000,10000,100000", "--seeds", "3", "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"].size() == 3);
    CHECK(j["rows"][0]["deltas"].size() == 3);
    CHECK(j["slope"].get<double>() < 0.0);
}

TEST_CASE("minfind P3 prints the verified argmin") {
    const std::string log = std::string(QSG_BINARY_DIR) + "/p3_run.jsonl";
    const Result r = run({"minfind", "--graph", kData + "/p3.txt", "--x", "1", "--seed", "3", "--log", log});
    REQUIRE(r.code == kExitOk);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(std::regex_match(lines[0], std::regex("d=(10|01) d_tilde=(01|10) D=(4|36) verified=(true|false)")));
    std::ifstream in(log);
    std::string first;
    REQUIRE(std::getline(in, first));
    CHECK(nlohmann::json::parse(first)["action"] == "init");
}

TEST_CASE("minfind hybrid on 9 edges verifies against enumeration") {
    const Result r = run({"minfind", "--graph", kData + "/grid9.txt", "--x", "2", "--mode", "hybrid",
                          "--seed", "1", "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verified"] == true);
    CHECK(j["steps_used"].get<std::uint64_t>() <= j["budget"].get<std::uint64_t>());
}

TEST_CASE("minfind budget override warns") {
    const Result r = run({"minfind", "--graph", kData + "/ring4.txt", "--x", "2", "--mode", "hybrid",
                          "--budget", "1"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(r.out.find("budget: 1,") != std::string::npos);
}

TEST_CASE("costmodel columns are monotone") {
    const Result r = run({"costmodel", "--x", "1,2,3", "--nmin", "10", "--nmax", "100000", "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    const auto& rows = j["rows"];
    REQUIRE(rows.size() > 3);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i]["x"] == rows[i - 1]["x"]) {
            CHECK(rows[i]["t_min"].get<double>() > rows[i - 1]["t_min"].get<double>());
            CHECK(rows[i]["t_cla"].get<double>() > rows[i - 1]["t_cla"].get<double>());
        }
    }
    CHECK(j["thresholds"].size() == 3);
}

TEST_CASE("quadform") {
    const std::string ones = write_temp("ones.txt", "1 1 1 1\n");
    const Result c = run({"quadform", "--graph", kData + "/ring4.txt", "--vector", ones, "--format", "json"});
    REQUIRE(c.code == kExitOk);
    CHECK(std::abs(nlohmann::json::parse(c.out)["quantum"].get<double>()) < 1e-10);

    const std::string v = write_temp("vec.txt", "# a\n0.5 -1.5\n2.25 0.1\n");
    const Result r = run({"quadform", "--graph", kData + "/ring4.txt", "--vector", v, "--config", "0100",
                          "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["abs_err"].get<double>() < 1e-8);

    const std::string bad = write_temp("badvec.txt", "1 2\nthree 4\n");
    const Result m = run({"quadform", "--graph", kData + "/ring4.txt", "--vector", bad});
    CHECK(m.code == kExitMalformed);
    CHECK(m.err.find("line 2") != std::string::npos);
}

TEST_CASE("output file") {
    const std::string path = std::string(QSG_BINARY_DIR) + "/enum.csv";
    const Result r = run({"enumerate", "--graph", kData + "/p3.txt", "--x", "1", "--out", path});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str().find("10,01,4,1") != std::string::npos);
}
