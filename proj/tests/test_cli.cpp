#include "skilldtw/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& root()
{
    static const fs::path p = [] {
        const fs::path r = fs::temp_directory_path() / "skilldtw_cli_test";
        fs::remove_all(r);
        fs::create_directories(r);
        return r;
    }();
    return p;
}

int run(const std::string& args)
{
    const std::string cmd = std::string(SKILLDTW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string dir(const std::string& name) { return (root() / name).string(); }

const std::string& dataset()
{
    static const std::string d = [] {
        const std::string out = dir("data");
        REQUIRE(run("synth --seed 3 --length 100 --output-dir " + out) == 0);
        return out;
    }();
    return d;
}

json load(const std::string& path) { return json::parse(skilldtw::read_text(path)); }

std::map<std::string, std::string> tree_digest(const fs::path& d)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(d))
        if (e.is_regular_file()) out[fs::relative(e.path(), d).string()] = skilldtw::file_digest(e.path());
    return out;
}

}  // namespace

TEST_CASE("cli synth is reproducible")
{
    REQUIRE(run("synth --seed 7 --length 60 --output-dir " + dir("s1")) == 0);
    REQUIRE(run("synth --seed 7 --length 60 --output-dir " + dir("s2")) == 0);
    const auto a = tree_digest(dir("s1")), b = tree_digest(dir("s2"));
    CHECK(a.size() == 42);  // 40 series, dataset.json, run_manifest.json
    CHECK(a == b);
}

TEST_CASE("cli exit codes")
{
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("distmat --input " + dataset() + " --band wobble --output-dir " + dir("bad")) == 1);
    CHECK(run("distmat --input " + dir("missing") + " --output-dir " + dir("bad")) == 2);
    skilldtw::write_text(dir("broken") + "/dataset.json", R"({"items":[{"file":"a.csv","skill":"X","participant":"p"}]})");
    skilldtw::write_text(dir("broken") + "/a.csv", "t,x\n0,1\n2,2\n");
    CHECK(run("ingest --input " + dir("broken") + " --output-dir " + dir("bad")) == 2);
}

TEST_CASE("cli classify reaches perfect knn accuracy on the synthetic set")
{
    REQUIRE(run("classify --method knn --k 1 --scheme loocv --input " + dataset() + " --output-dir " + dir("cls")) == 0);
    const json r = load(dir("cls") + "/classification.json");
    CHECK(r["accuracy"].get<double>() == 1.0);
}

TEST_CASE("cli score ranks best and worst members")
{
    REQUIRE(run("score --cluster 1 --input " + dataset() + " --output-dir " + dir("score")) == 0);
    const json r = load(dir("score") + "/score.json");
    const auto& c = r["clusters"][0];
    const auto& ranking = c["ranking"];
    REQUIRE(ranking.size() >= 2);
    CHECK(c["best"] == ranking.front()["index"]);
    CHECK(c["worst"] == ranking.back()["index"]);
    CHECK(ranking.front()["distance"].get<double>() <= ranking.back()["distance"].get<double>());
    CHECK(fs::exists(dir("score") + "/ccm_1_best.csv"));
    CHECK(fs::exists(dir("score") + "/ccm_1_worst.svg"));
}

TEST_CASE("cli stream final score equals score on the same recording")
{
    for (const char* item : {"004", "017", "033"}) {
        const std::string rec = dataset() + "/series/" + item + ".csv";
        REQUIRE(run("score --recording " + rec + " --input " + dataset() + " --output-dir " + dir("rs")) == 0);
        REQUIRE(run("stream --recording " + rec + " --input " + dataset() + " --output-dir " + dir("st")) == 0);
        const json batch = load(dir("rs") + "/recording_score.json");
        const json live = load(dir("st") + "/stream_summary.json");
        CHECK(live["score"].get<double>() == batch["score"].get<double>());
        CHECK(live["cluster"] == batch["cluster"]);
    }
}

TEST_CASE("every artifact is declared in the manifest")
{
    const std::string in = " --input " + dataset() + " --output-dir ";
    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"distmat", "distmat" + in},
        {"cluster", "cluster --cluster-method partitional" + in},
        {"prototype", "prototype --proto pam" + in},
        {"envelope", "envelope --kind summative" + in},
        {"identify", "identify --scheme kfold" + in},
        {"ingest", "ingest --epidural40" + in},
    };
    for (const auto& [name, args] : cmds) {
        CAPTURE(name);
        const std::string out = dir("m_" + name);
        REQUIRE(run(args + out) == 0);
        const json m = load(out + "/run_manifest.json");
        CHECK(m["command"] == name);
        std::set<std::string> declared;
        for (const auto& o : m["outputs"]) declared.insert(o.get<std::string>());
        std::set<std::string> present;
        for (const auto& e : fs::recursive_directory_iterator(out))
            if (e.is_regular_file() && e.path().filename() != "run_manifest.json")
                present.insert(fs::relative(e.path(), out).string());
        CHECK(declared == present);
        CHECK(!m.contains("timings"));
    }
}
