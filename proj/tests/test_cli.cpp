#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <thue_tree.hpp>

#include "test_util.hpp"

using namespace thue;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "thue-tree-cli-tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string put(const std::string& name, const std::string& text) {
    fs::path p = scratch() / name;
    write_file(p.string(), text);
    return p.string();
}

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult cli(const std::string& args) {
    fs::path out = scratch() / "stdout.txt";
    fs::path err = scratch() / "stderr.txt";
    std::string cmd = std::string("\"") + THUE_TREE_BIN + "\" " + args + " >" + out.string() +
                      " 2>" + err.string();
    int rc = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = read_file(out.string());
    return r;
}

std::string path_tree_file(const std::string& name, int n) {
    return put(name, tree_to_json(RootedTree::path(n)).dump());
}

std::string shared_lists_file(const std::string& name, const RootedTree& t,
                              std::vector<Color> list) {
    return put(name, lists_to_json(t, testutil::shared_list(t, std::move(list))).dump());
}

}  // namespace

TEST_CASE("solve, verify and decode round-trip through files") {
    std::string tree = path_tree_file("rt_tree.json", 8);
    std::string art = (scratch() / "rt_art.json").string();
    std::string logf = (scratch() / "rt_log.json").string();
    std::string lists = (scratch() / "rt_lists.json").string();

    CliResult s = cli("solve --tree " + tree + " --random-lists 4 9 --seed 5 --mode vertical" +
                      " --epsilon 1 --out " + art + " --log " + logf + " --lists-out " + lists);
    REQUIRE(s.code == 0);
    json a = json::parse(read_file(art));
    CHECK(a.at("status") == "solved");
    CHECK(a.at("outcomes").size() == a.at("steps").get<std::size_t>());
    REQUIRE(a.contains("coloring"));
    REQUIRE(a.contains("seed"));

    CliResult v = cli("verify --tree " + tree + " --coloring " + art + " --r 2 --mode vertical");
    CHECK(v.code == 0);
    CHECK(json::parse(v.out).at("ok") == true);

    // a bare coloring object works too
    std::string bare = put("rt_coloring.json", a.at("coloring").dump());
    CHECK(cli("verify --tree " + tree + " --coloring " + bare + " --r 2 --mode vertical").code ==
          0);

    CliResult d = cli("decode --log " + logf + " --tree " + tree + " --lists " + lists);
    REQUIRE(d.code == 0);
    CHECK(json::parse(d.out).at("seed") == a.at("seed"));
}

TEST_CASE("full-mode artifacts round-trip including square blocks") {
    RootedTree t = RootedTree::from_edges(
        {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 5}, {5, 6}, {6, 7}}, 0);
    std::string tree = put("fm_tree.json", tree_to_json(t).dump());
    std::string lists = shared_lists_file("fm_lists.json", t, {0, 1, 2, 3});
    std::string art = (scratch() / "fm_art.json").string();
    std::string logf = (scratch() / "fm_log.json").string();

    CliResult s = cli("solve --tree " + tree + " --lists " + lists + " --mode full --epsilon 1" +
                      " --seed 2 --out " + art + " --log " + logf);
    REQUIRE(s.code == 0);
    json a = json::parse(read_file(art));
    json log = json::parse(read_file(logf));
    CHECK(log.at("mode") == "full");
    CHECK_FALSE(log.at("Bstar").empty());  // this seed is known to bend a square

    // solved in full mode means clean at both exponents
    CHECK(cli("verify --tree " + tree + " --coloring " + art + " --r 2 --mode paths").code == 0);
    CHECK(cli("verify --tree " + tree + " --coloring " + art + " --r 4/3 --mode vertical").code ==
          0);

    CliResult d = cli("decode --log " + logf + " --tree " + tree + " --lists " + lists);
    REQUIRE(d.code == 0);
    CHECK(json::parse(d.out).at("seed") == a.at("seed"));
}

TEST_CASE("verify lists violations and exits five") {
    RootedTree t = RootedTree::path(6);
    std::string tree = path_tree_file("vv_tree.json", 6);
    std::string coloring =
        put("vv_coloring.json", coloring_to_json(t, {0, 1, 0, 1, 0, 1}).dump());
    CliResult v = cli("verify --tree " + tree + " --coloring " + coloring + " --r 2" +
                      " --mode vertical");
    CHECK(v.code == 5);
    json out = json::parse(v.out);
    CHECK(out.at("ok") == false);
    REQUIRE(out.at("violations").size() == 3);
    CHECK(out.at("violations")[0].at("a") == 0);
    CHECK(out.at("violations")[0].at("b") == 3);
    CHECK(out.at("violations")[0].at("l") == 2);
    CHECK(cli("verify --tree " + tree + " --coloring " + coloring + " --r 2 --mode paths").code ==
          5);
}

TEST_CASE("decode distinguishes damage from header disagreement") {
    std::string tree = path_tree_file("dd_tree.json", 8);
    std::string art = (scratch() / "dd_art.json").string();
    std::string logf = (scratch() / "dd_log.json").string();
    std::string lists = (scratch() / "dd_lists.json").string();
    REQUIRE(cli("solve --tree " + tree + " --random-lists 4 9 --seed 5 --out " + art + " --log " +
                logf + " --lists-out " + lists)
                .code == 0);

    json log = json::parse(read_file(logf));
    log["W"][0] = 7;
    std::string tampered = put("dd_tampered.json", log.dump());
    CHECK(cli("decode --log " + tampered + " --tree " + tree + " --lists " + lists).code == 3);

    std::string truncated = put("dd_truncated.json", read_file(logf).substr(0, 25));
    CHECK(cli("decode --log " + truncated + " --tree " + tree + " --lists " + lists).code == 3);

    // header overrides that disagree with the log are config errors, not damage
    CHECK(cli("decode --log " + logf + " --tree " + tree + " --lists " + lists +
              " --epsilon 1/2")
              .code == 1);
    CHECK(cli("decode --log " + logf + " --tree " + tree + " --lists " + lists + " --mode full")
              .code == 1);
}

TEST_CASE("a starved run exits two with its statistics") {
    RootedTree t = RootedTree::path(4);
    std::string tree = path_tree_file("bg_tree.json", 4);
    std::string lists = shared_lists_file("bg_lists.json", t, {0, 1});
    std::string art = (scratch() / "bg_art.json").string();
    CliResult s = cli("solve --tree " + tree + " --lists " + lists + " --budget 60 --seed 1" +
                      " --out " + art);
    CHECK(s.code == 2);
    json a = json::parse(read_file(art));
    CHECK(a.at("status") == "budgetExhausted");
    CHECK(a.at("steps") == 60);
}

TEST_CASE("bad inputs exit one") {
    std::string tree = path_tree_file("bi_tree.json", 4);
    std::string lists;
    {
        RootedTree t = RootedTree::path(4);
        lists = shared_lists_file("bi_lists.json", t, {0, 1, 2, 3});
    }
    CHECK(cli("solve --tree " + (scratch() / "no-such-file.json").string() +
              " --random-lists 4 8")
              .code == 1);
    CHECK(cli("solve --tree " + tree + " --lists " + lists + " --mode sideways").code == 1);
    CHECK(cli("solve --tree " + tree).code == 1);  // no lists given
    CHECK(cli("solve --tree " + tree + " --lists " + lists + " --epsilon 0").code == 1);
    std::string coloring =
        put("bi_coloring.json", coloring_to_json(RootedTree::path(4), {0, 1, 2, 3}).dump());
    CHECK(cli("verify --tree " + tree + " --coloring " + coloring + " --mode bogus").code == 1);
    CHECK(cli("oracle choosable --tree " + tree + " --lists " + lists + " --mode bogus").code ==
          1);
}

TEST_CASE("dot files work end to end") {
    std::string dot = put("dot_tree.dot", "digraph g {\n  0 -> 1;\n  1 -> 2;\n  2 -> 3;\n}\n");
    std::string art = (scratch() / "dot_art.json").string();
    CliResult s = cli("solve --tree " + dot + " --random-lists 4 8 --seed 3 --out " + art);
    REQUIRE(s.code == 0);
    CHECK(cli("verify --tree " + dot + " --coloring " + art + " --r 2 --mode vertical").code ==
          0);
}

TEST_CASE("experiments emit one csv row per swept list size") {
    json spec{{"mode", "vertical"},
              {"epsilon", "1"},
              {"tree", json{{"model", "path"}, {"n", 30}}},
              {"listSizes", json::array({3, 4})},
              {"palette", 8},
              {"trials", 5},
              {"masterSeed", 11}};
    std::string spec_file = put("exp_spec.json", spec.dump());
    std::string csv_file = (scratch() / "exp.csv").string();
    REQUIRE(cli("experiment " + spec_file + " --out " + csv_file).code == 0);

    std::string csv = read_file(csv_file);
    std::vector<std::string> lines;
    for (std::size_t at = 0; at < csv.size();) {
        std::size_t nl = csv.find('\n', at);
        if (nl == std::string::npos) break;
        lines.push_back(csv.substr(at, nl - at));
        at = nl + 1;
    }
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "listSize,trials,successes,successRate,meanSteps,p95Steps,"
          "fracPositive,fracVerticalNeg,fracSquareNeg,countLeftBits,countRightBits,"
          "crossoverLog2M");
    CHECK(lines[1].substr(0, 4) == "3,5,");
    CHECK(lines[2].substr(0, 4) == "4,5,");
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 11);

    // without --out or a spec output the csv lands on stdout
    CliResult piped = cli("experiment " + spec_file);
    CHECK(piped.code == 0);
    CHECK(piped.out.substr(0, 9) == "listSize,");
}

TEST_CASE("oracle subcommands ground the smallest cases") {
    RootedTree p3 = RootedTree::path(3);
    RootedTree p4 = RootedTree::path(4);
    std::string tree3 = path_tree_file("or_p3.json", 3);
    std::string tree4 = path_tree_file("or_p4.json", 4);
    std::string lists3 = shared_lists_file("or_l3.json", p3, {1, 2});
    std::string lists4 = shared_lists_file("or_l4.json", p4, {1, 2});

    CliResult yes = cli("oracle choosable --tree " + tree3 + " --lists " + lists3 +
                        " --r 2 --mode paths");
    REQUIRE(yes.code == 0);
    json y = json::parse(yes.out);
    CHECK(y.at("colorable") == true);
    REQUIRE(y.contains("witness"));

    CliResult no = cli("oracle choosable --tree " + tree4 + " --lists " + lists4 +
                       " --r 2 --mode vertical");
    REQUIRE(no.code == 0);
    json n = json::parse(no.out);
    CHECK(n.at("colorable") == false);
    CHECK_FALSE(n.contains("witness"));
    CHECK(n.at("nodesExplored").get<std::int64_t>() > 0);

    CHECK(cli("oracle choosable --tree " + tree3 + " --lists " + lists3 +
              " --r 2 --mode paths --node-bound 3")
              .code == 1);

    CliResult thue = cli("oracle thue 12");
    REQUIRE(thue.code == 0);
    CHECK(thue.out == "0 1 2 0 2 1 0 1 2 1 0 2 \n");
    CHECK(cli("oracle thue 0").code == 1);

    std::string seq_lists = put("or_seq.json", "[[0,1,2,3],[0,1,2,3],[4,5,6,7],[0,1,2,3]]");
    CliResult seq = cli("oracle sequence --lists " + seq_lists + " --seed 3");
    REQUIRE(seq.code == 0);
    {
        std::istringstream in(seq.out);
        std::vector<Color> got;
        for (Color c; in >> c;) got.push_back(c);
        REQUIRE(got.size() == 4);
        CHECK((got[2] >= 4 && got[2] <= 7));
        CHECK_FALSE(contains_power(got, PowerSpec(Rational::from_int(2))).has_value());
    }
    CHECK(cli("oracle sequence --lists " + put("or_seq_bad.json", "[[0,1,2]]")).code == 1);

    RootedTree p6 = RootedTree::path(6);
    std::string tree6 = path_tree_file("or_p6.json", 6);
    std::string alt = put("or_alt.json", coloring_to_json(p6, {0, 1, 0, 1, 0, 1}).dump());
    CliResult red = cli("oracle reduction --tree " + tree6 + " --coloring " + alt +
                        " --epsilon 1");
    CHECK(red.code == 0);
    CHECK(red.out == "true\n");
}
