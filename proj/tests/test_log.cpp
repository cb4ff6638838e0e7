#include <catch2/catch_amalgamated.hpp>

#include <thue_tree.hpp>

#include "test_util.hpp"

using namespace thue;

namespace {

struct Fixture {
    RootedTree t;
    ListAssignment lists;
    SolverConfig cfg;
};

Fixture alternating_path() {
    RootedTree t = RootedTree::path(4);
    ListAssignment lists = ListAssignment::uniform(t, {5, 7});
    SolverConfig cfg;
    cfg.mode = Mode::Vertical;
    return {t, lists, cfg.finalized(t, lists)};
}

// Deterministic base-4 square bent around the root (see the solver tests).
Fixture root_square() {
    RootedTree t = RootedTree::from_edges(
        {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 5}, {5, 6}, {6, 7}}, 0);
    ListAssignment lists = ListAssignment::uniform(t, {0, 1, 2, 3});
    SolverConfig cfg;
    cfg.mode = Mode::Full;
    return {t, lists, cfg.finalized(t, lists)};
}

RunLog encoded(const Fixture& fx, const Seed& seed) {
    RunResult res = run(fx.t, fx.lists, fx.cfg, seed);
    return encode(res.outcomes, res.state, fx.cfg);
}

}  // namespace

TEST_CASE("the vertical erase shows up as a depth dip with annotation zero") {
    Fixture fx = alternating_path();
    Seed seed{{1, 2, 1, 2, 1}};
    RunResult res = run(fx.t, fx.lists, fx.cfg, seed);
    RunLog log = encode(res.outcomes, res.state, fx.cfg);
    CHECK(log.mode == Mode::Vertical);
    CHECK(log.list_size == 2);
    CHECK(log.W == std::vector<std::int64_t>{1, 2, 3, 4, 3});
    CHECK(log.A == std::vector<int>{0, 0, 0, 0, 0});
    CHECK(log.Bstar.empty());
    CHECK(log.Cstar.empty());
    REQUIRE(log.neg.size() == 1);
    CHECK(log.neg[0].step == 4);
    CHECK(log.neg[0].prev_current == 3);
    CHECK(log.neg[0].erased_off_path.empty());
    CHECK(log.final_colors == std::vector<Color>{5, 7, 5});
    CHECK(log.Path == std::vector<Color>{5, 7, 5});

    CHECK(decode(log, fx.t, fx.lists, fx.cfg).entries == seed.entries);
}

TEST_CASE("a square step stores its marker block and child positions") {
    Fixture fx = root_square();
    Seed seed{{4, 1, 2, 3, 4, 3, 2, 1, 4}};
    RunResult res = run(fx.t, fx.lists, fx.cfg, seed);
    REQUIRE(res.consumed() == 9);
    REQUIRE(res.outcomes[8].kind == StepKind::SquareNegative);
    RunLog log = encode(res.outcomes, res.state, fx.cfg);
    CHECK(log.W == std::vector<std::int64_t>{1, 2, 3, 4, 5, 2, 3, 4, 2});
    CHECK(log.A == std::vector<int>(9, -1));
    // m = 3 entries; l - k = -1 marks slot 1 with a minus
    CHECK(log.Bstar == std::vector<int>{-1, 0, 0});
    // k - 1 = 4 child positions, all firstborn
    CHECK(log.Cstar == std::vector<int>{1, 1, 1, 1});
    REQUIRE(log.neg.size() == 1);
    CHECK(log.neg[0].step == 8);
    CHECK(log.neg[0].prev_current == 7);

    CHECK(decode(log, fx.t, fx.lists, fx.cfg).entries == seed.entries);
}

TEST_CASE("advancing into a sibling branch dips the walk without a record") {
    // 0 - 1 - 2, 0 - 3: after finishing the chain the next positive step
    // jumps to depth 2
    RootedTree t = RootedTree::from_edges({{0, 1}, {1, 2}, {0, 3}}, 0);
    ListAssignment lists = ListAssignment::uniform(t, {1, 2, 3});
    SolverConfig cfg;
    cfg.mode = Mode::Vertical;
    cfg = cfg.finalized(t, lists);
    Seed seed{{1, 2, 3, 2}};
    RunResult res = run(t, lists, cfg, seed);
    REQUIRE(res.status == RunStatus::Completed);
    RunLog log = encode(res.outcomes, res.state, cfg);
    CHECK(log.W == std::vector<std::int64_t>{1, 2, 3, 2});
    CHECK(log.neg.empty());
    CHECK(decode(log, t, lists, cfg).entries == seed.entries);
}

TEST_CASE("empty runs produce empty logs that decode to empty seeds") {
    Fixture fx = alternating_path();
    RunLog log = encoded(fx, Seed{});
    CHECK(log.W.empty());
    CHECK(log.final_colors.empty());
    CHECK(decode(log, fx.t, fx.lists, fx.cfg).entries.empty());
}

TEST_CASE("decode round trip over random runs in both modes") {
    Rng rng(90210);
    int square_steps_seen = 0, vertical_negs_seen = 0, off_path_records = 0;
    for (int trial = 0; trial < 120; ++trial) {
        bool full = trial % 2 == 1;
        RootedTree t = RootedTree::random_attachment(2 + (int)rng.uniform_below(24), 3, rng);
        ListAssignment lists =
            ListAssignment::random(t, 4, 4 + (int)rng.uniform_below(3), rng);
        SolverConfig cfg;
        cfg.mode = full ? Mode::Full : Mode::Vertical;
        cfg = cfg.finalized(t, lists);
        Seed seed;
        int len = 1 + (int)rng.uniform_below(120);
        for (int i = 0; i < len; ++i)
            seed.entries.push_back(1 + (int)rng.uniform_below(4));
        RunResult res = run(t, lists, cfg, seed);
        for (const auto& out : res.outcomes) {
            square_steps_seen += out.kind == StepKind::SquareNegative;
            vertical_negs_seen += out.kind == StepKind::VerticalNegative;
            off_path_records += !out.erased_off_path.empty();
        }
        RunLog log = encode(res.outcomes, res.state, cfg);
        Seed back = decode(log, t, lists, cfg);
        REQUIRE((int)back.entries.size() == res.consumed());
        REQUIRE(std::equal(back.entries.begin(), back.entries.end(), seed.entries.begin()));
        // serialization keeps every field
        RunLog reparsed = log_from_json(log_to_json(log));
        REQUIRE(reparsed == log);
    }
    // the batch exercised every step flavor
    CHECK(square_steps_seen > 0);
    CHECK(vertical_negs_seen > 50);
    CHECK(off_path_records > 0);
}

TEST_CASE("decode round trip at a fractional exponent") {
    Rng rng(424242);
    for (const char* eps : {"1/2", "3/2", "3"}) {
        for (int trial = 0; trial < 25; ++trial) {
            RootedTree t = RootedTree::random_attachment(2 + (int)rng.uniform_below(20), 3, rng);
            ListAssignment lists = ListAssignment::random(t, 3, 4, rng);
            SolverConfig cfg;
            cfg.mode = Mode::Vertical;
            cfg.epsilon = Rational::parse(eps);
            cfg = cfg.finalized(t, lists);
            Seed seed;
            for (int i = 0; i < 80; ++i) seed.entries.push_back(1 + (int)rng.uniform_below(3));
            RunResult res = run(t, lists, cfg, seed);
            RunLog log = encode(res.outcomes, res.state, cfg);
            Seed back = decode(log, t, lists, cfg);
            REQUIRE((int)back.entries.size() == res.consumed());
            REQUIRE(std::equal(back.entries.begin(), back.entries.end(), seed.entries.begin()));
        }
    }
}

TEST_CASE("header mismatches are config errors") {
    Fixture fx = alternating_path();
    RunLog log = encoded(fx, Seed{{1, 2, 1}});
    {
        SolverConfig other = fx.cfg;
        other.epsilon = Rational::parse("1/2");
        CHECK_THROWS_MATCHES(decode(log, fx.t, fx.lists, other), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == Errc::ConfigMismatch;
                             }));
    }
    {
        RunLog tampered = log;
        tampered.list_size = 3;
        CHECK_THROWS_AS(decode(tampered, fx.t, fx.lists, fx.cfg), Error);
    }
    {
        RunLog tampered = log;
        tampered.mode = Mode::Full;
        CHECK_THROWS_AS(decode(tampered, fx.t, fx.lists, fx.cfg), Error);
    }
}

namespace {

void expect_malformed(const RunLog& log, const Fixture& fx) {
    CHECK_THROWS_MATCHES(decode(log, fx.t, fx.lists, fx.cfg), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::MalformedLog;
                         }));
}

}  // namespace

TEST_CASE("tampered logs are rejected as malformed") {
    Fixture fx = alternating_path();
    Seed seed{{1, 2, 1, 2, 1, 2}};
    RunLog log = encoded(fx, seed);
    REQUIRE_FALSE(log.neg.empty());

    SECTION("walk climbing two at once") {
        RunLog bad = log;
        bad.W[1] = 3;
        expect_malformed(bad, fx);
    }
    SECTION("walk dropping below the root") {
        RunLog bad = log;
        bad.W[0] = 0;
        expect_malformed(bad, fx);
    }
    SECTION("walk and annotations disagreeing in length") {
        RunLog bad = log;
        bad.A.pop_back();
        expect_malformed(bad, fx);
    }
    SECTION("annotation outside its alphabet") {
        RunLog bad = log;
        bad.A[0] = 1;  // alphabet size is ceil(1/1) = 1, so only 0 is legal
        expect_malformed(bad, fx);
    }
    SECTION("negative-step index out of range") {
        RunLog bad = log;
        bad.neg[0].step = (std::int64_t)bad.W.size();
        expect_malformed(bad, fx);
    }
    SECTION("negative-step index duplicated") {
        RunLog bad = log;
        bad.neg.push_back(bad.neg[0]);
        expect_malformed(bad, fx);
    }
    SECTION("negative record on a step whose walk moves up") {
        RunLog bad = log;
        bad.neg[0].step = 1;
        expect_malformed(bad, fx);
    }
    SECTION("dropped negative record") {
        RunLog bad = log;
        bad.neg.clear();
        expect_malformed(bad, fx);
    }
    SECTION("final coloring altered") {
        RunLog bad = log;
        REQUIRE_FALSE(bad.final_colors.empty());
        bad.final_colors[0] = 7;
        bad.Path[0] = 7;  // keep Path consistent so the root-path check passes
        expect_malformed(bad, fx);
    }
    SECTION("root-path colors out of sync with the final coloring") {
        RunLog bad = log;
        REQUIRE_FALSE(bad.Path.empty());
        bad.Path.back() = bad.Path.back() == 5 ? 7 : 5;
        expect_malformed(bad, fx);
    }
    SECTION("final coloring longer than the tree") {
        RunLog bad = log;
        bad.final_colors.assign(10, 5);
        expect_malformed(bad, fx);
    }
    SECTION("leftover square data in vertical mode") {
        RunLog bad = log;
        bad.Bstar.push_back(0);
        expect_malformed(bad, fx);
    }
}

TEST_CASE("tampered square blocks are rejected") {
    Fixture fx = root_square();
    Seed seed{{4, 1, 2, 3, 4, 3, 2, 1, 4}};
    RunLog log = encoded(fx, seed);
    REQUIRE(log.Bstar.size() == 3);
    REQUIRE(log.Cstar.size() == 4);

    SECTION("marker moved") {
        RunLog bad = log;
        bad.Bstar = {0, -1, 0};
        expect_malformed(bad, fx);
    }
    SECTION("marker sign flipped") {
        RunLog bad = log;
        bad.Bstar = {1, 0, 0};
        expect_malformed(bad, fx);
    }
    SECTION("marker block truncated") {
        RunLog bad = log;
        bad.Bstar.pop_back();
        expect_malformed(bad, fx);
    }
    SECTION("extra marker entries") {
        RunLog bad = log;
        bad.Bstar.push_back(0);
        expect_malformed(bad, fx);
    }
    SECTION("child position out of range") {
        RunLog bad = log;
        bad.Cstar[0] = 2;  // the root has 2 children but the descent breaks
        expect_malformed(bad, fx);
    }
    SECTION("child positions truncated") {
        RunLog bad = log;
        bad.Cstar.pop_back();
        expect_malformed(bad, fx);
    }
    SECTION("square annotation on a vertical record") {
        RunLog bad = log;
        bad.A[8] = 0;  // claims a vertical erase; the chain equalities fail
        expect_malformed(bad, fx);
    }
}

TEST_CASE("random single-field corruption never crashes the decoder") {
    Rng rng(1717);
    Fixture fx = root_square();
    Seed seed{{4, 1, 2, 3, 4, 3, 2, 1, 4, 1, 2, 3}};
    RunLog log = encoded(fx, seed);
    for (int trial = 0; trial < 300; ++trial) {
        RunLog bad = log;
        int what = (int)rng.uniform_below(6);
        auto bump = [&](auto& vec) {
            if (vec.empty()) return;
            auto& slot = vec[rng.uniform_below(vec.size())];
            slot = (std::remove_reference_t<decltype(slot)>)(
                (std::int64_t)slot + 1 - (std::int64_t)rng.uniform_below(3));
        };
        switch (what) {
            case 0: bump(bad.W); break;
            case 1: bump(bad.A); break;
            case 2: bump(bad.Bstar); break;
            case 3: bump(bad.Cstar); break;
            case 4: bump(bad.Path); break;
            case 5: bump(bad.final_colors); break;
        }
        if (bad == log) continue;
        try {
            Seed got = decode(bad, fx.t, fx.lists, fx.cfg);
            // acceptable only if the corrupted log is itself a faithful
            // encoding of the decoded seed
            RunResult replay = run(fx.t, fx.lists, fx.cfg, got);
            RunLog re = encode(replay.outcomes, replay.state, fx.cfg);
            REQUIRE(re == bad);
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::MalformedLog);
        }
    }
}

TEST_CASE("walk expansion and contraction invert each other") {
    std::vector<std::int64_t> w{1, 2, 3, 4, 3, 4, 1};
    auto steps = expand_walk(w);
    // every entry opens with +1, then falls to its value: 4 -> 3 costs +1 -1 -1
    CHECK(steps == std::vector<int>{1, 1, 1, 1, 1, -1, -1, 1, 1, -1, -1, -1, -1});
    CHECK(contract_walk(steps) == w);

    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::int64_t> walk;
        std::int64_t at = 0;
        int len = 1 + (int)rng.uniform_below(30);
        for (int i = 0; i < len; ++i) {
            at += 1 - (std::int64_t)rng.uniform_below((std::uint64_t)at + 1);
            walk.push_back(at);
        }
        auto s = expand_walk(walk);
        CHECK((int)s.size() <= 2 * len);
        CHECK(contract_walk(s) == walk);
        std::int64_t sum = 0;
        for (int st : s) {
            sum += st;
            REQUIRE(sum >= 1);  // prefix sums stay positive
        }
    }
}

TEST_CASE("invalid walks are rejected") {
    CHECK_THROWS_AS(expand_walk({0}), Error);
    CHECK_THROWS_AS(expand_walk({1, 3}), Error);
    CHECK_THROWS_AS(expand_walk({2}), Error);
    CHECK_THROWS_AS(contract_walk({-1}), Error);
    CHECK_THROWS_AS(contract_walk({1, -1, -1}), Error);
}

TEST_CASE("positive walk counts match the closed form") {
    const std::int64_t expected[] = {1, 3, 10, 35, 126, 462, 1716, 6435};
    for (int m = 1; m <= 8; ++m) {
        CHECK(count_positive_walks(2 * m) == expected[m - 1]);
        // C(2m-1, m-1)
        std::int64_t binom = 1;
        for (int i = 0; i < m - 1; ++i)
            binom = binom * (2 * m - 1 - i) / (i + 1);
        CHECK(count_positive_walks(2 * m) == binom);
    }
    CHECK(count_positive_walks(0) == 1);
    CHECK(count_positive_walks(1) == 1);
    CHECK(count_positive_walks(3) == 2);
    CHECK_THROWS_AS(count_positive_walks(61), Error);
    CHECK_THROWS_AS(count_positive_walks(-1), Error);
}

TEST_CASE("counting report adds up and reports the crossover") {
    SolverConfig cfg;
    cfg.mode = Mode::Vertical;
    cfg.list_size = 16;
    CountingReport rep = counting_report(cfg, 50, 1000, 3);
    CHECK(rep.M == 1000);
    CHECK(rep.left_bits == Catch::Approx(1000 * 4.0));
    CHECK(rep.right_bits ==
          Catch::Approx(rep.walk_bits + rep.annot_bits + rep.path_bits).epsilon(1e-12));
    CHECK(rep.square_marker_bits == 0.0);
    CHECK(rep.annot_bits == 0.0);  // alphabet has a single letter at eps = 1
    CHECK(rep.small_walk_counts ==
          std::vector<std::int64_t>{1, 3, 10, 35, 126, 462, 1716, 6435});
    // left grows at 4 bits per step against 2 + o(1): a crossover exists
    REQUIRE(rep.crossover_log2_m.has_value());
    double at = std::ldexp(1.0, (int)std::ceil(*rep.crossover_log2_m));
    CountingReport past = counting_report(cfg, 50, (std::int64_t)at, 3);
    CHECK(past.left_bits > past.right_bits);

    // with too few colors the left side can never catch up
    SolverConfig starving = cfg;
    starving.list_size = 2;
    CountingReport never = counting_report(starving, 50, 1000, 3);
    CHECK_FALSE(never.crossover_log2_m.has_value());
}

TEST_CASE("full-mode counting report includes the extra streams") {
    SolverConfig cfg;
    cfg.mode = Mode::Full;
    cfg.list_size = 192;
    CountingReport rep = counting_report(cfg, 30, 500, 2);
    CHECK(rep.square_marker_bits == Catch::Approx(500 * std::log2(3.0)));
    CHECK(rep.child_position_bits == 0.0);  // max(deg - 1, 1) = 1
    CHECK(rep.annot_bits == Catch::Approx(500 * std::log2(3.0)));  // ceil(1/delta) = 3
    CHECK(rep.left_bits == Catch::Approx(2 * 500 * std::log2(192.0 * 2)));
    REQUIRE(rep.crossover_log2_m.has_value());
}

TEST_CASE("walk sums over all lengths match hand counts") {
    // lengths <= 2: empty + "+" + "++" = 3 walks; the report's walk_bits uses
    // the same sum, checked here through the public counter
    std::int64_t total = 1;
    for (int L = 1; L <= 2; ++L) total += count_positive_walks(L);
    CHECK(total == 3);
    total = 1;
    for (int L = 1; L <= 4; ++L) total += count_positive_walks(L);
    CHECK(total == 8);  // 1 + 1 + 1 + 2 + 3
}

TEST_CASE("log json round trip and malformed json") {
    Fixture fx = root_square();
    RunLog log = encoded(fx, Seed{{4, 1, 2, 3, 4, 3, 2, 1, 4}});
    nlohmann::json j = log_to_json(log);
    CHECK(log_from_json(j) == log);
    j.erase("W");
    CHECK_THROWS_MATCHES(log_from_json(j), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::MalformedLog;
                         }));
    CHECK_THROWS_AS(log_from_json(nlohmann::json::parse(R"({"mode":"sideways"})")), Error);
}
