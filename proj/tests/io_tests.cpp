#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fip/io.hpp"
#include "support/process.hpp"
#include "support/test_support.hpp"

#include <filesystem>
#include <sstream>

using namespace fip;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    TempDir() : path(testing::make_temp_dir("fip_io_")) {}
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    fs::path path;

    std::string file(const std::string& name, const std::string& contents) const {
        const fs::path p = path / name;
        testing::write_file(p, contents);
        return p.string();
    }
};

}  // namespace

TEST_CASE("market loading: long-format pair, zero fill, union grid with liabilities") {
    TempDir dir;
    const std::string instruments = dir.file("instruments.csv",
                                             "id,price\n"
                                             "zcb,0.95\n"
                                             "coupon,1.02\n");
    const std::string cashflows = dir.file("cashflows.csv",
                                           "id,date,amount\n"
                                           "zcb,2,1\n"
                                           "coupon,1,0.05\n"
                                           "coupon,2,1.05\n");
    const std::string liabilities = dir.file("liabilities.csv",
                                             "date,amount\n"
                                             "1.5,2\n"
                                             "2,1\n");

    const io::MarketBundle bundle = io::load_market(instruments, cashflows, liabilities);
    REQUIRE(bundle.market.date_count() == 3);  // 1, 1.5, 2 -- union of both files
    CHECK(bundle.market.grid[0] == 1.0);
    CHECK(bundle.market.grid[1] == 1.5);
    CHECK(bundle.market.grid[2] == 2.0);
    CHECK(bundle.ids == std::vector<std::string>{"zcb", "coupon"});
    CHECK(bundle.market.cashflows(0, 0) == 0.0);
    CHECK(bundle.market.cashflows(0, 1) == 0.0);  // liability-only date: zero column
    CHECK(bundle.market.cashflows(0, 2) == 1.0);
    CHECK(bundle.market.cashflows(1, 0) == 0.05);
    REQUIRE(bundle.liabilities.has_value());
    CHECK(bundle.liabilities->amounts(0) == 0.0);
    CHECK(bundle.liabilities->amounts(1) == 2.0);
    CHECK(bundle.liabilities->amounts(2) == 1.0);
}

TEST_CASE("market loading: strict failures carry file and line") {
    TempDir dir;
    const std::string instruments = dir.file("i.csv", "id,price\na,1\n");

    auto expect_failure = [&](const std::string& cashflows, const char* needle) {
        try {
            io::load_market(instruments, cashflows);
            FAIL_CHECK("expected ParseError for ", needle);
        } catch (const io::ParseError& err) {
            CHECK(std::string(err.what()).find(needle) != std::string::npos);
        }
    };

    expect_failure(dir.file("unknown_col.csv", "id,date,amount,extra\na,1,1,1\n"), "header");
    expect_failure(dir.file("bad_ref.csv", "id,date,amount\nmissing,1,1\n"), "unknown instrument");
    expect_failure(dir.file("bad_num.csv", "id,date,amount\na,1,abc\n"), "expected a number");
    expect_failure(dir.file("bad_date.csv", "id,date,amount\na,-1,1\n"), "strictly positive");
    expect_failure(dir.file("short_row.csv", "id,date,amount\na,1\n"), "expected 3 fields");
    expect_failure(dir.file("empty.csv", ""), "header required");

    try {
        io::load_market(dir.file("dupe.csv", "id,price\na,1\na,2\n"),
                        dir.file("c.csv", "id,date,amount\na,1,1\n"));
        FAIL_CHECK("expected duplicate-id failure");
    } catch (const io::ParseError& err) {
        CHECK(std::string(err.what()).find("duplicate instrument id") != std::string::npos);
        CHECK(std::string(err.what()).find(":3:") != std::string::npos);
    }
}

TEST_CASE("repeated dates merge by summation and are logged") {
    TempDir dir;
    const std::string instruments = dir.file("i.csv", "id,price\na,1\n");
    const std::string cashflows = dir.file("c.csv",
                                           "id,date,amount\n"
                                           "a,1,0.4\n"
                                           "a,1,0.6\n"
                                           "a,2,1\n");
    std::ostringstream log;
    const io::MarketBundle bundle = io::load_market(instruments, cashflows, std::nullopt, &log);
    CHECK(bundle.market.cashflows(0, 0) == 1.0);
    CHECK(bundle.market.cashflows(0, 1) == 1.0);
    CHECK(log.str().find("merged repeated cash flows") != std::string::npos);
}

TEST_CASE("write then reload reproduces the market") {
    testing::Rng rng(77);
    TempDir dir;
    for (int trial = 0; trial < 10; ++trial) {
        const Index m = 1 + rng.below(4);
        const Index n = 1 + rng.below(5);
        const Market market = testing::random_af_market(rng, m, n);
        if (market.cashflows.isZero()) continue;  // nothing to serialize in long format

        std::vector<std::string> ids;
        for (Index i = 0; i < m; ++i) ids.push_back("inst_" + std::to_string(i));
        const std::string ipath = (dir.path / "round_i.csv").string();
        const std::string cpath = (dir.path / "round_c.csv").string();
        io::save_market(ipath, cpath, ids, market);
        const io::MarketBundle reloaded = io::load_market(ipath, cpath);

        // zero-only columns vanish in long format; compare on surviving dates
        REQUIRE(reloaded.market.date_count() <= n);
        for (Index j = 0; j < reloaded.market.date_count(); ++j) {
            const auto original = market.grid.find(reloaded.market.grid[j], 1e-9);
            REQUIRE(original.has_value());
            for (Index i = 0; i < m; ++i) {
                CHECK(reloaded.market.cashflows(i, j) ==
                      doctest::Approx(market.cashflows(i, *original)).epsilon(1e-10));
            }
        }
        for (Index i = 0; i < m; ++i) {
            CHECK(reloaded.market.prices(i) ==
                  doctest::Approx(market.prices(i)).epsilon(1e-10));
        }
        CHECK(reloaded.ids == ids);
    }
}

TEST_CASE("text-born markets round-trip bit-identically") {
    TempDir dir;
    const std::string instruments = dir.file("i.csv", "id,price\na,0.1\nb,0.95\n");
    const std::string cashflows = dir.file("c.csv",
                                           "id,date,amount\n"
                                           "a,0.25,0.1\n"
                                           "a,1,1.05\n"
                                           "b,2,1\n");
    const io::MarketBundle first = io::load_market(instruments, cashflows);
    const std::string i2 = (dir.path / "i2.csv").string();
    const std::string c2 = (dir.path / "c2.csv").string();
    io::save_market(i2, c2, first.ids, first.market);
    const io::MarketBundle second = io::load_market(i2, c2);
    CHECK(second.ids == first.ids);
    CHECK(second.market.grid == first.market.grid);
    CHECK(second.market.prices == first.market.prices);
    CHECK(second.market.cashflows == first.market.cashflows);
}

TEST_CASE("curve JSON round-trip and strictness") {
    TempDir dir;
    Vector times(3), values(3);
    times << 0.0, 1.0, 2.5;
    values << 1.0, 0.93, 0.81;
    const DiscountCurve curve(times, values, 0.015);
    const std::string path = (dir.path / "curve.json").string();
    io::save_curve(path, curve);
    const DiscountCurve reloaded = io::load_curve(path);
    CHECK(reloaded.knot_times() == curve.knot_times());
    CHECK(reloaded.knot_values() == curve.knot_values());
    CHECK(reloaded.long_end_yield() == curve.long_end_yield());

    CHECK_THROWS_AS(io::load_curve(dir.file("extra.json",
                                            R"({"knot_times":[0,1],"knot_values":[1,0.9],)"
                                            R"("long_end_yield":0,"color":"blue"})")),
                    io::ParseError);
    CHECK_THROWS_AS(io::load_curve(dir.file("missing.json", R"({"knot_times":[0,1]})")),
                    io::ParseError);
    CHECK_THROWS_AS(io::load_curve(dir.file("anchor.json",
                                            R"({"knot_times":[0,1],"knot_values":[0.99,0.9],)"
                                            R"("long_end_yield":0})")),
                    io::ParseError);
}

TEST_CASE("swap universe JSON: parsing and validation") {
    TempDir dir;
    const SwapUniverseSpec spec = io::load_swap_universe(dir.file(
        "u.json",
        R"({"accrual":0.5,"swaps":[{"periods":2,"rate":0.03},{"periods":1,"rate":0.02}],)"
        R"("fixings":[0.01,0.012]})"));
    CHECK(spec.accrual == 0.5);
    CHECK(spec.swap_count() == 2);
    CHECK(spec.repo_fixings(1) == 0.012);
    CHECK(spec.grid()[1] == 1.0);

    CHECK_THROWS_AS(
        io::load_swap_universe(dir.file("empty.json", R"({"accrual":1,"swaps":[],"fixings":[0.01]})")),
        io::ParseError);
    CHECK_THROWS_AS(
        io::load_swap_universe(dir.file(
            "long.json", R"({"accrual":1,"swaps":[{"periods":5,"rate":0.1}],"fixings":[0.01]})")),
        io::ParseError);
    CHECK_THROWS_AS(io::load_swap_universe(dir.file(
                        "frac.json",
                        R"({"accrual":1,"swaps":[{"periods":1.5,"rate":0.1}],"fixings":[0.01]})")),
                    io::ParseError);
}

TEST_CASE("positions file and digest are stable") {
    TempDir dir;
    const std::string positions = dir.file("q.txt", "1.5\n\n-0.25\n");
    const Vector q = io::read_positions(positions, 2);
    CHECK(q(0) == 1.5);
    CHECK(q(1) == -0.25);
    CHECK_THROWS_AS(io::read_positions(positions, 3), io::ParseError);

    const std::string digest = io::file_digest(positions);
    CHECK(digest.size() == 16);
    CHECK(digest == io::file_digest(positions));
    const std::string other = dir.file("other.txt", "1.5\n\n-0.26\n");
    CHECK(digest != io::file_digest(other));
}

TEST_CASE("round_sig truncates to significant digits") {
    CHECK(io::round_sig(1.0 / 3.0, 12) == 0.333333333333);
    CHECK(io::round_sig(123456.789, 6) == 123457.0);
    CHECK(io::round_sig(0.0, 12) == 0.0);
    CHECK(io::round_sig(-9.87654321e-7, 3) == -9.88e-7);
}
