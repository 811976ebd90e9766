// fip: certify static-arbitrage conditions in fixed-income price systems,
// construct discount-curve witnesses, and compute least-cost super-replication
// portfolios for liability cash flows, including swap-repo synthetics.

#include "fip/arbitrage.hpp"
#include "fip/instruments.hpp"
#include "fip/io.hpp"
#include "fip/lp.hpp"
#include "fip/replication.hpp"
#include "fip/types.hpp"
#include "fip/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using fip::Index;
using fip::Matrix;
using fip::Vector;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitStrictArbitrage = 2;
constexpr int kExitArbitrage = 3;
constexpr int kExitLawOfOnePriceFails = 4;
constexpr int kExitInfeasible = 5;

struct Context {
    fip::TolerancePolicy tol;
    std::string manifest_path;
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
};

ordered_json num(double x) { return fip::io::round_sig(x, 12); }

ordered_json vec(const Vector& v) {
    ordered_json out = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
    return out;
}

ordered_json mat(const Matrix& m) {
    ordered_json out = ordered_json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
        out.push_back(row);
    }
    return out;
}

ordered_json curve_json(const fip::DiscountCurve& curve) {
    ordered_json out;
    out["knot_times"] = vec(curve.knot_times());
    out["knot_values"] = vec(curve.knot_values());
    out["long_end_yield"] = num(curve.long_end_yield());
    return out;
}

ordered_json verdict_json(const fip::ArbitrageVerdict& verdict) {
    ordered_json out;
    out["level"] = to_string(verdict.level);
    out["witness_curve"] =
        verdict.witness_curve.has_value() ? curve_json(*verdict.witness_curve) : ordered_json();
    out["portfolio"] = verdict.violating_portfolio.has_value()
                           ? vec(verdict.violating_portfolio->positions)
                           : ordered_json();
    out["non_unique"] = verdict.non_unique;
    return out;
}

int verdict_exit(fip::ArbitrageLevel level) {
    switch (level) {
        case fip::ArbitrageLevel::ArbitrageFree: return kExitOk;
        case fip::ArbitrageLevel::StrictArbitrage: return kExitStrictArbitrage;
        case fip::ArbitrageLevel::Arbitrage: return kExitArbitrage;
        case fip::ArbitrageLevel::LawOfOnePriceFails: return kExitLawOfOnePriceFails;
    }
    return kExitInputError;
}

void register_input(Context& ctx, const std::string& path) {
    ctx.inputs.emplace_back(path, fip::io::file_digest(path));
}

void write_manifest(const Context& ctx, const ordered_json& summary) {
    if (ctx.manifest_path.empty()) return;
    ordered_json manifest;
    manifest["schema"] = 1;
    manifest["tool"] = "fip";
    manifest["version"] = fip::kVersion;
    manifest["command"] = ctx.command;
    ordered_json inputs;
    for (const auto& [path, digest] : ctx.inputs) inputs[path] = digest;
    manifest["inputs"] = inputs;
    ordered_json tolerances;
    tolerances["feas_tol"] = num(ctx.tol.feas_tol);
    tolerances["strict_tol"] = num(ctx.tol.strict_tol);
    tolerances["rank_tol"] = num(ctx.tol.rank_tol);
    manifest["tolerances"] = tolerances;
    manifest["summary"] = summary;
    std::ofstream out(ctx.manifest_path);
    if (!out) throw fip::io::ParseError(ctx.manifest_path + ": cannot open for writing");
    out << manifest.dump(2) << '\n';
}

void emit(const ordered_json& payload) { std::cout << payload.dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// check

int run_check(Context& ctx, const std::string& instruments, const std::string& cashflows) {
    register_input(ctx, instruments);
    register_input(ctx, cashflows);
    const fip::io::MarketBundle bundle =
        fip::io::load_market(instruments, cashflows, std::nullopt, &std::cerr);
    const fip::ArbitrageVerdict verdict = fip::check_arbitrage(bundle.market, ctx.tol);

    ordered_json out;
    out["schema"] = 1;
    ordered_json body = verdict_json(verdict);
    for (auto& item : body.items()) out[item.key()] = item.value();
    emit(out);

    ordered_json summary;
    summary["level"] = to_string(verdict.level);
    write_manifest(ctx, summary);
    return verdict_exit(verdict.level);
}

// ---------------------------------------------------------------------------
// superrep / hedge

ordered_json hedge_json(const fip::Market& market, const fip::LiabilitySchedule& liab,
                        double lambda, const fip::Portfolio& q) {
    const Vector replication_error =
        market.cashflows.transpose() * q.positions - liab.amounts;
    const double objective =
        replication_error.squaredNorm() + lambda * q.positions.squaredNorm();
    ordered_json out;
    out["schema"] = 1;
    out["lambda"] = num(lambda);
    out["portfolio"] = vec(q.positions);
    out["cost"] = num(q.positions.dot(market.prices));
    out["replication_error"] = vec(replication_error);
    out["objective"] = num(objective);
    return out;
}

int run_hedge(Context& ctx, const std::string& instruments, const std::string& cashflows,
              const std::string& liabilities, double lambda) {
    register_input(ctx, instruments);
    register_input(ctx, cashflows);
    register_input(ctx, liabilities);
    const fip::io::MarketBundle bundle =
        fip::io::load_market(instruments, cashflows, liabilities, &std::cerr);
    const fip::Portfolio q = fip::hedge_quadratic(bundle.market, *bundle.liabilities, lambda);
    const ordered_json out = hedge_json(bundle.market, *bundle.liabilities, lambda, q);
    emit(out);

    ordered_json summary;
    summary["cost"] = out["cost"];
    summary["objective"] = out["objective"];
    write_manifest(ctx, summary);
    return kExitOk;
}

struct AggregateChoice {
    std::string mode;        // "", "buffer", "forward"
    std::string curve_path;  // optional, forward only
};

// Applies the requested aggregation; returns the curve actually used for the
// forward variant (fitted from the market when none is supplied).
fip::Market apply_aggregation(Context& ctx, const fip::Market& market,
                              const fip::LiabilitySchedule& liab, const AggregateChoice& choice) {
    if (choice.mode == "buffer") {
        return fip::aggregate_buffer(market, liab);
    }
    if (choice.mode == "forward") {
        std::optional<fip::DiscountCurve> curve;
        if (!choice.curve_path.empty()) {
            register_input(ctx, choice.curve_path);
            curve = fip::io::load_curve(choice.curve_path);
        } else {
            fip::ArbitrageVerdict verdict = fip::check_arbitrage(market, ctx.tol);
            if (verdict.level != fip::ArbitrageLevel::ArbitrageFree) {
                throw fip::ArbitragePrecludedError(std::move(verdict));
            }
            curve = std::move(*verdict.witness_curve);
        }
        return fip::aggregate_forward(market, liab, *curve, ctx.tol);
    }
    return market;
}

int run_superrep(Context& ctx, const std::string& instruments, const std::string& cashflows,
                 const std::string& liabilities, const AggregateChoice& aggregate,
                 std::optional<double> lambda) {
    register_input(ctx, instruments);
    register_input(ctx, cashflows);
    register_input(ctx, liabilities);
    const fip::io::MarketBundle bundle =
        fip::io::load_market(instruments, cashflows, liabilities, &std::cerr);
    const fip::LiabilitySchedule& liab = *bundle.liabilities;

    if (lambda.has_value()) {  // quadratic-hedge mode
        const fip::Portfolio q = fip::hedge_quadratic(bundle.market, liab, *lambda);
        const ordered_json out = hedge_json(bundle.market, liab, *lambda, q);
        emit(out);
        ordered_json summary;
        summary["cost"] = out["cost"];
        write_manifest(ctx, summary);
        return kExitOk;
    }

    try {
        const fip::Market working = apply_aggregation(ctx, bundle.market, liab, aggregate);
        const fip::SuperReplicationResult result = fip::superreplicate(working, liab, ctx.tol);

        ordered_json out;
        out["schema"] = 1;
        out["status"] = "optimal";
        out["cost"] = num(result.cost);
        out["portfolio"] = vec(result.portfolio.positions);
        out["slack"] = vec(result.slack);
        out["dual_discount"] = vec(result.dual_discount);
        out["possibly_non_unique"] = result.possibly_non_unique;
        out["rank_deficient"] = result.rank_deficient;
        if (!aggregate.mode.empty()) {
            out["aggregation"] = aggregate.mode;
            out["aggregated_cashflows"] = mat(working.cashflows);
        }
        emit(out);

        ordered_json summary;
        summary["status"] = "optimal";
        summary["cost"] = num(result.cost);
        write_manifest(ctx, summary);
        return kExitOk;
    } catch (const fip::InfeasibleLiabilityError& err) {
        ordered_json out;
        out["schema"] = 1;
        out["status"] = "infeasible";
        out["obstruction"] = vec(err.obstruction());
        emit(out);
        ordered_json summary;
        summary["status"] = "infeasible";
        write_manifest(ctx, summary);
        return kExitInfeasible;
    } catch (const fip::ArbitragePrecludedError& err) {
        ordered_json out;
        out["schema"] = 1;
        out["status"] = "arbitrage_precluded";
        out["verdict"] = verdict_json(err.verdict());
        emit(out);
        ordered_json summary;
        summary["status"] = "arbitrage_precluded";
        write_manifest(ctx, summary);
        return kExitArbitrage;
    }
}

// ---------------------------------------------------------------------------
// aggregate

int run_aggregate(Context& ctx, const std::string& instruments, const std::string& cashflows,
                  const std::string& liabilities, const AggregateChoice& choice,
                  const std::string& out_cashflows) {
    register_input(ctx, instruments);
    register_input(ctx, cashflows);
    register_input(ctx, liabilities);
    const fip::io::MarketBundle bundle =
        fip::io::load_market(instruments, cashflows, liabilities, &std::cerr);

    try {
        const fip::Market aggregated =
            apply_aggregation(ctx, bundle.market, *bundle.liabilities, choice);

        if (!out_cashflows.empty()) {
            std::ofstream file(out_cashflows);
            if (!file) throw fip::io::ParseError(out_cashflows + ": cannot open for writing");
            fip::io::write_cashflows_csv(file, bundle.ids, aggregated.grid, aggregated.cashflows);
        }

        ordered_json out;
        out["schema"] = 1;
        out["mode"] = choice.mode;
        out["grid"] = vec(aggregated.grid.dates());
        out["prices"] = vec(aggregated.prices);
        out["cashflows"] = mat(aggregated.cashflows);
        emit(out);

        ordered_json summary;
        summary["mode"] = choice.mode;
        write_manifest(ctx, summary);
        return kExitOk;
    } catch (const fip::ArbitragePrecludedError& err) {
        ordered_json out;
        out["schema"] = 1;
        out["status"] = "arbitrage_precluded";
        out["verdict"] = verdict_json(err.verdict());
        emit(out);
        return kExitArbitrage;
    }
}

// ---------------------------------------------------------------------------
// synth

void print_ledger(std::ostream& os, const std::vector<std::string>& ids, const fip::Portfolio& q,
                  const fip::ExecutionLedger& ledger) {
    char buffer[64];
    auto fmt = [&buffer](double x) {
        std::snprintf(buffer, sizeof(buffer), "%.12g", x);
        return std::string(buffer);
    };
    os << "inception: repo investment " << fmt(ledger.initial_repo_investment)
       << "; swap positions (zero cost):";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        os << ' ' << ids[i] << '=' << fmt(q.positions(static_cast<Index>(i)));
    }
    os << '\n';
    os << std::left << std::setw(12) << "date" << std::setw(18) << "repo_receipt"
       << std::setw(18) << "repo_reinvest" << std::setw(18) << "floating_offset"
       << std::setw(18) << "fixed_interest" << std::setw(18) << "net" << '\n';
    for (const fip::LedgerEntry& entry : ledger.entries) {
        os << std::left << std::setw(12) << fmt(entry.date) << std::setw(18)
           << fmt(entry.repo_receipt) << std::setw(18) << fmt(entry.repo_reinvest)
           << std::setw(18) << fmt(entry.floating_offset) << std::setw(18)
           << fmt(entry.fixed_interest) << std::setw(18) << fmt(entry.net) << '\n';
    }
}

int run_synth(Context& ctx, const std::string& universe, const std::string& out_instruments,
              const std::string& out_cashflows, const std::string& portfolio_path,
              const std::string& ledger_path) {
    register_input(ctx, universe);
    const fip::SwapUniverseSpec spec = fip::io::load_swap_universe(universe);
    const fip::Market market = fip::synthetic_market(spec);

    std::vector<std::string> ids;
    for (Index i = 0; i < spec.swap_count(); ++i) {
        ids.push_back("swap_" + std::to_string(i + 1));
    }
    fip::io::save_market(out_instruments, out_cashflows, ids, market);

    if (!portfolio_path.empty()) {
        register_input(ctx, portfolio_path);
        const fip::Portfolio q(fip::io::read_positions(portfolio_path, spec.swap_count()));
        const fip::ExecutionLedger ledger = fip::execution_schedule(spec, q);
        if (ledger_path.empty()) {
            print_ledger(std::cout, ids, q, ledger);
        } else {
            std::ofstream file(ledger_path);
            if (!file) throw fip::io::ParseError(ledger_path + ": cannot open for writing");
            print_ledger(file, ids, q, ledger);
        }
    } else {
        ordered_json out;
        out["schema"] = 1;
        out["instruments"] = static_cast<std::int64_t>(spec.swap_count());
        out["dates"] = static_cast<std::int64_t>(spec.date_count());
        out["instruments_csv"] = out_instruments;
        out["cashflows_csv"] = out_cashflows;
        emit(out);
    }

    ordered_json summary;
    summary["instruments"] = static_cast<std::int64_t>(spec.swap_count());
    summary["dates"] = static_cast<std::int64_t>(spec.date_count());
    write_manifest(ctx, summary);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gen (hidden): deterministic test-data generation

class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_bits() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Index below(Index n) { return static_cast<Index>(next_bits() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t state_;
};

int run_gen(Context& ctx, std::uint64_t seed, int instruments, int dates, const std::string& kind,
            const std::string& out_instruments, const std::string& out_cashflows,
            const std::string& out_liabilities) {
    if (instruments < 1 || dates < 1) {
        throw fip::io::ParseError("gen: --instruments and --dates must be at least 1");
    }
    SplitMix rng(seed);

    Vector grid_dates(dates);
    double t = 0.0;
    for (int j = 0; j < dates; ++j) {
        t += 0.25 * static_cast<double>(1 + rng.below(4));
        grid_dates(j) = t;
    }
    const fip::DateGrid grid(grid_dates);

    // coupon-bond-like rows: coupons up to a maturity date, redemption there
    Matrix c = Matrix::Zero(instruments, dates);
    for (int i = 0; i < instruments; ++i) {
        const Index maturity = rng.below(dates);
        const double coupon = fip::io::round_sig(rng.uniform(0.0, 0.06), 6);
        for (Index j = 0; j <= maturity; ++j) c(i, j) = coupon;
        c(i, maturity) += 1.0;
    }

    Vector g(dates);
    for (int j = 0; j < dates; ++j) {
        g(j) = std::exp(-rng.uniform(0.0, 0.08) * grid_dates(j));
    }
    Vector prices = c * g;
    if (kind == "perturbed") {
        for (int i = 0; i < instruments; ++i) prices(i) += rng.uniform(-0.05, 0.05);
    } else if (kind != "af") {
        throw fip::io::ParseError("gen: --kind must be 'af' or 'perturbed'");
    }

    std::vector<std::string> ids;
    for (int i = 0; i < instruments; ++i) ids.push_back("inst_" + std::to_string(i + 1));
    fip::io::save_market(out_instruments, out_cashflows, ids, fip::Market(grid, prices, c));

    if (!out_liabilities.empty()) {
        std::ofstream file(out_liabilities);
        if (!file) throw fip::io::ParseError(out_liabilities + ": cannot open for writing");
        file << "date,amount\n";
        char buffer[64];
        for (int j = 0; j < dates; ++j) {
            if (rng.uniform() < 0.3) continue;
            std::snprintf(buffer, sizeof(buffer), "%.12g,%.12g", grid_dates(j),
                          fip::io::round_sig(rng.uniform(0.0, 2.0), 6));
            file << buffer << '\n';
        }
    }

    ordered_json summary;
    summary["seed"] = seed;
    summary["kind"] = kind;
    write_manifest(ctx, summary);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"static-arbitrage certification and liability super-replication for "
                 "fixed-income cash-flow markets"};
    app.require_subcommand(1);

    Context ctx;
    std::string dump_lp_path;
    app.add_option("--tol", ctx.tol.feas_tol, "relative feasibility tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--strict-tol", ctx.tol.strict_tol, "strict-positivity threshold")
        ->check(CLI::PositiveNumber);
    app.add_option("--dump-lp", dump_lp_path,
                   "append every linear program constructed during the run to this file");
    app.add_option("--manifest", ctx.manifest_path, "write a reproducible run manifest here");

    // check
    auto* check = app.add_subcommand("check", "classify a market's arbitrage level");
    std::string check_instruments, check_cashflows;
    check->add_option("instruments", check_instruments, "instruments CSV (id,price)")->required();
    check->add_option("cashflows", check_cashflows, "cash flows CSV (id,date,amount)")->required();

    // superrep
    auto* superrep =
        app.add_subcommand("superrep", "least-cost super-replication of a liability schedule");
    std::string sr_instruments, sr_cashflows, sr_liabilities;
    AggregateChoice sr_aggregate;
    std::optional<double> sr_lambda;
    superrep->add_option("instruments", sr_instruments, "instruments CSV")->required();
    superrep->add_option("cashflows", sr_cashflows, "cash flows CSV")->required();
    superrep->add_option("liabilities", sr_liabilities, "liabilities CSV (date,amount)")
        ->required();
    superrep->add_option("--aggregate", sr_aggregate.mode, "pre-aggregate cash flows")
        ->check(CLI::IsMember({"buffer", "forward"}));
    superrep->add_option("--curve", sr_aggregate.curve_path,
                         "curve JSON for forward aggregation (fitted from the market if omitted)");
    superrep->add_option("--lambda", sr_lambda,
                         "switch to the ridge-regularized quadratic hedge with this weight")
        ->check(CLI::PositiveNumber);

    // hedge
    auto* hedge = app.add_subcommand("hedge", "ridge-regularized quadratic hedge");
    std::string h_instruments, h_cashflows, h_liabilities;
    double h_lambda = 0.0;
    hedge->add_option("instruments", h_instruments, "instruments CSV")->required();
    hedge->add_option("cashflows", h_cashflows, "cash flows CSV")->required();
    hedge->add_option("liabilities", h_liabilities, "liabilities CSV")->required();
    hedge->add_option("--lambda", h_lambda, "ridge weight")
        ->required()
        ->check(CLI::PositiveNumber);

    // aggregate
    auto* aggregate =
        app.add_subcommand("aggregate", "roll cash flows onto the liability payment dates");
    std::string a_instruments, a_cashflows, a_liabilities, a_out_cashflows;
    AggregateChoice a_choice;
    aggregate->add_option("instruments", a_instruments, "instruments CSV")->required();
    aggregate->add_option("cashflows", a_cashflows, "cash flows CSV")->required();
    aggregate->add_option("liabilities", a_liabilities, "liabilities CSV")->required();
    aggregate->add_option("--mode", a_choice.mode, "aggregation style")
        ->required()
        ->check(CLI::IsMember({"buffer", "forward"}));
    aggregate->add_option("--curve", a_choice.curve_path,
                          "curve JSON for forward aggregation (fitted if omitted)");
    aggregate->add_option("--out-cashflows", a_out_cashflows,
                          "also write the aggregated cash flows as CSV");

    // synth
    auto* synth = app.add_subcommand(
        "synth", "expand a swap universe into synthetic coupon-bond market files");
    std::string s_universe, s_out_instruments = "instruments.csv",
                            s_out_cashflows = "cashflows.csv", s_portfolio, s_ledger;
    synth->add_option("universe", s_universe, "swap universe JSON")->required();
    synth->add_option("--out-instruments", s_out_instruments, "instruments CSV to write");
    synth->add_option("--out-cashflows", s_out_cashflows, "cash flows CSV to write");
    synth->add_option("--portfolio", s_portfolio,
                      "positions file (one number per swap); prints the execution ledger");
    synth->add_option("--ledger", s_ledger, "write the execution ledger here instead of stdout");

    // gen (hidden)
    auto* gen = app.add_subcommand("gen", "deterministic test-data generation");
    gen->group("");
    std::uint64_t g_seed = 1;
    int g_instruments = 4, g_dates = 5;
    std::string g_kind = "af", g_out_instruments, g_out_cashflows, g_out_liabilities;
    gen->add_option("--seed", g_seed, "generator seed");
    gen->add_option("--instruments", g_instruments, "number of instruments");
    gen->add_option("--dates", g_dates, "number of grid dates");
    gen->add_option("--kind", g_kind, "'af' or 'perturbed'");
    gen->add_option("--out-instruments", g_out_instruments, "instruments CSV")->required();
    gen->add_option("--out-cashflows", g_out_cashflows, "cash flows CSV")->required();
    gen->add_option("--out-liabilities", g_out_liabilities, "liabilities CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    std::ofstream dump_stream;
    std::optional<fip::lp::ScopedDump> dump_guard;
    if (!dump_lp_path.empty()) {
        dump_stream.open(dump_lp_path, std::ios::app);
        if (!dump_stream) {
            std::cerr << "error: " << dump_lp_path << ": cannot open for writing\n";
            return kExitInputError;
        }
        dump_guard.emplace(dump_stream);
    }

    try {
        ctx.tol.validate();
        if (check->parsed()) {
            ctx.command = "check";
            return run_check(ctx, check_instruments, check_cashflows);
        }
        if (superrep->parsed()) {
            ctx.command = "superrep";
            return run_superrep(ctx, sr_instruments, sr_cashflows, sr_liabilities, sr_aggregate,
                                sr_lambda);
        }
        if (hedge->parsed()) {
            ctx.command = "hedge";
            return run_hedge(ctx, h_instruments, h_cashflows, h_liabilities, h_lambda);
        }
        if (aggregate->parsed()) {
            ctx.command = "aggregate";
            return run_aggregate(ctx, a_instruments, a_cashflows, a_liabilities, a_choice,
                                 a_out_cashflows);
        }
        if (synth->parsed()) {
            ctx.command = "synth";
            return run_synth(ctx, s_universe, s_out_instruments, s_out_cashflows, s_portfolio,
                             s_ledger);
        }
        if (gen->parsed()) {
            ctx.command = "gen";
            return run_gen(ctx, g_seed, g_instruments, g_dates, g_kind, g_out_instruments,
                           g_out_cashflows, g_out_liabilities);
        }
    } catch (const fip::io::ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}
