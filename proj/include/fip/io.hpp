#pragma once

#include "fip/instruments.hpp"
#include "fip/types.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fip::io {

/// Input diagnostics carry "<file>:<line>: message".
class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MarketBundle {
    Market market;
    std::vector<std::string> ids;  // instrument ids in row order
    std::optional<LiabilitySchedule> liabilities;
};

/// Loads the instruments/cashflows CSV pair (headers "id,price" and
/// "id,date,amount"; parsing is strict, unknown columns rejected) and
/// optionally a liabilities CSV ("date,amount"). The grid is the union of all
/// dates seen; absent (instrument, date) entries are zero. Duplicate dates
/// for the same instrument are merged by summation and noted on log.
MarketBundle load_market(const std::string& instruments_csv, const std::string& cashflows_csv,
                         const std::optional<std::string>& liabilities_csv = std::nullopt,
                         std::ostream* log = nullptr);

void write_instruments_csv(std::ostream& os, const std::vector<std::string>& ids,
                           const Vector& prices);
void write_cashflows_csv(std::ostream& os, const std::vector<std::string>& ids,
                         const DateGrid& grid, const Matrix& cashflows);

void save_market(const std::string& instruments_csv, const std::string& cashflows_csv,
                 const std::vector<std::string>& ids, const Market& market);

/// Curve JSON: {"knot_times":[...],"knot_values":[...],"long_end_yield":r}.
DiscountCurve load_curve(const std::string& path);
void save_curve(const std::string& path, const DiscountCurve& curve);

/// Swap universe JSON:
/// {"accrual":d,"swaps":[{"periods":n,"rate":r},...],"fixings":[...]}.
SwapUniverseSpec load_swap_universe(const std::string& path);

/// Plain list of positions, one number per line.
Vector read_positions(const std::string& path, Index expected_size);

/// FNV-1a 64-bit digest of the file contents, as hex.
std::string file_digest(const std::string& path);

/// Rounds to the given number of significant decimal digits.
double round_sig(double x, int digits);

}  // namespace fip::io
