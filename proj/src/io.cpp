#include "fip/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace fip::io {

namespace {

using nlohmann::json;

constexpr double kDateTol = 1e-9;  // decimal year fractions carry rounding noise

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& message) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& path, std::size_t line, const std::string& token) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || token.empty()) {
        fail(path, line, "expected a number, got '" + token + "'");
    }
    if (!std::isfinite(value)) fail(path, line, "number must be finite");
    return value;
}

struct CsvTable {
    std::vector<std::vector<std::string>> rows;  // data rows only
    std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::string& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    const std::size_t arity = split_fields(expected_header).size();
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (!header_seen) {
            std::vector<std::string> header = split_fields(stripped);
            std::string joined;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (i > 0) joined += ',';
                joined += header[i];
            }
            if (joined != expected_header) {
                fail(path, line_no,
                     "header must be exactly '" + expected_header + "', got '" + joined + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields = split_fields(stripped);
        if (fields.size() != arity) {
            fail(path, line_no,
                 "expected " + std::to_string(arity) + " fields, got " +
                     std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (!header_seen) throw ParseError(path + ": empty file, header required");
    return table;
}

// Clustered date axis: dates within kDateTol collapse onto one knot.
class DateAxis {
public:
    Index insert(double date) {
        for (std::size_t k = 0; k < dates_.size(); ++k) {
            if (std::abs(dates_[k] - date) <= kDateTol) return static_cast<Index>(k);
        }
        dates_.push_back(date);
        return static_cast<Index>(dates_.size() - 1);
    }

    // sorted grid plus the permutation old-slot -> grid index
    std::pair<DateGrid, std::vector<Index>> finalize() const {
        std::vector<std::size_t> order(dates_.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return dates_[a] < dates_[b]; });
        Vector sorted(static_cast<Index>(dates_.size()));
        std::vector<Index> position(dates_.size());
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            sorted(static_cast<Index>(rank)) = dates_[order[rank]];
            position[order[rank]] = static_cast<Index>(rank);
        }
        return {DateGrid(std::move(sorted)), position};
    }

    bool empty() const { return dates_.empty(); }

private:
    std::vector<double> dates_;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    json data;
    try {
        data = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ParseError(path + ": " + err.what());
    }
    return data;
}

void require_keys(const std::string& path, const json& object,
                  const std::vector<std::string>& keys) {
    if (!object.is_object()) throw ParseError(path + ": expected a JSON object");
    for (const auto& item : object.items()) {
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
            throw ParseError(path + ": unknown key '" + item.key() + "'");
        }
    }
    for (const std::string& key : keys) {
        if (!object.contains(key)) throw ParseError(path + ": missing key '" + key + "'");
    }
}

Vector to_vector(const std::string& path, const json& array, const char* what) {
    if (!array.is_array()) throw ParseError(path + ": '" + what + "' must be an array");
    Vector out(static_cast<Index>(array.size()));
    Index i = 0;
    for (const auto& item : array) {
        if (!item.is_number()) throw ParseError(path + ": '" + what + "' must hold numbers");
        out(i++) = item.get<double>();
    }
    return out;
}

void write_number(std::ostream& os, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    os << buffer;
}

}  // namespace

MarketBundle load_market(const std::string& instruments_csv, const std::string& cashflows_csv,
                         const std::optional<std::string>& liabilities_csv, std::ostream* log) {
    const CsvTable instruments = read_csv(instruments_csv, "id,price");
    if (instruments.rows.empty()) {
        throw ParseError(instruments_csv + ": at least one instrument required");
    }

    std::vector<std::string> ids;
    std::map<std::string, Index> row_of;
    Vector prices(static_cast<Index>(instruments.rows.size()));
    for (std::size_t r = 0; r < instruments.rows.size(); ++r) {
        const std::string& id = instruments.rows[r][0];
        if (id.empty()) fail(instruments_csv, instruments.line_numbers[r], "empty instrument id");
        if (row_of.count(id) != 0) {
            fail(instruments_csv, instruments.line_numbers[r], "duplicate instrument id '" + id + "'");
        }
        row_of[id] = static_cast<Index>(r);
        ids.push_back(id);
        prices(static_cast<Index>(r)) =
            parse_number(instruments_csv, instruments.line_numbers[r], instruments.rows[r][1]);
    }

    const CsvTable cashflows = read_csv(cashflows_csv, "id,date,amount");
    struct Flow {
        Index instrument;
        Index date_slot;
        double amount;
        std::string id;
        double date;
    };
    DateAxis axis;
    std::vector<Flow> flows;
    for (std::size_t r = 0; r < cashflows.rows.size(); ++r) {
        const std::size_t line = cashflows.line_numbers[r];
        const std::string& id = cashflows.rows[r][0];
        const auto lookup = row_of.find(id);
        if (lookup == row_of.end()) {
            fail(cashflows_csv, line, "unknown instrument id '" + id + "'");
        }
        const double date = parse_number(cashflows_csv, line, cashflows.rows[r][1]);
        if (!(date > 0.0)) fail(cashflows_csv, line, "dates must be strictly positive");
        const double amount = parse_number(cashflows_csv, line, cashflows.rows[r][2]);
        flows.push_back({lookup->second, axis.insert(date), amount, id, date});
    }

    struct Liability {
        Index date_slot;
        double amount;
        double date;
    };
    std::vector<Liability> liability_rows;
    if (liabilities_csv.has_value()) {
        const CsvTable liabilities = read_csv(*liabilities_csv, "date,amount");
        for (std::size_t r = 0; r < liabilities.rows.size(); ++r) {
            const std::size_t line = liabilities.line_numbers[r];
            const double date = parse_number(*liabilities_csv, line, liabilities.rows[r][0]);
            if (!(date > 0.0)) fail(*liabilities_csv, line, "dates must be strictly positive");
            const double amount = parse_number(*liabilities_csv, line, liabilities.rows[r][1]);
            liability_rows.push_back({axis.insert(date), amount, date});
        }
    }

    if (axis.empty()) throw ParseError(cashflows_csv + ": no cash-flow dates present");
    const auto [grid, position] = axis.finalize();

    Matrix c = Matrix::Zero(static_cast<Index>(ids.size()), grid.size());
    std::map<std::pair<Index, Index>, int> hits;
    for (const Flow& flow : flows) {
        const Index j = position[static_cast<std::size_t>(flow.date_slot)];
        c(flow.instrument, j) += flow.amount;
        const int count = ++hits[{flow.instrument, j}];
        if (count == 2 && log != nullptr) {
            *log << "note: merged repeated cash flows for instrument '" << flow.id
                 << "' at date " << flow.date << " by summation\n";
        }
    }

    MarketBundle bundle{Market(grid, std::move(prices), std::move(c)), std::move(ids),
                        std::nullopt};

    if (liabilities_csv.has_value()) {
        Vector z = Vector::Zero(grid.size());
        std::map<Index, int> seen;
        for (const Liability& row : liability_rows) {
            const Index j = position[static_cast<std::size_t>(row.date_slot)];
            z(j) += row.amount;
            if (++seen[j] == 2 && log != nullptr) {
                *log << "note: merged repeated liability amounts at date " << row.date
                     << " by summation\n";
            }
        }
        bundle.liabilities = LiabilitySchedule(grid, std::move(z));
    }
    return bundle;
}

void write_instruments_csv(std::ostream& os, const std::vector<std::string>& ids,
                           const Vector& prices) {
    os << "id,price\n";
    for (Index i = 0; i < prices.size(); ++i) {
        os << ids[static_cast<std::size_t>(i)] << ',';
        write_number(os, prices(i));
        os << '\n';
    }
}

void write_cashflows_csv(std::ostream& os, const std::vector<std::string>& ids,
                         const DateGrid& grid, const Matrix& cashflows) {
    os << "id,date,amount\n";
    for (Index i = 0; i < cashflows.rows(); ++i) {
        for (Index j = 0; j < cashflows.cols(); ++j) {
            if (cashflows(i, j) == 0.0) continue;
            os << ids[static_cast<std::size_t>(i)] << ',';
            write_number(os, grid[j]);
            os << ',';
            write_number(os, cashflows(i, j));
            os << '\n';
        }
    }
}

void save_market(const std::string& instruments_csv, const std::string& cashflows_csv,
                 const std::vector<std::string>& ids, const Market& market) {
    std::ofstream instruments(instruments_csv);
    if (!instruments) throw ParseError(instruments_csv + ": cannot open for writing");
    write_instruments_csv(instruments, ids, market.prices);
    std::ofstream cashflows(cashflows_csv);
    if (!cashflows) throw ParseError(cashflows_csv + ": cannot open for writing");
    write_cashflows_csv(cashflows, ids, market.grid, market.cashflows);
}

DiscountCurve load_curve(const std::string& path) {
    const json data = read_json_file(path);
    require_keys(path, data, {"knot_times", "knot_values", "long_end_yield"});
    if (!data["long_end_yield"].is_number()) {
        throw ParseError(path + ": 'long_end_yield' must be a number");
    }
    try {
        return DiscountCurve(to_vector(path, data["knot_times"], "knot_times"),
                             to_vector(path, data["knot_values"], "knot_values"),
                             data["long_end_yield"].get<double>());
    } catch (const std::invalid_argument& err) {
        throw ParseError(path + ": " + err.what());
    }
}

void save_curve(const std::string& path, const DiscountCurve& curve) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    json data;
    data["knot_times"] = std::vector<double>(curve.knot_times().begin(), curve.knot_times().end());
    data["knot_values"] =
        std::vector<double>(curve.knot_values().begin(), curve.knot_values().end());
    data["long_end_yield"] = curve.long_end_yield();
    out << data.dump(2) << '\n';
}

SwapUniverseSpec load_swap_universe(const std::string& path) {
    const json data = read_json_file(path);
    require_keys(path, data, {"accrual", "swaps", "fixings"});
    if (!data["accrual"].is_number()) throw ParseError(path + ": 'accrual' must be a number");
    if (!data["swaps"].is_array()) throw ParseError(path + ": 'swaps' must be an array");

    std::vector<SwapTerms> swaps;
    for (const auto& item : data["swaps"]) {
        require_keys(path, item, {"periods", "rate"});
        if (!item["periods"].is_number_integer()) {
            throw ParseError(path + ": swap 'periods' must be an integer");
        }
        if (!item["rate"].is_number()) throw ParseError(path + ": swap 'rate' must be a number");
        swaps.push_back({item["periods"].get<int>(), item["rate"].get<double>()});
    }
    try {
        return SwapUniverseSpec(data["accrual"].get<double>(), std::move(swaps),
                                to_vector(path, data["fixings"], "fixings"));
    } catch (const std::invalid_argument& err) {
        throw ParseError(path + ": " + err.what());
    }
}

Vector read_positions(const std::string& path, Index expected_size) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        values.push_back(parse_number(path, line_no, stripped));
    }
    if (static_cast<Index>(values.size()) != expected_size) {
        throw ParseError(path + ": expected " + std::to_string(expected_size) +
                         " positions, got " + std::to_string(values.size()));
    }
    Vector out(expected_size);
    for (Index i = 0; i < expected_size; ++i) out(i) = values[static_cast<std::size_t>(i)];
    return out;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::uint64_t hash = 1469598103934665603ull;
    char byte = 0;
    while (in.get(byte)) {
        hash ^= static_cast<std::uint64_t>(static_cast<unsigned char>(byte));
        hash *= 1099511628211ull;
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << hash;
    return hex.str();
}

double round_sig(double x, int digits) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const double magnitude = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(x))));
    return std::round(x * magnitude) / magnitude;
}

}  // namespace fip::io
