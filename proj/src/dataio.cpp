#include "pricedisp/dataio.hpp"

#include "pricedisp/errors.hpp"
#include "pricedisp/grid.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

namespace pdisp {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t a = 0;
    while (a < s.size() && (s[a] == ' ' || s[a] == '\t')) ++a;
    return s.substr(a);
}

bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

constexpr std::array<const char*, 5> kColumns{"good_id", "market_id", "quarter", "price", "quantity"};

}  // namespace

TransactionTable load_transactions(std::istream& in, char delimiter) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInput();
    std::vector<std::string> header = split(strip(line), delimiter);
    for (auto& h : header) h = strip(h);
    if (header.size() == 1 && header[0].empty()) throw EmptyInput();

    std::array<std::size_t, 5> col{};
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = std::find(header.begin(), header.end(), kColumns[c]);
        if (it == header.end()) throw MalformedRow(1, std::string("header lacks column '") + kColumns[c] + "'");
        col[c] = static_cast<std::size_t>(it - header.begin());
    }

    TransactionTable table;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip(line);
        if (line.empty()) continue;
        auto fields = split(line, delimiter);
        if (fields.size() != header.size()) {
            throw MalformedRow(row, "expected " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        for (auto& f : fields) f = strip(f);
        Transaction t;
        t.good_id = fields[col[0]];
        t.market_id = fields[col[1]];
        t.quarter = fields[col[2]];
        t.row = row;
        if (t.good_id.empty() || t.market_id.empty() || t.quarter.empty()) {
            throw MalformedRow(row, "empty identifier");
        }
        if (!parse_double(fields[col[3]], t.price)) throw MalformedRow(row, "price is not a number");
        if (!parse_double(fields[col[4]], t.quantity)) throw MalformedRow(row, "quantity is not a number");
        if (!(t.price > 0.0)) throw MalformedRow(row, "price must be positive");
        if (!(t.quantity > 0.0)) throw MalformedRow(row, "quantity must be positive");
        table.rows.push_back(std::move(t));
    }
    if (table.rows.empty()) throw EmptyInput();
    return table;
}

void write_transactions(std::ostream& out, const TransactionTable& table, char delimiter) {
    out << "good_id" << delimiter << "market_id" << delimiter << "quarter" << delimiter << "price"
        << delimiter << "quantity\n";
    for (const auto& t : table.rows) {
        out << t.good_id << delimiter << t.market_id << delimiter << t.quarter << delimiter
            << format_number(t.price) << delimiter << format_number(t.quantity) << '\n';
    }
}

Grouping parse_grouping(const std::string& name) {
    if (name == "good") return Grouping::Good;
    if (name == "good+market") return Grouping::GoodMarket;
    if (name == "good+market+quarter") return Grouping::GoodMarketQuarter;
    throw InvalidParameter("unknown grouping '" + name + "'");
}

std::string to_string(Grouping grouping) {
    switch (grouping) {
        case Grouping::Good: return "good";
        case Grouping::GoodMarket: return "good+market";
        case Grouping::GoodMarketQuarter: return "good+market+quarter";
    }
    return "unknown";
}

namespace {

std::string group_key(const Transaction& t, Grouping g) {
    switch (g) {
        case Grouping::Good: return t.good_id;
        case Grouping::GoodMarket: return t.good_id + '|' + t.market_id;
        case Grouping::GoodMarketQuarter: return t.good_id + '|' + t.market_id + '|' + t.quarter;
    }
    return t.good_id;
}

double group_mean(const std::vector<double>& values, const std::vector<double>& weights, bool weighted) {
    double sw = 0.0;
    double sv = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weighted ? weights[i] : 1.0;
        sw += w;
        sv += w * values[i];
    }
    return sv / sw;
}

}  // namespace

std::vector<NormalizedSample> normalize_prices(const TransactionTable& table, Grouping grouping,
                                               bool quantity_weighted) {
    if (table.rows.empty()) throw EmptyInput();
    std::map<std::string, NormalizedSample> groups;
    for (const auto& t : table.rows) {
        auto& g = groups[group_key(t, grouping)];
        g.values.push_back(t.price);
        g.weights.push_back(t.quantity);
    }
    std::vector<NormalizedSample> out;
    out.reserve(groups.size());
    for (auto& [key, g] : groups) {
        g.key = key;
        g.mean_price = group_mean(g.values, g.weights, quantity_weighted);
        if (g.values.size() == 1) {
            g.values[0] = 1.0;
        } else {
            for (double& v : g.values) v /= g.mean_price;
        }
        out.push_back(std::move(g));
    }
    return out;
}

NormalizedSample renormalize(const NormalizedSample& sample, bool quantity_weighted) {
    NormalizedSample out = sample;
    const double m = group_mean(out.values, out.weights, quantity_weighted);
    for (double& v : out.values) v /= m;
    out.mean_price = sample.mean_price * m;
    return out;
}

StdDevPool group_std_devs(const std::vector<NormalizedSample>& samples) {
    StdDevPool pool;
    for (const auto& g : samples) {
        if (g.values.size() < 2) {
            ++pool.skipped;
            continue;
        }
        const double m = group_mean(g.values, g.weights, true);
        double sw = 0.0;
        double ss = 0.0;
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            const double d = g.values[i] - m;
            sw += g.weights[i];
            ss += g.weights[i] * d * d;
        }
        pool.sample.values.push_back(std::sqrt(ss / sw));
        pool.keys.push_back(g.key);
    }
    return pool;
}

void write_normalized(std::ostream& out, const std::vector<NormalizedSample>& samples) {
    out << "group_key,value,weight\n";
    for (const auto& g : samples) {
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            out << g.key << ',' << format_number(g.values[i]) << ',' << format_number(g.weights[i]) << '\n';
        }
    }
}

Sample read_sample_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInput();
    auto header = split(strip(line), ',');
    for (auto& h : header) h = strip(h);
    std::size_t value_col = 0;
    std::ptrdiff_t weight_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "value") value_col = c;
        if (header[c] == "weight") weight_col = static_cast<std::ptrdiff_t>(c);
    }
    Sample s;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip(line);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) throw MalformedRow(row, "column count differs from header");
        double v = 0.0;
        if (!parse_double(strip(fields[value_col]), v)) throw MalformedRow(row, "value is not a number");
        s.values.push_back(v);
        if (weight_col >= 0) {
            double w = 0.0;
            if (!parse_double(strip(fields[static_cast<std::size_t>(weight_col)]), w) || !(w > 0.0)) {
                throw MalformedRow(row, "weight must be a positive number");
            }
            s.weights.push_back(w);
        }
    }
    if (s.values.empty()) throw EmptyInput();
    return s;
}

}  // namespace pdisp
