#pragma once

// Transaction tables, per-group price normalization and pooled dispersion.

#include "pricedisp/estimate.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pdisp {

struct Transaction {
    std::string good_id;
    std::string market_id;
    std::string quarter;
    double price = 0.0;
    double quantity = 0.0;
    std::size_t row = 0;  // 1-based line number in the source (header is line 1)
};

struct TransactionTable {
    std::vector<Transaction> rows;

    std::size_t size() const { return rows.size(); }
};

/// Reads `good_id,market_id,quarter,price,quantity` with a header row.
/// Throws EmptyInput for an empty stream or a header with no rows, and
/// MalformedRow for the first row that fails validation.
TransactionTable load_transactions(std::istream& in, char delimiter = ',');
void write_transactions(std::ostream& out, const TransactionTable& table, char delimiter = ',');

enum class Grouping { Good, GoodMarket, GoodMarketQuarter };

Grouping parse_grouping(const std::string& name);
std::string to_string(Grouping grouping);

struct NormalizedSample {
    std::string key;
    double mean_price = 0.0;  // mu_0 of the group
    std::vector<double> values;
    std::vector<double> weights;

    Sample as_sample() const { return {values, weights}; }
};

/// One sample per group, ordered by key. mu_0 is the quantity-weighted mean
/// price unless `quantity_weighted` is false.
std::vector<NormalizedSample> normalize_prices(const TransactionTable& table, Grouping grouping,
                                               bool quantity_weighted = true);

/// Divides a group's values by their own (weighted) mean again.
NormalizedSample renormalize(const NormalizedSample& sample, bool quantity_weighted = true);

struct StdDevPool {
    Sample sample;             // one weighted population std per group
    std::vector<std::string> keys;
    std::size_t skipped = 0;   // groups with fewer than two transactions
};

StdDevPool group_std_devs(const std::vector<NormalizedSample>& samples);

/// Rows `group_key,value,weight`.
void write_normalized(std::ostream& out, const std::vector<NormalizedSample>& samples);

/// Reads a numeric sample table with a header. Uses the `value` column when
/// present (else the first column) and the `weight` column when present.
Sample read_sample_table(std::istream& in);

}  // namespace pdisp
