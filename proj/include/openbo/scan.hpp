// Tabular scan results and a small deterministic worker pool.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "openbo/error.hpp"

namespace openbo {

struct Column {
    std::string name;
    std::string unit;
};

class ScanTable {
public:
    ScanTable() = default;
    explicit ScanTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

    void add_header(std::string key, std::string value);
    void add_row(std::vector<double> row);

    const std::vector<Column>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& header() const noexcept { return header_; }
    std::size_t column_index(const std::string& name) const;

    void write_csv(std::ostream& out) const;
    std::string to_csv() const;

private:
    std::vector<Column> columns_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::pair<std::string, std::string>> header_;
};

// %.17g rendering used for both data and header echo.
std::string format_number(double value);

// Evaluates f(0..count-1) on up to `jobs` threads; results come back in index
// order. The first failing index (lowest) has its exception rethrown.
template <typename R>
std::vector<R> parallel_map(std::size_t count, std::size_t jobs, const std::function<R(std::size_t)>& f)
{
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    std::vector<R> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i])
            std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

} // namespace openbo
