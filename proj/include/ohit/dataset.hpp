#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ohit/errors.hpp"
#include "ohit/types.hpp"

namespace ohit {

// A set of fixed-length numeric series with one opaque class tag per row.
// Row layout follows the UCR 2015 archive: `label<delim>v1<delim>...<delim>vd`.
struct LabeledSeriesSet {
    Matrix series;                    // n x d
    std::vector<std::string> labels;  // length n
    std::string name;

    Index size() const { return series.rows(); }
    Index length() const { return series.cols(); }
};

// Minority/majority view of a LabeledSeriesSet. Raw labels and row order are
// kept so a resampled set can be written back in the source layout.
struct BinaryDataset {
    Matrix minority;  // n_min x d
    Matrix majority;  // n_maj x d
    std::vector<std::string> minority_tags;  // caller order preserved
    std::vector<std::string> minority_raw_labels;  // per minority row
    std::vector<std::string> majority_raw_labels;  // per majority row

    Index n_min() const { return minority.rows(); }
    Index n_maj() const { return majority.rows(); }
    Index length() const { return minority.cols(); }
};

struct ClassStats {
    Index n_min = 0;
    Index n_maj = 0;
    double imbalance_ratio = 0.0;
};

namespace detail {

inline double parse_value(std::string_view token, Index line_no) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("line " + std::to_string(line_no) +
                         ": not a number: '" + std::string(token) + "'");
    if (!std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) +
                         ": non-finite value '" + std::string(token) + "'");
    return v;
}

// Shortest representation that parses back to the same double.
inline std::string format_value(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

// Reads a delimited series file, one sample per line, label first.
inline LabeledSeriesSet load_series(const std::filesystem::path& path,
                                    char delimiter = ',',
                                    std::string name = "") {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open '" + path.string() + "'");

    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    Index d = -1;

    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string_view> tokens;
        std::string_view rest = line;
        while (true) {
            auto pos = rest.find(delimiter);
            if (pos == std::string_view::npos) {
                tokens.push_back(rest);
                break;
            }
            tokens.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        if (tokens.size() < 2)
            throw FormatError("line " + std::to_string(line_no) +
                              ": expected a label and at least one value");
        if (tokens.front().empty())
            throw FormatError("line " + std::to_string(line_no) +
                              ": empty label");

        const Index row_d = static_cast<Index>(tokens.size()) - 1;
        if (d < 0) {
            d = row_d;
        } else if (row_d != d) {
            throw FormatError("line " + std::to_string(line_no) + ": has " +
                              std::to_string(row_d) + " values, expected " +
                              std::to_string(d));
        }

        labels.emplace_back(tokens.front());
        std::vector<double> row(static_cast<std::size_t>(d));
        for (Index j = 0; j < d; ++j)
            row[static_cast<std::size_t>(j)] =
                detail::parse_value(tokens[static_cast<std::size_t>(j) + 1], line_no);
        rows.push_back(std::move(row));
    }

    if (rows.empty())
        throw EmptyInputError("'" + path.string() + "' contains no samples");

    LabeledSeriesSet out;
    out.name = name.empty() ? path.stem().string() : std::move(name);
    out.labels = std::move(labels);
    out.series.resize(static_cast<Index>(rows.size()), d);
    for (Index i = 0; i < out.series.rows(); ++i)
        for (Index j = 0; j < d; ++j)
            out.series(i, j) =
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return out;
}

inline void write_series(std::ostream& out, const LabeledSeriesSet& data,
                         char delimiter = ',') {
    for (Index i = 0; i < data.series.rows(); ++i) {
        out << data.labels[static_cast<std::size_t>(i)];
        for (Index j = 0; j < data.series.cols(); ++j)
            out << delimiter << detail::format_value(data.series(i, j));
        out << '\n';
    }
}

inline void save_series(const LabeledSeriesSet& data,
                        const std::filesystem::path& path,
                        char delimiter = ',') {
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write '" + path.string() + "'");
    write_series(out, data, delimiter);
}

// Splits samples into minority (any listed tag) and majority (the rest).
inline BinaryDataset binarize(const LabeledSeriesSet& data,
                              const std::vector<std::string>& minority_tags) {
    if (minority_tags.empty())
        throw ParameterError("minority tag set is empty");

    const auto is_minority = [&](const std::string& label) {
        return std::find(minority_tags.begin(), minority_tags.end(), label) !=
               minority_tags.end();
    };

    std::vector<Index> min_rows, maj_rows;
    for (Index i = 0; i < data.size(); ++i) {
        if (is_minority(data.labels[static_cast<std::size_t>(i)]))
            min_rows.push_back(i);
        else
            maj_rows.push_back(i);
    }
    if (min_rows.empty())
        throw DegenerateSplitError("minority tags match no samples in '" +
                                   data.name + "'");
    if (maj_rows.empty())
        throw DegenerateSplitError("minority tags match every sample in '" +
                                   data.name + "'");

    BinaryDataset out;
    out.minority_tags = minority_tags;
    out.minority.resize(static_cast<Index>(min_rows.size()), data.length());
    out.majority.resize(static_cast<Index>(maj_rows.size()), data.length());
    for (std::size_t r = 0; r < min_rows.size(); ++r) {
        out.minority.row(static_cast<Index>(r)) = data.series.row(min_rows[r]);
        out.minority_raw_labels.push_back(
            data.labels[static_cast<std::size_t>(min_rows[r])]);
    }
    for (std::size_t r = 0; r < maj_rows.size(); ++r) {
        out.majority.row(static_cast<Index>(r)) = data.series.row(maj_rows[r]);
        out.majority_raw_labels.push_back(
            data.labels[static_cast<std::size_t>(maj_rows[r])]);
    }
    return out;
}

inline ClassStats class_stats(const BinaryDataset& data) {
    ClassStats s;
    s.n_min = data.n_min();
    s.n_maj = data.n_maj();
    s.imbalance_ratio =
        static_cast<double>(s.n_maj) / static_cast<double>(s.n_min);
    return s;
}

}  // namespace ohit
