#pragma once

// Kernel files (dense text, CSV, JSON) and analytic kernel presets discretized
// to step graphons.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "graphon_cheeger/core.hpp"
#include "graphon_cheeger/error.hpp"

namespace graphon_cheeger {

enum class KernelFormat { DenseText, Csv, Json };

inline KernelFormat parse_kernel_format(std::string_view name) {
    if (name == "dense-text" || name == "text" || name == "txt") return KernelFormat::DenseText;
    if (name == "csv") return KernelFormat::Csv;
    if (name == "json") return KernelFormat::Json;
    throw Error(ErrorCode::InvalidArgument, "unknown kernel format '" + std::string(name) + "'");
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
    while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
    return s;
}

inline std::string where(std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline double parse_real(std::string_view token, std::size_t line, std::size_t column) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty()) {
        throw Error(ErrorCode::ParseError, "bad number '" + std::string(token) + "' at " + where(line, column));
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

inline void check_range(const Eigen::MatrixXd& k) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            const double v = k(i, j);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorCode::ValueOutOfRange, "entry " + format_double(v) + " at (row " + std::to_string(i) +
                                                            ", col " + std::to_string(j) + ") not in [0,1]");
            }
        }
    }
}

inline Eigen::MatrixXd parse_dense_text(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorCode::ParseError, "empty input");
    const auto head = split_whitespace(lines[0]);
    if (head.size() != 1) throw Error(ErrorCode::ParseError, "first line must hold n");
    std::size_t n = 0;
    const auto res = std::from_chars(head[0].data(), head[0].data() + head[0].size(), n);
    if (res.ec != std::errc() || res.ptr != head[0].data() + head[0].size() || n == 0) {
        throw Error(ErrorCode::ParseError, "bad cell count '" + std::string(head[0]) + "' at " + where(1, 1));
    }
    if (lines.size() != n + 1) {
        throw Error(ErrorCode::NonSquare, "expected " + std::to_string(n) + " rows, found " + std::to_string(lines.size() - 1));
    }
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd k(nn, nn);
    for (std::size_t r = 0; r < n; ++r) {
        const auto tokens = split_whitespace(lines[r + 1]);
        if (tokens.size() != n) {
            throw Error(ErrorCode::NonSquare, "row " + std::to_string(r) + " has " + std::to_string(tokens.size()) +
                                                  " entries, expected " + std::to_string(n));
        }
        for (std::size_t c = 0; c < n; ++c) {
            k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_real(tokens[c], r + 2, c + 1);
        }
    }
    return k;
}

inline Eigen::MatrixXd parse_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorCode::ParseError, "empty input");
    const std::size_t n = split(lines[0], ',').size();
    if (lines.size() != n + 1) {
        throw Error(ErrorCode::NonSquare, "header names " + std::to_string(n) + " columns but " +
                                              std::to_string(lines.size() - 1) + " rows follow");
    }
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd k(nn, nn);
    for (std::size_t r = 0; r < n; ++r) {
        const auto fields = split(lines[r + 1], ',');
        if (fields.size() != n) {
            throw Error(ErrorCode::NonSquare, "row " + std::to_string(r) + " has " + std::to_string(fields.size()) +
                                                  " fields, expected " + std::to_string(n));
        }
        for (std::size_t c = 0; c < n; ++c) {
            std::string_view f = trim(fields[c]);
            if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
            k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_real(f, r + 2, c + 1);
        }
    }
    return k;
}

inline Eigen::MatrixXd parse_json_kernel(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    const nlohmann::json& rows = doc.is_object() ? doc.at("kernel") : doc;
    if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::ParseError, "kernel must be a nonempty array of rows");
    const std::size_t n = rows.size();
    if (doc.is_object() && doc.contains("n") && doc["n"].get<std::size_t>() != n) {
        throw Error(ErrorCode::NonSquare, "field n disagrees with the number of rows");
    }
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd k(nn, nn);
    for (std::size_t r = 0; r < n; ++r) {
        if (!rows[r].is_array() || rows[r].size() != n) {
            throw Error(ErrorCode::NonSquare, "row " + std::to_string(r) + " does not have " + std::to_string(n) + " entries");
        }
        for (std::size_t c = 0; c < n; ++c) {
            if (!rows[r][c].is_number()) {
                throw Error(ErrorCode::ParseError, "entry at (row " + std::to_string(r) + ", col " + std::to_string(c) +
                                                       ") is not a number");
            }
            k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
        }
    }
    return k;
}

}  // namespace detail

inline Eigen::MatrixXd parse_kernel(std::string_view text, KernelFormat format) {
    Eigen::MatrixXd k;
    switch (format) {
    case KernelFormat::DenseText: k = detail::parse_dense_text(text); break;
    case KernelFormat::Csv: k = detail::parse_csv(text); break;
    case KernelFormat::Json: k = detail::parse_json_kernel(text); break;
    }
    detail::check_range(k);
    return k;
}

inline StepGraphon graphon_from_text(std::string_view text, KernelFormat format, bool require_connected = true) {
    return StepGraphon::create(parse_kernel(text, format), require_connected);
}

inline StepGraphon load_graphon(const std::string& path, KernelFormat format, bool require_connected = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return graphon_from_text(buf.str(), format, require_connected);
}

inline nlohmann::json kernel_to_json(const Eigen::MatrixXd& k) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < k.cols(); ++c) row.push_back(k(r, c));
        rows.push_back(std::move(row));
    }
    return {{"n", k.rows()}, {"kernel", std::move(rows)}};
}

inline std::string write_kernel(const StepGraphon& w, KernelFormat format) {
    const Eigen::MatrixXd& k = w.kernel();
    std::string out;
    switch (format) {
    case KernelFormat::DenseText:
        out = std::to_string(k.rows()) + "\n";
        for (Eigen::Index r = 0; r < k.rows(); ++r) {
            for (Eigen::Index c = 0; c < k.cols(); ++c) {
                if (c) out += ' ';
                out += format_double(k(r, c));
            }
            out += '\n';
        }
        break;
    case KernelFormat::Csv:
        for (Eigen::Index c = 0; c < k.cols(); ++c) {
            if (c) out += ',';
            out += "c" + std::to_string(c);
        }
        out += '\n';
        for (Eigen::Index r = 0; r < k.rows(); ++r) {
            for (Eigen::Index c = 0; c < k.cols(); ++c) {
                if (c) out += ',';
                out += format_double(k(r, c));
            }
            out += '\n';
        }
        break;
    case KernelFormat::Json: out = kernel_to_json(k).dump(2) + "\n"; break;
    }
    return out;
}

inline void save_graphon(const StepGraphon& w, const std::string& path, KernelFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
    out << write_kernel(w, format);
}

// ---------------------------------------------------------------------------
// Presets

struct KernelPreset {
    enum class Kind { Constant, Sbm, Product, Mean, Min };
    Kind kind = Kind::Constant;
    std::size_t blocks = 1;
    double p = 1.0;
    double q = 0.0;

    double operator()(double x, double y) const {
        switch (kind) {
        case Kind::Constant: return p;
        case Kind::Sbm: {
            const auto bx = std::min(static_cast<std::size_t>(x * static_cast<double>(blocks)), blocks - 1);
            const auto by = std::min(static_cast<std::size_t>(y * static_cast<double>(blocks)), blocks - 1);
            return bx == by ? p : q;
        }
        case Kind::Product: return x * y;
        case Kind::Mean: return 0.5 * (x + y);
        case Kind::Min: return std::min(x, y);
        }
        return 0.0;
    }

    /// Constant on every cell of an aligned grid, so one sample per cell is exact.
    bool cellwise_constant() const { return kind == Kind::Constant || kind == Kind::Sbm; }

    std::string to_string() const {
        switch (kind) {
        case Kind::Constant: return "constant:" + format_double(p);
        case Kind::Sbm: return "sbm:" + std::to_string(blocks) + "," + format_double(p) + "," + format_double(q);
        case Kind::Product: return "product";
        case Kind::Mean: return "mean";
        case Kind::Min: return "min";
        }
        return {};
    }
};

/// Parses "constant:p", "sbm:blocks,p,q", "product", "mean", "min".
inline KernelPreset parse_preset(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    const std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    const auto params = args.empty() ? std::vector<std::string_view>{} : detail::split(args, ',');
    const auto unit = [&](std::string_view tok) {
        const double v = detail::parse_real(tok, 1, 1);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::ValueOutOfRange, "preset parameter " + std::string(tok) + " not in [0,1]");
        }
        return v;
    };
    KernelPreset p;
    if (name == "constant") {
        if (params.size() != 1) throw Error(ErrorCode::ParseError, "constant takes one parameter: constant:p");
        p.kind = KernelPreset::Kind::Constant;
        p.p = unit(params[0]);
    } else if (name == "sbm") {
        if (params.size() != 3) throw Error(ErrorCode::ParseError, "sbm takes three parameters: sbm:blocks,p,q");
        p.kind = KernelPreset::Kind::Sbm;
        std::size_t b = 0;
        const auto tok = detail::trim(params[0]);
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), b);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || b == 0) {
            throw Error(ErrorCode::ParseError, "bad block count '" + std::string(tok) + "'");
        }
        p.blocks = b;
        p.p = unit(params[1]);
        p.q = unit(params[2]);
    } else if (name == "product" || name == "mean" || name == "min") {
        if (!params.empty()) throw Error(ErrorCode::ParseError, std::string(name) + " takes no parameters");
        p.kind = name == "product" ? KernelPreset::Kind::Product
               : name == "mean"    ? KernelPreset::Kind::Mean
                                   : KernelPreset::Kind::Min;
    } else {
        throw Error(ErrorCode::ParseError, "unknown preset '" + std::string(name) + "'");
    }
    return p;
}

/// Cell averages of the preset over a subsample×subsample midpoint grid.
inline Eigen::MatrixXd discretize_kernel(const KernelPreset& preset, std::size_t n, std::size_t subsample = 8) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    if (subsample == 0) throw Error(ErrorCode::InvalidArgument, "subsample must be positive");
    if (preset.kind == KernelPreset::Kind::Sbm && n % preset.blocks != 0) {
        throw Error(ErrorCode::BlockMisalignment,
                    std::to_string(preset.blocks) + " blocks do not divide " + std::to_string(n) + " cells");
    }
    const auto nn = static_cast<Eigen::Index>(n);
    const double cell = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd k(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
        for (Eigen::Index j = 0; j < nn; ++j) {
            if (preset.cellwise_constant()) {
                k(i, j) = preset((static_cast<double>(i) + 0.5) * cell, (static_cast<double>(j) + 0.5) * cell);
                continue;
            }
            CompensatedSum s;
            for (std::size_t a = 0; a < subsample; ++a) {
                const double x = (static_cast<double>(i) + (static_cast<double>(a) + 0.5) / static_cast<double>(subsample)) * cell;
                for (std::size_t b = 0; b < subsample; ++b) {
                    const double y = (static_cast<double>(j) + (static_cast<double>(b) + 0.5) / static_cast<double>(subsample)) * cell;
                    s += preset(x, y);
                }
            }
            k(i, j) = std::clamp(s.value() / static_cast<double>(subsample * subsample), 0.0, 1.0);
        }
    }
    return k;
}

inline StepGraphon discretize_preset(const KernelPreset& preset, std::size_t n, std::size_t subsample = 8,
                                     bool require_connected = true) {
    return StepGraphon::create(discretize_kernel(preset, n, subsample), require_connected);
}

}  // namespace graphon_cheeger
