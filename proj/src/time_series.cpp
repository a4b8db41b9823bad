#include "wpt/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "wpt/errors.hpp"

namespace wpt {

double SampledSignal::at(double t) const {
    if (values.size() == 0) throw ValidationError("signal", "empty signal");
    const double pos = std::floor((t - t0) / dt + 1e-9);
    if (pos <= 0.0) return values[0];
    const auto last = values.size() - 1;
    if (pos >= static_cast<double>(last)) return values[last];
    return values[static_cast<Eigen::Index>(pos)];
}

TimeSeries::TimeSeries(double dt, double t0) : dt_(dt), t0_(t0) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "sample interval must be positive");
}

std::size_t TimeSeries::size() const noexcept {
    return columns_.empty() ? 0 : static_cast<std::size_t>(columns_.front().size());
}

std::ptrdiff_t TimeSeries::index_of(std::string_view name) const noexcept {
    const auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : std::distance(names_.begin(), it);
}

bool TimeSeries::has(std::string_view name) const noexcept { return index_of(name) >= 0; }

void TimeSeries::add(std::string name, Eigen::VectorXd values) {
    if (name.empty() || name == "t") throw ValidationError("channel", "invalid channel name '" + name + "'");
    if (has(name)) throw ValidationError(name, "duplicate channel");
    if (!columns_.empty() && static_cast<std::size_t>(values.size()) != size())
        throw ValidationError(name, "channel length " + std::to_string(values.size()) +
                                        " differs from series length " + std::to_string(size()));
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
}

const Eigen::VectorXd& TimeSeries::operator[](std::string_view name) const {
    const auto i = index_of(name);
    if (i < 0) throw ValidationError(std::string(name), "no such channel");
    return columns_[static_cast<std::size_t>(i)];
}

Eigen::VectorXd& TimeSeries::operator[](std::string_view name) {
    const auto i = index_of(name);
    if (i < 0) throw ValidationError(std::string(name), "no such channel");
    return columns_[static_cast<std::size_t>(i)];
}

SampledSignal TimeSeries::signal(std::string_view name) const { return {t0_, dt_, (*this)[name]}; }

TimeSeries TimeSeries::decimate(std::size_t stride) const {
    if (stride == 0) throw ValidationError("stride", "must be at least 1");
    TimeSeries out(dt_ * static_cast<double>(stride), t0_);
    const auto n = static_cast<Eigen::Index>((size() + stride - 1) / stride);
    for (std::size_t c = 0; c < names_.size(); ++c) {
        Eigen::VectorXd v(n);
        for (Eigen::Index k = 0; k < n; ++k) v[k] = columns_[c][k * static_cast<Eigen::Index>(stride)];
        out.add(names_[c], std::move(v));
    }
    return out;
}

namespace {

void put_number(std::string& line, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    line.append(buf, res.ptr);
}

double parse_number(std::string_view cell, std::size_t row) {
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw IoError("row " + std::to_string(row) + ": cannot parse '" + std::string(cell) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

void write_csv(const TimeSeries& ts, std::ostream& out) {
    std::string line = "t";
    for (const auto& name : ts.names()) {
        line += ',';
        line += name;
    }
    line += '\n';
    out << line;

    std::vector<const Eigen::VectorXd*> cols;
    for (const auto& name : ts.names()) cols.push_back(&ts[name]);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        line.clear();
        put_number(line, ts.time(k));
        for (const auto* c : cols) {
            line += ',';
            put_number(line, (*c)[static_cast<Eigen::Index>(k)]);
        }
        line += '\n';
        out << line;
    }
}

void emit_csv(const TimeSeries& ts, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(ts, out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

TimeSeries read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("missing CSV header");
    std::vector<std::string> header;
    for (const auto cell : split(line)) header.emplace_back(cell);
    if (header.empty() || header.front() != "t") throw IoError("CSV header must start with 't'");

    std::vector<std::vector<double>> rows(header.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw IoError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) + " cells");
        for (std::size_t c = 0; c < cells.size(); ++c) rows[c].push_back(parse_number(cells[c], row));
    }

    const auto& t = rows.front();
    const double dt = t.size() >= 2 ? t[1] - t[0] : 1.0;
    TimeSeries ts(dt, t.empty() ? 0.0 : t.front());
    for (std::size_t c = 1; c < header.size(); ++c)
        ts.add(header[c], Eigen::Map<const Eigen::VectorXd>(rows[c].data(),
                                                                          static_cast<Eigen::Index>(rows[c].size())));
    return ts;
}

TimeSeries read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_csv(in);
}

}  // namespace wpt
