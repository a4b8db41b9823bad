#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace wpt {

/// Uniformly sampled scalar signal read back with a zero-order hold.
struct SampledSignal {
    double t0 = 0.0;
    double dt = 1.0;
    Eigen::VectorXd values;

    /// Value held at time t. Times before t0 or past the last sample clamp to the ends.
    double at(double t) const;

    /// Last instant covered by the hold, t0 + n dt.
    double end_time() const { return t0 + static_cast<double>(values.size()) * dt; }
};

/// Named channels of equal length on a common uniform time grid t_k = t0 + k dt.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(double dt, double t0 = 0.0);

    double dt() const noexcept { return dt_; }
    double t0() const noexcept { return t0_; }
    double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }

    /// Samples per channel (0 when no channel is present).
    std::size_t size() const noexcept;
    std::size_t channel_count() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    bool has(std::string_view name) const noexcept;
    void add(std::string name, Eigen::VectorXd values);
    const Eigen::VectorXd& operator[](std::string_view name) const;
    Eigen::VectorXd& operator[](std::string_view name);

    SampledSignal signal(std::string_view name) const;

    /// Keep every stride-th sample of every channel.
    TimeSeries decimate(std::size_t stride) const;

private:
    std::ptrdiff_t index_of(std::string_view name) const noexcept;

    double dt_ = 1.0;
    double t0_ = 0.0;
    std::vector<std::string> names_;
    std::vector<Eigen::VectorXd> columns_;
};

/// CSV text: header "t,<channel>...", one row per sample, time first,
/// 17 significant digits so values survive a text round trip exactly.
void write_csv(const TimeSeries& ts, std::ostream& out);
void emit_csv(const TimeSeries& ts, const std::filesystem::path& path);

/// Parses the format written by write_csv. dt and t0 are recovered from the
/// time column when at least two rows are present.
TimeSeries read_csv(std::istream& in);
TimeSeries read_csv(const std::filesystem::path& path);

}  // namespace wpt
