#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace skilldtw {

using Index = Eigen::Index;

// One recording: rows are time steps, columns are variables. Row-major so a
// time step is a contiguous V-vector.
template <typename Scalar>
using SeriesX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Series = SeriesX<double>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr Index kDefaultVariables = 5;

enum class Errc {
    InvalidArgument,
    LengthMismatch,
    DimensionMismatch,
    NonFinite,
    InfeasibleBand,
    ResourceLimit,
    EmptyCluster,
    NonFiniteObjective,
    EmptyTrainingSet,
    MissingPrototype,
    DegenerateFold,
    SingletonOnly,
    DegenerateClustering,
    EmptySet,
    TooShort,
    NonFiniteSample,
    InvalidWeight,
    InsufficientData,
    ParseError,
    ValidationError,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, std::size_t column, const std::string& what)
        : Error(Errc::ParseError, file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          file_(std::move(file)), line_(line), column_(column)
    {
    }
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::size_t column_;
};

enum class Skill { Novice, Intermediate, Expert };

char to_char(Skill s) noexcept;
Skill skill_from_string(const std::string& s);  // throws ValidationError

struct LabeledSeries {
    Series series;
    Skill skill = Skill::Novice;
    std::string participant;
};

struct Dataset {
    std::string name;
    std::vector<LabeledSeries> items;
    // Variable names, one per column; defaults to x,y,z,pressure,force.
    std::vector<std::string> variables = {"x", "y", "z", "pressure", "force"};

    std::size_t size() const noexcept { return items.size(); }
    Index variable_count() const;
    std::vector<Series> series() const;
};

// Throws NonFinite / InvalidArgument when the series breaks the container invariants.
void validate_series(const Series& s);
void validate_dataset(const Dataset& d);

// ---------------------------------------------------------------------------
// Normalization

enum class NormalizeMode { PerSeries, PerDataset };

struct ChannelStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;  // population standard deviation
};

ChannelStats channel_stats(const Series& s);
ChannelStats channel_stats(const Dataset& d);

struct Normalized {
    Series series;
    std::vector<Index> constant_channels;  // channels left at zero (ConstantChannel warning)
};

// Z-score each variable. PerDataset mode requires explicit stats.
Normalized normalize(const Series& s, NormalizeMode mode = NormalizeMode::PerSeries,
                     const std::optional<ChannelStats>& stats = std::nullopt);

Dataset normalize(const Dataset& d, NormalizeMode mode = NormalizeMode::PerSeries);

// Per-variable linear interpolation onto a uniform grid of target_length points.
// Endpoints are preserved exactly.
Series resample(const Series& s, Index target_length);

// Picks 8 participants x 5 series in the skill layout N,I,E,E,I,N,N,N.
Dataset epidural40_split(const Dataset& d);

// ---------------------------------------------------------------------------
// Utilities

// Runs body(i) for i in [0, n) over `jobs` threads. Each index is visited
// exactly once; the first exception thrown is rethrown on the caller.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body)
{
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// SplitMix64 step; used to derive per-item seeds from (seed, index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace skilldtw
