#include "skilldtw/distance.hpp"

#include <charconv>
#include <sstream>

namespace skilldtw {

const char* to_string(Metric m) noexcept
{
    switch (m) {
    case Metric::Euclidean: return "euclidean";
    case Metric::SquaredEuclidean: return "squared-euclidean";
    case Metric::Manhattan: return "manhattan";
    }
    return "unknown";
}

Metric metric_from_string(const std::string& s)
{
    if (s == "euclidean") return Metric::Euclidean;
    if (s == "squared-euclidean" || s == "sqeuclidean") return Metric::SquaredEuclidean;
    if (s == "manhattan") return Metric::Manhattan;
    throw Error(Errc::InvalidArgument, "unknown metric '" + s + "'");
}

std::string to_string(const ConstraintBand& band)
{
    switch (band.kind) {
    case ConstraintBand::Kind::None: return "none";
    case ConstraintBand::Kind::SakoeChiba: return "sc:" + std::to_string(band.radius);
    case ConstraintBand::Kind::Itakura: {
        std::ostringstream os;
        os << "itakura:" << band.slope;
        return os.str();
    }
    }
    return "none";
}

ConstraintBand band_from_string(const std::string& s)
{
    if (s == "none") return ConstraintBand::none();
    if (s == "itakura") return ConstraintBand::itakura();
    if (s.rfind("itakura:", 0) == 0) {
        const double slope = std::stod(s.substr(8));
        if (!(slope > 1.0)) throw Error(Errc::InvalidArgument, "Itakura slope must be > 1");
        return ConstraintBand::itakura(slope);
    }
    if (s.rfind("sc:", 0) == 0) {
        long long r = -1;
        const auto tail = s.substr(3);
        const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), r);
        if (res.ec != std::errc() || res.ptr != tail.data() + tail.size() || r < 0)
            throw Error(Errc::InvalidArgument, "bad Sakoe-Chiba radius in '" + s + "'");
        return ConstraintBand::sakoe_chiba(Index(r));
    }
    throw Error(Errc::InvalidArgument, "unknown band '" + s + "' (expected none, itakura[:S] or sc:R)");
}

std::size_t BandWindow::cell_count() const
{
    std::size_t total = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) total += std::size_t(hi[i] - lo[i] + 1);
    return total;
}

namespace {

constexpr double kEps = 1e-9;

// Extend rows so every consecutive pair of ranges is connected by a legal step.
void connect_rows(BandWindow& w)
{
    for (std::size_t i = 0; i + 1 < w.lo.size(); ++i) w.hi[i] = std::max(w.hi[i], w.lo[i + 1] - 1);
}

}  // namespace

BandWindow band_window(Index n, Index m, const ConstraintBand& band)
{
    if (n < 1 || m < 1) throw Error(Errc::InvalidArgument, "band window on empty series");
    BandWindow w;
    w.lo.assign(std::size_t(n), 0);
    w.hi.assign(std::size_t(n), m - 1);
    if (band.kind == ConstraintBand::Kind::None) return w;

    if (band.kind == ConstraintBand::Kind::SakoeChiba) {
        if (band.radius < 0) throw Error(Errc::InvalidArgument, "Sakoe-Chiba radius must be non-negative");
        if (n == 1 || m == 1) return w;
        const double r = double(band.radius);
        for (Index i = 0; i < n; ++i) {
            const double c = double(i) * double(m - 1) / double(n - 1);
            Index lo = std::max<Index>(0, Index(std::ceil(c - r - kEps)));
            Index hi = std::min<Index>(m - 1, Index(std::floor(c + r + kEps)));
            if (lo > hi) lo = hi = std::min<Index>(m - 1, Index(std::floor(c)));
            w.lo[std::size_t(i)] = lo;
            w.hi[std::size_t(i)] = hi;
        }
        connect_rows(w);
        return w;
    }

    const double s = band.slope;
    if (!(s > 1.0)) throw Error(Errc::InvalidArgument, "Itakura slope must be > 1");
    const double dn = double(n - 1), dm = double(m - 1);
    if (dm > s * dn + kEps || dn > s * dm + kEps)
        throw Error(Errc::InfeasibleBand, "Itakura parallelogram with slope " + std::to_string(s) +
                                              " cannot connect corners for lengths " + std::to_string(n) + " and " +
                                              std::to_string(m));
    for (Index i = 0; i < n; ++i) {
        const double di = double(i);
        const double lower = std::max(di / s, dm - s * (dn - di));
        const double upper = std::min(s * di, dm - (dn - di) / s);
        Index lo = std::max<Index>(0, Index(std::floor(lower + kEps)));
        Index hi = std::min<Index>(m - 1, Index(std::ceil(upper - kEps)));
        if (lo > hi) throw Error(Errc::InfeasibleBand, "Itakura parallelogram leaves row " + std::to_string(i) + " empty");
        w.lo[std::size_t(i)] = lo;
        w.hi[std::size_t(i)] = hi;
    }
    connect_rows(w);
    return w;
}

}  // namespace skilldtw
