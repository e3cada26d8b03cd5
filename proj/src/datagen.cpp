#include "skilldtw/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace skilldtw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSampleRate = 500.0;

// Template units to recording units: mm, mm, mm, kPa, N.
const double kChannelScale[5] = {1.0, 1.0, 10.0, 10.0, 5.0};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Template at normalized time u in [0, 1], in template units.
Eigen::Matrix<double, 1, 5> template_at(double u)
{
    Eigen::Matrix<double, 1, 5> row;
    row(0) = 0.6 * std::sin(2.0 * kPi * 1.3 * u) + 0.2 * std::sin(2.0 * kPi * 3.1 * u);
    row(1) = 0.5 * std::cos(2.0 * kPi * 0.8 * u) - 0.5 + 0.15 * std::sin(2.0 * kPi * 2.2 * u);
    row(2) = 4.0 * (u - 0.5 * std::sin(2.0 * kPi * u) / (2.0 * kPi));
    // Pressure builds up while advancing, then drops sharply at loss of resistance.
    const double drop = sigmoid((u - kLossOfResistance) / 0.01);
    row(3) = (0.4 + 2.6 * std::pow(u / kLossOfResistance, 1.5)) * (1.0 - drop) + 0.5 * drop;
    row(4) = 0.5 + 1.5 * u + 0.3 * std::sin(2.0 * kPi * 1.7 * u) - 0.8 * drop;
    return row;
}

}  // namespace

const ClassParams& GeneratorConfig::params(Skill s) const
{
    switch (s) {
    case Skill::Novice: return novice;
    case Skill::Intermediate: return intermediate;
    case Skill::Expert: return expert;
    }
    return novice;
}

void validate_config(const GeneratorConfig& c)
{
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidArgument, "generator config: " + what); };
    if (c.layout.empty()) fail("layout is empty");
    if (c.series_per_participant < 1) fail("series per participant must be positive");
    if (c.base_length < 10) fail("base length must be at least 10");
    if (!(c.length_jitter >= 0.0 && c.length_jitter < 0.9)) fail("length jitter must lie in [0, 0.9)");
    if (!(c.bias_scale >= 0.0)) fail("bias scale must be non-negative");
    if (!(c.class_scale >= 0.0)) fail("class scale must be non-negative");
    for (Skill s : {Skill::Novice, Skill::Intermediate, Skill::Expert}) {
        const auto& p = c.params(s);
        if (!(p.noise > 0.0) || !(p.tremor_hz > 0.0) || !(p.warp > 0.0 && p.warp < 0.5))
            fail(std::string("class ") + to_char(s) + " parameters must be positive (warp below 0.5)");
    }
    if (!(c.novice.noise > c.intermediate.noise && c.intermediate.noise > c.expert.noise))
        fail("noise must be ordered novice > intermediate > expert");
}

Series synth_template(Index length)
{
    if (length < 2) throw Error(Errc::InvalidArgument, "template length must be at least 2");
    Series out(length, 5);
    for (Index i = 0; i < length; ++i) {
        const double u = double(i) / double(length - 1);
        out.row(i) = template_at(u).cwiseProduct(Eigen::Map<const Eigen::Matrix<double, 1, 5>>(kChannelScale));
    }
    return out;
}

Dataset synth_dataset(const GeneratorConfig& config)
{
    validate_config(config);
    Dataset out;
    out.name = config.name;
    const std::size_t per = config.series_per_participant;
    out.items.resize(config.layout.size() * per);

    // Participant style: a smooth per-channel deviation that survives z-scoring.
    struct Style {
        Eigen::Matrix<double, 1, 5> amplitude;
        double cycles = 1, phase = 0;
    };
    auto draw_style = [](std::uint64_t seed, double scale) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Style st;
        for (int v = 0; v < 5; ++v) st.amplitude(v) = scale * g(rng);
        st.cycles = 0.5 + 1.5 * u(rng);
        st.phase = 2.0 * kPi * u(rng);
        return st;
    };
    std::vector<Style> style(config.layout.size());
    for (std::size_t p = 0; p < config.layout.size(); ++p) style[p] = draw_style(mix_seed(config.seed ^ 0x5eedb1a5ULL, p), config.bias_scale);
    // Shared technique deviation of each skill class.
    Style class_style[3];
    for (int c = 0; c < 3; ++c) class_style[c] = draw_style(mix_seed(config.seed ^ 0xc1a55e5ULL, std::uint64_t(c)), config.class_scale);

    for (std::size_t k = 0; k < out.items.size(); ++k) {
        const std::size_t p = k / per;
        const Skill skill = config.layout[p];
        const ClassParams& cp = config.params(skill);
        // Style deviations shrink with skill in proportion to the noise level.
        const double spread = cp.noise / config.novice.noise;
        std::mt19937_64 rng(mix_seed(config.seed, k));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);

        const double jitter = 1.0 + config.length_jitter * unit(rng);
        const Index n = std::max<Index>(10, Index(std::llround(double(config.base_length) * jitter)));
        // tau(u) = u + c1 sin(pi u) / pi + c2 sin(2 pi u) / (2 pi): monotone since |c1| + |c2| < 1.
        const double c1 = cp.warp * unit(rng), c2 = cp.warp * unit(rng);
        const double phase = kPi * unit(rng);
        Eigen::Matrix<double, 1, 5> tremor_dir;
        for (int v = 0; v < 5; ++v) tremor_dir(v) = unit(rng);

        Series s(n, 5);
        for (Index i = 0; i < n; ++i) {
            const double u = double(i) / double(n - 1);
            const double tau = u + c1 * std::sin(kPi * u) / kPi + c2 * std::sin(2.0 * kPi * u) / (2.0 * kPi);
            const Style& cs = class_style[int(skill)];
            Eigen::Matrix<double, 1, 5> row = template_at(tau) +
                                              spread * (style[p].amplitude * std::sin(2.0 * kPi * style[p].cycles * tau + style[p].phase) +
                                                        cs.amplitude * std::sin(2.0 * kPi * cs.cycles * tau + cs.phase));
            const double tremor = 0.5 * cp.noise * std::sin(2.0 * kPi * cp.tremor_hz * double(i) / kSampleRate + phase);
            for (int v = 0; v < 5; ++v) row(v) += tremor * tremor_dir(v) + cp.noise * gauss(rng);
            s.row(i) = row.cwiseProduct(Eigen::Map<const Eigen::Matrix<double, 1, 5>>(kChannelScale));
        }

        char name[16];
        std::snprintf(name, sizeof name, "p%02zu", p + 1);
        out.items[k] = {std::move(s), skill, name};
    }
    return out;
}

}  // namespace skilldtw
