#include "skilldtw/cli.hpp"

#include "skilldtw/classify.hpp"
#include "skilldtw/cluster.hpp"
#include "skilldtw/core.hpp"
#include "skilldtw/datagen.hpp"
#include "skilldtw/distance.hpp"
#include "skilldtw/dynamic.hpp"
#include "skilldtw/envelope.hpp"
#include "skilldtw/io.hpp"
#include "skilldtw/prototype.hpp"
#include "skilldtw/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace skilldtw {

namespace {

constexpr const char* kVersion = "skilldtw 0.1.0";

struct Common {
    std::string input;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string band = "none";
    std::string metric = "euclidean";
    std::string normalize = "series";
    bool record_timings = false;
};

struct ModelFlags {
    std::size_t clusters = 3;
    std::string linkage = "average";
    std::string cluster_method = "hierarchical";
    std::string proto = "dtwmp-d";
    double gamma = 1.0;
    double window_pct = 5.0;
};

// Collects artifacts and writes run_manifest.json next to them.
class Run {
public:
    Run(std::string command, const Common& common, const CLI::App& sub)
        : command_(std::move(command)), out_(common.output_dir), record_timings_(common.record_timings),
          start_(std::chrono::steady_clock::now())
    {
        seed_ = common.seed;
        for (const CLI::Option* opt : sub.get_options()) {
            const std::string name = opt->get_single_name();
            if (name.empty() || name == "help" || name == "jobs" || name == "output-dir" || name == "record-timings")
                continue;
            std::string value;
            if (opt->count() > 0) {
                for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
            } else {
                value = opt->get_default_str();
            }
            params_[name] = name == "normalize" ? common.normalize : value;
        }
    }

    const fs::path& dir() const { return out_; }

    void input(const fs::path& p)
    {
        if (fs::is_directory(p) || p.extension() == ".json") {
            const fs::path manifest = fs::is_directory(p) ? p / "dataset.json" : p;
            std::string joined = file_digest(manifest);
            const auto j = nlohmann::json::parse(read_text(manifest));
            for (const auto& it : j["items"]) joined += file_digest(manifest.parent_path() / it["file"].get<std::string>());
            inputs_[p.generic_string()] = text_digest(joined);
        } else {
            inputs_[p.generic_string()] = file_digest(p);
        }
    }

    void text(const std::string& rel, const std::string& content)
    {
        write_text(out_ / rel, content);
        outputs_.push_back(rel);
    }
    void json_file(const std::string& rel, const json& j) { text(rel, j.dump(2) + "\n"); }
    void declare(const std::string& rel) { outputs_.push_back(rel); }

    void finish()
    {
        json m;
        m["command"] = command_;
        m["version"] = kVersion;
        m["seed"] = seed_;
        m["parameters"] = params_;
        m["inputs"] = inputs_;
        std::sort(outputs_.begin(), outputs_.end());
        m["outputs"] = outputs_;
        if (record_timings_) {
            const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
            m["timings"] = {{"total_ms", ms}};
        }
        write_text(out_ / "run_manifest.json", m.dump(2) + "\n");
    }

private:
    std::string command_;
    fs::path out_;
    bool record_timings_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t seed_ = 0;
    json params_ = json::object();
    json inputs_ = json::object();
    std::vector<std::string> outputs_;
};

NormalizeMode mode_of(const std::string& s) { return s == "dataset" ? NormalizeMode::PerDataset : NormalizeMode::PerSeries; }

Dataset load(const Common& c, Run& run)
{
    if (c.input.empty()) throw CLI::RequiredError("--input");
    run.input(c.input);
    Dataset d = read_dataset(c.input);
    validate_dataset(d);
    if (c.normalize == "none") return d;
    for (const auto& item : d.items)
        for (Index v : normalize(item.series, NormalizeMode::PerSeries).constant_channels)
            if (c.normalize == "series")
                std::cerr << "warning: ConstantChannel: participant " << item.participant << " variable "
                          << d.variables[std::size_t(v)] << " left at zero\n";
    return normalize(d, mode_of(c.normalize));
}

PrototypeOptions proto_options(const Common& c, const ModelFlags& f)
{
    PrototypeOptions po;
    po.method = proto_method_from_string(f.proto);
    po.metric = metric_from_string(c.metric);
    po.gamma = f.gamma;
    po.jobs = c.jobs;
    return po;
}

DistanceMatrixOptions dm_options(const Common& c)
{
    DistanceMatrixOptions o;
    o.band = band_from_string(c.band);
    o.metric = metric_from_string(c.metric);
    o.jobs = c.jobs;
    return o;
}

Clustering cluster_dataset(const Dataset& d, const Common& c, const ModelFlags& f, const DistanceMatrix* precomputed = nullptr)
{
    if (f.clusters < 1 || f.clusters > d.size())
        throw Error(Errc::InvalidArgument, "--clusters must lie in [1, " + std::to_string(d.size()) + "]");
    if (f.clusters == 1) {
        Clustering one;
        one.assignment.assign(d.size(), 1);
        one.cluster_count = 1;
        one.method = "single";
        return one;
    }
    const DistanceMatrix dm = precomputed ? *precomputed : distance_matrix(d.series(), dm_options(c));
    if (f.cluster_method == "partitional") return partitional_cluster(dm, f.clusters, c.seed);
    return hierarchical_cluster(dm, linkage_from_string(f.linkage), f.clusters);
}

json composition_json(const std::vector<ClusterComposition>& report)
{
    json out = json::array();
    for (const auto& c : report)
        out.push_back({{"cluster", c.cluster}, {"size", c.size}, {"byParticipant", c.by_participant}, {"bySkill", c.by_skill}});
    return out;
}

json item_json(const Dataset& d, std::size_t i)
{
    return {{"index", i}, {"participant", d.items[i].participant}, {"skill", std::string(1, to_char(d.items[i].skill))}};
}

std::vector<std::string> item_labels(const Dataset& d)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < d.size(); ++i)
        out.push_back(std::to_string(i) + " " + d.items[i].participant + " " + to_char(d.items[i].skill));
    return out;
}

std::vector<Skill> parse_layout(const std::string& s)
{
    std::vector<Skill> out;
    for (char ch : s) {
        if (ch == ',' || ch == ' ') continue;
        out.push_back(skill_from_string(std::string(1, ch)));
    }
    return out;
}

// ---------------------------------------------------------------------------

struct SynthFlags {
    Index length = 500;
    std::size_t per_participant = 5;
    std::string layout = "NIEEINNN";
    std::string name = "synthetic";
};

void cmd_synth(const Common& c, const SynthFlags& s, Run& run)
{
    GeneratorConfig cfg;
    cfg.seed = c.seed;
    cfg.name = s.name;
    cfg.base_length = s.length;
    cfg.series_per_participant = s.per_participant;
    cfg.layout = parse_layout(s.layout);
    const Dataset d = synth_dataset(cfg);
    write_dataset(run.dir(), d);
    run.declare("dataset.json");
    for (std::size_t k = 0; k < d.size(); ++k) {
        char file[64];
        std::snprintf(file, sizeof file, "series/%03zu.csv", k);
        run.declare(file);
    }
    std::cout << "wrote " << d.size() << " series to " << run.dir().string() << "\n";
}

void cmd_ingest(const Common& c, bool split, Run& run)
{
    run.input(c.input);
    const Dataset d = read_dataset(c.input);
    validate_dataset(d);
    json report;
    report["name"] = d.name;
    report["items"] = d.size();
    report["variables"] = d.variables;
    Index lo = std::numeric_limits<Index>::max(), hi = 0;
    std::map<std::string, std::size_t> skills, participants;
    for (const auto& it : d.items) {
        lo = std::min(lo, it.series.rows());
        hi = std::max(hi, it.series.rows());
        ++skills[std::string(1, to_char(it.skill))];
        ++participants[it.participant];
    }
    report["minLength"] = lo;
    report["maxLength"] = hi;
    report["bySkill"] = skills;
    report["byParticipant"] = participants;
    if (split) {
        const Dataset e = epidural40_split(d);
        write_dataset(run.dir() / "epidural40", e);
        run.declare("epidural40/dataset.json");
        for (std::size_t k = 0; k < e.size(); ++k) {
            char file[64];
            std::snprintf(file, sizeof file, "epidural40/series/%03zu.csv", k);
            run.declare(file);
        }
        report["epidural40"] = e.size();
    }
    run.json_file("ingest_report.json", report);
    std::cout << "valid dataset: " << d.size() << " series, " << participants.size() << " participants\n";
}

void cmd_distmat(const Common& c, bool raw, Run& run)
{
    const Dataset d = load(c, run);
    auto opts = dm_options(c);
    if (raw) opts.normalization = DistanceNormalization::Raw;
    const DistanceMatrix dm = distance_matrix(d.series(), opts);
    write_matrix_csv(run.dir() / "distance_matrix.csv", dm.dense());
    run.declare("distance_matrix.csv");
    std::string labels = "index,participant,skill\n";
    for (std::size_t i = 0; i < d.size(); ++i)
        labels += std::to_string(i) + "," + d.items[i].participant + "," + to_char(d.items[i].skill) + "\n";
    run.text("labels.csv", labels);
    std::cout << "distance matrix " << d.size() << "x" << d.size() << " (" << dm.stored_entries() << " DTW evaluations)\n";
}

void cmd_cluster(const Common& c, const ModelFlags& f, const std::string& distances, Run& run)
{
    const Dataset d = load(c, run);
    DistanceMatrix dm;
    if (!distances.empty()) {
        run.input(distances);
        dm = DistanceMatrix::from_dense(read_matrix_csv(distances));
        if (dm.size() != d.size()) throw Error(Errc::InvalidArgument, "distance matrix does not match the dataset");
    } else {
        dm = distance_matrix(d.series(), dm_options(c));
    }
    if (f.clusters < 1 || f.clusters > d.size())
        throw Error(Errc::InvalidArgument, "--clusters must lie in [1, " + std::to_string(d.size()) + "]");
    const Clustering cl = f.cluster_method == "partitional" ? partitional_cluster(dm, f.clusters, c.seed)
                                                             : hierarchical_cluster(dm, linkage_from_string(f.linkage), f.clusters);
    write_matrix_csv(run.dir() / "distance_matrix.csv", dm.dense());
    run.declare("distance_matrix.csv");

    json j;
    j["method"] = cl.method;
    j["clusters"] = cl.cluster_count;
    j["assignment"] = cl.assignment;
    if (!cl.medoids.empty()) {
        j["medoids"] = cl.medoids;
        j["costTrace"] = cl.cost_trace;
    }
    try {
        json cvi = json::object();
        for (const auto& [name, v] : cvi_suite(dm, cl))
            cvi[name] = {{"value", v.value}, {"higherIsBetter", v.higher_is_better}};
        j["cvi"] = cvi;
    } catch (const Error& e) {
        j["cvi"] = nullptr;
        j["cviError"] = e.what();
    }
    const auto comp = composition_report(cl, d);
    j["composition"] = composition_json(comp);
    run.json_file("clustering.json", j);
    run.text("composition.svg", composition_svg(comp));
    if (!cl.dendrogram.empty()) {
        json dj = json::array();
        for (const auto& m : cl.dendrogram) dj.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
        run.json_file("dendrogram.json", dj);
        run.text("dendrogram.svg", dendrogram_svg(cl.dendrogram, d.size(), item_labels(d)));
    }
    std::cout << cl.method << ": " << cl.cluster_count << " clusters\n";
    for (const auto& cc : comp) std::cout << "  cluster " << cc.cluster << ": " << cc.size << " series\n";
}

void cmd_prototype(const Common& c, const ModelFlags& f, Run& run)
{
    const Dataset d = load(c, run);
    const Clustering cl = cluster_dataset(d, c, f);
    const PrototypeOptions po = proto_options(c, f);
    const auto groups = cl.members();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<Series> members;
        for (std::size_t i : groups[g]) members.push_back(d.items[i].series);
        const Prototype p = make_prototype(members, po);
        const std::string stem = "prototype_" + std::to_string(g + 1);
        write_recording_csv(run.dir() / (stem + ".csv"), p.series, d.variables);
        run.declare(stem + ".csv");
        json side;
        side["method"] = to_string(p.method);
        side["sourceCount"] = p.source_count;
        side["params"] = {{"metric", c.metric}, {"gamma", f.gamma}, {"normalize", c.normalize}};
        side["members"] = groups[g];
        side["length"] = p.series.rows();
        run.json_file(stem + ".json", side);
        std::cout << "cluster " << g + 1 << ": " << to_string(p.method) << " prototype of length " << p.series.rows()
                  << " from " << p.source_count << " series\n";
    }
}

struct ClassifyFlags {
    std::string method = "knn";
    std::size_t k = 1;
    std::string scheme = "loocv";
    std::size_t folds = 5;
    std::string label = "skill";
};

json report_json(const ClassifierReport& r, const Dataset& d)
{
    json j;
    j["scheme"] = r.scheme;
    j["method"] = r.method;
    j["accuracy"] = r.accuracy;
    j["labels"] = r.labels;
    json conf = json::array();
    for (Index i = 0; i < r.confusion.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < r.confusion.cols(); ++k) row.push_back(r.confusion(i, k));
        conf.push_back(row);
    }
    j["confusion"] = conf;
    json items = json::array();
    for (const auto& p : r.per_item) {
        json it = item_json(d, p.index);
        it["truth"] = p.truth;
        it["predicted"] = p.predicted;
        it["fold"] = p.fold;
        items.push_back(it);
    }
    j["items"] = items;
    return j;
}

void cmd_classify(const Common& c, const ModelFlags& f, const ClassifyFlags& k, bool participant, Run& run,
                  const std::string& out_name)
{
    const Dataset d = load(c, run);
    ClassifierMethod method;
    method.kind = k.method == "centroid" ? ClassifierMethod::Kind::Centroid : ClassifierMethod::Kind::Knn;
    method.k = k.k;
    method.prototype = proto_options(c, f);
    Scheme scheme;
    scheme.kind = k.scheme == "kfold" ? Scheme::Kind::KFold : Scheme::Kind::Loocv;
    scheme.folds = k.folds;
    scheme.seed = c.seed;
    CrossValidationOptions cv;
    cv.field = (participant || k.label == "participant") ? LabelField::Participant : LabelField::Skill;
    cv.distance = {band_from_string(c.band), metric_from_string(c.metric)};
    cv.jobs = c.jobs;
    const ClassifierReport r = cross_validate(d, method, scheme, cv);
    run.json_file(out_name, report_json(r, d));
    std::cout << r.method << " " << r.scheme << " accuracy " << r.accuracy << "\n";
}

struct EnvelopeFlags {
    std::string kind = "summative";
    long item = -1;
};

void cmd_envelope(const Common& c, const ModelFlags& f, const EnvelopeFlags& e, Run& run)
{
    const Dataset d = load(c, run);
    auto sidecar = [](const Envelope& env) { return json{{"window", env.window}, {"sourceCount", env.source_count}}; };
    if (e.kind == "keogh") {
        std::vector<std::size_t> which;
        if (e.item >= 0) {
            if (std::size_t(e.item) >= d.size()) throw Error(Errc::InvalidArgument, "--item out of range");
            which.push_back(std::size_t(e.item));
        } else {
            for (std::size_t i = 0; i < d.size(); ++i) which.push_back(i);
        }
        for (std::size_t i : which) {
            const Series& s = d.items[i].series;
            const Envelope env = keogh_envelope(s, window_from_percent(s.rows(), f.window_pct));
            const std::string stem = "envelope_item_" + std::to_string(i);
            write_envelope_csv(run.dir() / (stem + ".csv"), env, d.variables);
            run.declare(stem + ".csv");
            run.json_file(stem + ".json", sidecar(env));
            run.text(stem + ".svg", envelope_svg(env, {s}, d.variables));
        }
        std::cout << "wrote " << which.size() << " keogh envelopes\n";
        return;
    }
    const Clustering cl = cluster_dataset(d, c, f);
    ModelOptions mo;
    mo.prototype = proto_options(c, f);
    mo.window_pct = f.window_pct;
    const Model model = build_model(d, cl, mo);
    for (std::size_t g = 0; g < model.clusters.size(); ++g) {
        const auto& cm = model.clusters[g];
        const std::string stem = "envelope_" + std::to_string(g + 1);
        write_envelope_csv(run.dir() / (stem + ".csv"), cm.envelope, d.variables);
        run.declare(stem + ".csv");
        json side = sidecar(cm.envelope);
        side["contributors"] = cm.contributors;
        side["prototype"] = to_string(cm.prototype.method);
        run.json_file(stem + ".json", side);
        std::vector<Series> overlays{cm.prototype.series};
        for (std::size_t i : cm.contributors) {
            const Series& s = d.items[i].series;
            overlays.push_back(s.rows() == cm.envelope.length() ? s : resample(s, cm.envelope.length()));
        }
        run.text(stem + ".svg", envelope_svg(cm.envelope, overlays, d.variables));
        std::cout << "cluster " << g + 1 << ": summative envelope from " << cm.envelope.source_count
                  << " series, window " << cm.envelope.window << "\n";
    }
}

Model fit_model(const Dataset& d, const Common& c, const ModelFlags& f)
{
    const Clustering cl = cluster_dataset(d, c, f);
    ModelOptions mo;
    mo.prototype = proto_options(c, f);
    mo.window_pct = f.window_pct;
    return build_model(d, cl, mo);
}

Series load_recording(const std::string& path, const Common& c, const Dataset& raw, Run& run)
{
    run.input(path);
    std::vector<std::string> names;
    const Series s = read_recording_csv(path, &names);
    if (names != raw.variables) throw Error(Errc::ValidationError, path + ": variables differ from the training set");
    if (c.normalize == "none") return s;
    if (c.normalize == "series") return normalize(s, NormalizeMode::PerSeries).series;
    return normalize(s, NormalizeMode::PerDataset, channel_stats(raw)).series;
}

json score_json(const RecordingScore& r)
{
    return {{"cluster", r.cluster + 1},
            {"score", r.score},
            {"proportionOutside", r.proportion_outside},
            {"prototypeDistance", r.prototype_distance}};
}

void cmd_score(const Common& c, const ModelFlags& f, long cluster, const std::string& recording, Run& run)
{
    const Dataset d = load(c, run);
    const Model model = fit_model(d, c, f);
    const Metric metric = metric_from_string(c.metric);
    if (!recording.empty()) {
        const Dataset raw = read_dataset(c.input);
        const Series s = load_recording(recording, c, raw, run);
        const RecordingScore r = score_recording(model, s);
        run.json_file("recording_score.json", score_json(r));
        std::cout << "recording: cluster " << r.cluster + 1 << ", score " << r.score << ", outside "
                  << r.proportion_outside << "\n";
        return;
    }
    if (cluster > long(model.clusters.size())) throw Error(Errc::InvalidArgument, "--cluster out of range");
    json out = json::array();
    for (std::size_t g = 0; g < model.clusters.size(); ++g) {
        if (cluster > 0 && std::size_t(cluster) != g + 1) continue;
        const auto& cm = model.clusters[g];
        const auto ranking = rank_members(cm, d, metric, c.jobs);
        json rj = json::array();
        for (const auto& m : ranking) {
            json it = item_json(d, m.index);
            it["distance"] = m.distance;
            it["normalized"] = m.normalized;
            it["score"] = m.score;
            rj.push_back(it);
        }
        json cj;
        cj["cluster"] = g + 1;
        cj["prototypeLength"] = cm.prototype.series.rows();
        cj["best"] = ranking.front().index;
        cj["worst"] = ranking.back().index;
        cj["ranking"] = rj;
        const auto export_ccm = [&](const char* tag, std::size_t idx) {
            const Series& s = d.items[idx].series;
            if (s.rows() > kFullMatrixLimit || cm.prototype.series.rows() > kFullMatrixLimit) return;
            const auto w = dtw(cm.prototype.series, s, ConstraintBand::none(), metric);
            const std::string stem = "ccm_" + std::to_string(g + 1) + "_" + tag;
            write_matrix_csv(run.dir() / (stem + ".csv"), w.ccm);
            run.declare(stem + ".csv");
            run.text(stem + ".svg", heatmap_svg(w.ccm, w.path));
        };
        export_ccm("best", ranking.front().index);
        export_ccm("worst", ranking.back().index);
        out.push_back(cj);
        std::cout << "cluster " << g + 1 << ": best item " << ranking.front().index << " (" << ranking.front().distance
                  << "), worst item " << ranking.back().index << " (" << ranking.back().distance << ")\n";
    }
    run.json_file("score.json", json{{"clusters", out}});
}

void cmd_stream(const Common& c, const ModelFlags& f, const std::string& recording, const StreamOptions& so, Run& run)
{
    if (c.normalize == "series")
        throw CLI::ValidationError("--normalize", "stream needs dataset or none normalization (no whole-series stats live)");
    if (recording.empty()) throw CLI::RequiredError("--recording");
    const Dataset d = load(c, run);
    const Dataset raw = read_dataset(c.input);
    const Model model = fit_model(d, c, f);
    const Series s = load_recording(recording, c, raw, run);
    SessionState state = start_session(model);
    for (Index i = 0; i < s.rows(); ++i) ingest(state, s.row(i), model, so);
    const RecordingScore r = finish(state, model, so);
    std::string lines;
    for (const auto& e : state.events) lines += event_json(e) + "\n";
    run.text("events.jsonl", lines);
    json summary = score_json(r);
    summary["samples"] = s.rows();
    summary["runningScore"] = state.score;
    summary["phase"] = state.phase;
    summary["pace"] = state.pace;
    json alarms = json::array();
    for (const auto& a : state.alarms) alarms.push_back({{"index", a.index}, {"tick", a.tick}, {"exceedance", a.exceedance}});
    summary["alarms"] = alarms;
    run.json_file("stream_summary.json", summary);
    std::cout << "streamed " << s.rows() << " samples: final score " << r.score << ", " << state.alarms.size()
              << " alarms\n";
}

void add_common(CLI::App* sub, Common& c, bool input = true)
{
    if (input) sub->add_option("--input", c.input, "dataset directory or dataset.json")->required();
    sub->add_option("--output-dir", c.output_dir, "directory for artifacts");
    sub->add_option("--seed", c.seed, "seed for every random choice");
    sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--record-timings", c.record_timings, "store wall-clock timings in run_manifest.json");
}

void add_distance(CLI::App* sub, Common& c)
{
    sub->add_option("--band", c.band, "none | itakura[:S] | sc:R")->check(CLI::Validator(
        [](std::string& s) {
            try {
                band_from_string(s);
            } catch (const Error& e) {
                return std::string(e.what());
            }
            return std::string();
        },
        "BAND"));
    sub->add_option("--metric", c.metric, "local cost")
        ->check(CLI::IsMember({"euclidean", "squared-euclidean", "sqeuclidean", "manhattan"}));
    sub->add_option("--normalize", c.normalize, "z-score mode")->check(CLI::IsMember({"none", "series", "dataset"}));
}

void add_model(CLI::App* sub, ModelFlags& f, bool with_envelope)
{
    sub->add_option("--clusters", f.clusters, "number of clusters")->check(CLI::PositiveNumber);
    sub->add_option("--linkage", f.linkage, "hierarchical linkage")->check(CLI::IsMember({"single", "complete", "average"}));
    sub->add_option("--cluster-method", f.cluster_method, "clustering")->check(CLI::IsMember({"hierarchical", "partitional"}));
    sub->add_option("--proto", f.proto, "prototype method")
        ->check(CLI::IsMember({"mean", "pam", "dba", "softdtw", "dtwmp-d", "dtwmp-i"}));
    sub->add_option("--gamma", f.gamma, "SoftDTW smoothing")->check(CLI::PositiveNumber);
    if (with_envelope) sub->add_option("--window-pct", f.window_pct, "envelope radius in percent of length")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"Elastic time-series skill assessment: DTW, prototypes, clustering, envelopes and live scoring"};
    app.name("skilldtw");
    app.set_version_flag("--version", kVersion);
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    Common c;
    ModelFlags f;
    SynthFlags sf;
    ClassifyFlags kf;
    EnvelopeFlags ef;
    StreamOptions so;
    bool split = false, raw = false;
    std::string distances, recording;
    long score_cluster = 0;

    auto* synth = app.add_subcommand("synth", "generate a synthetic skill-stratified dataset");
    add_common(synth, c, false);
    synth->add_option("--length", sf.length, "base series length")->check(CLI::Range(10, 100000));
    synth->add_option("--per-participant", sf.per_participant, "series per participant")->check(CLI::PositiveNumber);
    synth->add_option("--layout", sf.layout, "participant skills in order, e.g. NIEEINNN");
    synth->add_option("--name", sf.name, "dataset name");

    auto* ingest_cmd = app.add_subcommand("ingest", "validate a dataset");
    add_common(ingest_cmd, c);
    ingest_cmd->add_flag("--epidural40", split, "also write the 8 x 5 N,I,E,E,I,N,N,N subset");

    auto* distmat = app.add_subcommand("distmat", "pairwise DTW distance matrix");
    add_common(distmat, c);
    add_distance(distmat, c);
    distmat->add_flag("--raw", raw, "cumulative cost instead of path-length normalized");

    auto* cluster = app.add_subcommand("cluster", "hierarchical or partitional clustering with validity indices");
    add_common(cluster, c);
    add_distance(cluster, c);
    add_model(cluster, f, false);
    cluster->add_option("--distances", distances, "precomputed distance_matrix.csv");

    auto* proto = app.add_subcommand("prototype", "prototype per cluster");
    add_common(proto, c);
    add_distance(proto, c);
    add_model(proto, f, false);

    auto add_classify = [&](CLI::App* sub, bool with_label) {
        add_common(sub, c);
        add_distance(sub, c);
        add_model(sub, f, false);
        sub->add_option("--method", kf.method, "classifier")->check(CLI::IsMember({"knn", "centroid"}));
        sub->add_option("--k", kf.k, "neighbors")->check(CLI::PositiveNumber);
        sub->add_option("--scheme", kf.scheme, "validation scheme")->check(CLI::IsMember({"loocv", "kfold"}));
        sub->add_option("--folds", kf.folds, "k-fold folds")->check(CLI::Range(2, 1000000));
        if (with_label) sub->add_option("--label", kf.label, "label field")->check(CLI::IsMember({"skill", "participant"}));
    };
    auto* classify = app.add_subcommand("classify", "kNN or nearest-centroid cross-validation");
    add_classify(classify, true);
    auto* identify = app.add_subcommand("identify", "participant identification by cross-validation");
    add_classify(identify, false);

    auto* envelope = app.add_subcommand("envelope", "keogh or summative envelopes");
    add_common(envelope, c);
    add_distance(envelope, c);
    add_model(envelope, f, true);
    envelope->add_option("--kind", ef.kind, "envelope kind")->check(CLI::IsMember({"keogh", "summative"}));
    envelope->add_option("--item", ef.item, "item for a keogh envelope (default all)");

    auto* score = app.add_subcommand("score", "best/worst ranking per cluster or score a new recording");
    add_common(score, c);
    add_distance(score, c);
    add_model(score, f, true);
    score->add_option("--cluster", score_cluster, "only this cluster (1-based)")->check(CLI::NonNegativeNumber);
    score->add_option("--recording", recording, "recording CSV to score against the model");

    auto* stream = app.add_subcommand("stream", "replay a recording through live scoring");
    add_common(stream, c);
    add_distance(stream, c);
    add_model(stream, f, true);
    stream->add_option("--recording", recording, "recording CSV to replay")->required();
    stream->add_option("--cadence", so.cadence, "samples between evaluations")->check(CLI::PositiveNumber);
    stream->add_option("--alarm-threshold", so.alarm_threshold, "per-step exceedance that counts toward an alarm")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        std::cerr << "\n" << app.help();
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    // Live scoring normalizes with training-set statistics unless told otherwise.
    if ((name == "stream" || (name == "score" && !recording.empty())) && sub->get_option("--normalize")->count() == 0)
        c.normalize = "dataset";
    try {
        Run run(name, c, *sub);
        if (name == "synth") cmd_synth(c, sf, run);
        else if (name == "ingest") cmd_ingest(c, split, run);
        else if (name == "distmat") cmd_distmat(c, raw, run);
        else if (name == "cluster") cmd_cluster(c, f, distances, run);
        else if (name == "prototype") cmd_prototype(c, f, run);
        else if (name == "classify") cmd_classify(c, f, kf, false, run, "classification.json");
        else if (name == "identify") cmd_classify(c, f, kf, true, run, "identify.json");
        else if (name == "envelope") cmd_envelope(c, f, ef, run);
        else if (name == "score") cmd_score(c, f, score_cluster, recording, run);
        else if (name == "stream") cmd_stream(c, f, recording, so, run);
        run.finish();
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << sub->help();
        return 1;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace skilldtw
