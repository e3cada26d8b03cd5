#include "skilldtw/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace skilldtw {

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_digest(const fs::path& path) { return text_digest(read_text(path)); }

std::string text_digest(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_recording_csv(const fs::path& path, const Series& series, const std::vector<std::string>& variables)
{
    if (Index(variables.size()) != series.cols())
        throw Error(Errc::DimensionMismatch, "variable names do not match the series width");
    std::string text = "t";
    for (const auto& v : variables) text += "," + v;
    text += "\n";
    for (Index i = 0; i < series.rows(); ++i) {
        text += format_double(double(i) * kSamplePeriodMs);
        for (Index v = 0; v < series.cols(); ++v) text += "," + format_double(series(i, v));
        text += "\n";
    }
    write_text(path, text);
}

namespace {

struct Cell {
    std::string_view text;
    std::size_t column;  // 1-based character column
};

std::vector<Cell> split_row(std::string_view line)
{
    std::vector<Cell> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
        cells.push_back({line.substr(start, end - start), start + 1});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Series read_recording_csv(const fs::path& path, std::vector<std::string>* variables)
{
    const std::string file = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(file, 0, 0, "cannot open file");
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(file, 1, 1, "missing header");
    ++line_no;
    const auto header = split_row(line);
    if (header.size() < 2 || trim(header[0].text) != "t")
        throw ParseError(file, 1, 1, "header must start with t followed by at least one variable");
    std::vector<std::string> names;
    for (std::size_t k = 1; k < header.size(); ++k) names.emplace_back(trim(header[k].text));
    const std::size_t width = header.size();

    std::vector<double> values;
    double last_t = -std::numeric_limits<double>::infinity();
    Index rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != width)
            throw ParseError(file, line_no, cells.size() > width ? cells[width].column : line.size() + 1,
                             "expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
        for (std::size_t k = 0; k < width; ++k) {
            const auto text = trim(cells[k].text);
            double x = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
            if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
                throw ParseError(file, line_no, cells[k].column, "not a number: '" + std::string(text) + "'");
            if (!std::isfinite(x)) throw ParseError(file, line_no, cells[k].column, "non-finite value");
            if (k == 0) {
                if (!(x > last_t)) throw ParseError(file, line_no, cells[k].column, "t is not increasing");
                last_t = x;
            } else {
                values.push_back(x);
            }
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(file, line_no + 1, 1, "no samples");
    if (variables) *variables = names;
    const Index v = Index(width - 1);
    return Eigen::Map<const Series>(values.data(), rows, v);
}

void write_dataset(const fs::path& dir, const Dataset& dataset)
{
    validate_dataset(dataset);
    nlohmann::ordered_json manifest;
    manifest["name"] = dataset.name;
    manifest["items"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < dataset.items.size(); ++k) {
        const auto& item = dataset.items[k];
        char file[64];
        std::snprintf(file, sizeof file, "series/%03zu.csv", k);
        write_recording_csv(dir / file, item.series, dataset.variables);
        manifest["items"].push_back(
            {{"file", file}, {"skill", std::string(1, to_char(item.skill))}, {"participant", item.participant}});
    }
    write_text(dir / "dataset.json", manifest.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& path)
{
    const fs::path manifest_path = fs::is_directory(path) ? path / "dataset.json" : path;
    const std::string file = manifest_path.string();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(file, 0, e.byte, e.what());
    } catch (const Error& e) {
        throw ParseError(file, 0, 0, e.what());
    }
    auto invalid = [&](const std::string& what) { throw Error(Errc::ValidationError, file + ": " + what); };
    if (!j.is_object() || !j.contains("items") || !j["items"].is_array()) invalid("manifest needs an items array");
    Dataset d;
    d.name = j.value("name", std::string());
    const fs::path base = manifest_path.parent_path();
    for (std::size_t k = 0; k < j["items"].size(); ++k) {
        const auto& it = j["items"][k];
        const std::string where = "item " + std::to_string(k);
        if (!it.is_object() || !it.contains("file") || !it.contains("skill") || !it.contains("participant"))
            invalid(where + " needs file, skill and participant");
        if (!it["file"].is_string() || !it["skill"].is_string() || !it["participant"].is_string())
            invalid(where + " fields must be strings");
        LabeledSeries ls;
        try {
            ls.skill = skill_from_string(it["skill"].get<std::string>());
        } catch (const Error& e) {
            invalid(where + ": " + e.what());
        }
        ls.participant = it["participant"].get<std::string>();
        if (ls.participant.empty()) invalid(where + " has an empty participant");
        std::vector<std::string> names;
        ls.series = read_recording_csv(base / it["file"].get<std::string>(), &names);
        if (k == 0)
            d.variables = names;
        else if (names != d.variables)
            invalid(where + " has different variables from item 0");
        d.items.push_back(std::move(ls));
    }
    if (d.items.empty()) invalid("manifest lists no items");
    return d;
}

void write_envelope_csv(const fs::path& path, const Envelope& env, const std::vector<std::string>& variables)
{
    if (Index(variables.size()) != env.upper.cols())
        throw Error(Errc::DimensionMismatch, "variable names do not match the envelope width");
    std::string text;
    for (std::size_t v = 0; v < variables.size(); ++v)
        text += (v ? "," : "") + variables[v] + "_upper," + variables[v] + "_lower";
    text += "\n";
    for (Index i = 0; i < env.length(); ++i) {
        for (Index v = 0; v < env.upper.cols(); ++v)
            text += (v ? "," : "") + format_double(env.upper(i, v)) + "," + format_double(env.lower(i, v));
        text += "\n";
    }
    write_text(path, text);
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m)
{
    std::string text;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) text += (j ? "," : "") + format_double(m(i, j));
        text += "\n";
    }
    write_text(path, text);
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path)
{
    const std::string file = path.string();
    std::istringstream in(read_text(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split_row(line)) {
            const auto text = trim(cell.text);
            double x = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
            if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(x))
                throw ParseError(file, line_no, cell.column, "not a finite number");
            row.push_back(x);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(file, line_no, 1, "ragged matrix row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(file, 1, 1, "empty matrix");
    Eigen::MatrixXd m(Index(rows.size()), Index(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(Index(i), Index(j)) = rows[i][j];
    return m;
}

}  // namespace skilldtw
