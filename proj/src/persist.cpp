#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "spdelab/errors.hpp"
#include "spdelab/harness.hpp"

namespace spdelab {

namespace {

using json = nlohmann::json;

const char* const kQuantileKeys[] = {"q01", "q05", "q25", "q50", "q75", "q95", "q99"};

json jnum(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double jreal(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw IoError("summary: expected a number, got " + j.dump());
}

json stats_to_json(const FunctionalStats& f) {
    json j;
    j["name"] = f.name;
    j["time"] = jnum(f.time);
    j["count"] = f.stats.count;
    j["mean"] = jnum(f.stats.mean);
    j["variance"] = jnum(f.stats.variance);
    j["stderr"] = jnum(f.stats.stderr_of_mean);
    j["min"] = jnum(f.stats.min);
    j["max"] = jnum(f.stats.max);
    json q;
    for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) q[kQuantileKeys[i]] = jnum(f.stats.quantiles[i]);
    j["quantiles"] = q;
    return j;
}

FunctionalStats stats_from_json(const json& j) {
    FunctionalStats f;
    f.name = j.at("name").get<std::string>();
    f.time = jreal(j.at("time"));
    f.stats.count = j.at("count").get<std::size_t>();
    f.stats.mean = jreal(j.at("mean"));
    f.stats.variance = jreal(j.at("variance"));
    f.stats.stderr_of_mean = jreal(j.at("stderr"));
    f.stats.min = jreal(j.at("min"));
    f.stats.max = jreal(j.at("max"));
    for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) {
        f.stats.quantiles[i] = jreal(j.at("quantiles").at(kQuantileKeys[i]));
    }
    return f;
}

json check_to_json(const CheckReport& r) {
    json j;
    j["name"] = r.name;
    j["verdict"] = to_string(r.verdict);
    j["sample_size"] = r.sample_size;
    j["informational"] = r.informational;
    j["note"] = r.note;
    j["lines"] = json::array();
    for (const auto& l : r.lines) {
        j["lines"].push_back({{"label", l.label},
                              {"empirical", jnum(l.empirical)},
                              {"stderr", jnum(l.stderr_of_estimate)},
                              {"lower", jnum(l.lower)},
                              {"upper", jnum(l.upper)},
                              {"verdict", to_string(l.verdict)}});
    }
    return j;
}

CheckReport check_from_json(const json& j) {
    CheckReport r;
    r.name = j.at("name").get<std::string>();
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.sample_size = j.at("sample_size").get<std::size_t>();
    r.informational = j.at("informational").get<bool>();
    r.note = j.at("note").get<std::string>();
    for (const auto& l : j.at("lines")) {
        r.lines.push_back({l.at("label").get<std::string>(), jreal(l.at("empirical")), jreal(l.at("stderr")),
                           jreal(l.at("lower")), jreal(l.at("upper")),
                           verdict_from_string(l.at("verdict").get<std::string>())});
    }
    return r;
}

json table_to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (double v : row) r.push_back(jnum(v));
        rows.push_back(r);
    }
    return {{"name", t.name}, {"columns", t.columns}, {"rows", rows}};
}

Table table_from_json(const json& j) {
    Table t;
    t.name = j.at("name").get<std::string>();
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
        std::vector<double> r;
        for (const auto& v : row) r.push_back(jreal(v));
        t.rows.push_back(std::move(r));
    }
    return t;
}

std::string g17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_csv_real(const std::string& s, const std::filesystem::path& file) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw IoError(file.string() + ": malformed number '" + s + "'");
    return v;
}

void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + file.string());
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_file(const std::filesystem::path& file) {
    try {
        return json::parse(read_file(file));
    } catch (const json::exception& e) {
        throw IoError(file.string() + ": " + e.what());
    }
}

}  // namespace

json to_json(const EnsembleSummary& s) {
    json j;
    j["kind"] = s.kind;
    j["seed"] = s.seed;
    j["paths"] = s.paths;
    j["config"] = s.config;
    j["config_hash"] = s.config_hash;
    j["verdict"] = to_string(s.verdict);
    j["exploded"] = s.exploded;
    j["notes"] = s.notes;
    j["functionals"] = json::array();
    for (const auto& f : s.functionals) j["functionals"].push_back(stats_to_json(f));
    j["checks"] = json::array();
    for (const auto& c : s.checks) j["checks"].push_back(check_to_json(c));
    j["tables"] = json::array();
    for (const auto& t : s.tables) j["tables"].push_back(table_to_json(t));
    return j;
}

EnsembleSummary summary_from_json(const json& j) {
    EnsembleSummary s;
    try {
        s.kind = j.at("kind").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.paths = j.at("paths").get<std::size_t>();
        s.config = j.at("config");
        s.config_hash = j.at("config_hash").get<std::string>();
        s.verdict = verdict_from_string(j.at("verdict").get<std::string>());
        s.exploded = j.at("exploded").get<std::size_t>();
        s.notes = j.at("notes").get<std::vector<std::string>>();
        for (const auto& f : j.at("functionals")) s.functionals.push_back(stats_from_json(f));
        for (const auto& c : j.at("checks")) s.checks.push_back(check_from_json(c));
        for (const auto& t : j.at("tables")) s.tables.push_back(table_from_json(t));
    } catch (const json::exception& e) {
        throw IoError(std::string("summary: ") + e.what());
    }
    return s;
}

std::string summary_json_text(const EnsembleSummary& s) { return to_json(s).dump(2) + "\n"; }

void persist(const EnsembleSummary& s, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    write_file(dir / "summary.json", summary_json_text(s));
    write_file(dir / "config.echo.json", s.config.dump(2) + "\n");
    json rt = {{"wall_seconds", s.runtime.wall_seconds}, {"workers", s.runtime.workers}};
    write_file(dir / "runtime.json", rt.dump(2) + "\n");

    const auto csv = dir / "series.csv";
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + csv.string() + " for writing");
    out << "path_index,functional,time,value\n";
    for (const auto& r : s.series.rows) {
        out << r.path_index << ',' << s.series.functionals[r.functional] << ',' << g17(r.time) << ','
            << g17(r.value) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for " + csv.string());
}

EnsembleSummary load_summary(const std::filesystem::path& dir) {
    EnsembleSummary s = summary_from_json(parse_json_file(dir / "summary.json"));
    const json rt = parse_json_file(dir / "runtime.json");
    try {
        s.runtime.wall_seconds = rt.at("wall_seconds").get<double>();
        s.runtime.workers = rt.at("workers").get<int>();
    } catch (const json::exception& e) {
        throw IoError((dir / "runtime.json").string() + ": " + e.what());
    }

    const auto csv = dir / "series.csv";
    std::ifstream in(csv);
    if (!in) throw IoError("cannot open " + csv.string());
    std::string line;
    if (!std::getline(in, line) || line != "path_index,functional,time,value") {
        throw IoError(csv.string() + ": missing or unexpected header");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4) throw IoError(csv.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
        SeriesRows::Row r;
        try {
            r.path_index = std::stoull(cells[0]);
        } catch (const std::exception&) {
            throw IoError(csv.string() + ":" + std::to_string(lineno) + ": bad path index");
        }
        r.functional = s.series.functional_id(cells[1]);
        r.time = parse_csv_real(cells[2], csv);
        r.value = parse_csv_real(cells[3], csv);
        s.series.rows.push_back(r);
    }
    return s;
}

}  // namespace spdelab
