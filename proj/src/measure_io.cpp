#include "vsheet/measure_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vsheet/errors.hpp"

namespace vsheet {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex_digest(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::load_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::invalid_input, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t line) {
    field = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::load_error, "line " + std::to_string(line) + ": bad number '" +
                                        std::string(field) + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::array<double, 3>> parse_csv_triples(std::string_view text, std::string_view header) {
    std::vector<std::array<double, 3>> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (!header_seen && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != header) fail(ErrorKind::load_error, "expected header " + std::string(header));
            header_seen = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            fail(ErrorKind::load_error, "line " + std::to_string(line_no) + ": expected 3 fields");
        }
        rows.push_back({parse_number(line.substr(0, c1), line_no),
                        parse_number(line.substr(c1 + 1, c2 - c1 - 1), line_no),
                        parse_number(line.substr(c2 + 1), line_no)});
    }
    if (!header_seen) fail(ErrorKind::load_error, "empty CSV file");
    return rows;
}

std::string format_csv_triples(std::span<const std::array<double, 3>> rows, std::string_view header) {
    std::string out(header);
    out += '\n';
    for (const auto& r : rows) out += format_double(r[0]) + ',' + format_double(r[1]) + ',' + format_double(r[2]) + '\n';
    return out;
}

AtomicMeasure parse_atomic_csv(std::string_view text) {
    std::vector<Atom> atoms;
    for (const auto& r : parse_csv_triples(text, "x,y,weight")) atoms.push_back({{r[0], r[1]}, r[2]});
    try {
        return AtomicMeasure(std::move(atoms));
    } catch (const Error& e) {
        fail(ErrorKind::load_error, e.what());
    }
}

std::string format_atomic_csv(const AtomicMeasure& mu) {
    std::vector<std::array<double, 3>> rows;
    for (const auto& a : mu.atoms()) rows.push_back({a.position.x, a.position.y, a.weight});
    return format_csv_triples(rows, "x,y,weight");
}

json info_to_json(const MeasureInfo& info) {
    json j = json::object();
    if (!info.family.empty()) j["family"] = info.family;
    for (const auto& [k, v] : info.parameters) j[k] = v;
    return j;
}

MeasureInfo info_from_json(const json& j) {
    MeasureInfo info;
    if (!j.is_object()) return info;
    for (const auto& [k, v] : j.items()) {
        if (k == "family" && v.is_string()) {
            info.family = v.get<std::string>();
        } else if (v.is_number()) {
            info.parameters[k] = v.get<double>();
        }
    }
    return info;
}

namespace {

CurveBranch branch_from_json(const json& j) {
    if (!j.contains("vertices") || !j.contains("densities")) {
        fail(ErrorKind::load_error, "curve branch needs 'vertices' and 'densities'");
    }
    std::vector<PlanePoint> v;
    for (const auto& p : j.at("vertices")) {
        if (!p.is_array() || p.size() != 2) fail(ErrorKind::load_error, "vertices must be [x, y] pairs");
        v.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    auto d = j.at("densities").get<std::vector<double>>();
    try {
        if (j.contains("cumulative")) {
            return CurveBranch(std::move(v), std::move(d), j.at("cumulative").get<std::vector<double>>());
        }
        return CurveBranch::from_densities(std::move(v), std::move(d));
    } catch (const Error& e) {
        fail(ErrorKind::load_error, e.what());
    }
}

json branch_to_json(const CurveBranch& br) {
    json verts = json::array();
    for (const auto& p : br.vertices()) verts.push_back({p.x, p.y});
    return {{"vertices", std::move(verts)},
            {"densities", std::vector<double>(br.densities().begin(), br.densities().end())},
            {"cumulative", std::vector<double>(br.cumulative().begin(), br.cumulative().end())}};
}

}  // namespace

CurveMeasure curve_from_json(const json& j) {
    try {
        if (!j.is_object()) fail(ErrorKind::load_error, "curve measure must be a JSON object");
        std::vector<CurveBranch> branches;
        if (j.contains("branches")) {
            for (const auto& b : j.at("branches")) branches.push_back(branch_from_json(b));
        } else {
            branches.push_back(branch_from_json(j));
        }
        MeasureInfo info = j.contains("metadata") ? info_from_json(j.at("metadata")) : MeasureInfo{};
        return CurveMeasure(std::move(branches), std::move(info));
    } catch (const json::exception& e) {
        fail(ErrorKind::load_error, std::string("malformed curve JSON: ") + e.what());
    }
}

json curve_to_json(const CurveMeasure& mu) {
    json j;
    if (mu.branch_count() == 1) {
        j = branch_to_json(mu.branches()[0]);
    } else {
        json arr = json::array();
        for (const auto& br : mu.branches()) arr.push_back(branch_to_json(br));
        j["branches"] = std::move(arr);
    }
    j["metadata"] = info_to_json(mu.info());
    return j;
}

CurveMeasure parse_curve_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::load_error, std::string("invalid JSON: ") + e.what());
    }
    return curve_from_json(j);
}

std::string format_curve_json(const CurveMeasure& mu) { return curve_to_json(mu).dump() + "\n"; }

}  // namespace vsheet
