#include "indist/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace indist::io {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

ModeOccupation occupation_from_fields(const std::vector<std::string>& fields, size_t modes,
                                      int line_no) {
    std::vector<int> occ(modes);
    for (size_t i = 0; i < modes; ++i) {
        try {
            occ[i] = std::stoi(fields[i]);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": bad occupation entry '" +
                             fields[i] + "'");
        }
        if (occ[i] < 0)
            throw ParseError("line " + std::to_string(line_no) + ": negative occupation");
    }
    return ModeOccupation(std::move(occ));
}

constexpr const char* kCountsHeader = "n1,n2,n3,n4,n5,n6,count";
constexpr const char* kDistHeader = "n1,n2,n3,n4,n5,n6,probability";

}  // namespace

stats::CountsRecord read_counts_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty counts file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCountsHeader)
        throw ParseError("counts header must be '" + std::string(kCountsHeader) + "'");
    stats::CountsRecord counts;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw ParseError("line " + std::to_string(line_no) + ": expected 7 fields");
        const ModeOccupation occ = occupation_from_fields(fields, 6, line_no);
        long long count;
        try {
            count = std::stoll(fields[6]);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": bad count");
        }
        if (count < 0) throw ParseError("line " + std::to_string(line_no) + ": negative count");
        counts.entries[occ] += count;
    }
    if (counts.entries.empty()) throw ParseError("counts file holds no rows");
    return counts;
}

stats::CountsRecord read_counts_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open counts file: " + path);
    return read_counts_csv(in);
}

std::string write_counts_csv(const stats::CountsRecord& counts) {
    std::ostringstream os;
    os << kCountsHeader << '\n';
    for (const auto& [occ, count] : counts.entries) {
        for (int v : occ.n) os << v << ',';
        os << count << '\n';
    }
    return os.str();
}

OutputDistribution read_distribution_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty distribution file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDistHeader)
        throw ParseError("distribution header must be '" + std::string(kDistHeader) + "'");
    OutputDistribution dist;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw ParseError("line " + std::to_string(line_no) + ": expected 7 fields");
        const ModeOccupation occ = occupation_from_fields(fields, 6, line_no);
        try {
            dist.p[occ] = std::stod(fields[6]);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": bad probability");
        }
    }
    return dist;
}

std::string write_distribution_csv(const OutputDistribution& dist) {
    std::ostringstream os;
    os << kDistHeader << '\n';
    for (const auto& [occ, prob] : dist.p) {
        for (int v : occ.n) os << v << ',';
        os << format_double(prob) << '\n';
    }
    return os.str();
}

std::vector<hom::DipPoint> read_dip_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty dip file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool with_sigma = line == "dx,count,sigma";
    if (!with_sigma && line != "dx,count")
        throw ParseError("dip header must be 'dx,count' or 'dx,count,sigma'");
    std::vector<hom::DipPoint> points;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != (with_sigma ? 3u : 2u))
            throw ParseError("line " + std::to_string(line_no) + ": wrong field count");
        hom::DipPoint p;
        try {
            p.dx = std::stod(fields[0]);
            p.count = std::stod(fields[1]);
            if (with_sigma) p.sigma = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": bad number");
        }
        points.push_back(p);
    }
    return points;
}

std::vector<hom::DipPoint> read_dip_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dip file: " + path);
    return read_dip_csv(in);
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

sim::BeamSplitter splitter_from_json(const json& j) {
    sim::BeamSplitter bs;
    const auto& modes = j.at("modes");
    if (!modes.is_array() || modes.size() != 2)
        throw ParseError("beam splitter 'modes' must be a pair");
    bs.mode_a = modes[0].get<int>() - 1;
    bs.mode_b = modes[1].get<int>() - 1;
    bs.reflectivity = j.at("reflectivity").get<double>();
    return bs;
}

json splitter_to_json(const sim::BeamSplitter& bs) {
    return json{{"modes", {bs.mode_a + 1, bs.mode_b + 1}}, {"reflectivity", bs.reflectivity}};
}

}  // namespace

ExperimentConfig read_config(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != 1)
            throw ParseError("unsupported schema_version (expected 1)");
        ExperimentConfig cfg;

        const json& itf = j.at("interferometer");
        cfg.interferometer.mode_count = itf.at("mode_count").get<int>();
        cfg.interferometer.layer1.clear();
        cfg.interferometer.layer2.clear();
        for (const auto& bs : itf.at("layer1")) cfg.interferometer.layer1.push_back(splitter_from_json(bs));
        for (const auto& bs : itf.at("layer2")) cfg.interferometer.layer2.push_back(splitter_from_json(bs));
        cfg.interferometer.mode_loss = itf.value("mode_loss", std::vector<double>{});
        cfg.interferometer.validate();

        const json& src = j.at("source");
        cfg.source.g = src.at("g").get<double>();
        if (!(cfg.source.g > 0.0)) throw ParseError("source g must be positive");
        cfg.source.injected_modes.clear();
        for (const auto& [label, mode] : src.at("injected_modes").items()) {
            if (label.size() != 1) throw ParseError("photon labels are single characters");
            cfg.source.injected_modes[label[0]] = mode.get<int>() - 1;
        }
        cfg.source.include_six_photon_terms = src.value("include_six_photon_terms", true);

        const json& det = j.at("detection");
        cfg.detection.mmfbs_reflectivity = det.at("mmfbs_reflectivity").get<std::vector<double>>();
        cfg.detection.eta_det = det.at("eta_det").get<double>();
        if (!(cfg.detection.eta_det >= 0.0 && cfg.detection.eta_det <= 1.0))
            throw ParseError("eta_det outside [0, 1]");
        if (static_cast<int>(cfg.detection.mmfbs_reflectivity.size()) !=
            cfg.interferometer.mode_count)
            throw ParseError("mmfbs_reflectivity length must match mode_count");
        for (double rho : cfg.detection.mmfbs_reflectivity)
            if (!(rho >= 0.0 && rho <= 1.0)) throw ParseError("mmfbs reflectivity outside [0, 1]");

        const json& vis = j.at("visibilities");
        cfg.visibilities = {vis.at("AB").get<double>(), vis.at("BC").get<double>(),
                            vis.at("CD").get<double>()};
        for (double v : cfg.visibilities)
            if (!(v >= 0.0 && v <= 1.0)) throw ParseError("visibility outside [0, 1]");

        if (j.contains("delays")) {
            const json& d = j.at("delays");
            cfg.delays = std::array<double, 3>{d.at("dx")[0].get<double>(),
                                               d.at("dx")[1].get<double>(),
                                               d.at("dx")[2].get<double>()};
            cfg.widths = std::array<double, 3>{d.at("widths")[0].get<double>(),
                                               d.at("widths")[1].get<double>(),
                                               d.at("widths")[2].get<double>()};
            for (double w : *cfg.widths)
                if (!(w > 0.0)) throw ParseError("delay widths must be positive");
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ParseError(std::string("config schema error: ") + e.what());
    }
}

ExperimentConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    return read_config(in);
}

std::string write_config(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    json itf;
    itf["mode_count"] = cfg.interferometer.mode_count;
    itf["layer1"] = json::array();
    for (const auto& bs : cfg.interferometer.layer1) itf["layer1"].push_back(splitter_to_json(bs));
    itf["layer2"] = json::array();
    for (const auto& bs : cfg.interferometer.layer2) itf["layer2"].push_back(splitter_to_json(bs));
    itf["mode_loss"] = cfg.interferometer.mode_loss;
    j["interferometer"] = itf;

    json src;
    src["g"] = cfg.source.g;
    json modes;
    for (const auto& [label, mode] : cfg.source.injected_modes)
        modes[std::string(1, label)] = mode + 1;
    src["injected_modes"] = modes;
    src["include_six_photon_terms"] = cfg.source.include_six_photon_terms;
    j["source"] = src;

    j["detection"] = {{"mmfbs_reflectivity", cfg.detection.mmfbs_reflectivity},
                      {"eta_det", cfg.detection.eta_det}};
    j["visibilities"] = {{"AB", cfg.visibilities[0]},
                         {"BC", cfg.visibilities[1]},
                         {"CD", cfg.visibilities[2]}};
    if (cfg.delays && cfg.widths)
        j["delays"] = {{"dx", *cfg.delays}, {"widths", *cfg.widths}};
    return j.dump(2) + "\n";
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.visibilities = {0.944, 0.835, 0.915};
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

}  // namespace indist::io
