#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "indist/hom.hpp"
#include "indist/simulator.hpp"
#include "indist/stats.hpp"
#include "indist/types.hpp"

namespace indist::io {

struct ParseError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// CSV formats. Counts: header "n1,n2,n3,n4,n5,n6,count"; distributions use
// "probability" as the last column. Occupations are written in lexicographic
// order, UTF-8, LF line endings.
// ---------------------------------------------------------------------------

stats::CountsRecord read_counts_csv(std::istream& in);
stats::CountsRecord read_counts_csv_file(const std::string& path);
std::string write_counts_csv(const stats::CountsRecord& counts);

OutputDistribution read_distribution_csv(std::istream& in);
std::string write_distribution_csv(const OutputDistribution& dist);

/// Dip-scan points: header "dx,count" or "dx,count,sigma".
std::vector<hom::DipPoint> read_dip_csv(std::istream& in);
std::vector<hom::DipPoint> read_dip_csv_file(const std::string& path);

// ---------------------------------------------------------------------------
// Experiment configuration: one JSON document, schema_version 1. Modes are
// 1-based in the file and 0-based in memory.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    sim::InterferometerSpec interferometer = sim::six_mode_measured();
    sim::SourceSpec source;
    sim::DetectionSpec detection = sim::detection_measured();
    std::array<double, 3> visibilities = {1.0, 1.0, 1.0};  // V_AB, V_BC, V_CD
    std::optional<std::array<double, 3>> delays;           // relative delays per pair
    std::optional<std::array<double, 3>> widths;           // Gaussian widths per pair
};

ExperimentConfig read_config(std::istream& in);
ExperimentConfig read_config_file(const std::string& path);
std::string write_config(const ExperimentConfig& config);

/// The measured six-mode apparatus with its reference visibilities.
ExperimentConfig default_config();

std::string read_file(const std::string& path);       // ParseError when unreadable
void write_file(const std::string& path, const std::string& content);

}  // namespace indist::io
